//! Coherence contrast decay: C(T) = exp(-(T/T2)^p), T2 at 1/e contrast.

use crate::gn::{fit_least_squares, GnOptions, GnOutcome};
use crate::result::{
    check_series, FitError, FitFlag, FitResult, ParamEstimate, FIT_REPORT_VERSION,
};
use crate::DecayShape;

fn run_shape(t: &[f64], c: &[f64], w: &[f64], rate0: f64, shape: DecayShape) -> GnOutcome {
    let span = t[t.len() - 1] - t[0];
    fit_least_squares(
        &move |p: &[f64], x: f64| (-(p[0].abs() * x).powf(shape.power())).exp(),
        t,
        c,
        w,
        &[rate0],
        &[1.0 / span],
        &GnOptions::default(),
    )
}

/// Fit the contrast decay time. `shape` pins p; `None` compares residuals.
pub fn fit_gaussian_decay(
    t: &[f64],
    contrast: &[f64],
    shape: Option<DecayShape>,
) -> Result<FitResult, FitError> {
    check_series(t, contrast, 4, true)?;
    let w = vec![1.0; t.len()];

    // Initial rate from the first 1/e crossing.
    let inv_e = (-1.0f64).exp();
    let mut rate0 = 0.1 / (t[t.len() - 1] - t[0]).max(1e-12);
    for k in 1..t.len() {
        if contrast[k] <= inv_e && contrast[k - 1] > inv_e {
            let frac = (contrast[k - 1] - inv_e) / (contrast[k - 1] - contrast[k]);
            let t_cross = t[k - 1] + frac * (t[k] - t[k - 1]);
            if t_cross > 0.0 {
                rate0 = 1.0 / t_cross;
            }
            break;
        }
    }

    let (shape_used, outcome) = match shape {
        Some(s) => (s, run_shape(t, contrast, &w, rate0, s)),
        None => {
            let exp = run_shape(t, contrast, &w, rate0, DecayShape::Exponential);
            let gauss = run_shape(t, contrast, &w, rate0, DecayShape::Gaussian);
            if gauss.weighted_rss <= exp.weighted_rss {
                (DecayShape::Gaussian, gauss)
            } else {
                (DecayShape::Exponential, exp)
            }
        }
    };

    let rate = outcome.params[0].abs();
    let span = t[t.len() - 1] - t[0];
    let mut flags = Vec::new();
    if rate * span < 1e-3 {
        flags.push(FitFlag::DecayUnidentifiable);
    }

    let rate_err = if outcome.converged {
        let v = outcome.covariance[0][0];
        (v.is_finite() && v >= 0.0).then(|| v.sqrt())
    } else {
        None
    };
    let mut params = vec![
        ParamEstimate {
            name: "decay_rate_per_s".into(),
            value: rate,
            std_error: rate_err,
        },
        ParamEstimate {
            name: "shape_p".into(),
            value: shape_used.power(),
            std_error: None,
        },
    ];
    if rate > 0.0 && !flags.contains(&FitFlag::DecayUnidentifiable) {
        params.push(ParamEstimate {
            name: "t2_star_s".into(),
            value: 1.0 / rate,
            std_error: rate_err.map(|e| e / (rate * rate)),
        });
    }

    Ok(FitResult {
        format_version: FIT_REPORT_VERSION,
        model: "gaussian_decay".into(),
        params,
        residual_rms: outcome.residual_rms,
        converged: outcome.converged,
        iterations: outcome.iterations,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoted_t2_roundtrip() {
        // exp(-(T / 4.6 ms)^2)
        let t2 = 4.6e-3;
        let t: Vec<f64> = (0..40).map(|k| k as f64 * 9.0e-3 / 39.0).collect();
        let c: Vec<f64> = t.iter().map(|&x| (-(x / t2) * (x / t2)).exp()).collect();
        let fit = fit_gaussian_decay(&t, &c, Some(DecayShape::Gaussian)).unwrap();
        assert!(fit.converged);
        assert!((fit.value("t2_star_s").unwrap() - t2).abs() / t2 < 1e-6);
    }

    #[test]
    fn shape_selection() {
        let t: Vec<f64> = (0..40).map(|k| k as f64 * 0.25e-3).collect();
        let gauss: Vec<f64> = t.iter().map(|&x| (-(x / 3e-3).powi(2)).exp()).collect();
        let exp: Vec<f64> = t.iter().map(|&x| (-(x / 3e-3)).exp()).collect();
        assert_eq!(
            fit_gaussian_decay(&t, &gauss, None)
                .unwrap()
                .value("shape_p"),
            Some(2.0)
        );
        assert_eq!(
            fit_gaussian_decay(&t, &exp, None).unwrap().value("shape_p"),
            Some(1.0)
        );
    }

    #[test]
    fn flat_contrast_is_unidentifiable() {
        let t: Vec<f64> = (0..10).map(|k| k as f64 * 1e-3).collect();
        let c = vec![1.0; 10];
        let fit = fit_gaussian_decay(&t, &c, Some(DecayShape::Gaussian)).unwrap();
        assert!(fit.has_flag(FitFlag::DecayUnidentifiable));
        assert!(fit.value("t2_star_s").is_none());
    }
}
