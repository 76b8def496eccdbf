//! Benchmarking survival-decay fit:
//! F(l) = 1/2 + 1/2 (1 - d_if) (1 - 2 eps_g)^l.

use crate::gn::{fit_least_squares, GnOptions};
use crate::result::{
    check_series, FitError, FitFlag, FitResult, ParamEstimate, FIT_REPORT_VERSION,
};

/// The decay is fitted in the (a, b) parameterization F = 1/2 + a b^l with
/// a = (1 - d_if)/2 and b = 1 - 2 eps_g, then converted exactly. Fitting the
/// single decay base b keeps the problem well conditioned at eps_g near 0.
pub fn fit_rb(
    lengths: &[f64],
    fbar: &[f64],
    weights: Option<&[f64]>,
) -> Result<FitResult, FitError> {
    check_series(lengths, fbar, 3, false)?;
    let mut distinct: Vec<f64> = lengths.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| a == b);
    if distinct.len() < 3 {
        return Err(FitError::TooFewLengths {
            min: 3,
            got: distinct.len(),
        });
    }
    let w: Vec<f64> = match weights {
        Some(w) => {
            if w.len() != lengths.len() {
                return Err(FitError::LengthMismatch {
                    t: lengths.len(),
                    y: w.len(),
                });
            }
            w.to_vec()
        }
        None => vec![1.0; lengths.len()],
    };

    // Starting values: intercept from the shortest length, base from a
    // log-linear regression of (F - 1/2) where positive.
    let first = lengths
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let a0 = (fbar[first] - 0.5).clamp(1e-6, 0.5);
    let usable: Vec<(f64, f64)> = lengths
        .iter()
        .zip(fbar)
        .filter(|(_, &f)| f - 0.5 > 1e-9)
        .map(|(&l, &f)| (l, (f - 0.5).ln()))
        .collect();
    let b0 = if usable.len() >= 2 {
        let n = usable.len() as f64;
        let sx: f64 = usable.iter().map(|p| p.0).sum();
        let sy: f64 = usable.iter().map(|p| p.1).sum();
        let sxx: f64 = usable.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = usable.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() > 1e-12 {
            ((n * sxy - sx * sy) / denom).exp().clamp(1e-6, 1.0)
        } else {
            1.0
        }
    } else {
        1.0
    };

    let model = |p: &[f64], l: f64| 0.5 + p[0] * p[1].max(1e-12).powf(l);
    let outcome = fit_least_squares(
        &model,
        lengths,
        fbar,
        &w,
        &[a0, b0],
        &[0.5, 1.0],
        &GnOptions::default(),
    );

    let (a, b) = (outcome.params[0], outcome.params[1]);
    let eps_g = 0.5 * (1.0 - b);
    let d_if = 1.0 - 2.0 * a;
    let (sig_a, sig_b) = (outcome.covariance[0][0], outcome.covariance[1][1]);
    let err = |v: f64, scale: f64| {
        if outcome.converged && v.is_finite() && v >= 0.0 {
            Some(scale * v.sqrt())
        } else {
            None
        }
    };

    let mut flags = Vec::new();
    if eps_g < -1e-12 || !(-1e-12..=1.0 + 1e-12).contains(&d_if) {
        flags.push(FitFlag::Unphysical);
    }

    Ok(FitResult {
        format_version: FIT_REPORT_VERSION,
        model: "rb_decay".into(),
        params: vec![
            ParamEstimate {
                name: "epsilon_g".into(),
                value: eps_g,
                std_error: err(sig_b, 0.5),
            },
            ParamEstimate {
                name: "d_if".into(),
                value: d_if,
                std_error: err(sig_a, 2.0),
            },
            ParamEstimate {
                name: "gate_fidelity".into(),
                value: 1.0 - eps_g,
                std_error: err(sig_b, 0.5),
            },
            ParamEstimate {
                name: "decay_base".into(),
                value: b,
                std_error: err(sig_b, 1.0),
            },
            ParamEstimate {
                name: "intercept".into(),
                value: 0.5 + a,
                std_error: err(sig_a, 1.0),
            },
        ],
        residual_rms: outcome.residual_rms,
        converged: outcome.converged,
        iterations: outcome.iterations,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(lengths: &[f64], eps: f64, d: f64) -> Vec<f64> {
        lengths
            .iter()
            .map(|&l| 0.5 + 0.5 * (1.0 - d) * (1.0 - 2.0 * eps).powf(l))
            .collect()
    }

    const GRID: [f64; 9] = [0.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0];

    #[test]
    fn exact_roundtrip() {
        let f = curve(&GRID, 0.0029, 0.01);
        let fit = fit_rb(&GRID, &f, None).unwrap();
        assert!(fit.converged);
        assert!((fit.value("epsilon_g").unwrap() - 0.0029).abs() < 1e-8);
        assert!((fit.value("d_if").unwrap() - 0.01).abs() < 1e-8);
        assert!((fit.value("gate_fidelity").unwrap() - 0.9971).abs() < 1e-8);
        assert!(fit.flags.is_empty());
    }

    #[test]
    fn constant_table_gives_zero_error() {
        let d = 0.006;
        let f = vec![1.0 - d / 2.0; GRID.len()];
        let fit = fit_rb(&GRID, &f, None).unwrap();
        assert!(fit.value("epsilon_g").unwrap().abs() < 1e-10);
        assert!((fit.value("d_if").unwrap() - d).abs() < 1e-8);
    }

    #[test]
    fn needs_three_distinct_lengths() {
        let l = [0.0, 0.0, 4.0];
        let f = [1.0, 1.0, 0.9];
        assert!(matches!(
            fit_rb(&l, &f, None),
            Err(FitError::TooFewLengths { got: 2, .. })
        ));
    }

    #[test]
    fn flags_unphysical_growth() {
        // survival rising with length: b > 1, eps < 0
        let f: Vec<f64> = GRID.iter().map(|&l| 0.5 + 0.4 * 1.001f64.powf(l)).collect();
        let fit = fit_rb(&GRID, &f, None).unwrap();
        assert!(fit.has_flag(FitFlag::Unphysical));
        assert!(fit.value("epsilon_g").unwrap() < 0.0);
    }
}
