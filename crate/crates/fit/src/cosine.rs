//! Damped cosine fits: y0 + A cos(2 pi f t + phi) exp(-(rate t)^p).

use crate::gn::{fit_least_squares, GnOptions, GnOutcome};
use crate::result::{
    check_series, FitError, FitFlag, FitResult, ParamEstimate, FIT_REPORT_VERSION,
};
use crate::spectrum::dominant_frequency;
use crate::DecayShape;
use std::f64::consts::TAU;

fn wrap_angle(theta: f64) -> f64 {
    let mut x = theta.rem_euclid(TAU);
    if x > std::f64::consts::PI {
        x -= TAU;
    }
    x
}

/// Model parameter vector: [y0, A, f, phi, decay].
///
/// The decay parameter is the rate itself for the exponential shape but
/// q = rate^2 for the Gaussian one: exp(-q t^2) is linear in q, whereas
/// exp(-(rate t)^2) is quadratically flat at rate = 0 and undamped data
/// would strand the optimizer there.
fn model(shape: DecayShape) -> impl Fn(&[f64], f64) -> f64 {
    move |p: &[f64], t: f64| {
        let envelope = match shape {
            DecayShape::Exponential => (-p[4] * t).exp(),
            DecayShape::Gaussian => (-p[4] * t * t).exp(),
        };
        p[0] + p[1] * (TAU * p[2] * t + p[3]).cos() * envelope
    }
}

/// Weighted linear solve for (y0, B, C) in y = y0 + B cos(2 pi f t) +
/// C sin(2 pi f t), giving amplitude/phase starting values at a fixed f.
fn linear_start(t: &[f64], y: &[f64], w: &[f64], f: f64) -> (f64, f64, f64) {
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for ((&tk, &yk), &wk) in t.iter().zip(y).zip(w) {
        let (s, c) = (TAU * f * tk).sin_cos();
        let basis = [1.0, c, s];
        for i in 0..3 {
            rhs[i] += wk * yk * basis[i];
            for j in 0..3 {
                m[i][j] += wk * basis[i] * basis[j];
            }
        }
    }
    // 3x3 Cramer solve; the basis is well conditioned on >= 6 points.
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d.abs() < 1e-300 {
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        return (mean, 0.0, 0.0);
    }
    let mut out = [0.0; 3];
    for col in 0..3 {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = rhs[row];
        }
        out[col] = det(&mc) / d;
    }
    (out[0], out[1], out[2])
}

fn run_shape(t: &[f64], y: &[f64], w: &[f64], f0: f64, shape: DecayShape) -> GnOutcome {
    let (y0, b, c) = linear_start(t, y, w, f0);
    let amp = b.hypot(c).max(1e-6);
    let phi = (-c).atan2(b);
    let span = t[t.len() - 1] - t[0];
    let scales = [
        y0.abs().max(0.1),
        amp.max(0.01),
        f0.max(0.5 / span),
        1.0,
        1.0 / span,
    ];
    let mut best: Option<GnOutcome> = None;
    for rate0 in [0.25 / span, 1.0 / span, 4.0 / span] {
        let decay0 = match shape {
            DecayShape::Exponential => rate0,
            DecayShape::Gaussian => rate0 * rate0,
        };
        let decay_scale = match shape {
            DecayShape::Exponential => 1.0 / span,
            DecayShape::Gaussian => 1.0 / (span * span),
        };
        let p0 = [y0, amp, f0, phi, decay0];
        let scales = [scales[0], scales[1], scales[2], scales[3], decay_scale];
        let out = fit_least_squares(&model(shape), t, y, w, &p0, &scales, &GnOptions::default());
        let better = match &best {
            // a converged outcome beats an unconverged one; ties on cost
            Some(b) => (out.converged, -out.weighted_rss) > (b.converged, -b.weighted_rss),
            None => true,
        };
        if better {
            best = Some(out);
        }
    }
    best.expect("at least one start")
}

/// Fit a damped cosine. `shape` pins the envelope; `None` tries both p = 1
/// and p = 2 and keeps the lower weighted residual.
pub fn fit_damped_cosine(
    t: &[f64],
    y: &[f64],
    weights: Option<&[f64]>,
    shape: Option<DecayShape>,
) -> Result<FitResult, FitError> {
    check_series(t, y, 6, true)?;
    let w: Vec<f64> = match weights {
        Some(w) => {
            if w.len() != t.len() {
                return Err(FitError::LengthMismatch {
                    t: t.len(),
                    y: w.len(),
                });
            }
            w.to_vec()
        }
        None => vec![1.0; t.len()],
    };

    let n = t.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let sd = (y.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    let flat = sd < 1e-9 * (1.0 + mean.abs());
    let spectrum = if flat { None } else { dominant_frequency(t, y) };

    let Some((f0, _)) = spectrum else {
        // No resolvable oscillation: report the mean and flag.
        return Ok(FitResult {
            format_version: FIT_REPORT_VERSION,
            model: "damped_cosine".into(),
            params: vec![
                ParamEstimate {
                    name: "y0".into(),
                    value: mean,
                    std_error: Some(sd / n.sqrt()),
                },
                ParamEstimate {
                    name: "amplitude".into(),
                    value: 0.0,
                    std_error: None,
                },
                ParamEstimate {
                    name: "frequency_hz".into(),
                    value: 0.0,
                    std_error: None,
                },
                ParamEstimate {
                    name: "phase_rad".into(),
                    value: 0.0,
                    std_error: None,
                },
                ParamEstimate {
                    name: "decay_rate_per_s".into(),
                    value: 0.0,
                    std_error: None,
                },
            ],
            residual_rms: sd,
            converged: true,
            iterations: 0,
            flags: vec![FitFlag::FrequencyUnidentifiable],
        });
    };

    let (shape_used, outcome) = match shape {
        Some(s) => (s, run_shape(t, y, &w, f0, s)),
        None => {
            let exp = run_shape(t, y, &w, f0, DecayShape::Exponential);
            let gauss = run_shape(t, y, &w, f0, DecayShape::Gaussian);
            if gauss.weighted_rss <= exp.weighted_rss {
                (DecayShape::Gaussian, gauss)
            } else {
                (DecayShape::Exponential, exp)
            }
        }
    };

    let mut p = outcome.params.clone();
    // Canonical form: A >= 0, f >= 0, phi wrapped.
    if p[2] < 0.0 {
        p[2] = -p[2];
        p[3] = -p[3];
    }
    if p[1] < 0.0 {
        p[1] = -p[1];
        p[3] += std::f64::consts::PI;
    }
    p[3] = wrap_angle(p[3]);

    let err = |i: usize| {
        if outcome.converged {
            let v = outcome.covariance[i][i];
            (v.is_finite() && v >= 0.0).then(|| v.sqrt())
        } else {
            None
        }
    };
    // Convert the fitted decay parameter back to a rate (delta method for
    // the Gaussian q = rate^2 route). A non-positive q is no decay.
    let (rate, rate_err) = match shape_used {
        DecayShape::Exponential => (p[4], err(4)),
        DecayShape::Gaussian => {
            let q = p[4];
            if q > 0.0 {
                let rate = q.sqrt();
                (rate, err(4).map(|e| e / (2.0 * rate)))
            } else {
                (0.0, None)
            }
        }
    };

    let span = t[t.len() - 1] - t[0];
    let mut flags = Vec::new();
    if rate.abs() * span < 1e-3 {
        flags.push(FitFlag::DecayUnidentifiable);
    }
    let unidentifiable = flags.contains(&FitFlag::DecayUnidentifiable);

    let mut params = vec![
        ParamEstimate {
            name: "y0".into(),
            value: p[0],
            std_error: err(0),
        },
        ParamEstimate {
            name: "amplitude".into(),
            value: p[1],
            std_error: err(1),
        },
        ParamEstimate {
            name: "frequency_hz".into(),
            value: p[2],
            std_error: err(2),
        },
        ParamEstimate {
            name: "phase_rad".into(),
            value: p[3],
            std_error: err(3),
        },
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
    if rate > 0.0 && !unidentifiable {
        // decay time with a delta-method error
        params.push(ParamEstimate {
            name: "decay_time_s".into(),
            value: 1.0 / rate,
            std_error: rate_err.map(|e| e / (rate * rate)),
        });
    }

    Ok(FitResult {
        format_version: FIT_REPORT_VERSION,
        model: "damped_cosine".into(),
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

    fn series(
        n: usize,
        dt: f64,
        y0: f64,
        a: f64,
        f: f64,
        phi: f64,
        rate: f64,
        p: f64,
    ) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
        let y: Vec<f64> = t
            .iter()
            .map(|&x| y0 + a * (TAU * f * x + phi).cos() * (-(rate * x).powf(p)).exp())
            .collect();
        (t, y)
    }

    #[test]
    fn undamped_roundtrip() {
        let (t, y) = series(
            160,
            2.0e-5,
            0.5,
            0.5,
            4.0e3,
            std::f64::consts::FRAC_PI_4,
            0.0,
            1.0,
        );
        let fit = fit_damped_cosine(&t, &y, None, None).unwrap();
        assert!(fit.converged);
        assert!((fit.value("y0").unwrap() - 0.5).abs() < 1e-6);
        assert!((fit.value("amplitude").unwrap() - 0.5).abs() < 1e-6);
        assert!((fit.value("frequency_hz").unwrap() - 4.0e3).abs() / 4.0e3 < 1e-6);
        assert!((fit.value("phase_rad").unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-6);
        assert!(fit.has_flag(FitFlag::DecayUnidentifiable));
    }

    #[test]
    fn damped_roundtrip_picks_shape() {
        for (p, shape) in [(1.0, DecayShape::Exponential), (2.0, DecayShape::Gaussian)] {
            let (t, y) = series(200, 2.5e-5, 0.5, 0.45, 2.3e3, -0.9, 250.0, p);
            let fit = fit_damped_cosine(&t, &y, None, None).unwrap();
            assert!(fit.converged);
            assert_eq!(fit.value("shape_p"), Some(shape.power()), "p = {p}");
            assert!((fit.value("frequency_hz").unwrap() - 2.3e3).abs() / 2.3e3 < 1e-5);
            assert!((fit.value("decay_rate_per_s").unwrap() - 250.0).abs() / 250.0 < 1e-4);
            assert!((fit.value("decay_time_s").unwrap() - 4.0e-3).abs() / 4.0e-3 < 1e-4);
        }
    }

    #[test]
    fn flat_data_flags_frequency() {
        let t: Vec<f64> = (0..50).map(|k| k as f64 * 1e-4).collect();
        let y = vec![0.5; 50];
        let fit = fit_damped_cosine(&t, &y, None, None).unwrap();
        assert!(fit.has_flag(FitFlag::FrequencyUnidentifiable));
        assert_eq!(fit.value("amplitude"), Some(0.0));
        assert_eq!(fit.value("y0"), Some(0.5));
    }

    #[test]
    fn rejects_bad_series() {
        let t: Vec<f64> = (0..4).map(|k| k as f64).collect();
        let y = vec![0.0; 4];
        assert!(matches!(
            fit_damped_cosine(&t, &y, None, None),
            Err(FitError::InsufficientData { .. })
        ));
        let t = vec![0.0, 1.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.0; 6];
        assert!(matches!(
            fit_damped_cosine(&t, &y, None, None),
            Err(FitError::NotIncreasing(2))
        ));
    }
}
