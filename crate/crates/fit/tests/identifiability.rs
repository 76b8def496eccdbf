//! Round-trip identifiability and statistical behavior of the estimators.

use fiberq_core::derive_rng;
use fiberq_fit::{
    binomial_weights, fit_damped_cosine, fit_gaussian_decay, fit_least_squares, fit_rb, DecayShape,
    GnOptions,
};
use rand::RngExt;
use std::f64::consts::TAU;

#[test]
fn damped_cosine_random_roundtrips() {
    let mut rng = derive_rng(5001, &[0]);
    for rep in 0..100 {
        let y0 = 0.3 + 0.4 * rng.random::<f64>();
        let a = 0.2 + 0.3 * rng.random::<f64>();
        let f = 1.0e3 + 4.5e3 * rng.random::<f64>();
        let phi = (rng.random::<f64>() - 0.5) * std::f64::consts::PI;
        // keep at least ~6 cycles in the window and a mild decay
        let span = 8.0 / f * (1.0 + rng.random::<f64>());
        let rate = if rep % 3 == 0 {
            0.0
        } else {
            rng.random::<f64>() * 0.8 / span
        };
        let shape = if rep % 2 == 0 {
            DecayShape::Gaussian
        } else {
            DecayShape::Exponential
        };
        let n = 160;
        let t: Vec<f64> = (0..n).map(|k| k as f64 * span / (n as f64 - 1.0)).collect();
        let y: Vec<f64> = t
            .iter()
            .map(|&x| y0 + a * (TAU * f * x + phi).cos() * (-(rate * x).powf(shape.power())).exp())
            .collect();
        let fit = fit_damped_cosine(&t, &y, None, Some(shape)).unwrap();
        assert!(fit.converged, "rep {rep}");
        assert!(
            (fit.value("frequency_hz").unwrap() - f).abs() / f < 1e-6,
            "rep {rep}: f {} vs {f}",
            fit.value("frequency_hz").unwrap()
        );
        assert!(
            (fit.value("y0").unwrap() - y0).abs() / y0 < 1e-6,
            "rep {rep}"
        );
        assert!(
            (fit.value("amplitude").unwrap() - a).abs() / a < 1e-6,
            "rep {rep}"
        );
        let dphi = (fit.value("phase_rad").unwrap() - phi).abs();
        assert!(dphi.min(TAU - dphi) < 1e-6, "rep {rep}");
        if rate * span > 0.05 {
            assert!(
                (fit.value("decay_rate_per_s").unwrap() - rate).abs() / rate < 1e-4,
                "rep {rep}: rate {} vs {rate}",
                fit.value("decay_rate_per_s").unwrap()
            );
        }
    }
}

#[test]
fn rb_random_roundtrips() {
    let mut rng = derive_rng(5002, &[0]);
    let lengths: Vec<f64> = [0.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0].to_vec();
    for rep in 0..100 {
        let eps = 1e-4 + 8e-3 * rng.random::<f64>();
        let d = 0.02 * rng.random::<f64>();
        let f: Vec<f64> = lengths
            .iter()
            .map(|&l| 0.5 + 0.5 * (1.0 - d) * (1.0 - 2.0 * eps).powf(l))
            .collect();
        let fit = fit_rb(&lengths, &f, None).unwrap();
        assert!(fit.converged);
        assert!(
            (fit.value("epsilon_g").unwrap() - eps).abs() / eps < 1e-6,
            "rep {rep}: {} vs {eps}",
            fit.value("epsilon_g").unwrap()
        );
        assert!((fit.value("d_if").unwrap() - d).abs() < 1e-6, "rep {rep}");
    }
}

#[test]
fn rb_reparameterization_is_stable() {
    // Direct (eps, d) parameterization must agree with the production
    // decay-base route to 1e-10.
    let lengths: Vec<f64> = [0.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0].to_vec();
    let mut rng = derive_rng(5003, &[0]);
    for _ in 0..25 {
        let eps = 5e-4 + 5e-3 * rng.random::<f64>();
        let d = 0.015 * rng.random::<f64>();
        // mild deterministic perturbation so the two routes face a real
        // (non-zero-residual) problem
        let f: Vec<f64> = lengths
            .iter()
            .enumerate()
            .map(|(k, &l)| {
                0.5 + 0.5 * (1.0 - d) * (1.0 - 2.0 * eps).powf(l)
                    + if k % 2 == 0 { 2e-4 } else { -2e-4 }
            })
            .collect();
        let production = fit_rb(&lengths, &f, None).unwrap();

        let w = vec![1.0; lengths.len()];
        let direct = fit_least_squares(
            &|p: &[f64], l: f64| 0.5 + 0.5 * (1.0 - p[1]) * (1.0 - 2.0 * p[0]).powf(l),
            &lengths,
            &f,
            &w,
            &[1e-3, 1e-3],
            &[1e-2, 1e-2],
            &GnOptions::default(),
        );
        assert!(direct.converged);
        assert!(
            (production.value("epsilon_g").unwrap() - direct.params[0]).abs() < 1e-10,
            "{} vs {}",
            production.value("epsilon_g").unwrap(),
            direct.params[0]
        );
        assert!((production.value("d_if").unwrap() - direct.params[1]).abs() < 1e-10);
    }
}

#[test]
fn gaussian_decay_random_roundtrips() {
    let mut rng = derive_rng(5004, &[0]);
    for _ in 0..100 {
        let t2 = 1e-3 + 50e-3 * rng.random::<f64>();
        let n = 40;
        let t: Vec<f64> = (0..n)
            .map(|k| k as f64 * 2.0 * t2 / (n as f64 - 1.0))
            .collect();
        let c: Vec<f64> = t.iter().map(|&x| (-(x / t2) * (x / t2)).exp()).collect();
        let fit = fit_gaussian_decay(&t, &c, Some(DecayShape::Gaussian)).unwrap();
        assert!((fit.value("t2_star_s").unwrap() - t2).abs() / t2 < 1e-6);
    }
}

#[test]
fn standard_errors_shrink_as_root_shots() {
    // Binomial-noised cosine data at growing shot counts: the fitted
    // frequency error must scale ~ 1/sqrt(shots). Log-log slope within 20%
    // of -1/2.
    let f = 3.0e3;
    let n = 80;
    let t: Vec<f64> = (0..n).map(|k| k as f64 * 2.5e-5).collect();
    let shot_grid = [100u64, 400, 1600, 6400];
    let mut mean_errs = Vec::new();
    for (si, &shots) in shot_grid.iter().enumerate() {
        let mut errs = Vec::new();
        for rep in 0..8 {
            let mut rng = derive_rng(5005, &[si as u64, rep]);
            let y: Vec<f64> = t
                .iter()
                .map(|&x| {
                    let p = 0.5 + 0.45 * (TAU * f * x).cos();
                    let ones = (0..shots).filter(|_| rng.random::<f64>() < p).count();
                    ones as f64 / shots as f64
                })
                .collect();
            let w = binomial_weights(&y, &vec![shots; n]);
            let fit = fit_damped_cosine(&t, &y, Some(&w), Some(DecayShape::Exponential)).unwrap();
            if let Some(e) = fit.std_error("frequency_hz") {
                errs.push(e);
            }
        }
        assert!(errs.len() >= 6);
        mean_errs.push(errs.iter().sum::<f64>() / errs.len() as f64);
    }
    // least-squares slope of ln(err) vs ln(shots)
    let xs: Vec<f64> = shot_grid.iter().map(|&s| (s as f64).ln()).collect();
    let ys: Vec<f64> = mean_errs.iter().map(|&e| e.ln()).collect();
    let nf = xs.len() as f64;
    let (sx, sy): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (nf * sxy - sx * sy) / (nf * sxx - sx * sx);
    assert!(
        (slope + 0.5).abs() < 0.1,
        "slope {slope}, errors {mean_errs:?}"
    );
}
