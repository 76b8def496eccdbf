//! Nonlinear least-squares estimators for the three curve families the
//! experiments produce: damped sinusoids (Rabi/Ramsey), Gaussian coherence
//! decay (T2*) and the benchmarking survival decay, with parameter
//! uncertainties from the Gauss-Newton covariance.

pub mod cosine;
pub mod decay;
pub mod gn;
pub mod rb;
pub mod result;
pub mod spectrum;

pub use cosine::fit_damped_cosine;
pub use decay::fit_gaussian_decay;
pub use gn::{fit_least_squares, GnOptions, GnOutcome};
pub use rb::fit_rb;
pub use result::{FitError, FitFlag, FitResult, ParamEstimate};
pub use spectrum::dominant_frequency;

/// Decay envelope shape: exp(-(rate t)^p) with p = 1 or 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayShape {
    Exponential,
    Gaussian,
}

impl DecayShape {
    pub fn power(self) -> f64 {
        match self {
            DecayShape::Exponential => 1.0,
            DecayShape::Gaussian => 2.0,
        }
    }
}

/// Default binomial weights, shots / (P(1-P) + 1e-6).
///
/// Empirical frequencies are Laplace-smoothed into [1/(n+2), 1-1/(n+2)]
/// first; a saturated sample mean of exactly 0 or 1 has no evidence of zero
/// variance and must not get unbounded weight.
pub fn binomial_weights(means: &[f64], shots: &[u64]) -> Vec<f64> {
    means
        .iter()
        .zip(shots)
        .map(|(&p, &n)| {
            let floor = 1.0 / (n as f64 + 2.0);
            let p = p.clamp(floor, 1.0 - floor);
            n as f64 / (p * (1.0 - p) + 1e-6)
        })
        .collect()
}
