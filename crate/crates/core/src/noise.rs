//! Configured noise magnitudes and their per-shot realizations.
//!
//! All channels here are quasi-static: a value is drawn once per shot and
//! frozen while the shot runs. This models the dominant mechanisms of the
//! target system, where intensity and detuning drifts are much slower than a
//! single experimental sequence.

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

/// Configured noise magnitudes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseParams {
    /// Std. dev. (Hz) of the quasi-static per-shot two-photon detuning.
    pub sigma_detuning: f64,
    /// Depth of the slow Rabi-amplitude modulation, m = 1 + depth*cos(psi).
    pub amp_mod_depth: f64,
    /// State-preparation depolarization probability.
    pub d_if: f64,
    /// Probability of reading |0> as 1.
    pub readout_eps0: f64,
    /// Probability of reading |1> as 0.
    pub readout_eps1: f64,
    /// Couple concurrent addressing channels with per-shot random phases.
    pub interference_enabled: bool,
    /// Depolarization probability injected after each compiled gate.
    pub gate_depol: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams::noiseless()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("noise.{field}: probability {value} outside [0, 1]")]
    BadProbability { field: &'static str, value: f64 },
    #[error("noise.sigma_detuning: {0} Hz is negative")]
    NegativeSigma(f64),
    #[error("noise.amp_mod_depth: {0} outside [0, 1)")]
    BadModulationDepth(f64),
}

impl NoiseParams {
    pub fn noiseless() -> Self {
        NoiseParams {
            sigma_detuning: 0.0,
            amp_mod_depth: 0.0,
            d_if: 0.0,
            readout_eps0: 0.0,
            readout_eps1: 0.0,
            interference_enabled: false,
            gate_depol: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        if self.sigma_detuning < 0.0 || !self.sigma_detuning.is_finite() {
            return Err(NoiseError::NegativeSigma(self.sigma_detuning));
        }
        if !(0.0..1.0).contains(&self.amp_mod_depth) {
            return Err(NoiseError::BadModulationDepth(self.amp_mod_depth));
        }
        for (field, value) in [
            ("d_if", self.d_if),
            ("readout_eps0", self.readout_eps0),
            ("readout_eps1", self.readout_eps1),
            ("gate_depol", self.gate_depol),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(NoiseError::BadProbability { field, value });
            }
        }
        Ok(())
    }
}

/// Detuning spread equivalent to a Gaussian Ramsey decay time.
///
/// Quasi-static Gaussian detuning gives fringe contrast
/// exp(-2 pi^2 sigma^2 T^2) = exp(-(T/T2*)^2), so sigma = 1/(sqrt(2) pi T2*).
pub fn sigma_from_t2_star(t2_star: f64) -> f64 {
    1.0 / (2.0f64.sqrt() * std::f64::consts::PI * t2_star)
}

/// Inverse of [`sigma_from_t2_star`].
pub fn t2_star_from_sigma(sigma: f64) -> f64 {
    1.0 / (2.0f64.sqrt() * std::f64::consts::PI * sigma)
}

/// Noise realizations for one shot, drawn once and frozen.
///
/// Detunings are per site; amplitude multipliers and interference phases are
/// per addressing channel (one channel per site in this architecture).
#[derive(Clone, Debug, PartialEq)]
pub struct ShotContext {
    pub detunings: Vec<f64>,
    pub amp_multipliers: Vec<f64>,
    pub interference_phases: Vec<f64>,
}

impl ShotContext {
    /// All-quiet context (zero detuning, unit amplitude) for analytic runs.
    pub fn quiet(site_count: usize) -> Self {
        ShotContext {
            detunings: vec![0.0; site_count],
            amp_multipliers: vec![1.0; site_count],
            interference_phases: vec![0.0; site_count],
        }
    }
}

/// Standard normal draw via Box-Muller; stable across platforms.
fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    (-2.0 * (1.0 - u1).ln()).sqrt() * (TAU * u2).cos()
}

/// Draw one shot's noise realizations.
///
/// Draw order is fixed (detunings, then multipliers, then phases) so a given
/// stream always yields the same context.
pub fn sample_shot<R: Rng + ?Sized>(
    noise: &NoiseParams,
    site_count: usize,
    rng: &mut R,
) -> ShotContext {
    let detunings = (0..site_count)
        .map(|_| noise.sigma_detuning * standard_normal(rng))
        .collect();
    let amp_multipliers = (0..site_count)
        .map(|_| 1.0 + noise.amp_mod_depth * (TAU * rng.random::<f64>()).cos())
        .collect();
    let interference_phases = (0..site_count).map(|_| TAU * rng.random::<f64>()).collect();
    ShotContext {
        detunings,
        amp_multipliers,
        interference_phases,
    }
}
