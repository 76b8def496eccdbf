//! Fit outputs and input validation errors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FIT_REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFlag {
    /// The data carries no resolvable oscillation; frequency and phase are
    /// meaningless.
    FrequencyUnidentifiable,
    /// No decay within the sampled window; the decay time is a lower bound.
    DecayUnidentifiable,
    /// Point estimates left their physical range; the data is inconsistent
    /// with the model.
    Unphysical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    pub name: String,
    pub value: f64,
    /// Standard error from the scaled Gauss-Newton covariance; absent when
    /// the fit did not converge or the parameter was not identifiable.
    pub std_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub format_version: u32,
    pub model: String,
    pub params: Vec<ParamEstimate>,
    pub residual_rms: f64,
    pub converged: bool,
    pub iterations: usize,
    pub flags: Vec<FitFlag>,
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<&ParamEstimate> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.param(name).map(|p| p.value)
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.param(name).and_then(|p| p.std_error)
    }

    pub fn has_flag(&self, flag: FitFlag) -> bool {
        self.flags.contains(&flag)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {min} points, got {got}")]
    InsufficientData { min: usize, got: usize },
    #[error("abscissa must be strictly increasing (violation at index {0})")]
    NotIncreasing(usize),
    #[error("data lengths differ: {t} abscissa vs {y} ordinate points")]
    LengthMismatch { t: usize, y: usize },
    #[error("need at least {min} distinct sequence lengths, got {got}")]
    TooFewLengths { min: usize, got: usize },
    #[error("non-finite value in input data at index {0}")]
    NonFinite(usize),
}

pub(crate) fn check_series(
    t: &[f64],
    y: &[f64],
    min_points: usize,
    require_increasing: bool,
) -> Result<(), FitError> {
    if t.len() != y.len() {
        return Err(FitError::LengthMismatch {
            t: t.len(),
            y: y.len(),
        });
    }
    if t.len() < min_points {
        return Err(FitError::InsufficientData {
            min: min_points,
            got: t.len(),
        });
    }
    for (k, (&a, &b)) in t.iter().zip(y).enumerate() {
        if !a.is_finite() || !b.is_finite() {
            return Err(FitError::NonFinite(k));
        }
    }
    if require_increasing {
        for (k, pair) in t.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(FitError::NotIncreasing(k + 1));
            }
        }
    }
    Ok(())
}
