//! Stochastic single-atom loading.

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Independent Bernoulli loading of each trap site per shot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadingModel {
    pub p_load: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum LoadingError {
    #[error("loading rate {0} outside [0, 1]")]
    BadProbability(f64),
}

impl LoadingModel {
    pub fn new(p_load: f64) -> Result<Self, LoadingError> {
        if !(0.0..=1.0).contains(&p_load) {
            return Err(LoadingError::BadProbability(p_load));
        }
        Ok(LoadingModel { p_load })
    }
}

/// Draw one shot's occupancy pattern.
pub fn load_array<R: Rng + ?Sized>(model: &LoadingModel, n_sites: usize, rng: &mut R) -> Vec<bool> {
    (0..n_sites)
        .map(|_| {
            if model.p_load >= 1.0 {
                true
            } else if model.p_load <= 0.0 {
                false
            } else {
                rng.random::<f64>() < model.p_load
            }
        })
        .collect()
}
