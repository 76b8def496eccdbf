//! The simulated system: array size, crosstalk, noise and drive strengths.

use fiberq_array::{CrosstalkMatrix, LoadingModel};
use fiberq_core::{NoiseParams, SiteId};
use fiberq_pulse::RamanConfig;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Clone, Debug)]
pub struct SystemModel {
    pub n_sites: usize,
    pub crosstalk: CrosstalkMatrix,
    pub noise: NoiseParams,
    /// Commanded Rabi frequency per site (Hz), indexed by site.
    pub rabi: Vec<f64>,
    pub raman: RamanConfig,
    /// Stochastic loading; `None` means every site is always occupied.
    pub loading: Option<LoadingModel>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("crosstalk matrix is {got}x{got} but the array has {expected} sites")]
    CrosstalkSize { expected: usize, got: usize },
    #[error("rabi list has {got} entries for {expected} sites")]
    RabiSize { expected: usize, got: usize },
    #[error("rabi frequency for site {0} must be finite and non-negative, got {1}")]
    BadRabi(SiteId, f64),
    #[error("model has zero sites")]
    Empty,
    #[error("{0}")]
    Noise(String),
    #[error("{0}")]
    Raman(String),
    #[error("{0}")]
    Crosstalk(String),
}

impl SystemModel {
    /// Uniform-drive model with no loading losses.
    pub fn uniform(
        n_sites: usize,
        crosstalk: CrosstalkMatrix,
        noise: NoiseParams,
        rabi_freq: f64,
        raman: RamanConfig,
    ) -> Self {
        SystemModel {
            n_sites,
            crosstalk,
            noise,
            rabi: vec![rabi_freq; n_sites],
            raman,
            loading: None,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_sites == 0 {
            return Err(ModelError::Empty);
        }
        if self.crosstalk.site_count() != self.n_sites {
            return Err(ModelError::CrosstalkSize {
                expected: self.n_sites,
                got: self.crosstalk.site_count(),
            });
        }
        if self.rabi.len() != self.n_sites {
            return Err(ModelError::RabiSize {
                expected: self.n_sites,
                got: self.rabi.len(),
            });
        }
        for (k, &f) in self.rabi.iter().enumerate() {
            if !f.is_finite() || f < 0.0 {
                return Err(ModelError::BadRabi(SiteId(k + 1), f));
            }
        }
        self.crosstalk
            .validate()
            .map_err(|e| ModelError::Crosstalk(e.to_string()))?;
        self.noise
            .validate()
            .map_err(|e| ModelError::Noise(e.to_string()))?;
        self.raman
            .validate()
            .map_err(|e| ModelError::Raman(e.to_string()))?;
        Ok(())
    }

    pub fn site_ids(&self) -> impl Iterator<Item = SiteId> + '_ {
        (1..=self.n_sites).map(SiteId)
    }

    pub fn contains(&self, site: SiteId) -> bool {
        site.0 >= 1 && site.0 <= self.n_sites
    }

    /// Per-site Rabi map in the form the compiler takes.
    pub fn rabi_map(&self) -> BTreeMap<SiteId, f64> {
        self.rabi
            .iter()
            .enumerate()
            .map(|(k, &f)| (SiteId(k + 1), f))
            .collect()
    }
}
