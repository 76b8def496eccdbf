//! Raman chain frequency bookkeeping.

use fiberq_core::SiteId;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Frequencies of the Raman drive chain for one array.
///
/// The two tones of each channel take the +1 and -1 diffraction orders of
/// the same AOM, so their difference frequency is f_eom - 2 f_aom and qubit
/// phases/detunings are twice the RF ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RamanConfig {
    /// Fiber-EOM modulation frequency (Hz).
    pub f_eom: f64,
    /// Nominal AOM carrier (Hz).
    pub f_aom_carrier: f64,
    /// Per-site fine adjustment of the carrier (Hz), tracking each site's
    /// transition frequency. Sites absent from the map use 0.
    pub fine_detuning: BTreeMap<SiteId, f64>,
    /// Single-photon detuning from the excited manifold (Hz); metadata only.
    pub single_photon_detuning: f64,
    /// Fixed duration of every phase-shift segment (s).
    pub phase_shift_duration: f64,
}

impl Default for RamanConfig {
    fn default() -> Self {
        RamanConfig {
            f_eom: 7.054e9,
            f_aom_carrier: 110.0e6,
            fine_detuning: BTreeMap::new(),
            single_photon_detuning: 200.0e9,
            phase_shift_duration: 0.5e-6,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RamanConfigError {
    #[error("raman.{0}: frequency must be positive, got {1}")]
    NonPositiveFrequency(&'static str, f64),
    #[error("raman.phase_shift_duration: must be positive, got {0}")]
    NonPositiveShiftDuration(f64),
}

impl RamanConfig {
    /// Two-photon difference frequency delivered to the atoms:
    /// f_eom - 2 f_aom (opposite diffraction orders shift the tones by
    /// +-f_aom each).
    pub fn raman_difference_freq(&self) -> f64 {
        self.f_eom - 2.0 * self.f_aom_carrier
    }

    /// RF reference frequency of one channel: carrier plus the site's fine
    /// detuning.
    pub fn channel_ref_frequency(&self, site: SiteId) -> f64 {
        self.f_aom_carrier + self.fine_detuning.get(&site).copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<(), RamanConfigError> {
        for (name, value) in [
            ("f_eom", self.f_eom),
            ("f_aom_carrier", self.f_aom_carrier),
            ("single_photon_detuning", self.single_photon_detuning),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(RamanConfigError::NonPositiveFrequency(name, value));
            }
        }
        if !(self.phase_shift_duration > 0.0) {
            return Err(RamanConfigError::NonPositiveShiftDuration(
                self.phase_shift_duration,
            ));
        }
        Ok(())
    }
}
