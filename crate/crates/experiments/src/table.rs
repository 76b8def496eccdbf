//! Experiment result tables.

use fiberq_core::{NoiseParams, SiteId};
use serde::{Deserialize, Serialize};

pub const RESULT_TABLE_VERSION: u32 = 1;

/// One site's curve: mean P(|1>) against the control variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteSeries {
    pub site: SiteId,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    /// Shots contributing per point (post-selection can vary this by site).
    pub shots: Vec<u64>,
}

/// A sampled gate sequence, recorded for replay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbSequenceRecord {
    pub site: SiteId,
    pub length: u32,
    pub sequence_index: u32,
    pub cliffords: Vec<u8>,
    pub correction: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct TableMetadata {
    pub master_seed: u64,
    pub analytic: bool,
    pub noise: NoiseParams,
    /// Name of the bundled preset that produced the run, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Rolling digest over every compiled channel document of the run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule_digest: Option<String>,
    /// Fraction of occupancy draws that passed post-selection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupancy_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rb_sequences: Option<Vec<RbSequenceRecord>>,
}

/// Per-site experiment curves with provenance metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub format_version: u32,
    pub experiment: String,
    pub control_name: String,
    pub control: Vec<f64>,
    pub series: Vec<SiteSeries>,
    pub metadata: TableMetadata,
}

impl ResultTable {
    pub fn series_for(&self, site: SiteId) -> Option<&SiteSeries> {
        self.series.iter().find(|s| s.site == site)
    }

    /// Basic shape validation for files read back from disk.
    pub fn validate(&self) -> Result<(), String> {
        if self.format_version != RESULT_TABLE_VERSION {
            return Err(format!(
                "unsupported results format version {}",
                self.format_version
            ));
        }
        for s in &self.series {
            if s.mean.len() != self.control.len()
                || s.std_error.len() != self.control.len()
                || s.shots.len() != self.control.len()
            {
                return Err(format!("series for site {} has mismatched lengths", s.site));
            }
            for (&m, &e) in s.mean.iter().zip(&s.std_error) {
                if !(-1e-9..=1.0 + 1e-9).contains(&m) {
                    return Err(format!("site {}: probability {m} outside [0,1]", s.site));
                }
                if e < 0.0 {
                    return Err(format!("site {}: negative standard error {e}", s.site));
                }
            }
        }
        Ok(())
    }
}

/// Accumulated measurement statistics for one (point, site).
#[derive(Clone, Copy, Debug, Default)]
pub struct SiteStats {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl SiteStats {
    pub fn push(&mut self, value: f64) {
        self.n += 1;
        self.sum += value;
        self.sum_sq += value * value;
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    /// Standard error: binomial for sampled bits, sample-spread for
    /// analytic probabilities.
    pub fn std_error(&self, analytic: bool) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let n = self.n as f64;
        if analytic {
            let var = (self.sum_sq / n - self.mean() * self.mean()).max(0.0);
            (var / n).sqrt()
        } else {
            let p = self.mean();
            (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / n).sqrt()
        }
    }

    pub fn merge(&mut self, other: &SiteStats) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }
}
