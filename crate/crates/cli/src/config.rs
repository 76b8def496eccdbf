//! Run configuration schema.
//!
//! JSON, strict: unknown fields are rejected, semantic violations are
//! reported with their field path. Every run writes the fully resolved
//! configuration (defaults expanded) next to its outputs, and that file
//! re-validates and re-runs to identical outputs.

use fiberq_array::{
    gaussian_crosstalk, hex_positions, paper_crosstalk_preset_with_floor, ArrayGeometry,
    CrosstalkMatrix, LoadingModel,
};
use fiberq_core::{NoiseParams, SiteId};
use fiberq_experiments::{CrosstalkScanSpec, RabiScanSpec, RamseySpec, RbSpec, SystemModel};
use fiberq_pulse::RamanConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const CONFIG_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("unsupported config format_version {0} (this build reads version 1)")]
    Version(u32),
}

fn invalid(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub sites: i64,
    pub pitch_um: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            sites: 10,
            pitch_um: 5.6,
        }
    }
}

fn default_floor() -> f64 {
    5e-4
}

/// Where the crosstalk matrix comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum CrosstalkConfig {
    /// No coupling between channels.
    Identity,
    /// Diffraction-limited Gaussian beam profile.
    Gaussian { waist_um: f64 },
    /// The measured figures, with a configurable off-diagonal floor.
    PaperPreset {
        #[serde(default = "default_floor")]
        floor: f64,
    },
    /// Explicit row-major matrix (row = affected site, column = channel).
    Matrix { rows: Vec<Vec<f64>> },
}

impl Default for CrosstalkConfig {
    fn default() -> Self {
        CrosstalkConfig::PaperPreset {
            floor: default_floor(),
        }
    }
}

/// Uniform or per-site commanded Rabi frequency (Hz). Per-site maps are
/// keyed by the decimal site id; absent sites fall back to the default
/// 47.2 kHz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RabiFreqConfig {
    Uniform(f64),
    PerSite(BTreeMap<String, f64>),
}

impl Default for RabiFreqConfig {
    fn default() -> Self {
        RabiFreqConfig::Uniform(47.2e3)
    }
}

fn default_sequences() -> u32 {
    10
}

fn default_shots() -> u32 {
    100
}

fn default_budget() -> f64 {
    30e-3
}

fn default_long_points() -> usize {
    240
}

fn default_short_cycles() -> f64 {
    2.5
}

fn default_short_points() -> usize {
    96
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiExperiment {
    pub addressed: Vec<usize>,
    pub durations_s: Vec<f64>,
    #[serde(default = "default_shots")]
    pub shots_per_point: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamseyExperiment {
    pub targets: Vec<usize>,
    pub detunings_hz: Vec<f64>,
    pub initial_phases_rad: Vec<f64>,
    pub gaps_s: Vec<f64>,
    #[serde(default = "default_shots")]
    pub shots_per_point: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RbExperiment {
    pub targets: Vec<usize>,
    pub lengths: Vec<u32>,
    #[serde(default = "default_sequences")]
    pub sequences_per_length: u32,
    #[serde(default = "default_shots")]
    pub shots_per_sequence: u32,
    #[serde(default)]
    pub parallel: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosstalkScanExperiment {
    /// Empty means every site.
    #[serde(default)]
    pub addressed: Vec<usize>,
    #[serde(default = "default_budget")]
    pub duration_budget_s: f64,
    #[serde(default = "default_long_points")]
    pub long_points: usize,
    #[serde(default = "default_short_cycles")]
    pub short_cycles: f64,
    #[serde(default = "default_short_points")]
    pub short_points: usize,
    #[serde(default = "default_shots")]
    pub shots_per_point: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Rabi(RabiExperiment),
    Ramsey(RamseyExperiment),
    Rb(RbExperiment),
    CrosstalkScan(CrosstalkScanExperiment),
}

fn default_loading() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub seed: u64,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub crosstalk: CrosstalkConfig,
    #[serde(default)]
    pub noise: NoiseParams,
    #[serde(default)]
    pub raman: RamanConfig,
    #[serde(default)]
    pub rabi_freq_hz: RabiFreqConfig,
    #[serde(default = "default_loading")]
    pub loading_rate: f64,
    /// Evaluate exact probabilities instead of sampling readout bits.
    #[serde(default)]
    pub analytic: bool,
    pub experiment: ExperimentConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = serde_json::from_str(text)?;
        if config.format_version != CONFIG_FORMAT_VERSION {
            return Err(ConfigError::Version(config.format_version));
        }
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serializes");
        text.push('\n');
        text
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.geometry.sites < 1 {
            return Err(invalid("geometry.sites", "must be at least 1"));
        }
        if !(self.geometry.pitch_um > 0.0) {
            return Err(invalid("geometry.pitch_um", "must be positive"));
        }
        let n = self.geometry.sites as usize;
        if !(0.0..=1.0).contains(&self.loading_rate) {
            return Err(invalid("loading_rate", "must be within [0, 1]"));
        }
        self.noise
            .validate()
            .map_err(|e| invalid("noise", e.to_string()))?;
        self.raman
            .validate()
            .map_err(|e| invalid("raman", e.to_string()))?;
        for &site in self.raman.fine_detuning.keys() {
            if site.0 < 1 || site.0 > n {
                return Err(invalid(
                    "raman.fine_detuning",
                    format!("site {site} outside the array"),
                ));
            }
        }
        match &self.crosstalk {
            CrosstalkConfig::Gaussian { waist_um } if !(*waist_um > 0.0) => {
                return Err(invalid("crosstalk.waist_um", "must be positive"));
            }
            CrosstalkConfig::PaperPreset { floor } => {
                if !(0.0..=1.0).contains(floor) {
                    return Err(invalid("crosstalk.floor", "must be within [0, 1]"));
                }
                if n != 10 {
                    return Err(invalid(
                        "crosstalk.source",
                        "paper_preset requires a 10-site array",
                    ));
                }
            }
            CrosstalkConfig::Matrix { rows } if rows.len() != n => {
                return Err(invalid(
                    "crosstalk.rows",
                    format!("expected {n} rows, got {}", rows.len()),
                ));
            }
            _ => {}
        }
        match &self.rabi_freq_hz {
            RabiFreqConfig::Uniform(f) => {
                if !(*f > 0.0) || !f.is_finite() {
                    return Err(invalid("rabi_freq_hz", "must be positive and finite"));
                }
            }
            RabiFreqConfig::PerSite(map) => {
                for (key, &f) in map {
                    let site: usize = key.parse().map_err(|_| {
                        invalid("rabi_freq_hz", format!("key `{key}` is not a site id"))
                    })?;
                    if site < 1 || site > n {
                        return Err(invalid(
                            "rabi_freq_hz",
                            format!("site {site} outside the array"),
                        ));
                    }
                    if !(f > 0.0) || !f.is_finite() {
                        return Err(invalid(
                            "rabi_freq_hz",
                            format!("site {site}: must be positive and finite"),
                        ));
                    }
                }
            }
        }
        let check_sites = |path: &str, sites: &[usize]| -> Result<(), ConfigError> {
            for &s in sites {
                if s < 1 || s > n {
                    return Err(invalid(path, format!("site {s} outside the array 1..={n}")));
                }
            }
            Ok(())
        };
        match &self.experiment {
            ExperimentConfig::Rabi(e) => {
                check_sites("experiment.addressed", &e.addressed)?;
                if let Some(m) = &e.measured {
                    check_sites("experiment.measured", m)?;
                }
                if e.addressed.is_empty() {
                    return Err(invalid("experiment.addressed", "must not be empty"));
                }
                if e.durations_s.iter().any(|&t| t < 0.0 || !t.is_finite()) {
                    return Err(invalid("experiment.durations_s", "negative or non-finite"));
                }
            }
            ExperimentConfig::Ramsey(e) => {
                check_sites("experiment.targets", &e.targets)?;
                if e.detunings_hz.len() != e.targets.len() {
                    return Err(invalid(
                        "experiment.detunings_hz",
                        "must be parallel to targets",
                    ));
                }
                if e.initial_phases_rad.len() != e.targets.len() {
                    return Err(invalid(
                        "experiment.initial_phases_rad",
                        "must be parallel to targets",
                    ));
                }
                if e.gaps_s.iter().any(|&t| t < 0.0 || !t.is_finite()) {
                    return Err(invalid("experiment.gaps_s", "negative or non-finite"));
                }
            }
            ExperimentConfig::Rb(e) => {
                check_sites("experiment.targets", &e.targets)?;
                if e.targets.is_empty() {
                    return Err(invalid("experiment.targets", "must not be empty"));
                }
                if e.lengths.is_empty() {
                    return Err(invalid("experiment.lengths", "must not be empty"));
                }
                if e.sequences_per_length == 0 {
                    return Err(invalid("experiment.sequences_per_length", "must be >= 1"));
                }
            }
            ExperimentConfig::CrosstalkScan(e) => {
                check_sites("experiment.addressed", &e.addressed)?;
                if !(e.duration_budget_s > 0.0) {
                    return Err(invalid("experiment.duration_budget_s", "must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn geometry(&self) -> ArrayGeometry {
        hex_positions(self.geometry.sites, self.geometry.pitch_um)
            .expect("validated geometry parameters")
    }

    pub fn crosstalk_matrix(&self) -> Result<CrosstalkMatrix, ConfigError> {
        let n = self.geometry.sites as usize;
        let matrix = match &self.crosstalk {
            CrosstalkConfig::Identity => CrosstalkMatrix::identity(n),
            CrosstalkConfig::Gaussian { waist_um } => {
                gaussian_crosstalk(&self.geometry(), *waist_um)
            }
            CrosstalkConfig::PaperPreset { floor } => paper_crosstalk_preset_with_floor(*floor),
            CrosstalkConfig::Matrix { rows } => CrosstalkMatrix::from_rows(rows.clone())
                .map_err(|e| invalid("crosstalk.rows", e.to_string()))?,
        };
        Ok(matrix)
    }

    pub fn rabi_vec(&self) -> Vec<f64> {
        let n = self.geometry.sites as usize;
        match &self.rabi_freq_hz {
            RabiFreqConfig::Uniform(f) => vec![*f; n],
            RabiFreqConfig::PerSite(map) => (1..=n)
                .map(|s| map.get(&s.to_string()).copied().unwrap_or(47.2e3))
                .collect(),
        }
    }

    /// Assemble the simulated system.
    pub fn system_model(&self) -> Result<SystemModel, ConfigError> {
        let model = SystemModel {
            n_sites: self.geometry.sites as usize,
            crosstalk: self.crosstalk_matrix()?,
            noise: self.noise,
            rabi: self.rabi_vec(),
            raman: self.raman.clone(),
            loading: (self.loading_rate < 1.0)
                .then(|| LoadingModel::new(self.loading_rate).expect("validated loading rate")),
        };
        model
            .validate()
            .map_err(|e| invalid("model", e.to_string()))?;
        Ok(model)
    }

    /// The experiment spec in the form the runners take, with the global
    /// analytic flag folded in.
    pub fn rabi_spec(&self, e: &RabiExperiment) -> RabiScanSpec {
        RabiScanSpec {
            addressed: e.addressed.iter().map(|&s| SiteId(s)).collect(),
            durations: e.durations_s.clone(),
            shots_per_point: e.shots_per_point,
            analytic: self.analytic,
            measured: e
                .measured
                .as_ref()
                .map(|m| m.iter().map(|&s| SiteId(s)).collect()),
        }
    }

    pub fn ramsey_spec(&self, e: &RamseyExperiment) -> RamseySpec {
        RamseySpec {
            targets: e.targets.iter().map(|&s| SiteId(s)).collect(),
            detunings_hz: e.detunings_hz.clone(),
            initial_phases: e.initial_phases_rad.clone(),
            gaps: e.gaps_s.clone(),
            shots_per_point: e.shots_per_point,
            analytic: self.analytic,
        }
    }

    pub fn rb_spec(&self, e: &RbExperiment) -> RbSpec {
        RbSpec {
            targets: e.targets.iter().map(|&s| SiteId(s)).collect(),
            lengths: e.lengths.clone(),
            sequences_per_length: e.sequences_per_length,
            shots_per_sequence: e.shots_per_sequence,
            parallel: e.parallel,
            analytic: self.analytic,
        }
    }

    pub fn crosstalk_scan_spec(&self, e: &CrosstalkScanExperiment) -> CrosstalkScanSpec {
        CrosstalkScanSpec {
            addressed: e.addressed.iter().map(|&s| SiteId(s)).collect(),
            duration_budget: e.duration_budget_s,
            long_points: e.long_points,
            short_cycles: e.short_cycles,
            short_points: e.short_points,
            shots_per_point: e.shots_per_point,
            analytic: self.analytic,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> String {
        r#"{
            "format_version": 1,
            "seed": 7,
            "experiment": { "type": "rabi", "addressed": [7], "durations_s": [0.0, 1e-6] }
        }"#
        .to_string()
    }

    #[test]
    fn minimal_config_resolves_defaults() {
        let config = RunConfig::from_json(&minimal()).unwrap();
        assert_eq!(config.geometry.sites, 10);
        assert_eq!(config.loading_rate, 1.0);
        assert!(matches!(
            config.crosstalk,
            CrosstalkConfig::PaperPreset { .. }
        ));
        let model = config.system_model().unwrap();
        assert_eq!(model.n_sites, 10);
        assert_eq!(model.rabi[0], 47.2e3);
        // resolved round trip
        let resolved = config.to_json();
        let back = RunConfig::from_json(&resolved).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = minimal().replace("\"seed\": 7,", "\"seed\": 7, \"sneed\": 8,");
        let err = RunConfig::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("sneed"), "{err}");
        let text = minimal().replace(
            "\"durations_s\": [0.0, 1e-6]",
            "\"durations_s\": [0.0, 1e-6], \"bogus\": 1",
        );
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn semantic_errors_carry_field_paths() {
        let text = minimal().replace("[7]", "[99]");
        let err = RunConfig::from_json(&text).unwrap_err();
        assert!(
            err.to_string().starts_with("experiment.addressed:"),
            "{err}"
        );

        let mut config = RunConfig::from_json(&minimal()).unwrap();
        config.loading_rate = 1.5;
        let err = config.validate().unwrap_err();
        assert!(err.to_string().starts_with("loading_rate:"), "{err}");

        let mut config = RunConfig::from_json(&minimal()).unwrap();
        config.noise.d_if = 2.0;
        assert!(config
            .validate()
            .unwrap_err()
            .to_string()
            .starts_with("noise:"));
    }

    #[test]
    fn version_gate() {
        let text = minimal().replace("\"format_version\": 1", "\"format_version\": 3");
        assert!(matches!(
            RunConfig::from_json(&text),
            Err(ConfigError::Version(3))
        ));
    }

    #[test]
    fn per_site_rabi_map() {
        let text = minimal().replace(
            "\"seed\": 7,",
            "\"seed\": 7, \"rabi_freq_hz\": {\"3\": 40000.0},",
        );
        let config = RunConfig::from_json(&text).unwrap();
        let rabi = config.rabi_vec();
        assert_eq!(rabi[2], 40000.0);
        assert_eq!(rabi[0], 47.2e3);
    }
}
