//! Command implementations behind the CLI surface.

use crate::config::{ConfigError, ExperimentConfig, RunConfig};
use crate::io::{atomic_write, channel_stem, ensure_dir, plotdata, read_results, write_json};
use crate::presets;
use fiberq_experiments::{run_crosstalk_scan, run_rabi, run_ramsey, run_rb, ResultTable, RunError};
use fiberq_fit::{
    binomial_weights, fit_damped_cosine, fit_gaussian_decay, fit_rb, DecayShape, FitResult,
};
use fiberq_pulse::{
    clifford_table, compile_circuit, entry_unitary, render_waveform, write_waveform_files, Circuit,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Run(#[from] RunError),
    #[error("circuit {path}: {source}")]
    CircuitParse {
        path: PathBuf,
        source: fiberq_pulse::CircuitParseError,
    },
    #[error("{0}")]
    Compile(#[from] fiberq_pulse::CompileError),
    #[error("{0}")]
    Render(#[from] fiberq_pulse::RenderError),
    #[error("{0}")]
    Fit(#[from] fiberq_fit::FitError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Other(String),
    #[error("unknown preset `{0}` (available: {1})")]
    UnknownPreset(String, String),
}

/// Options shared by every subcommand.
#[derive(Clone, Debug, Default)]
pub struct GlobalOpts {
    pub seed: Option<u64>,
    pub analytic: bool,
}

/// Load a run configuration from a file or a bundled preset, applying the
/// global overrides.
pub fn load_config(
    config_path: Option<&Path>,
    preset_name: Option<&str>,
    opts: &GlobalOpts,
) -> Result<(RunConfig, Option<String>), CommandError> {
    let (mut config, name) = match (config_path, preset_name) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            (RunConfig::from_json(&text)?, None)
        }
        (None, Some(name)) => {
            let config = presets::preset(name).ok_or_else(|| {
                CommandError::UnknownPreset(name.to_string(), presets::PRESET_NAMES.join(", "))
            })?;
            (config, Some(name.to_string()))
        }
        _ => {
            return Err(CommandError::Other(
                "exactly one of --config or --preset is required".into(),
            ))
        }
    };
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    if opts.analytic {
        config.analytic = true;
    }
    config.validate()?;
    Ok((config, name))
}

pub struct RunArtifacts {
    pub written: Vec<PathBuf>,
    pub summary: String,
}

/// Execute the configured experiment and persist its outputs.
pub fn cmd_run(
    config: &RunConfig,
    preset_name: Option<&str>,
    out_dir: &Path,
) -> Result<RunArtifacts, CommandError> {
    let out = ensure_dir(out_dir)?;
    let model = config.system_model()?;
    let mut written = Vec::new();

    let resolved_path = out.join("config.resolved.json");
    atomic_write(&resolved_path, config.to_json().as_bytes())?;
    written.push(resolved_path);

    let summary = match &config.experiment {
        ExperimentConfig::Rabi(e) => {
            let mut table = run_rabi(&config.rabi_spec(e), &model, config.seed)?;
            table.metadata.preset = preset_name.map(String::from);
            let path = out.join("results.json");
            write_json(&path, &table)?;
            written.push(path);
            format!(
                "rabi scan: {} points x {} sites",
                table.control.len(),
                table.series.len()
            )
        }
        ExperimentConfig::Ramsey(e) => {
            let mut table = run_ramsey(&config.ramsey_spec(e), &model, config.seed)?;
            table.metadata.preset = preset_name.map(String::from);
            let path = out.join("results.json");
            write_json(&path, &table)?;
            written.push(path);
            format!(
                "ramsey: {} gaps x {} sites",
                table.control.len(),
                table.series.len()
            )
        }
        ExperimentConfig::Rb(e) => {
            let mut table = run_rb(&config.rb_spec(e), &model, config.seed)?;
            table.metadata.preset = preset_name.map(String::from);
            let path = out.join("results.json");
            write_json(&path, &table)?;
            written.push(path);
            format!(
                "{}: {} lengths x {} sites",
                table.experiment,
                table.control.len(),
                table.series.len()
            )
        }
        ExperimentConfig::CrosstalkScan(e) => {
            let scan = run_crosstalk_scan(&config.crosstalk_scan_spec(e), &model, config.seed)?;
            let path = out.join("crosstalk_scan.json");
            write_json(&path, &scan)?;
            written.push(path);
            format!(
                "crosstalk scan: {} entries, resolution {:.3} Hz",
                scan.entries.len(),
                scan.resolution_hz
            )
        }
    };
    Ok(RunArtifacts { written, summary })
}

/// Compile a circuit file to channel schedule documents (and optionally
/// rendered waveforms).
pub fn cmd_compile(
    circuit_path: &Path,
    config: &RunConfig,
    out_dir: &Path,
    sample_rate: Option<f64>,
) -> Result<RunArtifacts, CommandError> {
    let text = std::fs::read_to_string(circuit_path)?;
    let circuit = Circuit::parse(&text).map_err(|source| CommandError::CircuitParse {
        path: circuit_path.to_path_buf(),
        source,
    })?;
    let model = config.system_model()?;
    let compiled = compile_circuit(&circuit, &model.raman, &model.rabi_map())?;

    let out = ensure_dir(out_dir)?;
    let mut written = Vec::new();
    for channel in &compiled.channels {
        let stem = channel_stem(channel.channel);
        let doc_path = out.join(format!("{stem}.schedule.txt"));
        atomic_write(&doc_path, channel.to_document().as_bytes())?;
        written.push(doc_path);
        if let Some(fs) = sample_rate {
            let waveform = render_waveform(channel, fs)?;
            written.extend(write_waveform_files(&waveform, &out, &stem)?);
        }
    }
    Ok(RunArtifacts {
        summary: format!(
            "compiled {} channels, total duration {:.6e} s",
            compiled.channels.len(),
            compiled.total_duration()
        ),
        written,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SiteFit {
    pub site: fiberq_core::SiteId,
    #[serde(flatten)]
    pub fit: FitResult,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitReport {
    pub format_version: u32,
    pub model: String,
    pub source_experiment: String,
    pub fits: Vec<SiteFit>,
}

impl FitReport {
    pub fn all_converged(&self) -> bool {
        self.fits.iter().all(|f| f.fit.converged)
    }

    pub fn fit_for(&self, site: fiberq_core::SiteId) -> Option<&FitResult> {
        self.fits.iter().find(|f| f.site == site).map(|f| &f.fit)
    }
}

/// Weights for one series. Benchmarking errors are sequence-to-sequence
/// scatter, so their reported standard errors are used directly; scan
/// curves are binomial measurements and get smoothed binomial weights.
fn series_weights(series: &fiberq_experiments::SiteSeries, rb: bool) -> Option<Vec<f64>> {
    if rb && series.std_error.iter().all(|&e| e > 0.0) {
        Some(series.std_error.iter().map(|&e| 1.0 / (e * e)).collect())
    } else if series.shots.iter().all(|&n| n > 0) && !series.mean.is_empty() {
        Some(binomial_weights(&series.mean, &series.shots))
    } else {
        None
    }
}

/// Fit every site series of a results table with the named model.
pub fn cmd_fit(
    table: &ResultTable,
    model_name: &str,
    shape: Option<DecayShape>,
) -> Result<FitReport, CommandError> {
    let mut fits = Vec::new();
    for series in &table.series {
        let weights = series_weights(series, model_name == "rb");
        let fit = match model_name {
            "rb" => {
                if table.control_name != "sequence_length" {
                    return Err(CommandError::Other(format!(
                        "rb model expects a sequence_length table, got `{}`",
                        table.control_name
                    )));
                }
                fit_rb(&table.control, &series.mean, weights.as_deref())?
            }
            "damped_cosine" => {
                fit_damped_cosine(&table.control, &series.mean, weights.as_deref(), shape)?
            }
            "gaussian_decay" => fit_gaussian_decay(&table.control, &series.mean, shape)?,
            other => {
                return Err(CommandError::Other(format!(
                    "unknown fit model `{other}` (rb, damped_cosine, gaussian_decay)"
                )))
            }
        };
        fits.push(SiteFit {
            site: series.site,
            fit,
        });
    }
    Ok(FitReport {
        format_version: 1,
        model: model_name.to_string(),
        source_experiment: table.experiment.clone(),
        fits,
    })
}

pub fn cmd_fit_from_file(
    results_path: &Path,
    model_name: &str,
    shape: Option<DecayShape>,
    out_path: Option<&Path>,
) -> Result<FitReport, CommandError> {
    let table = read_results(results_path).map_err(CommandError::Other)?;
    let report = cmd_fit(&table, model_name, shape)?;
    if let Some(path) = out_path {
        write_json(path, &report)?;
    }
    Ok(report)
}

pub fn cmd_emit_plotdata(
    results_path: &Path,
    out_path: Option<&Path>,
) -> Result<String, CommandError> {
    let table = read_results(results_path).map_err(CommandError::Other)?;
    let text = plotdata(&table);
    if let Some(path) = out_path {
        atomic_write(path, text.as_bytes())?;
    }
    Ok(text)
}

#[derive(Clone, Debug, Serialize)]
pub struct TableVerification {
    pub max_entry_deviation: f64,
    pub max_unitarity_error: f64,
    pub closure_pairs_checked: usize,
    pub max_closure_deviation: f64,
    pub passed: bool,
}

/// Check the gate table: every entry's rotation/offset decomposition
/// against its reference matrix, and closure of all 576 pair products.
pub fn cmd_verify_clifford_table() -> TableVerification {
    let table = clifford_table();
    let mut max_entry_deviation = 0.0f64;
    let mut max_unitarity_error = 0.0f64;
    for entry in table {
        max_entry_deviation = max_entry_deviation
            .max(entry_unitary(entry).global_phase_distance(&entry.reference_unitary));
        max_unitarity_error = max_unitarity_error.max(entry.reference_unitary.unitarity_error());
    }
    let mut max_closure_deviation = 0.0f64;
    let mut pairs = 0;
    for a in table {
        for b in table {
            let product = entry_unitary(a) * entry_unitary(b);
            let best = table
                .iter()
                .map(|e| product.global_phase_distance(&e.reference_unitary))
                .fold(f64::INFINITY, f64::min);
            max_closure_deviation = max_closure_deviation.max(best);
            pairs += 1;
        }
    }
    TableVerification {
        max_entry_deviation,
        max_unitarity_error,
        closure_pairs_checked: pairs,
        max_closure_deviation,
        passed: max_entry_deviation < 1e-10
            && max_unitarity_error < 1e-12
            && max_closure_deviation < 1e-8,
    }
}
