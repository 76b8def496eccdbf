//! Bundled run configurations for the standard characterization runs.
//!
//! These are the fixture inputs of the acceptance suite. The physical
//! values (drive strength, coherence times, crosstalk couplings, detuning
//! and phase ladders) are the measured ones; shot counts and grids are
//! chosen for desk-scale runtimes.

use crate::config::{
    CrosstalkConfig, CrosstalkScanExperiment, ExperimentConfig, GeometryConfig, RabiExperiment,
    RamseyExperiment, RbExperiment, RunConfig,
};
use fiberq_core::{sigma_from_t2_star, NoiseParams};
use fiberq_pulse::RamanConfig;
use std::f64::consts::PI;

pub const PRESET_NAMES: [&str; 6] = ["fig2d", "fig3", "fig4", "fig5", "fig7", "noiseless_rb"];

fn base(seed: u64, description: &str, experiment: ExperimentConfig) -> RunConfig {
    RunConfig {
        format_version: 1,
        description: Some(description.to_string()),
        seed,
        geometry: GeometryConfig::default(),
        crosstalk: CrosstalkConfig::default(),
        noise: NoiseParams::noiseless(),
        raman: RamanConfig::default(),
        rabi_freq_hz: crate::config::RabiFreqConfig::Uniform(47.2e3),
        loading_rate: 1.0,
        analytic: false,
        experiment,
    }
}

/// Noise level of the site-by-site benchmarking runs: addressing-beam
/// dephasing (T2* = 4.6 ms), 2% slow amplitude modulation, a lumped
/// per-gate depolarization standing in for the unmodeled error budget, and
/// SPAM depolarization putting the zero-length survival at 0.993.
fn benchmark_noise() -> NoiseParams {
    NoiseParams {
        sigma_detuning: sigma_from_t2_star(4.6e-3),
        amp_mod_depth: 0.02,
        d_if: 0.014,
        readout_eps0: 0.0,
        readout_eps1: 0.0,
        interference_enabled: false,
        gate_depol: 5.4e-3,
    }
}

fn default_lengths() -> Vec<u32> {
    vec![0, 2, 4, 8, 16, 32, 64, 128, 256]
}

/// The simultaneous-Ramsey software-detuning and initial-phase ladders,
/// site 1 through site 10 (used by the fig4 preset).
pub fn ramsey_ladder() -> (Vec<f64>, Vec<f64>) {
    let detunings = vec![
        5.5e3, 5.0e3, 4.5e3, 4.0e3, 3.5e3, 3.0e3, 2.5e3, 2.0e3, 1.5e3, 1.0e3,
    ];
    let phases = vec![
        0.0,
        PI / 2.0,
        -PI / 2.0,
        PI / 4.0,
        -PI / 4.0,
        PI / 6.0,
        -PI / 6.0,
        PI / 8.0,
        -PI / 8.0,
        PI / 10.0,
    ];
    (detunings, phases)
}

pub fn preset(name: &str) -> Option<RunConfig> {
    let config = match name {
        "fig2d" => {
            // Addressed Rabi oscillation of one site with every site
            // recorded; the crosstalk floor keeps bystanders dark.
            let omega = 47.2e3;
            let points = 60;
            let durations: Vec<f64> = (0..points)
                .map(|k| 2.5 / omega * k as f64 / (points as f64 - 1.0))
                .collect();
            base(
                20_240_201,
                "single-site addressing: Rabi scan of site 7, all sites recorded",
                ExperimentConfig::Rabi(RabiExperiment {
                    addressed: vec![7],
                    durations_s: durations,
                    shots_per_point: 200,
                    measured: None,
                }),
            )
        }
        "fig3" => {
            let mut config = base(
                20_240_301,
                "site-by-site randomized benchmarking of all ten qubits",
                ExperimentConfig::Rb(RbExperiment {
                    targets: (1..=10).collect(),
                    lengths: default_lengths(),
                    sequences_per_length: 10,
                    shots_per_sequence: 200,
                    parallel: false,
                }),
            );
            config.noise = benchmark_noise();
            config
        }
        "fig4" | "fig4_ramsey" => {
            let (detunings_hz, initial_phases_rad) = ramsey_ladder();
            let points = 101;
            let gaps: Vec<f64> = (0..points)
                .map(|k| 2.0e-3 * k as f64 / (points as f64 - 1.0))
                .collect();
            let mut config = base(
                20_240_401,
                "simultaneous Ramsey on all ten qubits with per-site software detunings",
                ExperimentConfig::Ramsey(RamseyExperiment {
                    targets: (1..=10).collect(),
                    detunings_hz,
                    initial_phases_rad,
                    gaps_s: gaps,
                    shots_per_point: 200,
                }),
            );
            // magic-intensity trapping between pulses: T2* above 50 ms
            config.noise.sigma_detuning = sigma_from_t2_star(50e-3);
            config
        }
        "fig5" => {
            let mut config = base(
                20_240_501,
                "parallel randomized benchmarking on four arbitrary qubits",
                ExperimentConfig::Rb(RbExperiment {
                    targets: vec![1, 4, 6, 9],
                    lengths: default_lengths(),
                    sequences_per_length: 10,
                    shots_per_sequence: 200,
                    parallel: true,
                }),
            );
            config.noise = benchmark_noise();
            config.noise.interference_enabled = true;
            config
        }
        "fig7" => {
            let mut config = base(
                20_240_701,
                "crosstalk characterization: address each site, fit every site's Rabi rate",
                ExperimentConfig::CrosstalkScan(CrosstalkScanExperiment {
                    addressed: Vec::new(),
                    duration_budget_s: 30e-3,
                    long_points: 240,
                    short_cycles: 2.5,
                    short_points: 96,
                    shots_per_point: 0,
                }),
            );
            config.analytic = true;
            config
        }
        "noiseless_rb" => {
            let mut config = base(
                20_240_101,
                "consistency fixture: benchmarking with no noise ends every sequence in |1>",
                ExperimentConfig::Rb(RbExperiment {
                    targets: vec![7],
                    lengths: default_lengths(),
                    sequences_per_length: 4,
                    shots_per_sequence: 0,
                    parallel: false,
                }),
            );
            config.analytic = true;
            config
        }
        _ => return None,
    };
    Some(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_validate_and_roundtrip() {
        for name in PRESET_NAMES {
            let config = preset(name).unwrap_or_else(|| panic!("missing preset {name}"));
            config.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            let back = RunConfig::from_json(&config.to_json())
                .unwrap_or_else(|e| panic!("{name} reparse: {e}"));
            assert_eq!(config, back, "{name}");
            config.system_model().unwrap();
        }
        assert!(preset("fig4_ramsey").is_some());
        assert!(preset("nope").is_none());
    }
}
