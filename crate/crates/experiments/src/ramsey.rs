//! Simultaneous Ramsey interferometry with software detunings.
//!
//! Per site: pi/2 pulse, free gap T, virtual-Z by (2 pi f_i T + phi_i),
//! pi/2 pulse. The detuning lives entirely in the phase-shift pulse, so the
//! noiseless fringe is exactly P1(T) = (1 + cos(2 pi f_i T + phi_i)) / 2,
//! and quasi-static detuning noise multiplies it by the Gaussian contrast
//! envelope.

use crate::model::SystemModel;
use crate::rabi::push_stat;
use crate::runner::{run_point, DigestAccumulator};
use crate::table::{ResultTable, SiteSeries, TableMetadata, RESULT_TABLE_VERSION};
use crate::{engine::Timeline, RunError};
use fiberq_core::SiteId;
use fiberq_pulse::{compile_circuit, Circuit, GateOp};
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, TAU};

#[derive(Clone, Debug)]
pub struct RamseySpec {
    pub targets: Vec<SiteId>,
    /// Software detuning per target (Hz), parallel to `targets`.
    pub detunings_hz: Vec<f64>,
    /// Initial fringe phase per target (rad), parallel to `targets`.
    pub initial_phases: Vec<f64>,
    /// Free-evolution gap grid (s).
    pub gaps: Vec<f64>,
    pub shots_per_point: u32,
    pub analytic: bool,
}

impl RamseySpec {
    fn validate(&self, model: &SystemModel) -> Result<(), RunError> {
        if self.targets.is_empty() {
            return Err(RunError::Spec("targets: empty".into()));
        }
        for s in &self.targets {
            if !model.contains(*s) {
                return Err(RunError::Spec(format!("targets: unknown site {s}")));
            }
        }
        if self.detunings_hz.len() != self.targets.len()
            || self.initial_phases.len() != self.targets.len()
        {
            return Err(RunError::Spec(
                "detunings_hz and initial_phases must be parallel to targets".into(),
            ));
        }
        if self.gaps.iter().any(|&t| t < 0.0 || !t.is_finite()) {
            return Err(RunError::Spec("gaps: negative or non-finite".into()));
        }
        if self.gaps.is_empty() {
            return Err(RunError::Spec("gaps: empty".into()));
        }
        if !self.analytic && self.shots_per_point == 0 {
            return Err(RunError::Spec("shots_per_point: must be >= 1".into()));
        }
        Ok(())
    }
}

pub fn run_ramsey(
    spec: &RamseySpec,
    model: &SystemModel,
    master_seed: u64,
) -> Result<ResultTable, RunError> {
    model.validate()?;
    spec.validate(model)?;
    let rabi_map = model.rabi_map();

    let mut digest = DigestAccumulator::new();
    let mut timelines = Vec::with_capacity(spec.gaps.len());
    for &gap in &spec.gaps {
        let mut circuit =
            Circuit::new(spec.targets.clone()).map_err(|e| RunError::Spec(e.to_string()))?;
        for (k, &site) in spec.targets.iter().enumerate() {
            let frame = TAU * spec.detunings_hz[k] * gap + spec.initial_phases[k];
            let ops = [
                GateOp::Rotation {
                    area: FRAC_PI_2,
                    phase: 0.0,
                },
                GateOp::Idle(gap),
                GateOp::VirtualZ(frame),
                GateOp::Rotation {
                    area: FRAC_PI_2,
                    phase: 0.0,
                },
            ];
            for op in ops {
                circuit
                    .push(site, op)
                    .map_err(|e| RunError::Spec(e.to_string()))?;
            }
        }
        let compiled = compile_circuit(&circuit, &model.raman, &rabi_map)?;
        digest.absorb(&compiled);
        timelines.push(Timeline::build(&compiled, model));
    }

    let outcomes: Vec<_> = timelines
        .par_iter()
        .enumerate()
        .map(|(p, timeline)| {
            run_point(
                timeline,
                model,
                master_seed,
                (p as u64, 0),
                spec.shots_per_point,
                spec.analytic,
                &spec.targets,
                &spec.targets,
            )
        })
        .collect::<Result<_, _>>()?;

    let mut attempts = 0u64;
    let mut accepted = 0u64;
    let mut series: Vec<SiteSeries> = spec
        .targets
        .iter()
        .map(|&site| SiteSeries {
            site,
            mean: Vec::new(),
            std_error: Vec::new(),
            shots: Vec::new(),
        })
        .collect();
    for outcome in &outcomes {
        attempts += outcome.occupancy_attempts;
        accepted += outcome.occupancy_accepted;
        for (slot, stat) in outcome.stats.iter().enumerate() {
            push_stat(&mut series[slot], stat, spec.analytic);
        }
    }

    Ok(ResultTable {
        format_version: RESULT_TABLE_VERSION,
        experiment: "ramsey".into(),
        control_name: "gap_s".into(),
        control: spec.gaps.clone(),
        series,
        metadata: TableMetadata {
            master_seed,
            analytic: spec.analytic,
            noise: model.noise,
            preset: None,
            schedule_digest: digest.finish(),
            occupancy_rate: (attempts > 0).then(|| accepted as f64 / attempts as f64),
            rb_sequences: None,
        },
    })
}

/// Noiseless closed form of the fringe, for oracle tests.
pub fn ramsey_ideal_p1(detuning_hz: f64, initial_phase: f64, gap: f64) -> f64 {
    0.5 * (1.0 + (TAU * detuning_hz * gap + initial_phase).cos())
}
