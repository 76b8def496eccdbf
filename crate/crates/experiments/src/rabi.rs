//! Rabi scans: drive a set of channels for a variable duration and record
//! every site's excited-state population.

use crate::model::SystemModel;
use crate::runner::{run_point, DigestAccumulator};
use crate::table::{ResultTable, SiteSeries, SiteStats, TableMetadata, RESULT_TABLE_VERSION};
use crate::{engine::Timeline, RunError};
use fiberq_core::SiteId;
use fiberq_pulse::{compile_circuit, Circuit, GateOp};
use rayon::prelude::*;
use std::f64::consts::TAU;

#[derive(Clone, Debug)]
pub struct RabiScanSpec {
    /// Channels switched on.
    pub addressed: Vec<SiteId>,
    /// Pulse duration grid (s).
    pub durations: Vec<f64>,
    pub shots_per_point: u32,
    /// Evaluate exact outcome probabilities instead of sampling bits.
    pub analytic: bool,
    /// Sites to record; `None` records the whole array.
    pub measured: Option<Vec<SiteId>>,
}

impl RabiScanSpec {
    fn validate(&self, model: &SystemModel) -> Result<(), RunError> {
        for s in &self.addressed {
            if !model.contains(*s) {
                return Err(RunError::Spec(format!("addressed: unknown site {s}")));
            }
        }
        if self.addressed.is_empty() {
            return Err(RunError::Spec("addressed: empty".into()));
        }
        if self.durations.iter().any(|&t| t < 0.0 || !t.is_finite()) {
            return Err(RunError::Spec("durations: negative or non-finite".into()));
        }
        if self.durations.is_empty() {
            return Err(RunError::Spec("durations: empty".into()));
        }
        if !self.analytic && self.shots_per_point == 0 {
            return Err(RunError::Spec("shots_per_point: must be >= 1".into()));
        }
        if let Some(measured) = &self.measured {
            for s in measured {
                if !model.contains(*s) {
                    return Err(RunError::Spec(format!("measured: unknown site {s}")));
                }
            }
        }
        Ok(())
    }
}

pub fn run_rabi(
    spec: &RabiScanSpec,
    model: &SystemModel,
    master_seed: u64,
) -> Result<ResultTable, RunError> {
    model.validate()?;
    spec.validate(model)?;
    let measured: Vec<SiteId> = match &spec.measured {
        Some(m) => m.clone(),
        None => model.site_ids().collect(),
    };
    let rabi_map = model.rabi_map();

    // One compiled circuit per duration point: a plain resonant pulse of
    // area 2 pi Omega t on every addressed channel.
    let mut digest = DigestAccumulator::new();
    let mut timelines = Vec::with_capacity(spec.durations.len());
    for &t in &spec.durations {
        let mut circuit =
            Circuit::new(spec.addressed.clone()).map_err(|e| RunError::Spec(e.to_string()))?;
        for &site in &spec.addressed {
            let area = TAU * model.rabi[site.index()] * t;
            circuit
                .push(site, GateOp::Rotation { area, phase: 0.0 })
                .map_err(|e| RunError::Spec(e.to_string()))?;
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
                &measured,
                &spec.addressed,
            )
        })
        .collect::<Result<_, _>>()?;

    let mut attempts = 0u64;
    let mut accepted = 0u64;
    let mut series: Vec<SiteSeries> = measured
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
        experiment: "rabi".into(),
        control_name: "pulse_duration_s".into(),
        control: spec.durations.clone(),
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

pub(crate) fn push_stat(series: &mut SiteSeries, stat: &SiteStats, analytic: bool) {
    series.mean.push(stat.mean());
    series.std_error.push(stat.std_error(analytic));
    series.shots.push(stat.n);
}
