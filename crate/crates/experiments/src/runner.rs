//! Shared shot-loop machinery: keyed random streams, occupancy
//! post-selection, preparation, execution and measurement.

use crate::engine::{run_shot, Timeline};
use crate::model::SystemModel;
use crate::table::SiteStats;
use crate::RunError;
use fiberq_array::load_array;
use fiberq_core::{
    derive_rng, measure, measure_prob, prepare_state, prepare_state_analytic, sample_shot,
    QubitState, SiteId,
};

/// Stream purposes; part of the on-disk determinism contract.
pub mod tags {
    pub const NOISE: u64 = 1;
    pub const PREP: u64 = 2;
    pub const MEASURE: u64 = 3;
    pub const SEQUENCE: u64 = 4;
    pub const LOADING: u64 = 5;
}

const MAX_OCCUPANCY_ATTEMPTS: u64 = 1_000_000;

pub(crate) struct PointOutcome {
    /// Per measured site, in the order given to [`run_point`].
    pub stats: Vec<SiteStats>,
    pub occupancy_attempts: u64,
    pub occupancy_accepted: u64,
}

/// Run all shots of one experiment point over a prebuilt timeline.
///
/// `key` addresses the point, e.g. (point index, 0) for scans or
/// (length index, sequence index) for benchmarking. `measured` sites are
/// simulated and read out; `required` sites must be occupied for a shot to
/// count (occupancy is redrawn until they are).
pub(crate) fn run_point(
    timeline: &Timeline,
    model: &SystemModel,
    master_seed: u64,
    key: (u64, u64),
    shots: u32,
    analytic: bool,
    measured: &[SiteId],
    required: &[SiteId],
) -> Result<PointOutcome, RunError> {
    let (a, b) = key;
    let site_indices: Vec<usize> = measured.iter().map(|s| s.index()).collect();
    let mut stats = vec![SiteStats::default(); measured.len()];
    let mut occupancy_attempts = 0u64;
    let mut occupancy_accepted = 0u64;
    let shots = if analytic { shots.max(1) } else { shots };

    let mut states: Vec<QubitState> = Vec::with_capacity(measured.len());
    for shot in 0..shots as u64 {
        // Occupancy with post-selection on the required sites.
        let occupancy = match &model.loading {
            Some(loading) if loading.p_load < 1.0 => {
                let mut rng = derive_rng(master_seed, &[tags::LOADING, a, b, shot]);
                let mut occ;
                loop {
                    occupancy_attempts += 1;
                    occ = load_array(loading, model.n_sites, &mut rng);
                    if required.iter().all(|s| occ[s.index()]) {
                        break;
                    }
                    if occupancy_attempts > MAX_OCCUPANCY_ATTEMPTS {
                        return Err(RunError::PostSelection(occupancy_attempts));
                    }
                }
                occupancy_accepted += 1;
                Some(occ)
            }
            _ => None,
        };

        // Quasi-static noise realizations, frozen for the shot.
        let shot_ctx = {
            let mut rng = derive_rng(master_seed, &[tags::NOISE, a, b, shot]);
            sample_shot(&model.noise, model.n_sites, &mut rng)
        };

        // State preparation.
        states.clear();
        for site in measured {
            let state = if analytic {
                prepare_state_analytic(model.noise.d_if)
            } else {
                let mut rng = derive_rng(master_seed, &[tags::PREP, a, b, shot, site.0 as u64]);
                prepare_state(model.noise.d_if, &mut rng)
            };
            states.push(state);
        }

        run_shot(timeline, model, &shot_ctx, &site_indices, &mut states);

        // Readout.
        for ((site, state), slot) in measured.iter().zip(&states).zip(0..) {
            if let Some(occ) = &occupancy {
                if !occ[site.index()] {
                    continue;
                }
            }
            let value = if analytic {
                measure_prob(state, &model.noise)
            } else {
                let mut rng = derive_rng(master_seed, &[tags::MEASURE, a, b, shot, site.0 as u64]);
                f64::from(measure(state, &model.noise, &mut rng))
            };
            stats[slot as usize].push(value);
        }
    }

    Ok(PointOutcome {
        stats,
        occupancy_attempts,
        occupancy_accepted,
    })
}

/// Rolling FNV-1a over channel documents, for run provenance.
pub(crate) struct DigestAccumulator {
    hash: u64,
    any: bool,
}

impl DigestAccumulator {
    pub fn new() -> Self {
        DigestAccumulator {
            hash: 0xcbf2_9ce4_8422_2325,
            any: false,
        }
    }

    pub fn absorb(&mut self, compiled: &fiberq_pulse::CompiledCircuit) {
        for channel in &compiled.channels {
            self.any = true;
            for byte in channel.to_document().bytes() {
                self.hash ^= byte as u64;
                self.hash = self.hash.wrapping_mul(0x1000_0000_01b3);
            }
        }
    }

    pub fn finish(self) -> Option<String> {
        self.any.then(|| format!("{:016x}", self.hash))
    }
}
