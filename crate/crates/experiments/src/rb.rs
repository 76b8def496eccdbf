//! Randomized benchmarking with the 24-gate table.
//!
//! Each sequence draws uniform gate indices, computes the net unitary and
//! appends the lowest-index correction gate that rotates |0> onto |1>. In
//! parallel mode every target runs its own independent sequence, aligned
//! gate-by-gate across channels. Sequence draws are keyed by (site, length,
//! sequence), so an individual run and a parallel run with the same master
//! seed apply identical gates to a given site.

use crate::model::SystemModel;
use crate::runner::{run_point, tags, DigestAccumulator};
use crate::table::{
    RbSequenceRecord, ResultTable, SiteSeries, SiteStats, TableMetadata, RESULT_TABLE_VERSION,
};
use crate::{engine::Timeline, RunError};
use fiberq_core::{derive_rng, Mat2, SiteId};
use fiberq_pulse::{
    clifford_table, compile_circuit, entry_unitary, inverse_to_one, Circuit, CompiledCircuit,
    GateOp,
};
use rand::RngExt;
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct RbSpec {
    pub targets: Vec<SiteId>,
    /// Sequence lengths (number of random gates before the correction).
    pub lengths: Vec<u32>,
    pub sequences_per_length: u32,
    pub shots_per_sequence: u32,
    /// Drive all targets simultaneously with independent sequences; when
    /// false, targets are benchmarked one at a time.
    pub parallel: bool,
    pub analytic: bool,
}

impl Default for RbSpec {
    fn default() -> Self {
        RbSpec {
            targets: vec![SiteId(7)],
            lengths: vec![0, 2, 4, 8, 16, 32, 64, 128, 256],
            sequences_per_length: 10,
            shots_per_sequence: 100,
            parallel: false,
            analytic: false,
        }
    }
}

impl RbSpec {
    fn validate(&self, model: &SystemModel) -> Result<(), RunError> {
        if self.targets.is_empty() {
            return Err(RunError::Spec("targets: empty".into()));
        }
        for s in &self.targets {
            if !model.contains(*s) {
                return Err(RunError::Spec(format!("targets: unknown site {s}")));
            }
        }
        let mut sorted = self.targets.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.targets.len() {
            return Err(RunError::Spec("targets: duplicates".into()));
        }
        if self.lengths.is_empty() {
            return Err(RunError::Spec("lengths: empty".into()));
        }
        if self.sequences_per_length == 0 {
            return Err(RunError::Spec("sequences_per_length: must be >= 1".into()));
        }
        if !self.analytic && self.shots_per_sequence == 0 {
            return Err(RunError::Spec("shots_per_sequence: must be >= 1".into()));
        }
        Ok(())
    }
}

/// Draw one site's gate sequence and its correction.
fn draw_sequence(
    master_seed: u64,
    site: SiteId,
    length_index: usize,
    sequence_index: u32,
    length: u32,
) -> (Vec<u8>, u8) {
    let mut rng = derive_rng(
        master_seed,
        &[
            tags::SEQUENCE,
            site.0 as u64,
            length_index as u64,
            sequence_index as u64,
        ],
    );
    let cliffords: Vec<u8> = (0..length).map(|_| rng.random_range(0..24u8)).collect();
    let table = clifford_table();
    let net = cliffords.iter().fold(Mat2::identity(), |acc, &k| {
        entry_unitary(&table[k as usize]) * acc
    });
    let correction = inverse_to_one(&net)
        .expect("products of table gates stay in the group")
        .index;
    (cliffords, correction)
}

/// Build the aligned circuit for one (length, sequence) job.
fn build_circuit(
    sites: &[SiteId],
    sequences: &BTreeMap<SiteId, (Vec<u8>, u8)>,
    length: u32,
) -> Circuit {
    let mut circuit = Circuit::new(sites.to_vec()).expect("unique targets");
    for slot in 0..length {
        for &site in sites {
            let gate = sequences[&site].0[slot as usize];
            circuit
                .push(site, GateOp::Clifford(gate))
                .expect("valid gate");
        }
        circuit.barrier();
    }
    for &site in sites {
        let correction = sequences[&site].1;
        circuit
            .push(site, GateOp::Clifford(correction))
            .expect("valid correction");
    }
    circuit
}

struct Job {
    length_index: usize,
    sequence_index: u32,
    sites: Vec<SiteId>,
    compiled: CompiledCircuit,
    records: Vec<RbSequenceRecord>,
}

pub fn run_rb(
    spec: &RbSpec,
    model: &SystemModel,
    master_seed: u64,
) -> Result<ResultTable, RunError> {
    model.validate()?;
    spec.validate(model)?;
    let rabi_map = model.rabi_map();

    // Compile every (length, sequence) job up front; runs are then pure
    // Monte Carlo over prebuilt timelines.
    let mut digest = DigestAccumulator::new();
    let mut jobs = Vec::new();
    for (length_index, &length) in spec.lengths.iter().enumerate() {
        for sequence_index in 0..spec.sequences_per_length {
            let groups: Vec<Vec<SiteId>> = if spec.parallel {
                vec![spec.targets.clone()]
            } else {
                spec.targets.iter().map(|&s| vec![s]).collect()
            };
            for sites in groups {
                let mut sequences = BTreeMap::new();
                let mut records = Vec::new();
                for &site in &sites {
                    let (cliffords, correction) =
                        draw_sequence(master_seed, site, length_index, sequence_index, length);
                    records.push(RbSequenceRecord {
                        site,
                        length,
                        sequence_index,
                        cliffords: cliffords.clone(),
                        correction,
                    });
                    sequences.insert(site, (cliffords, correction));
                }
                let circuit = build_circuit(&sites, &sequences, length);
                let compiled = compile_circuit(&circuit, &model.raman, &rabi_map)?;
                digest.absorb(&compiled);
                jobs.push(Job {
                    length_index,
                    sequence_index,
                    sites,
                    compiled,
                    records,
                });
            }
        }
    }

    struct JobOutcome {
        length_index: usize,
        sites: Vec<SiteId>,
        stats: Vec<SiteStats>,
        attempts: u64,
        accepted: u64,
    }
    let outcomes: Vec<JobOutcome> = jobs
        .par_iter()
        .map(|job| {
            let timeline = Timeline::build(&job.compiled, model);
            let outcome = run_point(
                &timeline,
                model,
                master_seed,
                (job.length_index as u64, job.sequence_index as u64),
                spec.shots_per_sequence,
                spec.analytic,
                &job.sites,
                &job.sites,
            )?;
            Ok(JobOutcome {
                length_index: job.length_index,
                sites: job.sites.clone(),
                stats: outcome.stats,
                attempts: outcome.occupancy_attempts,
                accepted: outcome.occupancy_accepted,
            })
        })
        .collect::<Result<_, RunError>>()?;

    // Aggregate sequence means into per-length survival estimates. The
    // standard error at each length is the scatter of per-sequence means
    // (sequence-to-sequence variation dominates the binomial term), falling
    // back to binomial for a single sequence.
    let n_lengths = spec.lengths.len();
    let mut seq_means: BTreeMap<SiteId, Vec<Vec<f64>>> = spec
        .targets
        .iter()
        .map(|&s| (s, vec![Vec::new(); n_lengths]))
        .collect();
    let mut pooled: BTreeMap<SiteId, Vec<SiteStats>> = spec
        .targets
        .iter()
        .map(|&s| (s, vec![SiteStats::default(); n_lengths]))
        .collect();
    let mut attempts = 0u64;
    let mut accepted = 0u64;
    for outcome in &outcomes {
        attempts += outcome.attempts;
        accepted += outcome.accepted;
        for (slot, &site) in outcome.sites.iter().enumerate() {
            let stat = &outcome.stats[slot];
            if stat.n > 0 {
                seq_means.get_mut(&site).unwrap()[outcome.length_index].push(stat.mean());
            }
            pooled.get_mut(&site).unwrap()[outcome.length_index].merge(stat);
        }
    }

    let series: Vec<SiteSeries> = spec
        .targets
        .iter()
        .map(|&site| {
            let mut mean = Vec::with_capacity(n_lengths);
            let mut std_error = Vec::with_capacity(n_lengths);
            let mut shots = Vec::with_capacity(n_lengths);
            for li in 0..n_lengths {
                let means = &seq_means[&site][li];
                let pool = &pooled[&site][li];
                let m = if means.is_empty() {
                    0.0
                } else {
                    means.iter().sum::<f64>() / means.len() as f64
                };
                let err = if means.len() > 1 {
                    let var = means.iter().map(|&x| (x - m) * (x - m)).sum::<f64>()
                        / (means.len() as f64 - 1.0);
                    (var / means.len() as f64).sqrt()
                } else {
                    pool.std_error(spec.analytic)
                };
                mean.push(m);
                std_error.push(err);
                shots.push(pool.n);
            }
            SiteSeries {
                site,
                mean,
                std_error,
                shots,
            }
        })
        .collect();

    let records: Vec<RbSequenceRecord> = jobs.into_iter().flat_map(|j| j.records).collect();
    Ok(ResultTable {
        format_version: RESULT_TABLE_VERSION,
        experiment: if spec.parallel { "rb_parallel" } else { "rb" }.into(),
        control_name: "sequence_length".into(),
        control: spec.lengths.iter().map(|&l| l as f64).collect(),
        series,
        metadata: TableMetadata {
            master_seed,
            analytic: spec.analytic,
            noise: model.noise,
            preset: None,
            schedule_digest: digest.finish(),
            occupancy_rate: (attempts > 0).then(|| accepted as f64 / attempts as f64),
            rb_sequences: Some(records),
        },
    })
}
