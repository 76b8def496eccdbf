//! Lowering circuits to per-channel RF segment schedules.

use crate::circuit::{Circuit, GateOp};
use crate::clifford::clifford_table;
use crate::raman::{RamanConfig, RamanConfigError};
use crate::schedule::{ChannelSchedule, CompiledCircuit, Segment, SegmentKind};
use fiberq_core::{wrap_angle, SiteId};
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CompileError {
    #[error("no Rabi frequency configured for targeted site {0}")]
    MissingRabiFrequency(SiteId),
    #[error("Rabi frequency for site {0} must be positive, got {1}")]
    NonPositiveRabi(SiteId, f64),
    #[error("clifford index {0} outside 0..24")]
    UnknownClifford(u8),
    #[error("rotation area {0} is negative")]
    NegativeArea(f64),
    #[error("idle duration {0} is negative")]
    NegativeDuration(f64),
    #[error(transparent)]
    Raman(#[from] RamanConfigError),
}

/// Compile a circuit against a Raman chain configuration and per-site Rabi
/// frequencies (Hz).
///
/// Lowering rules, per gate:
/// * an equatorial rotation of area `a` and phase `p` becomes one drive
///   segment of duration a / (2 pi Omega) at the channel reference frequency
///   with programmed RF phase wrap(p)/2 (qubit phases are twice RF phases);
/// * a virtual-Z offset `o` becomes one light-off phase-shift segment of the
///   configured fixed duration tau at frequency ref + wrap(o)/(4 pi tau);
///   its accumulated RF phase, carried by phase continuity, rotates the
///   frame of every later pulse on the channel;
/// * zero-area rotations and offsets that wrap to zero compile to nothing;
/// * gates inside one barrier-delimited moment start simultaneously on all
///   channels, and channels idle-pad to the end of the moment.
pub fn compile_circuit(
    circuit: &Circuit,
    cfg: &RamanConfig,
    rabi: &BTreeMap<SiteId, f64>,
) -> Result<CompiledCircuit, CompileError> {
    cfg.validate()?;
    for &site in circuit.targets() {
        match rabi.get(&site) {
            None => return Err(CompileError::MissingRabiFrequency(site)),
            Some(&f) if !(f > 0.0) => return Err(CompileError::NonPositiveRabi(site, f)),
            Some(_) => {}
        }
    }

    let mut channels: BTreeMap<SiteId, ChannelSchedule> = circuit
        .targets()
        .iter()
        .map(|&s| (s, ChannelSchedule::new(s, cfg.channel_ref_frequency(s))))
        .collect();
    let mut moment_ends = Vec::new();
    let mut t = 0.0f64;

    for moment in circuit.moments() {
        // Lower each channel's run for this moment.
        let mut runs: BTreeMap<SiteId, (Vec<Segment>, f64)> = BTreeMap::new();
        for (&site, ops) in moment {
            let omega = rabi[&site];
            let ref_freq = cfg.channel_ref_frequency(site);
            let mut segments = Vec::new();
            for op in ops {
                lower_gate(op, omega, ref_freq, cfg.phase_shift_duration, &mut segments)?;
            }
            let duration = segments.iter().map(|s| s.duration).sum();
            runs.insert(site, (segments, duration));
        }
        let moment_duration = runs.values().map(|(_, d)| *d).fold(0.0f64, f64::max);

        for (&site, schedule) in channels.iter_mut() {
            let (segments, run_duration) = runs.remove(&site).unwrap_or_default();
            schedule.segments.extend(segments);
            let gap = moment_duration - run_duration;
            if gap > moment_duration * 1e-12 {
                schedule.segments.push(Segment {
                    kind: SegmentKind::Idle,
                    rf_frequency: schedule.ref_frequency,
                    rf_phase: 0.0,
                    amplitude: 0.0,
                    duration: gap,
                    light_on: false,
                });
            }
        }
        t += moment_duration;
        moment_ends.push(t);
    }

    Ok(CompiledCircuit {
        channels: channels.into_values().collect(),
        moment_ends,
    })
}

fn lower_gate(
    op: &GateOp,
    omega: f64,
    ref_freq: f64,
    shift_duration: f64,
    out: &mut Vec<Segment>,
) -> Result<(), CompileError> {
    let (area, phase, offset) = match *op {
        GateOp::Clifford(k) => {
            let entry = clifford_table()
                .get(k as usize)
                .ok_or(CompileError::UnknownClifford(k))?;
            (entry.pulse_area, entry.pulse_phase, entry.phase_offset)
        }
        GateOp::Rotation { area, phase } => {
            if area < 0.0 {
                return Err(CompileError::NegativeArea(area));
            }
            (area, phase, 0.0)
        }
        GateOp::VirtualZ(offset) => (0.0, 0.0, offset),
        GateOp::Idle(duration) => {
            if duration < 0.0 {
                return Err(CompileError::NegativeDuration(duration));
            }
            if duration > 0.0 {
                out.push(Segment {
                    kind: SegmentKind::Idle,
                    rf_frequency: ref_freq,
                    rf_phase: 0.0,
                    amplitude: 0.0,
                    duration,
                    light_on: false,
                });
            }
            return Ok(());
        }
    };

    if area > 0.0 {
        out.push(Segment {
            kind: SegmentKind::Drive,
            rf_frequency: ref_freq,
            rf_phase: 0.5 * wrap_angle(phase),
            amplitude: 1.0,
            duration: area / (TAU * omega),
            light_on: true,
        });
    }
    let wrapped = wrap_angle(offset);
    if wrapped != 0.0 {
        out.push(Segment {
            kind: SegmentKind::PhaseShift,
            rf_frequency: ref_freq + wrapped / (2.0 * TAU * shift_duration),
            rf_phase: 0.0,
            amplitude: 0.0,
            duration: shift_duration,
            light_on: false,
        });
    }
    Ok(())
}
