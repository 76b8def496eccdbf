//! Multi-site execution of compiled schedules.
//!
//! Sites never entangle (single-qubit physics only), so each site carries an
//! independent 2x2 density matrix. They couple through the light: during any
//! time slice, site j sees the coherent sum over active channels i of
//! c(j,i) * Omega_i * m_i * exp(i phi_i), where c is the crosstalk matrix,
//! m_i the per-shot amplitude multiplier, and phi_i the channel's qubit
//! phase (optionally offset by the per-shot interference phase).
//!
//! Phase dictionary: the drive phase of channel i during a segment is
//! 2 * rf_phase minus 2 * (accumulated RF extras of earlier phase-shift
//! segments) - phase-shift segments rotate the frame of later pulses the
//! opposite way the two-photon difference phase runs, because the tones sit
//! on opposite diffraction orders. A schedule's net effect is expressed in
//! the logical frame by a final Rz of twice the channel's total RF extra.

use crate::model::SystemModel;
use fiberq_core::{evolve_segment, rz_unitary, DriveTone, QubitState, ShotContext};
use fiberq_pulse::{CompiledCircuit, SegmentKind};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// One evolution slice: constant drives on every channel.
struct Slice {
    dt: f64,
    drives: Vec<DriveTerm>,
    /// Gate boundaries (depolarization slots) crossed at the end of this
    /// slice.
    moment_ends_after: u32,
}

struct DriveTerm {
    /// Zero-based site index of the driving channel.
    channel: usize,
    /// Commanded Rabi frequency, amplitude * Omega_site (Hz).
    omega: f64,
    /// Qubit-level drive phase before per-shot interference offsets (rad).
    base_phase: f64,
}

/// Shot-independent execution plan for one compiled circuit.
pub struct Timeline {
    n_sites: usize,
    slices: Vec<Slice>,
    /// Gate boundaries sitting at t = 0 (zero-duration leading moments).
    leading_moment_ends: u32,
    /// (site index, qubit-level frame angle) applied after the last slice.
    final_frames: Vec<(usize, f64)>,
    /// Site indices of the compiled channels; gate depolarization targets.
    channel_sites: Vec<usize>,
}

impl Timeline {
    /// Precompute the merged slice sequence for a compiled circuit.
    pub fn build(compiled: &CompiledCircuit, model: &SystemModel) -> Self {
        let total = compiled
            .channels
            .iter()
            .map(|c| c.total_duration())
            .fold(compiled.total_duration(), f64::max);
        let tol = 1e-12 * total.max(1e-30) + 1e-18;

        // Per-channel cumulative segment end times.
        struct Walker<'a> {
            site: usize,
            schedule: &'a fiberq_pulse::ChannelSchedule,
            ends: Vec<f64>,
            idx: usize,
            rf_extra: f64,
        }
        let mut walkers: Vec<Walker> = compiled
            .channels
            .iter()
            .map(|c| {
                let mut acc = 0.0;
                let ends = c
                    .segments
                    .iter()
                    .map(|s| {
                        acc += s.duration;
                        acc
                    })
                    .collect();
                Walker {
                    site: c.channel.index(),
                    schedule: c,
                    ends,
                    idx: 0,
                    rf_extra: 0.0,
                }
            })
            .collect();

        let mut events: Vec<f64> = walkers
            .iter()
            .flat_map(|w| w.ends.iter().copied())
            .chain(compiled.moment_ends.iter().copied())
            .filter(|&t| t > tol)
            .collect();
        events.sort_by(f64::total_cmp);
        events.dedup_by(|a, b| (*a - *b).abs() <= tol);

        let mut moments = compiled.moment_ends.iter().copied().peekable();
        let mut leading_moment_ends = 0;
        while moments.peek().is_some_and(|&m| m <= tol) {
            moments.next();
            leading_moment_ends += 1;
        }

        let mut slices = Vec::with_capacity(events.len());
        let mut prev = 0.0f64;
        for &edge in &events {
            let dt = edge - prev;
            let mid = 0.5 * (prev + edge);
            let mut drives = Vec::new();
            for w in walkers.iter_mut() {
                while w.idx < w.ends.len() && w.ends[w.idx] <= mid {
                    let seg = &w.schedule.segments[w.idx];
                    if seg.kind == SegmentKind::PhaseShift {
                        w.rf_extra +=
                            TAU * (seg.rf_frequency - w.schedule.ref_frequency) * seg.duration;
                    }
                    w.idx += 1;
                }
                if w.idx < w.ends.len() {
                    let seg = &w.schedule.segments[w.idx];
                    let seg_start = w.ends[w.idx] - seg.duration;
                    if seg_start <= mid && seg.kind == SegmentKind::Drive && seg.amplitude != 0.0 {
                        drives.push(DriveTerm {
                            channel: w.site,
                            omega: seg.amplitude * model.rabi[w.site],
                            base_phase: 2.0 * (seg.rf_phase - w.rf_extra),
                        });
                    }
                }
            }
            let mut moment_ends_after = 0;
            while moments.peek().is_some_and(|&m| m <= edge + tol) {
                moments.next();
                moment_ends_after += 1;
            }
            slices.push(Slice {
                dt,
                drives,
                moment_ends_after,
            });
            prev = edge;
        }
        // Moments beyond the last event can only be duplicates within
        // tolerance; flush them onto the final slice (or the leading count
        // when the circuit has no duration at all).
        let trailing = moments.count() as u32;
        if trailing > 0 {
            if let Some(last) = slices.last_mut() {
                last.moment_ends_after += trailing;
            } else {
                leading_moment_ends += trailing;
            }
        }

        let final_frames = compiled
            .channels
            .iter()
            .map(|c| {
                let extra: f64 = c
                    .segments
                    .iter()
                    .filter(|s| s.kind == SegmentKind::PhaseShift)
                    .map(|s| TAU * (s.rf_frequency - c.ref_frequency) * s.duration)
                    .sum();
                (c.channel.index(), 2.0 * extra)
            })
            .collect();

        Timeline {
            n_sites: model.n_sites,
            slices,
            leading_moment_ends,
            final_frames,
            channel_sites: compiled
                .channels
                .iter()
                .map(|c| c.channel.index())
                .collect(),
        }
    }

    pub fn slice_count(&self) -> usize {
        self.slices.len()
    }
}

/// Evolve the given sites through one shot of the timeline.
///
/// `sites` holds zero-based site indices, parallel to `states`. Gate
/// depolarization (if configured) fires on every compiled channel site at
/// each gate boundary; the final states are expressed in each channel's
/// logical frame.
pub fn run_shot(
    timeline: &Timeline,
    model: &SystemModel,
    shot: &ShotContext,
    sites: &[usize],
    states: &mut [QubitState],
) {
    assert_eq!(sites.len(), states.len());
    assert_eq!(shot.detunings.len(), timeline.n_sites);
    let interference = model.noise.interference_enabled;
    let depol = model.noise.gate_depol;
    let depol_slot: Vec<bool> = sites
        .iter()
        .map(|s| timeline.channel_sites.contains(s))
        .collect();

    let apply_depol = |states: &mut [QubitState], times: u32| {
        if depol > 0.0 {
            for _ in 0..times {
                for (state, &hit) in states.iter_mut().zip(&depol_slot) {
                    if hit {
                        state.depolarize(depol);
                    }
                }
            }
        }
    };

    apply_depol(states, timeline.leading_moment_ends);

    for slice in &timeline.slices {
        // Coherent channel sum at each simulated site.
        for (slot, &site) in sites.iter().enumerate() {
            let mut field = Complex64::new(0.0, 0.0);
            for term in &slice.drives {
                let coupling = model.crosstalk.get(
                    fiberq_core::SiteId(site + 1),
                    fiberq_core::SiteId(term.channel + 1),
                );
                if coupling == 0.0 {
                    continue;
                }
                let mut phase = term.base_phase;
                if interference {
                    phase += shot.interference_phases[term.channel];
                }
                field += Complex64::from_polar(
                    coupling * term.omega * shot.amp_multipliers[term.channel],
                    phase,
                );
            }
            let detuning = shot.detunings[site];
            if field.norm_sqr() == 0.0 && detuning == 0.0 {
                continue;
            }
            let tone = DriveTone {
                rabi_freq: field.norm(),
                phase: field.arg(),
                detuning,
                amplitude_multiplier: 1.0,
            };
            states[slot] = evolve_segment(&states[slot], &tone, slice.dt);
        }
        apply_depol(states, slice.moment_ends_after);
    }

    for &(channel_site, frame) in &timeline.final_frames {
        if frame == 0.0 {
            continue;
        }
        if let Some(slot) = sites.iter().position(|&s| s == channel_site) {
            states[slot].apply_unitary(&rz_unitary(frame));
        }
    }
}
