//! The 24-element single-qubit Clifford gate set.
//!
//! Each gate decomposes into one equatorial rotation plus one virtual-Z
//! offset: U = Rz(phase_offset) * R(pulse_area, pulse_phase), equal to the
//! stored reference unitary up to a global phase. The reference matrices are
//! transcribed literally (prefactor times a matrix of 0, +-1, +-i entries)
//! and kept independent of the rotation-based construction, so the two
//! routes check each other.

use fiberq_core::{rotation_unitary, rz_unitary, Mat2, C64};
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::LazyLock;
use thiserror::Error;

/// One row of the gate table.
#[derive(Clone, Copy, Debug)]
pub struct CliffordEntry {
    pub index: u8,
    /// Equatorial rotation angle (rad).
    pub pulse_area: f64,
    /// Equatorial rotation axis phase (rad).
    pub pulse_phase: f64,
    /// Virtual-Z angle applied logically after the rotation (rad).
    pub phase_offset: f64,
    /// Reference unitary, as printed.
    pub reference_unitary: Mat2,
}

#[derive(Debug, Error, PartialEq)]
#[error("net unitary is not reachable by any table entry (best |<1|C net|0>| = {best:.6})")]
pub struct NonCliffordError {
    pub best: f64,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn matrix(prefactor: C64, entries: [[C64; 2]; 2]) -> Mat2 {
    Mat2(entries).scale(prefactor)
}

static TABLE: LazyLock<[CliffordEntry; 24]> = LazyLock::new(build_table);

#[rustfmt::skip]
fn build_table() -> [CliffordEntry; 24] {
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let z = c(0.0, 0.0);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let e_m = C64::from_polar(1.0, -0.25 * PI); // e^{-i pi/4}
    let e_p = C64::from_polar(1.0, 0.25 * PI);  // e^{+i pi/4}

    // (pulse area, pulse phase, phase offset, prefactor, matrix)
    let rows: [(f64, f64, f64, C64, [[C64; 2]; 2]); 24] = [
        (0.0,        0.0,        0.0,        o,              [[o, z], [z, o]]),
        (0.0,        0.0,        FRAC_PI_2,  e_m,            [[o, z], [z, i]]),
        (0.0,        0.0,        PI,         -i,             [[o, z], [z, -o]]),
        (0.0,        0.0,        -FRAC_PI_2, e_p,            [[o, z], [z, -i]]),
        (PI,         FRAC_PI_2,  0.0,        -o,             [[z, o], [-o, z]]),
        (PI,         0.0,        FRAC_PI_2,  -e_p,           [[z, o], [i, z]]),
        (PI,         0.0,        0.0,        -i,             [[z, o], [o, z]]),
        (PI,         FRAC_PI_2,  FRAC_PI_2,  e_m,            [[z, o], [-i, z]]),
        (FRAC_PI_2,  -FRAC_PI_2, PI,         -i * r,    [[o, o], [o, -o]]),
        (FRAC_PI_2,  -FRAC_PI_2, 0.0,        o * r,     [[o, o], [-o, o]]),
        (FRAC_PI_2,  -FRAC_PI_2, FRAC_PI_2,  e_m * r,   [[o, o], [-i, i]]),
        (FRAC_PI_2,  -FRAC_PI_2, -FRAC_PI_2, -e_p * r,  [[o, o], [i, -i]]),
        (FRAC_PI_2,  FRAC_PI_2,  PI,         i * r,     [[o, -o], [-o, -o]]),
        (FRAC_PI_2,  FRAC_PI_2,  FRAC_PI_2,  e_m * r,   [[o, -o], [i, i]]),
        (FRAC_PI_2,  FRAC_PI_2,  0.0,        o * r,     [[o, -o], [o, o]]),
        (FRAC_PI_2,  FRAC_PI_2,  -FRAC_PI_2, e_p * r,   [[o, -o], [-i, -i]]),
        (FRAC_PI_2,  PI,         FRAC_PI_2,  e_m * r,   [[o, i], [-o, i]]),
        (FRAC_PI_2,  PI,         -FRAC_PI_2, e_p * r,   [[o, i], [o, -i]]),
        (FRAC_PI_2,  PI,         PI,         i * r,     [[o, i], [-i, -o]]),
        (FRAC_PI_2,  PI,         0.0,        o * r,     [[o, i], [i, o]]),
        (FRAC_PI_2,  0.0,        -FRAC_PI_2, e_p * r,   [[o, -i], [-o, -i]]),
        (FRAC_PI_2,  0.0,        0.0,        o * r,     [[o, -i], [-i, o]]),
        (FRAC_PI_2,  0.0,        PI,         -i * r,    [[o, -i], [i, -o]]),
        (FRAC_PI_2,  0.0,        FRAC_PI_2,  e_m * r,   [[o, -i], [o, i]]),
    ];

    std::array::from_fn(|k| {
        let (pulse_area, pulse_phase, phase_offset, pre, m) = rows[k];
        CliffordEntry {
            index: k as u8,
            pulse_area,
            pulse_phase,
            phase_offset,
            reference_unitary: matrix(pre, m),
        }
    })
}

/// All 24 gate decompositions.
pub fn clifford_table() -> &'static [CliffordEntry; 24] {
    &TABLE
}

/// Unitary realized by an entry: Rz(phase_offset) * R(pulse_area, pulse_phase).
pub fn entry_unitary(entry: &CliffordEntry) -> Mat2 {
    rz_unitary(entry.phase_offset) * rotation_unitary(entry.pulse_area, entry.pulse_phase)
}

/// Find the lowest-index correction gate C with C * net mapping |0> to |1>
/// up to a global phase.
///
/// The Clifford group acts transitively on the cardinal states, so for any
/// net unitary that is itself a product of table entries such a C exists
/// (four of them: the stabilizer coset of |1>). Anything short of the 1e-8
/// amplitude tolerance signals a non-Clifford net.
pub fn inverse_to_one(net: &Mat2) -> Result<&'static CliffordEntry, NonCliffordError> {
    let mut best = 0.0f64;
    for entry in clifford_table() {
        let total = entry.reference_unitary * *net;
        let amp = total.get(1, 0).norm();
        if amp >= 1.0 - 1e-8 {
            return Ok(entry);
        }
        best = best.max(amp);
    }
    Err(NonCliffordError { best })
}
