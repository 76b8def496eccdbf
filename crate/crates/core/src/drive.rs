//! Closed-form propagators for piecewise-constant two-photon drive tones.

use crate::mat2::{Mat2, C64};
use crate::state::QubitState;

/// One constant two-photon drive tone acting on one site.
///
/// `rabi_freq` and `detuning` are ordinary frequencies in Hz; the 2*pi
/// conversion happens inside the propagator. `amplitude_multiplier` carries
/// the per-shot slow Rabi-amplitude modulation (nominal 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveTone {
    /// Two-photon Rabi frequency (Hz), >= 0.
    pub rabi_freq: f64,
    /// Drive phase in the equatorial plane (rad).
    pub phase: f64,
    /// Two-photon detuning of the drive relative to the qubit (Hz).
    pub detuning: f64,
    /// Dimensionless per-shot amplitude multiplier, >= 0.
    pub amplitude_multiplier: f64,
}

impl DriveTone {
    pub fn new(rabi_freq: f64, phase: f64, detuning: f64) -> Self {
        debug_assert!(rabi_freq >= 0.0);
        DriveTone {
            rabi_freq,
            phase,
            detuning,
            amplitude_multiplier: 1.0,
        }
    }

    /// Resonant tone at the given Rabi frequency and phase.
    pub fn resonant(rabi_freq: f64, phase: f64) -> Self {
        DriveTone::new(rabi_freq, phase, 0.0)
    }

    /// Tone with everything off; the qubit only precesses under `detuning`.
    pub fn off(detuning: f64) -> Self {
        DriveTone::new(0.0, 0.0, detuning)
    }
}

/// Equatorial rotation R(theta, phi) = exp(-i theta/2 (cos phi X + sin phi Y)).
pub fn rotation_unitary(area: f64, phase: f64) -> Mat2 {
    let c = (0.5 * area).cos();
    let s = (0.5 * area).sin();
    // -i s e^{-i phi} and -i s e^{i phi}
    let off01 = C64::new(0.0, -s) * C64::from_polar(1.0, -phase);
    let off10 = C64::new(0.0, -s) * C64::from_polar(1.0, phase);
    Mat2::new(C64::new(c, 0.0), off01, off10, C64::new(c, 0.0))
}

/// Rz(theta) = diag(e^{-i theta/2}, e^{i theta/2}).
pub fn rz_unitary(theta: f64) -> Mat2 {
    let z = C64::new(0.0, 0.0);
    Mat2::new(
        C64::from_polar(1.0, -0.5 * theta),
        z,
        z,
        C64::from_polar(1.0, 0.5 * theta),
    )
}

/// Propagator for a constant tone over `duration`.
///
/// U = exp(-i H t) with H = pi * (W_eff cos phi X + W_eff sin phi Y + delta Z)
/// in angular units, W_eff = rabi_freq * amplitude_multiplier. For an
/// on-resonance tone this is R(2 pi W_eff t, phase), so a pulse area of pi
/// takes t = 1 / (2 W_eff).
pub fn tone_unitary(tone: &DriveTone, duration: f64) -> Mat2 {
    debug_assert!(duration >= 0.0);
    let omega = tone.rabi_freq * tone.amplitude_multiplier;
    let delta = tone.detuning;
    let w = omega.hypot(delta);
    if w == 0.0 || duration == 0.0 {
        return Mat2::identity();
    }
    let half_angle = std::f64::consts::PI * w * duration;
    let c = half_angle.cos();
    let s = half_angle.sin();
    let nx = omega * tone.phase.cos() / w;
    let ny = omega * tone.phase.sin() / w;
    let nz = delta / w;
    // cos(a) I - i sin(a) (n . sigma)
    Mat2::new(
        C64::new(c, -s * nz),
        C64::new(-s * ny, -s * nx),
        C64::new(s * ny, -s * nx),
        C64::new(c, s * nz),
    )
}

/// Evolve a state under one constant tone: rho <- U rho U^dag.
pub fn evolve_segment(state: &QubitState, tone: &DriveTone, duration: f64) -> QubitState {
    let mut out = *state;
    out.apply_unitary(&tone_unitary(tone, duration));
    out
}
