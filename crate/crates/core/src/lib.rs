//! Exact two-level-system primitives for an addressed atom-qubit simulator.
//!
//! The qubit is a 2x2 density matrix in the (|0>, |1>) hyperfine basis.
//! Constant drive tones evolve it through closed-form propagators, and all
//! stochastic inputs (quasi-static detuning, amplitude multipliers,
//! interference phases, SPAM draws) come from counter-derived random streams
//! so that shots are reproducible regardless of execution order.
//!
//! Unit conventions, used across the whole workspace:
//! * frequencies are ordinary frequencies in Hz (the 2*pi lives inside the
//!   propagators),
//! * durations are seconds,
//! * phases and rotation angles are radians.

pub mod drive;
pub mod mat2;
pub mod noise;
pub mod rng;
pub mod spam;
pub mod state;

pub use drive::{evolve_segment, rotation_unitary, rz_unitary, tone_unitary, DriveTone};
pub use mat2::{Mat2, C64};
pub use noise::{sample_shot, sigma_from_t2_star, t2_star_from_sigma, NoiseParams, ShotContext};
pub use rng::derive_rng;
pub use spam::{measure, measure_prob, prepare_state, prepare_state_analytic};
pub use state::{QubitState, StateError};

use serde::{Deserialize, Serialize};

/// Identifier of one trap site and of the addressing channel wired to it.
///
/// Sites are numbered from 1, following the row-major order of the array
/// layout. The same id names the site in geometry, crosstalk matrices,
/// circuits and channel schedules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SiteId(pub usize);

impl SiteId {
    /// Zero-based index into per-site vectors.
    pub fn index(self) -> usize {
        debug_assert!(self.0 >= 1, "site ids are 1-based");
        self.0 - 1
    }

    /// Inverse of [`SiteId::index`].
    pub fn from_index(index: usize) -> Self {
        SiteId(index + 1)
    }
}

impl std::fmt::Display for SiteId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Wrap an angle into the half-open interval (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut x = theta.rem_euclid(tau);
    if x > std::f64::consts::PI {
        x -= tau;
    }
    x
}
