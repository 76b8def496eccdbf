//! State preparation and confusion-matrix readout.

use crate::noise::NoiseParams;
use crate::state::QubitState;
use rand::{Rng, RngExt};

/// Prepare |0> with depolarization probability `d_if`: the shot starts in
/// I/2 with probability `d_if`, in pure |0><0| otherwise.
pub fn prepare_state<R: Rng + ?Sized>(d_if: f64, rng: &mut R) -> QubitState {
    debug_assert!((0.0..=1.0).contains(&d_if));
    if d_if > 0.0 && rng.random::<f64>() < d_if {
        QubitState::maximally_mixed()
    } else {
        QubitState::ground()
    }
}

/// Expected prepared state, used in analytic mode:
/// (1 - d_if) |0><0| + d_if I/2.
pub fn prepare_state_analytic(d_if: f64) -> QubitState {
    debug_assert!((0.0..=1.0).contains(&d_if));
    let mut state = QubitState::ground();
    state.depolarize(d_if);
    state
}

/// Probability of reading outcome 1 through the readout confusion matrix.
pub fn measure_prob(state: &QubitState, noise: &NoiseParams) -> f64 {
    let p = (1.0 - noise.readout_eps1) * state.p1() + noise.readout_eps0 * state.p0();
    p.clamp(0.0, 1.0)
}

/// Draw one readout bit.
pub fn measure<R: Rng + ?Sized>(state: &QubitState, noise: &NoiseParams, rng: &mut R) -> bool {
    rng.random::<f64>() < measure_prob(state, noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;

    #[test]
    fn prepare_limits() {
        let mut rng = derive_rng(10, &[0]);
        for _ in 0..100 {
            assert_eq!(prepare_state(0.0, &mut rng), QubitState::ground());
            assert_eq!(prepare_state(1.0, &mut rng), QubitState::maximally_mixed());
        }
    }

    #[test]
    fn prepare_mixed_fraction() {
        let d_if = 0.04;
        let mut rng = derive_rng(11, &[0]);
        let n = 10_000;
        let mixed = (0..n)
            .filter(|_| prepare_state(d_if, &mut rng) == QubitState::maximally_mixed())
            .count();
        let frac = mixed as f64 / n as f64;
        assert!((frac - d_if).abs() < 0.005, "mixed fraction {frac}");
    }

    #[test]
    fn measure_excited_is_certain_without_noise() {
        let noise = NoiseParams::noiseless();
        let mut rng = derive_rng(12, &[0]);
        for _ in 0..100 {
            assert!(measure(&QubitState::excited(), &noise, &mut rng));
        }
        assert_eq!(measure_prob(&QubitState::excited(), &noise), 1.0);
    }

    #[test]
    fn measure_mixed_is_balanced() {
        let noise = NoiseParams::noiseless();
        let mut rng = derive_rng(13, &[0]);
        let n = 10_000;
        let ones = (0..n)
            .filter(|_| measure(&QubitState::maximally_mixed(), &noise, &mut rng))
            .count();
        let mean = ones as f64 / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn readout_asymmetry() {
        let noise = NoiseParams {
            readout_eps1: 0.02,
            ..NoiseParams::noiseless()
        };
        assert!((measure_prob(&QubitState::excited(), &noise) - 0.98).abs() < 1e-15);
        let mut rng = derive_rng(14, &[0]);
        let n = 10_000;
        let ones = (0..n)
            .filter(|_| measure(&QubitState::excited(), &noise, &mut rng))
            .count();
        let mean = ones as f64 / n as f64;
        assert!((mean - 0.98).abs() < 0.005, "mean {mean}");
    }
}
