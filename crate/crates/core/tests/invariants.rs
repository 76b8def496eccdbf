//! Propagator invariants checked against independent oracles.

use fiberq_core::{
    derive_rng, evolve_segment, sample_shot, tone_unitary, DriveTone, Mat2, NoiseParams,
    QubitState, C64,
};
use proptest::prelude::*;
use rand::RngExt;
use std::f64::consts::{PI, TAU};

/// Matrix exponential by scaling-and-squaring with a Taylor series.
///
/// Deliberately independent of the closed-form propagator it checks.
fn expm(m: &Mat2) -> Mat2 {
    let norm: f64 = (0..2)
        .flat_map(|r| (0..2).map(move |c| (r, c)))
        .map(|(r, c)| m.get(r, c).norm())
        .sum();
    let squarings = norm.log2().ceil().max(0.0) as u32 + 4;
    let scaled = m.scale_re(0.5f64.powi(squarings as i32));
    let mut sum = Mat2::identity();
    let mut term = Mat2::identity();
    for k in 1..24 {
        term = term * scaled;
        term = term.scale_re(1.0 / k as f64);
        sum = sum + term;
    }
    let mut out = sum;
    for _ in 0..squarings {
        out = out * out;
    }
    out
}

/// -i H t for a constant tone, fed to the series oracle.
fn hamiltonian_times(tone: &DriveTone, t: f64) -> Mat2 {
    let omega = tone.rabi_freq * tone.amplitude_multiplier;
    let hx = PI * omega * tone.phase.cos();
    let hy = PI * omega * tone.phase.sin();
    let hz = PI * tone.detuning;
    let h = Mat2::new(
        C64::new(hz, 0.0),
        C64::new(hx, -hy),
        C64::new(hx, hy),
        C64::new(-hz, 0.0),
    );
    h.scale(C64::new(0.0, -t))
}

#[test]
fn resonant_pi_pulse_from_quoted_rabi_frequency() {
    // 47.2 kHz drive: a pi pulse takes 1/(2 * 47200 Hz) = 10.593 us.
    let omega: f64 = 47.2e3;
    let t_pi = 1.0 / (2.0 * omega);
    assert!((t_pi - 10.593e-6).abs() < 1e-9);

    let tone = DriveTone::resonant(omega, 0.0);
    let state = evolve_segment(&QubitState::ground(), &tone, t_pi);
    assert!((state.p1() - 1.0).abs() < 1e-12);

    // Independent route: series matrix exponential of -i H t.
    let u_series = expm(&hamiltonian_times(&tone, t_pi));
    let u_closed = tone_unitary(&tone, t_pi);
    assert!(
        u_closed.max_abs_diff(&u_series) < 1e-12,
        "closed-form vs series deviation {}",
        u_closed.max_abs_diff(&u_series)
    );
}

#[test]
fn closed_form_matches_series_exponential_on_random_tones() {
    let mut rng = derive_rng(7001, &[0]);
    for _ in 0..200 {
        let tone = DriveTone::new(
            rng.random::<f64>() * 60e3,
            (rng.random::<f64>() - 0.5) * TAU,
            (rng.random::<f64>() - 0.5) * 40e3,
        );
        let t = rng.random::<f64>() * 50e-6;
        let dev = tone_unitary(&tone, t).max_abs_diff(&expm(&hamiltonian_times(&tone, t)));
        assert!(dev < 1e-11, "deviation {dev}");
    }
}

#[test]
fn generalized_rabi_formula() {
    // P1(t) = Omega^2/W^2 sin^2(pi W t), W = hypot(Omega, delta).
    let mut rng = derive_rng(7002, &[0]);
    for _ in 0..100 {
        let omega = rng.random::<f64>() * 80e3;
        let delta = (rng.random::<f64>() - 0.5) * 80e3;
        let t = rng.random::<f64>() * 100e-6;
        let w = omega.hypot(delta);
        let expected = if w == 0.0 {
            0.0
        } else {
            (omega * omega / (w * w)) * (PI * w * t).sin().powi(2)
        };
        let tone = DriveTone::new(omega, 0.0, delta);
        let p1 = evolve_segment(&QubitState::ground(), &tone, t).p1();
        assert!((p1 - expected).abs() < 1e-9, "p1 {p1} vs {expected}");
    }
}

#[test]
fn trace_and_hermiticity_survive_long_sequences() {
    let mut rng = derive_rng(7003, &[0]);
    let mut state = QubitState::ground();
    for _ in 0..10_000 {
        let tone = DriveTone::new(
            rng.random::<f64>() * 50e3,
            (rng.random::<f64>() - 0.5) * TAU,
            (rng.random::<f64>() - 0.5) * 20e3,
        );
        state = evolve_segment(&state, &tone, rng.random::<f64>() * 20e-6);
    }
    state.validate(1e-10).unwrap();
}

#[test]
fn composition_of_identical_tones() {
    let mut rng = derive_rng(7004, &[0]);
    for _ in 0..100 {
        let tone = DriveTone::new(
            rng.random::<f64>() * 50e3,
            (rng.random::<f64>() - 0.5) * TAU,
            (rng.random::<f64>() - 0.5) * 20e3,
        );
        let (t1, t2) = (rng.random::<f64>() * 30e-6, rng.random::<f64>() * 30e-6);
        let split = evolve_segment(&evolve_segment(&QubitState::ground(), &tone, t1), &tone, t2);
        let joined = evolve_segment(&QubitState::ground(), &tone, t1 + t2);
        assert!(split.rho().max_abs_diff(joined.rho()) < 1e-10);
    }
}

#[test]
fn quasi_static_ramsey_contrast() {
    // Averaging cos(2 pi delta T) over delta ~ N(0, sigma) gives
    // exp(-2 pi^2 sigma^2 T^2).
    let sigma = 48.9;
    let noise = NoiseParams {
        sigma_detuning: sigma,
        ..NoiseParams::noiseless()
    };
    let mut rng = derive_rng(7005, &[0]);
    for t in [1.0e-3, 3.0e-3, 4.6e-3] {
        let shots = 100_000;
        let mut acc = 0.0;
        for _ in 0..shots {
            let ctx = sample_shot(&noise, 1, &mut rng);
            acc += (TAU * ctx.detunings[0] * t).cos();
        }
        let mc = acc / shots as f64;
        let analytic = (-2.0 * PI * PI * sigma * sigma * t * t).exp();
        assert!(
            (mc - analytic).abs() < 0.01,
            "T={t}: mc {mc} vs analytic {analytic}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn propagators_are_unitary(
        omega in 0.0..100e3f64,
        phase in -PI..PI,
        delta in -50e3..50e3f64,
        t in 0.0..1e-3f64,
    ) {
        let tone = DriveTone::new(omega, phase, delta);
        prop_assert!(tone_unitary(&tone, t).unitarity_error() < 1e-12);
    }

    #[test]
    fn evolution_preserves_state_validity(
        omega in 0.0..100e3f64,
        phase in -PI..PI,
        delta in -50e3..50e3f64,
        t in 0.0..1e-3f64,
        mix in 0.0..1.0f64,
    ) {
        let mut state = QubitState::ground();
        state.depolarize(mix);
        let out = evolve_segment(&state, &DriveTone::new(omega, phase, delta), t);
        prop_assert!(out.validate(1e-12).is_ok());
    }
}
