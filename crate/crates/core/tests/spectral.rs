use std::f64::consts::PI;

use approx::assert_relative_eq;
use nlslab_core::random::{sample_initial_data, RandomDataSpec};
use nlslab_core::spectral::{
    bracket, fourier_lebesgue_norm, l4_spacetime_norm, sobolev_norm, to_fourier, to_physical,
    xsb_norm, ysb_norm, zsb_norm, FourierState, PhysicalField, SpaceTimeSpectrum, Trajectory,
    Window,
};
use nlslab_core::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_state(cutoff: usize, seed: u64) -> FourierState {
    sample_initial_data(&RandomDataSpec::new(0.3, cutoff, seed).unwrap())
}

/// Direct trigonometric sum at `x_k = 2πk/P`.
fn direct_synthesis(state: &FourierState, points: usize) -> Vec<Complex64> {
    (0..points)
        .map(|k| {
            let x = 2.0 * PI * k as f64 / points as f64;
            state
                .modes()
                .map(|(n, v)| v * Complex64::from_polar(1.0, n as f64 * x))
                .sum()
        })
        .collect()
}

/// `û(n) = (1/P) Σ_k f(x_k) e^{−inx_k}`.
fn direct_analysis(samples: &[Complex64], cutoff: usize) -> Vec<Complex64> {
    let p = samples.len();
    let m = cutoff as i64;
    (-m..=m)
        .map(|n| {
            samples
                .iter()
                .enumerate()
                .map(|(k, f)| f * Complex64::from_polar(1.0, -2.0 * PI * (n * k as i64) as f64 / p as f64))
                .sum::<Complex64>()
                / p as f64
        })
        .collect()
}

#[test]
fn constant_and_single_harmonic_fields() {
    let one = FourierState::single_mode(4, 0, c(1.0, 0.0), 0.0);
    let field = to_physical(&one, 9).unwrap();
    assert!(field.samples.iter().all(|v| (v - 1.0).norm() < 1e-15));

    let e1 = FourierState::single_mode(4, 1, c(1.0, 0.0), 0.0);
    let field = to_physical(&e1, 12).unwrap();
    for (k, v) in field.samples.iter().enumerate() {
        let x = 2.0 * PI * k as f64 / 12.0;
        assert!((v - Complex64::from_polar(1.0, x)).norm() < 1e-14);
    }
}

#[test]
fn to_fourier_of_simple_fields() {
    let p = 16;
    let constant = PhysicalField { samples: vec![c(1.0, 0.0); p], time: 0.0 };
    let s = to_fourier(&constant, 5).unwrap();
    assert!((s.mode(0) - 1.0).norm() < 1e-15);
    assert!(s.modes().filter(|&(n, _)| n != 0).all(|(_, v)| v.norm() < 1e-15));

    let samples = (0..p)
        .map(|k| Complex64::from_polar(1.0, 2.0 * 2.0 * PI * k as f64 / p as f64))
        .collect();
    let s = to_fourier(&PhysicalField { samples, time: 0.0 }, 5).unwrap();
    assert!((s.mode(2) - 1.0).norm() < 1e-14);
}

#[test]
fn under_resolved_grid_is_rejected() {
    let s = FourierState::zeros(8, 0.0);
    assert!(to_physical(&s, 16).is_err());
    assert!(to_physical(&s, 17).is_ok());
}

#[test]
fn transforms_match_direct_sums() {
    for (cutoff, points, seed) in [(8, 17, 1), (12, 40, 2), (20, 45, 3)] {
        let state = random_state(cutoff, seed);
        let field = to_physical(&state, points).unwrap();
        let oracle = direct_synthesis(&state, points);
        for (a, b) in field.samples.iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-12);
        }
        let back = to_fourier(&field, cutoff).unwrap();
        let oracle = direct_analysis(&field.samples, cutoff);
        for (a, b) in back.coefficients().iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(back.l2_distance(&state).unwrap() < 1e-12);
    }
}

#[test]
fn parseval_holds() {
    let state = random_state(64, 9);
    let field = to_physical(&state, 135).unwrap();
    assert_relative_eq!(field.l2_norm(), state.l2_norm(), max_relative = 1e-12);
}

#[test]
fn sobolev_examples() {
    let s0 = FourierState::single_mode(3, 0, c(1.0, 0.0), 0.0);
    for s in [-1.0, 0.0, 2.5] {
        assert_eq!(sobolev_norm(&s0, s), 1.0);
    }
    let s1 = FourierState::single_mode(3, 1, c(1.0, 0.0), 0.0);
    assert_relative_eq!(sobolev_norm(&s1, 1.0), 2.0, max_relative = 1e-15);
    assert_eq!(bracket(-3.0), 4.0);
}

#[test]
fn fourier_lebesgue_examples() {
    let s = FourierState::from_fn(4, 0.0, |n| c(if n == 0 || n == 1 { 1.0 } else { 0.0 }, 0.0));
    assert_relative_eq!(fourier_lebesgue_norm(&s, 0.0, 1.0).unwrap(), 2.0, max_relative = 1e-15);
    for seed in 0..10 {
        let r = random_state(16, seed);
        for s in [-0.4, 0.0, 0.7] {
            assert_relative_eq!(
                fourier_lebesgue_norm(&r, s, 2.0).unwrap(),
                sobolev_norm(&r, s),
                max_relative = 1e-12
            );
        }
    }
    assert!(fourier_lebesgue_norm(&s, 0.0, 0.5).is_err());
}

#[test]
fn state_json_layout() {
    let s = FourierState::from_fn(1, 0.5, |n| c(n as f64, -(n as f64)));
    let v: serde_json::Value = serde_json::to_value(&s).unwrap();
    assert_eq!(v["M"], 1);
    assert_eq!(v["t"], 0.5);
    assert_eq!(v["re"], serde_json::json!([-1.0, 0.0, 1.0]));
    assert_eq!(v["im"], serde_json::json!([1.0, 0.0, -1.0]));
    let back: FourierState = serde_json::from_value(v).unwrap();
    assert_eq!(back, s);
}

fn random_trajectory(cutoff: usize, samples: usize, dt: f64, seed: u64) -> Trajectory {
    let states = (0..samples)
        .map(|k| {
            let mut st = random_state(cutoff, seed * 1000 + k as u64);
            st = st.with_time(k as f64 * dt);
            st
        })
        .collect();
    Trajectory::new(states, dt, Window::RaisedCosine).unwrap()
}

#[test]
fn x00_equals_windowed_l2() {
    let traj = random_trajectory(6, 32, 0.01, 4);
    assert_relative_eq!(
        xsb_norm(&traj, 0.0, 0.0).unwrap(),
        traj.windowed_l2_norm(),
        max_relative = 1e-10
    );
    let spectrum = SpaceTimeSpectrum::from_trajectory(&traj, 3).unwrap();
    assert_relative_eq!(spectrum.xsb(0.0, 0.0), traj.windowed_l2_norm(), max_relative = 1e-10);
}

#[test]
fn y_dominates_windowed_sup() {
    let traj = random_trajectory(6, 40, 0.01, 5);
    let windowed = traj.windowed();
    for s in [-0.5, 0.0, 0.5] {
        let sup = windowed.states().iter().map(|st| sobolev_norm(st, s)).fold(0.0, f64::max);
        assert!(ysb_norm(&traj, s, 0.0).unwrap() >= sup * (1.0 - 1e-12));
        let z = zsb_norm(&traj, s, 0.5).unwrap();
        assert!(z >= xsb_norm(&traj, s, 0.5).unwrap());
    }
}

#[test]
fn single_mode_x_norm_is_window_mass() {
    // τ spacing 2π/(L·dt) = 1/16, fine against the unit scale of ⟨τ − n²⟩
    let (cutoff, n0, samples) = (8usize, 3i64, 512usize);
    let dt = 32.0 * PI / samples as f64;
    let states = (0..samples)
        .map(|k| {
            let t = k as f64 * dt;
            FourierState::single_mode(cutoff, n0, Complex64::from_polar(1.0, (n0 * n0) as f64 * t), t)
        })
        .collect();
    let traj = Trajectory::new(states, dt, Window::RaisedCosine).unwrap();
    let mass = traj.windowed_l2_norm();
    for b in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let x = xsb_norm(&traj, 0.0, b).unwrap();
        assert!((x / mass - 1.0).abs() < 0.05, "b = {b}: {x} vs {mass}");
    }
}

#[test]
fn constant_field_l4() {
    let delta = 0.5;
    let samples = 11;
    let dt = delta / (samples - 1) as f64;
    let states = (0..samples)
        .map(|k| FourierState::single_mode(4, 0, c(0.6, 0.8), k as f64 * dt))
        .collect();
    let traj = Trajectory::new(states, dt, Window::Rectangular).unwrap();
    assert_relative_eq!(l4_spacetime_norm(&traj), (2.0 * PI * delta).powf(0.25), max_relative = 1e-12);
}

#[test]
fn trajectory_validation() {
    let a = FourierState::zeros(2, 0.0);
    let b = FourierState::zeros(2, 0.2);
    assert!(Trajectory::new(vec![a.clone(), b.clone()], 0.1, Window::default()).is_err());
    assert!(Trajectory::new(vec![a.clone(), FourierState::zeros(3, 0.1)], 0.1, Window::default()).is_err());
    assert!(Trajectory::new(vec![], 0.1, Window::default()).is_err());
    assert!(Trajectory::new(vec![a], -0.1, Window::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_identity(seed in any::<u64>(), cutoff in 1usize..24, extra in 0usize..20) {
        let state = random_state(cutoff, seed);
        let field = to_physical(&state, 2 * cutoff + 1 + extra).unwrap();
        let back = to_fourier(&field, cutoff).unwrap();
        prop_assert!(back.l2_distance(&state).unwrap() < 1e-12 * (1.0 + state.l2_norm()));
    }

    #[test]
    fn sobolev_monotone_in_s(seed in any::<u64>(), s1 in -2.0f64..2.0, ds in 0.01f64..2.0) {
        let state = random_state(16, seed);
        prop_assert!(sobolev_norm(&state, s1) < sobolev_norm(&state, s1 + ds));
    }

    #[test]
    fn x_norm_monotone_in_b(seed in 0u64..1000, b1 in 0.0f64..1.0, db in 0.0f64..1.0) {
        let traj = random_trajectory(4, 16, 0.02, seed);
        let lo = xsb_norm(&traj, 0.0, b1).unwrap();
        let hi = xsb_norm(&traj, 0.0, b1 + db).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-14));
    }
}
