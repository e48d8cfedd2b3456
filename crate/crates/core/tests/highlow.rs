use nlslab_core::dynamics::{evolve, evolve_steps, linear_propagate, plane_wave, EvolutionConfig, Sign};
use nlslab_core::highlow::{
    budget, choose_delta, difference_step, low_step, redistribute, run_highlow, split, substeps,
    HighLowConfig, Horizon,
};
use nlslab_core::random::{sample_initial_data, RandomDataSpec};
use nlslab_core::spectral::{sobolev_norm, FourierState};
use nlslab_core::{Complex64, Error};
use proptest::prelude::*;

fn random_state(alpha: f64, cutoff: usize, seed: u64) -> FourierState {
    sample_initial_data(&RandomDataSpec::new(alpha, cutoff, seed).unwrap())
}

#[test]
fn delta_and_budget_closed_forms() {
    let (n, k, s, theta) = (32usize, 3.0f64, -0.04f64, 0.01f64);
    let expected = 32f64.powf(4.01 * -0.04) / 3f64.powf(4.01);
    assert!((choose_delta(n, k, s, theta) / expected - 1.0).abs() < 1e-14);
    assert!((budget(n, k, s, 10.0) - 10.0 * 32f64.powf(0.04) * 3.0).abs() < 1e-12);
    // larger N at fixed K shrinks the step when s < 0
    assert!(choose_delta(64, k, s, theta) < choose_delta(32, k, s, theta));
}

#[test]
fn low_step_of_zero_is_zero() {
    let zero = FourierState::zeros(16, 0.0);
    let traj = low_step(&zero, 0.05, &EvolutionConfig::wick(1e-3)).unwrap();
    assert!(traj.states().iter().all(|s| s.l2_norm() == 0.0));
    assert_eq!(traj.states().len(), 51);
    assert!(low_step(&zero, 0.0, &EvolutionConfig::wick(1e-3)).is_err());
}

#[test]
fn low_step_reproduces_plane_waves() {
    let a = Complex64::new(0.7, -0.2);
    for sign in [Sign::Defocusing, Sign::Focusing] {
        let u0 = plane_wave(a, 3, 8, sign, 0.0);
        let cfg = EvolutionConfig::new(sign, nlslab_core::dynamics::Equation::WickNls, 1e-3);
        let traj = low_step(&u0, 0.2, &cfg).unwrap();
        for st in traj.states() {
            assert!(st.l2_distance(&plane_wave(a, 3, 8, sign, st.time())).unwrap() < 1e-8);
        }
    }
}

#[test]
fn low_step_conserves_mass() {
    let (phi, _) = split(&random_state(0.5, 128, 3), 32).unwrap();
    let traj = low_step(&phi, 0.05, &EvolutionConfig::wick(1e-3)).unwrap();
    for st in traj.states() {
        assert!((st.l2_norm() / phi.l2_norm() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn difference_step_with_zero_high_datum_vanishes() {
    let (phi, _) = split(&random_state(0.5, 64, 4), 16).unwrap();
    let cfg = EvolutionConfig::wick(1e-3);
    let u = low_step(&phi, 0.03, &cfg).unwrap();
    let (v, w) = difference_step(&u, &FourierState::zeros(64, 0.0), &cfg).unwrap();
    assert!(v.states().iter().all(|s| s.l2_norm() < 1e-14));
    assert!(w.states().iter().all(|s| s.l2_norm() < 1e-14));
}

#[test]
fn difference_step_on_zero_background_is_the_wick_flow() {
    let (_, psi) = split(&random_state(0.5, 64, 5), 16).unwrap();
    let cfg = EvolutionConfig::wick(1e-3);
    let u = low_step(&FourierState::zeros(64, 0.0), 0.04, &cfg).unwrap();
    let (v, _) = difference_step(&u, &psi, &cfg).unwrap();
    let direct = evolve(&psi, 0.04, &cfg.clone().with_record_every(1)).unwrap();
    for (a, b) in v.states().iter().zip(direct.states()) {
        assert!(a.l2_distance(b).unwrap() < 1e-12, "t = {}", a.time());
    }
}

#[test]
fn low_plus_difference_is_the_full_flow() {
    let u0 = random_state(0.5, 128, 6);
    let (phi, psi) = split(&u0, 32).unwrap();
    let cfg = EvolutionConfig::wick(1e-3);
    let delta = 0.02;
    let u = low_step(&phi, delta, &cfg).unwrap();
    let (v, _) = difference_step(&u, &psi, &cfg).unwrap();
    let (k, h) = substeps(delta, &cfg);
    let full = evolve_steps(&u0, h, k, &cfg.clone().with_record_every(1)).unwrap();
    for ((a, b), f) in u.states().iter().zip(v.states()).zip(full.states()) {
        assert!(a.add(b).unwrap().l2_distance(f).unwrap() < 1e-6);
    }
}

#[test]
fn redistribution_invariants() {
    let u0 = random_state(0.5, 64, 7);
    let (phi, psi) = split(&u0, 16).unwrap();
    let cfg = EvolutionConfig::wick(1e-3);
    let delta = 0.01;
    let u = low_step(&phi, delta, &cfg).unwrap();
    let (v, w) = difference_step(&u, &psi, &cfg).unwrap();
    let (phi1, psi1) = redistribute(u.last(), w.last(), &psi, delta).unwrap();
    // φ₁ + ψ₁ = u(δ) + v(δ)
    let total = u.last().add(v.last()).unwrap();
    assert!(phi1.add(&psi1).unwrap().l2_distance(&total).unwrap() < 1e-12);
    assert!(psi1.l2_distance(&linear_propagate(&psi, delta)).unwrap() < 1e-15);
    assert!((psi1.time() - delta).abs() < 1e-12);
    assert!(psi1.modes().all(|(n, c)| n.abs() > 16 || c.norm() == 0.0));
}

#[test]
fn run_with_full_low_part_has_no_remainder() {
    let u0 = random_state(0.5, 32, 8);
    let cfg = HighLowConfig::new(32, -0.1, Horizon::DeltaMultiple(3.0), EvolutionConfig::wick(1e-3));
    let report = run_highlow(&u0, &cfg).unwrap();
    assert_eq!(report.steps.len(), 3);
    assert!(report.steps.iter().all(|r| r.w_l2 == 0.0));
    assert!(report.within_budget());
    assert!(report.max_consistency_error().unwrap() < 1e-12);
}

#[test]
fn run_respects_horizon_and_accumulates() {
    let u0 = random_state(0.47, 128, 9);
    let base = HighLowConfig::new(16, -0.04, Horizon::Time(1e-6), EvolutionConfig::wick(1e-3));
    let one = run_highlow(&u0, &base).unwrap();
    assert_eq!(one.steps_planned, 1);
    assert_eq!(one.steps.len(), 1);
    assert!((one.steps[0].t - one.delta).abs() < 1e-12);

    let report = run_highlow(&u0, &HighLowConfig { horizon: Horizon::DeltaMultiple(4.0), ..base }).unwrap();
    assert!(report.completed());
    assert_eq!(report.steps.len(), 4);
    assert!(report.steps.windows(2).all(|w| w[1].cumulative_w >= w[0].cumulative_w));
    for (j, r) in report.steps.iter().enumerate() {
        assert_eq!(r.j, j + 1);
        assert!((r.t - (j + 1) as f64 * report.delta).abs() < 1e-9);
        assert_eq!(r.exceeded, r.cumulative_w > r.budget);
    }
    assert!(report.max_consistency_error().unwrap() < 1e-6);
    assert!((report.datum_norm - sobolev_norm(&u0, -0.04)).abs() < 1e-15);
}

#[test]
fn datum_outside_budget_is_reported() {
    let u0 = random_state(0.5, 32, 10);
    let cfg = HighLowConfig::new(8, -0.1, Horizon::DeltaMultiple(1.0), EvolutionConfig::wick(1e-3)).with_k(1e-3);
    assert!(matches!(run_highlow(&u0, &cfg), Err(Error::DatumOutsideBudget { .. })));
}

#[test]
fn invalid_configs_are_rejected() {
    let u0 = random_state(0.5, 32, 11);
    let ok = HighLowConfig::new(8, -0.1, Horizon::DeltaMultiple(1.0), EvolutionConfig::wick(1e-3));
    let bad = [
        HighLowConfig { s: 0.0, ..ok.clone() },
        HighLowConfig { n: 0, ..ok.clone() },
        HighLowConfig { n: 33, ..ok.clone() },
        ok.clone().with_theta(0.0),
        ok.clone().with_budget_constant(-1.0),
        HighLowConfig { horizon: Horizon::Time(0.0), ..ok.clone() },
    ];
    for cfg in bad {
        assert!(run_highlow(&u0, &cfg).is_err(), "{cfg:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_is_exactly_additive(seed in any::<u64>(), n in 0usize..48, s in -1.0f64..-0.01) {
        let u0 = random_state(0.5, 48, seed);
        let (phi, psi) = split(&u0, n).unwrap();
        prop_assert_eq!(phi.add(&psi).unwrap(), u0.clone());
        // ‖φ₀‖_{L²} ≤ N^{−s}‖φ₀‖_{H^s}
        let bound = (n.max(1) as f64 + 1.0).powf(-s) * sobolev_norm(&phi, s);
        prop_assert!(phi.l2_norm() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn high_part_evolves_linearly(seed in 0u64..1000, j in 1usize..4) {
        let u0 = random_state(0.47, 64, seed);
        let cfg = EvolutionConfig::wick(1e-3);
        let delta = 0.004;
        let (mut phi, psi0) = split(&u0, 16).unwrap();
        let mut psi = psi0.clone();
        for _ in 0..j {
            let u = low_step(&phi, delta, &cfg).unwrap();
            let (_, w) = difference_step(&u, &psi, &cfg).unwrap();
            (phi, psi) = redistribute(u.last(), w.last(), &psi, delta).unwrap();
        }
        let expected = linear_propagate(&psi0, j as f64 * delta);
        prop_assert!(psi.l2_distance(&expected).unwrap() < 1e-13);
        prop_assert!((psi.time() - j as f64 * delta).abs() < 1e-12);
    }
}
