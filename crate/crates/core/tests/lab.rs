use std::f64::consts::PI;

use nlslab_core::dynamics::{EvolutionConfig, Sign};
use nlslab_core::highlow::{HighLowConfig, Horizon};
use nlslab_core::lab::{
    embedding_experiment, free_trajectory, highlow_experiment, smoothing_experiment,
    strichartz_experiment, uniform_continuity_experiment, HighLowExperimentConfig, SmoothingConfig,
    StrichartzConfig,
};
use nlslab_core::random::{Band, RandomDataSpec};
use nlslab_core::spectral::{l4_spacetime_norm, FourierState};
use nlslab_core::Complex64;

#[test]
fn continuity_with_equal_moduli_is_lipschitz() {
    // equal |a| means equal phase speed, so the distance is transported unchanged
    let a = Complex64::new(1.0, 0.0);
    let b = Complex64::from_polar(1.0, 0.3);
    let report = uniform_continuity_experiment(a, b, &[4, 16, 64, 256], -0.2, 1.7, Sign::Defocusing).unwrap();
    for row in &report.rows {
        assert!((row.ratio.unwrap() - 1.0).abs() < 1e-12, "{row:?}");
        let expected = (a - b).norm() * (1.0 + row.n as f64).powf(-0.2);
        assert!((row.data_distance - expected).abs() < 1e-14);
    }
}

#[test]
fn continuity_ratio_respects_the_triangle_bound() {
    let a = Complex64::new(1.0, 0.0);
    let b = Complex64::new(1.1, 0.0);
    for sign in [Sign::Defocusing, Sign::Focusing] {
        let report = uniform_continuity_experiment(a, b, &[2, 8, 32, 128, 512], -0.1, 3.0, sign).unwrap();
        let bound = report.ratio_bound.unwrap();
        assert!((bound - 21.0).abs() < 1e-9);
        for row in &report.rows {
            let r = row.ratio.unwrap();
            assert!(r <= bound * (1.0 + 1e-12));
            // closed form |a e^{−iσ|a|²t} − b e^{−iσ|b|²t}| / |a − b|
            let phase = |c: Complex64| c * Complex64::from_polar(1.0, -sign.value() * c.norm_sqr() * 3.0);
            let exact = (phase(a) - phase(b)).norm() / (a - b).norm();
            // the common phase N²t reaches ~10⁶ rad, so allow its rounding
            let tol = 1e-15 * (row.n * row.n) as f64 * 3.0 * exact + 1e-12;
            assert!((r - exact).abs() < tol, "{r} vs {exact}");
        }
    }
}

#[test]
fn free_single_mode_has_flat_l4() {
    let u0 = FourierState::single_mode(16, 5, Complex64::new(0.6, 0.8), 0.0);
    let delta = 0.3;
    let traj = free_trajectory(&u0, delta, 65).unwrap();
    let expected = (2.0 * PI * delta).powf(0.25);
    assert!((l4_spacetime_norm(&traj) / expected - 1.0).abs() < 1e-12);
    assert!(free_trajectory(&u0, 0.0, 10).is_err());
}

#[test]
fn strichartz_on_zero_data_has_no_ratios() {
    let data = RandomDataSpec::new(0.5, 16, 1).unwrap().with_band(Band::HighOnly(16));
    let report = strichartz_experiment(&StrichartzConfig::new(data, 0.1, 12)).unwrap();
    assert!(report.samples.iter().all(|s| s.l4 == 0.0 && s.ratio.is_none()));
    assert_eq!(report.max_ratio, None);
    assert_eq!(report.exceedance_fraction, None);
}

#[test]
fn strichartz_exceedance_is_recomputed_from_samples() {
    let data = RandomDataSpec::new(0.5, 16, 2).unwrap();
    let report = strichartz_experiment(&StrichartzConfig::new(data, 0.2, 40)).unwrap();
    let mut normalized: Vec<f64> = report.samples.iter().map(|s| s.l4 / s.l2).collect();
    normalized.sort_by(f64::total_cmp);
    let median = (normalized[19] + normalized[20]) / 2.0;
    assert!((report.l4_over_l2_median.unwrap() - median).abs() < 1e-12);
    let level = 3.0 * median;
    let above = normalized.iter().filter(|&&v| v > level).count() as f64 / 40.0;
    assert_eq!(report.exceedance_fraction.unwrap(), above);
    let max = report.samples.iter().filter_map(|s| s.ratio).fold(0.0, f64::max);
    assert_eq!(report.max_ratio.unwrap(), max);
    assert!(report.time_samples.is_power_of_two() && report.time_samples >= 64);
    assert!(strichartz_experiment(&StrichartzConfig::new(RandomDataSpec::new(0.5, 16, 2).unwrap(), 0.2, 9)).is_err());
}

#[test]
fn embedding_constant_is_at_most_one() {
    let spec = RandomDataSpec::new(0.5, 32, 3).unwrap();
    let report = embedding_experiment(&spec, -0.2, 0.5, 20, 256).unwrap();
    assert_eq!(report.constants.len(), 20);
    assert!(report.fitted_constant <= 1.0, "{}", report.fitted_constant);
    assert!(report.constants.iter().all(|&c| c > 0.0));
}

fn highlow_base(data: RandomDataSpec, ensemble: usize) -> HighLowExperimentConfig {
    let hl = HighLowConfig::new(16, -0.04, Horizon::DeltaMultiple(2.0), EvolutionConfig::wick(1e-3));
    HighLowExperimentConfig::new(data, hl, ensemble)
}

#[test]
fn highlow_without_high_part_is_fully_compliant() {
    let data = RandomDataSpec::new(0.47, 64, 4).unwrap().with_band(Band::LowOnly(16));
    let report = highlow_experiment(&highlow_base(data, 6)).unwrap();
    assert_eq!(report.compliance, 1.0);
    assert_eq!(report.failures, 0);
    for q in &report.step_quantiles {
        assert_eq!(q.cumulative_w.max, 0.0);
    }
    assert!(report.max_consistency_error.unwrap() < 1e-12);
}

#[test]
fn highlow_with_infinite_budget_is_fully_compliant() {
    let data = RandomDataSpec::new(0.47, 64, 5).unwrap();
    let mut cfg = highlow_base(data, 6);
    cfg.highlow = cfg.highlow.with_budget_constant(f64::INFINITY);
    cfg.sweep_n = vec![8, 16];
    let report = highlow_experiment(&cfg).unwrap();
    assert_eq!(report.compliance, 1.0);
    assert_eq!(report.step_quantiles.len(), 2);
    assert!(report.step_quantiles[1].cumulative_w.q50 > 0.0);
    assert_eq!(report.sweeps.len(), 2);
    assert!(report.sweeps.iter().all(|p| p.compliance == 1.0));
    let seeds: Vec<u64> = report.members.iter().map(|m| m.seed).collect();
    let again = highlow_experiment(&cfg).unwrap();
    assert_eq!(seeds, again.members.iter().map(|m| m.seed).collect::<Vec<_>>());
    assert_eq!(report, again);
}

#[test]
fn linear_decay_matches_alpha() {
    let alpha = 0.4;
    let data = RandomDataSpec::new(alpha, 128, 6).unwrap();
    let cfg = SmoothingConfig::new(data, EvolutionConfig::wick(1e-2).with_coupling(0.0), 0.02, 40);
    let report = smoothing_experiment(&cfg).unwrap();
    let beta = report.beta_linear.unwrap();
    assert!((beta - alpha).abs() < 0.05, "beta_lin = {beta}");
}

#[test]
fn duhamel_part_is_smaller_and_smoother() {
    let data = RandomDataSpec::new(0.5, 128, 7).unwrap();
    let mut cfg = SmoothingConfig::new(data, EvolutionConfig::wick(1e-4), 0.1, 4);
    cfg.s_grid = vec![0.0, 0.25];
    let report = smoothing_experiment(&cfg).unwrap();
    assert_eq!(report.completed, 4);
    let (lo, hi) = report.fit_window;
    for p in report.profile.iter().filter(|p| (lo..=hi).contains(&p.n)) {
        assert!(p.nonlinear < p.linear, "{p:?}");
    }
    assert!(report.gap.unwrap() > 0.2, "{report:?}");
    assert!(report.w_sobolev[0].mean <= report.w_sobolev[1].mean);
}
