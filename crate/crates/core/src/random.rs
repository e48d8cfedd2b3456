//! Seeded sampling of Gaussian-randomized Fourier data
//!
//! ```text
//! u₀ = Σ_n g_n / √(1 + |n|^{2α}) e^{inx}
//! ```
//!
//! with `g_n` independent standard complex Gaussians (`E|g|² = 1`), and the
//! Monte Carlo tail statistics built on it.
//!
//! Every coefficient `g_n` is drawn from its own ChaCha stream keyed by the
//! seed and the mode index, so restricting the band never shifts the draws of
//! surviving modes: the high part of a datum is a literal truncation of it.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{bracket, sobolev_norm, FourierState};
use crate::stats::{self, LinearFit};

/// Complex Gaussian with independent `N(0, 1/2)` real and imaginary parts.
pub fn sample_complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// SplitMix64 finalizer applied to `base + index·φ`; used for per-member seeds.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Source of the unit Gaussians `g_n`.
pub trait CoefficientSource: Sync {
    fn coefficient(&self, seed: u64, mode: i64) -> Complex64;
}

/// Independent standard complex Gaussians, one ChaCha stream per mode.
#[derive(Clone, Copy, Debug, Default)]
pub struct GaussianSource;

impl CoefficientSource for GaussianSource {
    fn coefficient(&self, seed: u64, mode: i64) -> Complex64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // zigzag so that n and -n get distinct streams
        let stream = ((mode << 1) ^ (mode >> 63)) as u64;
        rng.set_stream(stream);
        sample_complex_gaussian(&mut rng)
    }
}

/// Always zero; lets tests exercise degenerate ensembles.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullSource;

impl CoefficientSource for NullSource {
    fn coefficient(&self, _seed: u64, _mode: i64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum Band {
    #[default]
    Full,
    /// Modes `|n| > N` only.
    HighOnly(usize),
    /// Modes `|n| ≤ N` only.
    LowOnly(usize),
}

impl Band {
    pub fn contains(self, n: i64) -> bool {
        let a = n.unsigned_abs() as usize;
        match self {
            Band::Full => true,
            Band::HighOnly(cut) => a > cut,
            Band::LowOnly(cut) => a <= cut,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomDataSpec {
    pub alpha: f64,
    #[serde(rename = "modes")]
    pub cutoff: usize,
    pub seed: u64,
    #[serde(default)]
    pub band: Band,
}

impl RandomDataSpec {
    pub fn new(alpha: f64, cutoff: usize, seed: u64) -> Result<Self> {
        let spec = Self {
            alpha,
            cutoff,
            seed,
            band: Band::Full,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid(format!("alpha must be positive, got {}", self.alpha)));
        }
        Ok(())
    }

    pub fn with_band(mut self, band: Band) -> Self {
        self.band = band;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Spec of the `index`-th ensemble member.
    pub fn member(&self, index: u64) -> Self {
        self.with_seed(derive_seed(self.seed, index))
    }

    /// Amplitude `(1 + |n|^{2α})^{-1/2}`; the zero mode has weight 1.
    pub fn weight(&self, n: i64) -> f64 {
        (1.0 + (n.unsigned_abs() as f64).powf(2.0 * self.alpha)).powf(-0.5)
    }

    /// `E‖u₀‖²_{H^s} = Σ_{n ∈ band} ⟨n⟩^{2s} / (1 + |n|^{2α})`.
    pub fn expected_sobolev_sq(&self, s: f64) -> f64 {
        let m = self.cutoff as i64;
        (-m..=m)
            .filter(|&n| self.band.contains(n))
            .map(|n| bracket(n as f64).powf(2.0 * s) * self.weight(n).powi(2))
            .sum()
    }
}

pub fn sample_initial_data(spec: &RandomDataSpec) -> FourierState {
    sample_with_source(spec, &GaussianSource)
}

pub fn sample_with_source(spec: &RandomDataSpec, source: &dyn CoefficientSource) -> FourierState {
    FourierState::from_fn(spec.cutoff, 0.0, |n| {
        if spec.band.contains(n) {
            source.coefficient(spec.seed, n) * spec.weight(n)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub threshold: f64,
    pub probability: f64,
    pub exceedances: usize,
}

/// Fit of `log P(X ≥ K)` against `K²` over a threshold sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub sweep: Vec<TailPoint>,
    /// `c` in `P ≈ C e^{−cK²}`, i.e. minus the fitted slope.
    pub exponent: f64,
    pub r_squared: f64,
    /// Set when too few thresholds were exceeded to fit a line; `exponent`
    /// is then the bound implied by `P < 1/samples` at the largest threshold.
    pub lower_bound_only: bool,
}

pub const TAIL_SWEEP_POINTS: usize = 16;
/// Thresholds are kept where at least this many samples exceed them.
pub const TAIL_MIN_EXCEEDANCES: usize = 10;

/// Sweeps `K²` uniformly from the sample median to the level exceeded by
/// `TAIL_MIN_EXCEEDANCES` samples, then regresses `log P` on `K²`.
pub fn gaussian_tail_fit(values: &[f64]) -> TailFit {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let lo = stats::quantile_sorted(&sorted, 0.5);
    let hi = sorted[n.saturating_sub(TAIL_MIN_EXCEEDANCES).min(n - 1)];
    let sweep: Vec<TailPoint> = (0..TAIL_SWEEP_POINTS)
        .map(|i| {
            let frac = i as f64 / (TAIL_SWEEP_POINTS - 1) as f64;
            let k = (lo * lo + frac * (hi * hi - lo * lo)).max(0.0).sqrt();
            let exceedances = sorted.iter().filter(|&&v| v >= k).count();
            TailPoint {
                threshold: k,
                probability: exceedances as f64 / n as f64,
                exceedances,
            }
        })
        .collect();
    let usable: Vec<&TailPoint> = sweep.iter().filter(|p| p.exceedances > 0).collect();
    let xs: Vec<f64> = usable.iter().map(|p| p.threshold * p.threshold).collect();
    let ys: Vec<f64> = usable.iter().map(|p| p.probability.ln()).collect();
    match stats::least_squares(&xs, &ys) {
        Some(LinearFit {
            slope, r_squared, ..
        }) => TailFit {
            sweep,
            exponent: -slope,
            r_squared,
            lower_bound_only: false,
        },
        None => {
            let k = sorted[n - 1].max(f64::MIN_POSITIVE);
            TailFit {
                sweep,
                exponent: (n as f64).ln() / (k * k),
                r_squared: f64::NAN,
                lower_bound_only: true,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub threshold: f64,
    pub empirical_probability: f64,
    pub sample_count: usize,
    pub fitted_exponent: f64,
    pub fit: TailFit,
}

/// `H^s` norms of `samples` independent data drawn from `spec` (member seeds).
pub fn sobolev_norm_ensemble(spec: &RandomDataSpec, s: f64, samples: usize) -> Vec<f64> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| sobolev_norm(&sample_initial_data(&spec.member(i)), s))
        .collect()
}

/// Empirical `P(‖u₀‖_{H^s} ≥ K)` together with a Gaussian-tail fit.
pub fn tail_probability(spec: &RandomDataSpec, s: f64, k: f64, samples: usize) -> Result<TailReport> {
    if samples < 100 {
        return Err(Error::invalid(format!("tail estimates need >= 100 samples, got {samples}")));
    }
    spec.validate()?;
    let norms = sobolev_norm_ensemble(spec, s, samples);
    let fit = gaussian_tail_fit(&norms);
    Ok(TailReport {
        threshold: k,
        empirical_probability: stats::exceedance(&norms, k),
        sample_count: samples,
        fitted_exponent: fit.exponent,
        fit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
    pub q99: f64,
    pub max: f64,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q = |p| stats::quantile_sorted(&sorted, p);
        Self {
            q05: q(0.05),
            q25: q(0.25),
            q50: q(0.5),
            q75: q(0.75),
            q95: q(0.95),
            q99: q(0.99),
            max: sorted[sorted.len() - 1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupReport {
    pub epsilon: f64,
    pub values: Vec<f64>,
    /// Mode attaining the supremum in each sample.
    pub argmax: Vec<i64>,
    pub quantiles: Quantiles,
    pub fit: TailFit,
}

/// Distribution of `sup_n ⟨n⟩^{−ε} |g_n|` over the band of `spec`.
pub fn sup_weighted_gaussian(
    spec: &RandomDataSpec,
    epsilon: f64,
    samples: usize,
    source: &dyn CoefficientSource,
) -> Result<SupReport> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let m = spec.cutoff as i64;
    let draws: Vec<(f64, i64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(spec.seed, i);
            (-m..=m)
                .filter(|&n| spec.band.contains(n))
                .map(|n| (bracket(n as f64).powf(-epsilon) * source.coefficient(seed, n).norm(), n))
                .fold((0.0, 0), |best, cur| if cur.0 > best.0 { cur } else { best })
        })
        .collect();
    let values: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let argmax = draws.iter().map(|d| d.1).collect();
    Ok(SupReport {
        epsilon,
        quantiles: Quantiles::of(&values),
        fit: gaussian_tail_fit(&values),
        values,
        argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws: Vec<Complex64> = (0..100_000).map(|_| sample_complex_gaussian(&mut rng)).collect();
        let second = draws.iter().map(|g| g.norm_sqr()).sum::<f64>() / draws.len() as f64;
        assert!((0.99..=1.01).contains(&second), "E|g|^2 = {second}");
        let mean = draws.iter().sum::<Complex64>() / draws.len() as f64;
        assert!(mean.norm() < 0.02);
    }

    #[test]
    fn draws_are_deterministic() {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            assert_eq!(sample_complex_gaussian(&mut a), sample_complex_gaussian(&mut b));
        }
        let spec = RandomDataSpec::new(0.3, 16, 99).unwrap();
        assert_eq!(sample_initial_data(&spec), sample_initial_data(&spec));
    }

    #[test]
    fn band_masking_truncates_literally() {
        let full = RandomDataSpec::new(0.5, 64, 3).unwrap();
        let high = sample_initial_data(&full.with_band(Band::HighOnly(16)));
        let whole = sample_initial_data(&full);
        for (n, c) in high.modes() {
            if n.abs() <= 16 {
                assert_eq!(c, Complex64::new(0.0, 0.0));
            } else {
                assert_eq!(c, whole.mode(n));
            }
        }
    }

    #[test]
    fn non_positive_alpha_is_rejected() {
        assert!(RandomDataSpec::new(0.0, 8, 0).is_err());
        assert!(RandomDataSpec::new(-0.2, 8, 0).is_err());
    }

    #[test]
    fn tail_at_zero_threshold_is_one() {
        let spec = RandomDataSpec::new(0.5, 16, 1).unwrap();
        let report = tail_probability(&spec, -0.05, 0.0, 200).unwrap();
        assert_eq!(report.empirical_probability, 1.0);
        assert!(tail_probability(&spec, -0.05, 0.0, 99).is_err());
    }

    #[test]
    fn null_source_has_zero_sup() {
        let spec = RandomDataSpec::new(0.5, 32, 1).unwrap();
        let report = sup_weighted_gaussian(&spec, 0.1, 50, &NullSource).unwrap();
        assert!(report.values.iter().all(|&v| v == 0.0));
        assert_eq!(report.quantiles.max, 0.0);
    }

    #[test]
    fn heavy_weight_pins_sup_to_low_modes() {
        let spec = RandomDataSpec::new(0.5, 64, 8).unwrap();
        let report = sup_weighted_gaussian(&spec, 10.0, 2000, &GaussianSource).unwrap();
        let low = report.argmax.iter().filter(|n| n.abs() <= 1).count();
        assert!(low as f64 / 2000.0 > 0.99);
    }
}
