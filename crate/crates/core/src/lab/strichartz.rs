use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::linear_propagate;
use crate::error::{Error, Result};
use crate::random::{sample_initial_data, Quantiles, RandomDataSpec};
use crate::spectral::{l4_spacetime_norm, FourierState, SpaceTimeSpectrum, Trajectory, Window};
use crate::stats;

/// Modulation weight exponent of the Strichartz comparison norm.
pub const STRICHARTZ_B: f64 = 0.375;

fn default_factor() -> f64 {
    3.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrichartzConfig {
    pub data: RandomDataSpec,
    pub delta: f64,
    pub samples: usize,
    /// Time samples on `[0, δ]`; by default the smallest power of two that
    /// resolves the highest temporal frequency `M²` with 25% margin.
    #[serde(default)]
    pub time_samples: Option<usize>,
    /// Exceedance level `C` as a multiple of the median of `‖f‖_{L⁴}/‖c‖_{ℓ²}`.
    #[serde(default = "default_factor")]
    pub exceedance_factor: f64,
}

impl StrichartzConfig {
    pub fn new(data: RandomDataSpec, delta: f64, samples: usize) -> Self {
        Self {
            data,
            delta,
            samples,
            time_samples: None,
            exceedance_factor: default_factor(),
        }
    }

    pub fn resolved_time_samples(&self) -> usize {
        self.time_samples.unwrap_or_else(|| {
            let m = self.data.cutoff as f64;
            let needed = (1.25 * self.delta * m * m / PI).ceil() as usize + 2;
            needed.next_power_of_two().max(64)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrichartzSample {
    pub index: u64,
    /// `‖c‖_{ℓ²}` of the datum.
    pub l2: f64,
    /// `‖f‖_{L⁴}` on `𝕋 × [0, δ]`.
    pub l4: f64,
    /// `‖ηf‖_{L⁴}` for the raised-cosine time window `η`.
    pub l4_windowed: f64,
    /// `‖ηf‖_{X^{0,3/8}}`.
    pub x_norm: f64,
    /// `‖ηf‖_{L⁴} / ‖ηf‖_{X^{0,3/8}}`; `None` for a zero datum.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrichartzReport {
    pub time_samples: usize,
    pub dt: f64,
    pub samples: Vec<StrichartzSample>,
    pub ratio_quantiles: Option<Quantiles>,
    pub max_ratio: Option<f64>,
    /// Median of `‖f‖_{L⁴}/‖c‖_{ℓ²}` and the fraction of samples above
    /// `exceedance_factor` times it.
    pub l4_over_l2_median: Option<f64>,
    pub exceedance_level: Option<f64>,
    pub exceedance_fraction: Option<f64>,
}

/// Free evolution `S(t)u₀` sampled at `samples` equispaced times on `[0, δ]`.
pub fn free_trajectory(u0: &FourierState, delta: f64, samples: usize) -> Result<Trajectory> {
    if samples < 2 || !(delta > 0.0) {
        return Err(Error::invalid(format!("need delta > 0 and >= 2 samples, got {delta}, {samples}")));
    }
    let dt = delta / (samples - 1) as f64;
    let states = (0..samples)
        .map(|k| linear_propagate(u0, k as f64 * dt))
        .collect();
    Trajectory::new(states, dt, Window::RaisedCosine)
}

fn measure(u0: &FourierState, delta: f64, time_samples: usize, index: u64) -> Result<StrichartzSample> {
    let traj = free_trajectory(u0, delta, time_samples)?;
    let spectrum = SpaceTimeSpectrum::from_trajectory(&traj, 1)?;
    let x_norm = spectrum.xsb(0.0, STRICHARTZ_B);
    let l4_windowed = l4_spacetime_norm(&traj.windowed());
    Ok(StrichartzSample {
        index,
        l2: u0.l2_norm(),
        l4: l4_spacetime_norm(&traj),
        l4_windowed,
        x_norm,
        ratio: (x_norm > 0.0).then(|| l4_windowed / x_norm),
    })
}

/// Compares the space-time `L⁴` norm of random free evolutions with their
/// `X^{0,3/8}` norm, and tabulates `‖f‖_{L⁴}/‖c‖_{ℓ²}`.
pub fn strichartz_experiment(config: &StrichartzConfig) -> Result<StrichartzReport> {
    config.data.validate()?;
    if config.samples < 10 {
        return Err(Error::invalid(format!("need >= 10 samples, got {}", config.samples)));
    }
    let time_samples = config.resolved_time_samples();
    let samples = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| measure(&sample_initial_data(&config.data.member(i)), config.delta, time_samples, i))
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = samples.iter().filter_map(|s| s.ratio).collect();
    let normalized: Vec<f64> = samples
        .iter()
        .filter(|s| s.l2 > 0.0)
        .map(|s| s.l4 / s.l2)
        .collect();
    let median = (!normalized.is_empty()).then(|| stats::quantile(&normalized, 0.5));
    let level = median.map(|m| config.exceedance_factor * m);
    Ok(StrichartzReport {
        time_samples,
        dt: config.delta / (time_samples - 1) as f64,
        ratio_quantiles: (!ratios.is_empty()).then(|| Quantiles::of(&ratios)),
        max_ratio: ratios.iter().copied().reduce(f64::max),
        l4_over_l2_median: median,
        exceedance_level: level,
        exceedance_fraction: level.map(|c| stats::exceedance(&normalized, c)),
        samples,
    })
}
