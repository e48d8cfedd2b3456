use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{duhamel_part, evolve, step_plan, EvolutionConfig};
use crate::error::{Error, Result};
use crate::random::{sample_initial_data, RandomDataSpec};
use crate::spectral::{sobolev_norm, FourierState};
use crate::stats;

/// Relative size below which `w` counts as identically zero (round-off of
/// the linear propagation).
const NEGLIGIBLE: f64 = 1e-10;

fn default_s_grid() -> Vec<f64> {
    vec![-0.5, -0.25, 0.0, 0.25, 0.5]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    pub data: RandomDataSpec,
    pub evolution: EvolutionConfig,
    /// Final time `t`.
    pub time: f64,
    pub ensemble: usize,
    /// `|n|` range of the decay fit; defaults to `[M/8, M/2]`.
    #[serde(default)]
    pub fit_window: Option<(usize, usize)>,
    #[serde(default = "default_s_grid")]
    pub s_grid: Vec<f64>,
}

impl SmoothingConfig {
    pub fn new(data: RandomDataSpec, evolution: EvolutionConfig, time: f64, ensemble: usize) -> Self {
        Self {
            data,
            evolution,
            time,
            ensemble,
            fit_window: None,
            s_grid: default_s_grid(),
        }
    }

    pub fn window(&self) -> (usize, usize) {
        self.fit_window
            .unwrap_or((self.data.cutoff / 8, self.data.cutoff / 2))
    }

    pub fn validate(&self) -> Result<()> {
        self.data.validate()?;
        self.evolution.validate()?;
        if !(self.data.alpha <= 0.5) {
            return Err(Error::invalid(format!(
                "smoothing runs need alpha in (0, 1/2], got {}",
                self.data.alpha
            )));
        }
        if !(self.time > 0.0) {
            return Err(Error::invalid("time must be positive"));
        }
        if self.ensemble < 1 {
            return Err(Error::invalid("ensemble must have at least one member"));
        }
        let (lo, hi) = self.window();
        if lo < 1 || hi <= lo || hi > self.data.cutoff {
            return Err(Error::invalid(format!("bad fit window [{lo}, {hi}]")));
        }
        Ok(())
    }
}

/// Ensemble means of `|û₀(n)|` and `|ŵ(n, t)|`, averaged over `±n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeProfile {
    pub n: usize,
    pub linear: f64,
    pub nonlinear: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevMean {
    pub s: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub completed: usize,
    pub blowups: usize,
    pub fit_window: (usize, usize),
    pub profile: Vec<ModeProfile>,
    /// Decay rate of `|û₀(n)|`, i.e. minus the log-log slope.
    pub beta_linear: Option<f64>,
    /// Decay rate of `|ŵ(n, t)|`; `None` when `w` vanishes.
    pub beta_nonlinear: Option<f64>,
    pub gap: Option<f64>,
    pub w_sobolev: Vec<SobolevMean>,
}

struct Member {
    u0: FourierState,
    w: FourierState,
}

fn run_member(config: &SmoothingConfig, index: u64) -> Result<Member> {
    let u0 = sample_initial_data(&config.data.member(index));
    let (steps, _) = step_plan(config.time, &config.evolution.clone().with_record_every(1));
    let cfg = config.evolution.clone().with_record_every(steps);
    let traj = evolve(&u0, config.time, &cfg)?;
    let w = duhamel_part(&u0, &traj)?.last().clone();
    Ok(Member { u0, w })
}

/// `−slope` of `log a(n)` against `log n` over the window; `None` if any
/// amplitude in the window vanishes.
fn decay_rate(profile: &[ModeProfile], window: (usize, usize), pick: impl Fn(&ModeProfile) -> f64) -> Option<f64> {
    let points: Vec<(f64, f64)> = profile
        .iter()
        .filter(|p| (window.0..=window.1).contains(&p.n))
        .map(|p| ((p.n as f64).ln(), pick(p)))
        .collect();
    if points.iter().any(|&(_, a)| !(a > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    stats::least_squares(&xs, &ys).map(|fit| -fit.slope)
}

/// Evolves an ensemble of random data, extracts the Duhamel part
/// `w = u(t) − S(t)u₀` and compares its spectral decay with that of the data.
pub fn smoothing_experiment(config: &SmoothingConfig) -> Result<SmoothingReport> {
    config.validate()?;
    let outcomes: Vec<Result<Member>> = (0..config.ensemble as u64)
        .into_par_iter()
        .map(|i| run_member(config, i))
        .collect();
    let mut members = Vec::new();
    let mut blowups = 0;
    for outcome in outcomes {
        match outcome {
            Ok(m) => members.push(m),
            Err(e) if e.is_numerical_failure() => blowups += 1,
            Err(e) => return Err(e),
        }
    }
    let window = config.window();
    let m = config.data.cutoff;
    let count = members.len().max(1) as f64;
    let profile: Vec<ModeProfile> = (0..=m)
        .map(|n| {
            let k = n as i64;
            let signs: &[i64] = if n == 0 { &[0] } else { &[k, -k] };
            let avg = |f: &dyn Fn(&Member, i64) -> f64| {
                members
                    .iter()
                    .map(|mem| signs.iter().map(|&s| f(mem, s)).sum::<f64>() / signs.len() as f64)
                    .sum::<f64>()
                    / count
            };
            ModeProfile {
                n,
                linear: avg(&|mem, s| mem.u0.mode(s).norm()),
                nonlinear: avg(&|mem, s| mem.w.mode(s).norm()),
            }
        })
        .collect();
    let beta_linear = decay_rate(&profile, window, |p| p.linear);
    let scale = profile.iter().map(|p| p.linear).fold(0.0, f64::max);
    let vanishing = profile.iter().all(|p| p.nonlinear <= NEGLIGIBLE * scale);
    let beta_nonlinear = if vanishing {
        None
    } else {
        decay_rate(&profile, window, |p| p.nonlinear)
    };
    let gap = beta_linear.zip(beta_nonlinear).map(|(l, n)| n - l);
    let w_sobolev = config
        .s_grid
        .iter()
        .map(|&s| SobolevMean {
            s,
            mean: members.iter().map(|mem| sobolev_norm(&mem.w, s)).sum::<f64>() / count,
        })
        .collect();
    Ok(SmoothingReport {
        completed: members.len(),
        blowups,
        fit_window: window,
        profile,
        beta_linear,
        beta_nonlinear,
        gap,
        w_sobolev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_control_has_no_gap() {
        let data = RandomDataSpec::new(0.4, 32, 3).unwrap();
        let cfg = SmoothingConfig::new(data, EvolutionConfig::wick(1e-2).with_coupling(0.0), 0.05, 3);
        let report = smoothing_experiment(&cfg).unwrap();
        assert_eq!(report.completed, 3);
        assert!(report.profile.iter().all(|p| p.nonlinear < 1e-13));
        assert_eq!(report.beta_nonlinear, None);
        assert_eq!(report.gap, None);
        assert!(report.beta_linear.is_some());
    }

    #[test]
    fn alpha_above_half_is_rejected() {
        let data = RandomDataSpec::new(0.75, 16, 1).unwrap();
        let cfg = SmoothingConfig::new(data, EvolutionConfig::wick(1e-2), 0.05, 1);
        assert!(smoothing_experiment(&cfg).is_err());
    }
}
