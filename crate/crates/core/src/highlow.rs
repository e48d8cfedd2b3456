//! High-low frequency globalization loop.
//!
//! The datum is split as `u₀ = φ₀ + ψ₀` with `φ₀ = P_{≤N}u₀`. On each interval
//! of length `δ` the low part is evolved by the Wick-ordered flow, the high
//! part by the difference equation driven by `N(u + v) − N(u)`, and the
//! nonlinear remainder `w = v − S(t − t_j)ψ_j` is folded back into the low
//! part: `φ_{j+1} = u(t_{j+1}) + w(t_{j+1})`, `ψ_{j+1} = S(δ)ψ_j`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    duhamel_part, evolve_difference, evolve_steps, linear_propagate, EvolutionConfig,
};
use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm, FourierState, Trajectory};

/// Default regularization of the `0±` exponents in `δ`.
pub const DEFAULT_THETA: f64 = 0.01;
/// Default constant `C` in the budget `C·N^{−s}·K`.
pub const DEFAULT_BUDGET_CONSTANT: f64 = 10.0;
/// Default margin when `K` is taken from the sampled datum.
pub const DEFAULT_K_MARGIN: f64 = 1.05;

const TIME_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Horizon {
    /// Absolute final time `T`.
    Time(f64),
    /// `T` as a multiple of `δ`.
    DeltaMultiple(f64),
}

fn default_theta() -> f64 {
    DEFAULT_THETA
}

fn default_budget_constant() -> f64 {
    DEFAULT_BUDGET_CONSTANT
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HighLowConfig {
    /// Splitting frequency.
    #[serde(rename = "N")]
    pub n: usize,
    /// Data-norm budget; `None` means `1.05·‖u₀‖_{H^s}`.
    #[serde(rename = "K", default)]
    pub k: Option<f64>,
    pub s: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    pub horizon: Horizon,
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget_constant")]
    pub budget_constant: f64,
    /// Also run one direct evolution of `u₀` and report the per-step mismatch.
    #[serde(default = "default_true")]
    pub check_consistency: bool,
}

impl HighLowConfig {
    pub fn new(n: usize, s: f64, horizon: Horizon, evolution: EvolutionConfig) -> Self {
        Self {
            n,
            k: None,
            s,
            theta: DEFAULT_THETA,
            horizon,
            evolution,
            seed: 0,
            budget_constant: DEFAULT_BUDGET_CONSTANT,
            check_consistency: true,
        }
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_budget_constant(mut self, c: f64) -> Self {
        self.budget_constant = c;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_consistency_check(mut self, on: bool) -> Self {
        self.check_consistency = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::invalid("splitting frequency N must be >= 1"));
        }
        if !(self.s < 0.0) {
            return Err(Error::invalid(format!("regularity s = {} must be negative", self.s)));
        }
        if !(self.theta > 0.0) || !self.theta.is_finite() {
            return Err(Error::invalid(format!("theta = {} must be positive", self.theta)));
        }
        if let Some(k) = self.k {
            if !(k > 0.0) || !k.is_finite() {
                return Err(Error::invalid(format!("K = {k} must be positive")));
            }
        }
        let t = match self.horizon {
            Horizon::Time(t) | Horizon::DeltaMultiple(t) => t,
        };
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!("horizon {t} must be positive")));
        }
        if !(self.budget_constant > 0.0) {
            return Err(Error::invalid("budget constant must be positive"));
        }
        self.evolution.validate()
    }
}

/// `δ = N^{(4+θ)s} K^{−(4+θ)}`.
pub fn choose_delta(n: usize, k: f64, s: f64, theta: f64) -> f64 {
    let p = 4.0 + theta;
    (n as f64).powf(p * s) * k.powf(-p)
}

/// `C·N^{−s}·K`.
pub fn budget(n: usize, k: f64, s: f64, c: f64) -> f64 {
    c * (n as f64).powf(-s) * k
}

/// `(P_{≤N}u₀, P_{>N}u₀)`; the coefficients of the two parts are copied, so
/// their sum reproduces `u₀` exactly.
pub fn split(u0: &FourierState, n: usize) -> Result<(FourierState, FourierState)> {
    if n > u0.cutoff() {
        return Err(Error::invalid(format!(
            "splitting frequency {n} exceeds the mode cutoff {}",
            u0.cutoff()
        )));
    }
    let zero = num_complex::Complex64::new(0.0, 0.0);
    let n = n as i64;
    let phi = u0.map_modes(|k, c| if k.abs() <= n { c } else { zero });
    let psi = u0.map_modes(|k, c| if k.abs() > n { c } else { zero });
    Ok((phi, psi))
}

/// Steps per interval and their size: the largest size `≤ evolution.dt` that
/// divides `δ` evenly.
pub fn substeps(delta: f64, evolution: &EvolutionConfig) -> (usize, f64) {
    let k = ((delta / evolution.dt) - 1e-9).ceil().max(1.0) as usize;
    (k, delta / k as f64)
}

/// Wick-ordered evolution of the low datum over `[t_j, t_j + δ]`, recorded at
/// every integrator step.
pub fn low_step(phi: &FourierState, delta: f64, evolution: &EvolutionConfig) -> Result<Trajectory> {
    if !(delta > 0.0) {
        return Err(Error::invalid(format!("step length {delta} must be positive")));
    }
    let cfg = evolution.clone().with_record_every(1);
    let (k, h) = substeps(delta, &cfg);
    evolve_steps(phi, h, k, &cfg)
}

/// Solves the difference equation with datum `psi` along `u_low`, returning
/// `(v, w)` with `w(t) = v(t) − S(t − t_j)ψ_j`.
pub fn difference_step(
    u_low: &Trajectory,
    psi: &FourierState,
    evolution: &EvolutionConfig,
) -> Result<(Trajectory, Trajectory)> {
    let v = evolve_difference(u_low, psi, evolution)?;
    let w = duhamel_part(psi, &v)?;
    debug_assert!(w.first().l2_norm() <= 1e-12);
    Ok((v, w))
}

/// `(u(t_{j+1}) + w(t_{j+1}), S(δ)ψ_j)`.
pub fn redistribute(
    u_low_end: &FourierState,
    w_end: &FourierState,
    psi: &FourierState,
    delta: f64,
) -> Result<(FourierState, FourierState)> {
    let target = psi.time() + delta;
    for found in [u_low_end.time(), w_end.time()] {
        if (found - target).abs() > TIME_TOL * (1.0 + target.abs()) {
            return Err(Error::TimeMismatch {
                expected: target,
                found,
            });
        }
    }
    let phi_next = u_low_end.add(w_end)?;
    let psi_next = linear_propagate(psi, delta).with_time(phi_next.time());
    Ok((phi_next, psi_next))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub j: usize,
    pub t: f64,
    /// `‖u^j‖_{L²}` at the end of the step.
    pub low_l2: f64,
    /// `‖w^j(jδ)‖_{L²}`.
    pub w_l2: f64,
    pub cumulative_w: f64,
    pub budget: f64,
    pub exceeded: bool,
    /// `‖φ_j + ψ_j − u_full(jδ)‖_{L²}` when the direct evolution is run.
    pub consistency: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFailure {
    pub step: usize,
    pub time: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HighLowReport {
    pub delta: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub datum_norm: f64,
    pub budget: f64,
    pub steps_planned: usize,
    pub substeps: usize,
    pub steps: Vec<StepReport>,
    pub failure: Option<StepFailure>,
}

impl HighLowReport {
    pub fn completed(&self) -> bool {
        self.failure.is_none() && self.steps.len() == self.steps_planned
    }

    /// Whether the cumulative remainder stayed within budget at every step.
    pub fn within_budget(&self) -> bool {
        self.completed() && self.steps.iter().all(|r| !r.exceeded)
    }

    pub fn final_cumulative_w(&self) -> f64 {
        self.steps.last().map_or(0.0, |r| r.cumulative_w)
    }

    pub fn max_consistency_error(&self) -> Option<f64> {
        self.steps
            .iter()
            .map(|r| r.consistency)
            .try_fold(0.0f64, |acc, c| c.map(|c| acc.max(c)))
    }
}

fn failure_of(err: Error, step: usize) -> Result<StepFailure> {
    match err {
        Error::BlowUp { time, reason, .. } => Ok(StepFailure { step, time, reason }),
        other => Err(other),
    }
}

/// Runs the loop up to the horizon (a whole number of steps `⌈T/δ⌉ ≥ 1`).
/// Budget violations are flagged, not fatal; a blow-up ends the run with a
/// partial report.
pub fn run_highlow(u0: &FourierState, config: &HighLowConfig) -> Result<HighLowReport> {
    config.validate()?;
    let datum_norm = sobolev_norm(u0, config.s);
    let k = config.k.unwrap_or(DEFAULT_K_MARGIN * datum_norm);
    if datum_norm > k {
        return Err(Error::DatumOutsideBudget {
            s: config.s,
            norm: datum_norm,
            budget: k,
        });
    }
    let delta = choose_delta(config.n, k, config.s, config.theta);
    let horizon = match config.horizon {
        Horizon::Time(t) => t,
        Horizon::DeltaMultiple(m) => m * delta,
    };
    let steps_planned = ((horizon / delta) - 1e-9).ceil().max(1.0) as usize;
    let budget = budget(config.n, k, config.s, config.budget_constant);
    let (per_step, h) = substeps(delta, &config.evolution);

    let mut report = HighLowReport {
        delta,
        k,
        datum_norm,
        budget,
        steps_planned,
        substeps: per_step,
        steps: Vec::with_capacity(steps_planned),
        failure: None,
    };

    let direct = if config.check_consistency {
        let cfg = config.evolution.clone().with_record_every(per_step);
        match evolve_steps(u0, h, per_step * steps_planned, &cfg) {
            Ok(traj) => Some(traj),
            Err(e) => {
                report.failure = Some(failure_of(e, 0)?);
                return Ok(report);
            }
        }
    } else {
        None
    };

    let (mut phi, mut psi) = split(u0, config.n)?;
    let mut cumulative = 0.0;
    for j in 1..=steps_planned {
        let outcome = low_step(&phi, delta, &config.evolution).and_then(|u| {
            let (_, w) = difference_step(&u, &psi, &config.evolution)?;
            Ok((u, w))
        });
        let (u, w) = match outcome {
            Ok(pair) => pair,
            Err(e) => {
                report.failure = Some(failure_of(e, j)?);
                return Ok(report);
            }
        };
        let w_end = w.last();
        let w_l2 = w_end.l2_norm();
        cumulative += w_l2;
        let (phi_next, psi_next) = redistribute(u.last(), w_end, &psi, delta)?;
        let consistency = match &direct {
            Some(traj) => {
                let full = &traj.states()[j];
                Some(phi_next.add(&psi_next)?.l2_distance(full)?)
            }
            None => None,
        };
        report.steps.push(StepReport {
            j,
            t: phi_next.time(),
            low_l2: u.last().l2_norm(),
            w_l2,
            cumulative_w: cumulative,
            budget,
            exceeded: cumulative > budget,
            consistency,
        });
        phi = phi_next;
        psi = psi_next;
    }
    Ok(report)
}
