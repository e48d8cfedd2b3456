use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::highlow::{run_highlow, HighLowConfig, HighLowReport};
use crate::random::{sample_initial_data, Quantiles, RandomDataSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HighLowExperimentConfig {
    pub data: RandomDataSpec,
    pub highlow: HighLowConfig,
    pub ensemble: usize,
    /// Extra splitting frequencies for the sensitivity sweep.
    #[serde(default)]
    pub sweep_n: Vec<usize>,
    /// Extra `θ` values for the sensitivity sweep.
    #[serde(default)]
    pub sweep_theta: Vec<f64>,
}

impl HighLowExperimentConfig {
    pub fn new(data: RandomDataSpec, highlow: HighLowConfig, ensemble: usize) -> Self {
        Self {
            data,
            highlow,
            ensemble,
            sweep_n: Vec::new(),
            sweep_theta: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberOutcome {
    pub index: u64,
    pub seed: u64,
    pub within_budget: bool,
    /// Why the member produced no usable run (blow-up or datum outside `K`).
    pub failure: Option<String>,
    pub report: Option<HighLowReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepQuantiles {
    pub j: usize,
    pub w_l2: Quantiles,
    pub cumulative_w: Quantiles,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub theta: f64,
    pub compliance: f64,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HighLowExperimentReport {
    pub members: Vec<MemberOutcome>,
    /// Fraction of members whose cumulative remainder stayed within budget
    /// at every step.
    pub compliance: f64,
    pub failures: usize,
    pub step_quantiles: Vec<StepQuantiles>,
    pub max_consistency_error: Option<f64>,
    pub sweeps: Vec<SweepPoint>,
}

fn run_member(data: &RandomDataSpec, config: &HighLowConfig, index: u64) -> Result<MemberOutcome> {
    let member = data.member(index);
    let u0 = sample_initial_data(&member);
    let config = config.clone().with_seed(member.seed);
    let (report, failure) = match run_highlow(&u0, &config) {
        Ok(report) => {
            let failure = report.failure.as_ref().map(|f| format!("step {}: {}", f.step, f.reason));
            (Some(report), failure)
        }
        Err(e @ Error::DatumOutsideBudget { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(MemberOutcome {
        index,
        seed: member.seed,
        within_budget: report.as_ref().is_some_and(|r| r.within_budget()),
        failure,
        report,
    })
}

fn run_ensemble(data: &RandomDataSpec, config: &HighLowConfig, ensemble: usize) -> Result<Vec<MemberOutcome>> {
    (0..ensemble as u64)
        .into_par_iter()
        .map(|i| run_member(data, config, i))
        .collect()
}

fn compliance(members: &[MemberOutcome]) -> f64 {
    members.iter().filter(|m| m.within_budget).count() as f64 / members.len() as f64
}

/// Runs the high-low loop on every ensemble member and aggregates budget
/// compliance, per-step remainder quantiles and the sensitivity sweep.
pub fn highlow_experiment(config: &HighLowExperimentConfig) -> Result<HighLowExperimentReport> {
    config.data.validate()?;
    config.highlow.validate()?;
    if config.ensemble < 1 {
        return Err(Error::invalid("ensemble must have at least one member"));
    }
    let members = run_ensemble(&config.data, &config.highlow, config.ensemble)?;

    let steps = members
        .iter()
        .filter_map(|m| m.report.as_ref())
        .map(|r| r.steps.len())
        .max()
        .unwrap_or(0);
    let step_quantiles = (1..=steps)
        .filter_map(|j| {
            let rows: Vec<_> = members
                .iter()
                .filter_map(|m| m.report.as_ref()?.steps.get(j - 1))
                .collect();
            (!rows.is_empty()).then(|| StepQuantiles {
                j,
                w_l2: Quantiles::of(&rows.iter().map(|r| r.w_l2).collect::<Vec<_>>()),
                cumulative_w: Quantiles::of(&rows.iter().map(|r| r.cumulative_w).collect::<Vec<_>>()),
            })
        })
        .collect();
    let max_consistency_error = members
        .iter()
        .filter_map(|m| m.report.as_ref()?.max_consistency_error())
        .reduce(f64::max);

    let ns = if config.sweep_n.is_empty() { vec![config.highlow.n] } else { config.sweep_n.clone() };
    let thetas = if config.sweep_theta.is_empty() {
        vec![config.highlow.theta]
    } else {
        config.sweep_theta.clone()
    };
    let mut sweeps = Vec::new();
    if !config.sweep_n.is_empty() || !config.sweep_theta.is_empty() {
        for &n in &ns {
            for &theta in &thetas {
                let mut hl = config.highlow.clone().with_theta(theta).with_consistency_check(false);
                hl.n = n;
                let run = run_ensemble(&config.data, &hl, config.ensemble)?;
                sweeps.push(SweepPoint {
                    n,
                    theta,
                    compliance: compliance(&run),
                    failures: run.iter().filter(|m| m.failure.is_some()).count(),
                });
            }
        }
    }

    Ok(HighLowExperimentReport {
        compliance: compliance(&members),
        failures: members.iter().filter(|m| m.failure.is_some()).count(),
        members,
        step_quantiles,
        max_consistency_error,
        sweeps,
    })
}
