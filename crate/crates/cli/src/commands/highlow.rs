use nlslab_core::lab::{highlow_experiment, HighLowExperimentConfig};
use serde_json::json;

use super::Report;
use crate::config::ExperimentConfig;
use crate::error::Failure;
use crate::output::{num, opt_num, RunDir};
use crate::plot::{Chart, Series};

pub fn run(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Report, Failure> {
    let data = cfg.data.ok_or_else(|| Failure::config("highlow needs a data section"))?;
    let highlow = cfg.highlow.clone().ok_or_else(|| Failure::config("highlow needs a highlow section"))?;
    let mut config = HighLowExperimentConfig::new(data, highlow, cfg.ensemble_size);
    config.sweep_n = cfg.params.sweep_n.clone().unwrap_or_default();
    config.sweep_theta = cfg.params.sweep_theta.clone().unwrap_or_default();
    let report = highlow_experiment(&config)?;

    dir.csv(
        "members.csv",
        &["member", "seed", "within_budget", "delta", "K", "datum_norm", "budget", "failure"],
        report.members.iter().map(|m| {
            let r = m.report.as_ref();
            vec![
                m.index.to_string(),
                m.seed.to_string(),
                m.within_budget.to_string(),
                opt_num(r.map(|r| r.delta)),
                opt_num(r.map(|r| r.k)),
                opt_num(r.map(|r| r.datum_norm)),
                opt_num(r.map(|r| r.budget)),
                m.failure.clone().unwrap_or_default(),
            ]
        }),
    )?;
    dir.csv(
        "steps.csv",
        &["member", "seed", "j", "t", "low_l2", "w_l2", "cumulative_w", "budget", "exceeded", "consistency"],
        report.members.iter().flat_map(|m| {
            m.report.iter().flat_map(|r| &r.steps).map(|s| {
                vec![
                    m.index.to_string(),
                    m.seed.to_string(),
                    s.j.to_string(),
                    num(s.t),
                    num(s.low_l2),
                    num(s.w_l2),
                    num(s.cumulative_w),
                    num(s.budget),
                    s.exceeded.to_string(),
                    opt_num(s.consistency),
                ]
            })
        }),
    )?;
    dir.csv(
        "step_quantiles.csv",
        &["j", "w_l2_q50", "w_l2_q95", "w_l2_max", "cumulative_w_q50", "cumulative_w_q95", "cumulative_w_max"],
        report.step_quantiles.iter().map(|q| {
            vec![
                q.j.to_string(),
                num(q.w_l2.q50),
                num(q.w_l2.q95),
                num(q.w_l2.max),
                num(q.cumulative_w.q50),
                num(q.cumulative_w.q95),
                num(q.cumulative_w.max),
            ]
        }),
    )?;
    if !report.sweeps.is_empty() {
        dir.csv(
            "sweeps.csv",
            &["N", "theta", "compliance", "failures"],
            report
                .sweeps
                .iter()
                .map(|p| vec![p.n.to_string(), num(p.theta), num(p.compliance), p.failures.to_string()]),
        )?;
    }
    if cfg.emit_plots {
        let series = |f: fn(&nlslab_core::lab::StepQuantiles) -> f64| {
            report.step_quantiles.iter().map(|q| (q.j as f64, f(q))).collect()
        };
        let chart = Chart::new("cumulative remainder", "step j", "sum of |w^j|")
            .with(Series::line("median", series(|q| q.cumulative_w.q50)))
            .with(Series::line("95%", series(|q| q.cumulative_w.q95)))
            .with(Series::line("max", series(|q| q.cumulative_w.max)));
        dir.text("cumulative_w.svg", &chart.render())?;
    }
    Ok(Report::ok(json!({
        "compliance": report.compliance,
        "failures": report.failures,
        "max_consistency_error": report.max_consistency_error,
        "step_quantiles": report.step_quantiles,
        "sweeps": report.sweeps,
    })))
}
