use nlslab_core::dynamics::Sign;
use nlslab_core::lab::uniform_continuity_experiment;
use serde_json::json;

use super::{required, Report};
use crate::config::ExperimentConfig;
use crate::error::Failure;
use crate::output::{num, opt_num, RunDir};
use crate::plot::{Chart, Series};

pub fn run(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Report, Failure> {
    let p = &cfg.params;
    let sweep = p.n_sweep.clone().unwrap_or_default();
    let report = uniform_continuity_experiment(
        required(p.a, "a"),
        required(p.a_prime, "a_prime"),
        &sweep,
        p.s.unwrap_or(-0.1),
        p.time.unwrap_or(1.0),
        p.sign.unwrap_or(Sign::Defocusing),
    )?;

    dir.csv(
        "ucfail.csv",
        &["N", "data_distance", "solution_distance", "ratio"],
        report.rows.iter().map(|r| {
            vec![r.n.to_string(), num(r.data_distance), num(r.solution_distance), opt_num(r.ratio)]
        }),
    )?;
    if cfg.emit_plots {
        let series = |f: fn(&nlslab_core::lab::ContinuityRow) -> f64| {
            report.rows.iter().map(|r| (r.n as f64, f(r))).collect()
        };
        let chart = Chart::new("H^s distances of plane-wave solutions", "N", "distance")
            .log_log()
            .with(Series::line("data", series(|r| r.data_distance)))
            .with(Series::line("solution", series(|r| r.solution_distance)));
        dir.text("ucfail.svg", &chart.render())?;
    }
    Ok(Report::ok(json!({
        "a": report.a,
        "a_prime": report.a_prime,
        "s": report.s,
        "t": report.t,
        "sign": report.sign,
        "max_ratio": report.max_ratio,
        "ratio_bound": report.ratio_bound,
    })))
}
