use nlslab_core::resonance::counting_bound_report;
use serde_json::json;

use super::{required, Report};
use crate::config::ExperimentConfig;
use crate::error::Failure;
use crate::output::{num, RunDir};
use crate::plot::{Chart, Series};

pub fn run(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Report, Failure> {
    let nmax = required(cfg.params.nmax, "nmax");
    let epsilon = cfg.params.epsilon.unwrap_or(0.3);
    let report = counting_bound_report(nmax, epsilon)?;

    dir.csv(
        "counting.csv",
        &["N1", "N3", "mu_argmax", "count_max", "ratio"],
        report.rows.iter().map(|r| {
            vec![r.n1.to_string(), r.n3.to_string(), r.mu_argmax.to_string(), r.count_max.to_string(), num(r.ratio)]
        }),
    )?;
    dir.csv(
        "fits.csv",
        &["N3", "exponent", "r_squared"],
        report.fits.iter().map(|f| vec![f.n3.to_string(), num(f.exponent), num(f.r_squared)]),
    )?;
    if cfg.emit_plots {
        let mut chart = Chart::new("max_mu #S_mu / N3", "N1", "ratio").log_log();
        for fit in &report.fits {
            let points = report
                .rows
                .iter()
                .filter(|r| r.n3 == fit.n3)
                .map(|r| (r.n1 as f64, r.ratio))
                .collect();
            chart = chart.with(Series::line(format!("N3 = {}", fit.n3), points));
        }
        dir.text("counting.svg", &chart.render())?;
    }
    Ok(Report::ok(json!({
        "nmax": report.nmax,
        "epsilon": report.epsilon,
        "fits": report.fits,
        "max_exponent": report.max_exponent,
        "within_epsilon": report.within_epsilon,
    })))
}
