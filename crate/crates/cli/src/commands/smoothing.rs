use nlslab_core::lab::{smoothing_experiment, SmoothingConfig};
use serde_json::json;

use super::{required, Report};
use crate::config::ExperimentConfig;
use crate::error::Failure;
use crate::output::{num, RunDir};
use crate::plot::{Chart, Series};

pub fn run(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Report, Failure> {
    let mut config = SmoothingConfig::new(
        required(cfg.data, "data"),
        required(cfg.evolution, "evolution"),
        required(cfg.params.time, "time"),
        cfg.ensemble_size,
    );
    config.fit_window = cfg.params.fit_window;
    if let Some(grid) = &cfg.params.s_grid {
        config.s_grid = grid.clone();
    }
    let report = smoothing_experiment(&config)?;

    dir.csv(
        "profile.csv",
        &["n", "linear", "nonlinear"],
        report
            .profile
            .iter()
            .map(|p| vec![p.n.to_string(), num(p.linear), num(p.nonlinear)]),
    )?;
    dir.csv(
        "w_sobolev.csv",
        &["s", "mean"],
        report.w_sobolev.iter().map(|m| vec![num(m.s), num(m.mean)]),
    )?;
    if cfg.emit_plots {
        let series = |f: fn(&nlslab_core::lab::ModeProfile) -> f64| {
            report.profile.iter().map(|p| (p.n as f64, f(p))).collect()
        };
        let chart = Chart::new("ensemble-mean Fourier amplitudes", "n", "mean |coefficient|")
            .log_log()
            .with(Series::line("free evolution", series(|p| p.linear)))
            .with(Series::line("Duhamel part", series(|p| p.nonlinear)));
        dir.text("profile.svg", &chart.render())?;
    }
    Ok(Report::ok(json!({
        "completed": report.completed,
        "blowups": report.blowups,
        "fit_window": report.fit_window,
        "beta_linear": report.beta_linear,
        "beta_nonlinear": report.beta_nonlinear,
        "gap": report.gap,
        "w_sobolev": report.w_sobolev,
    })))
}
