use nlslab_core::lab::{strichartz_experiment, StrichartzConfig};
use serde_json::json;

use super::{required, Report};
use crate::config::ExperimentConfig;
use crate::error::Failure;
use crate::output::{num, opt_num, RunDir};
use crate::plot::{Chart, Series};

pub fn run(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Report, Failure> {
    let data = required(cfg.data, "data");
    let mut config = StrichartzConfig::new(data, cfg.params.delta.unwrap_or(0.25), cfg.ensemble_size);
    config.time_samples = cfg.params.time_samples;
    if let Some(c) = cfg.params.exceedance_factor {
        config.exceedance_factor = c;
    }
    let report = strichartz_experiment(&config)?;

    dir.csv(
        "samples.csv",
        &["index", "seed", "l2", "l4", "l4_windowed", "x_norm", "ratio"],
        report.samples.iter().map(|s| {
            vec![
                s.index.to_string(),
                data.member(s.index).seed.to_string(),
                num(s.l2),
                num(s.l4),
                num(s.l4_windowed),
                num(s.x_norm),
                opt_num(s.ratio),
            ]
        }),
    )?;
    if cfg.emit_plots {
        let points = report.samples.iter().map(|s| (s.x_norm, s.l4_windowed)).collect();
        let chart = Chart::new("windowed L4 against X^{0,3/8}", "X^{0,3/8}", "L4").with(Series::points("samples", points));
        dir.text("strichartz.svg", &chart.render())?;
    }
    Ok(Report::ok(json!({
        "delta": config.delta,
        "time_samples": report.time_samples,
        "dt": report.dt,
        "ratio_quantiles": report.ratio_quantiles,
        "max_ratio": report.max_ratio,
        "l4_over_l2_median": report.l4_over_l2_median,
        "exceedance_factor": config.exceedance_factor,
        "exceedance_level": report.exceedance_level,
        "exceedance_fraction": report.exceedance_fraction,
    })))
}
