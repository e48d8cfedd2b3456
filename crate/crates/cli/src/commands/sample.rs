use nlslab_core::random::{gaussian_tail_fit, sample_initial_data, Quantiles};
use nlslab_core::spectral::sobolev_norm;
use rayon::prelude::*;
use serde_json::json;

use super::{required, Report};
use crate::config::ExperimentConfig;
use crate::error::Failure;
use crate::output::{num, RunDir};
use crate::plot::{Chart, Series};

pub fn run(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Report, Failure> {
    let data = required(cfg.data, "data");
    let s = required(cfg.params.s, "s");
    let keep = cfg.params.keep_coefficients.unwrap_or(0).min(cfg.ensemble_size);
    let members: Vec<(u64, f64, f64)> = (0..cfg.ensemble_size as u64)
        .into_par_iter()
        .map(|i| {
            let u0 = sample_initial_data(&data.member(i));
            (i, u0.l2_norm(), sobolev_norm(&u0, s))
        })
        .collect();

    let mut rows = Vec::new();
    for i in 0..keep as u64 {
        let member = data.member(i);
        for (n, c) in sample_initial_data(&member).modes() {
            rows.push(vec![i.to_string(), member.seed.to_string(), n.to_string(), num(c.re), num(c.im)]);
        }
    }
    dir.csv("coefficients.csv", &["member", "seed", "n", "re", "im"], rows)?;
    dir.csv(
        "norms.csv",
        &["member", "seed", "l2", "hs"],
        members
            .iter()
            .map(|&(i, l2, hs)| vec![i.to_string(), data.member(i).seed.to_string(), num(l2), num(hs)]),
    )?;

    let norms: Vec<f64> = members.iter().map(|m| m.2).collect();
    let fit = gaussian_tail_fit(&norms);
    dir.csv(
        "tail.csv",
        &["threshold", "threshold_sq", "probability", "exceedances"],
        fit.sweep.iter().map(|p| {
            vec![num(p.threshold), num(p.threshold * p.threshold), num(p.probability), p.exceedances.to_string()]
        }),
    )?;
    if cfg.emit_plots {
        let points = fit
            .sweep
            .iter()
            .map(|p| (p.threshold * p.threshold, p.probability))
            .collect();
        let chart = Chart::new("tail of the H^s norm", "K^2", "P(norm >= K)")
            .log_y()
            .with(Series::points("empirical", points));
        dir.text("tail.svg", &chart.render())?;
    }
    let mean_sq = norms.iter().map(|x| x * x).sum::<f64>() / norms.len() as f64;
    Ok(Report::ok(json!({
        "s": s,
        "mean_hs_squared": mean_sq,
        "expected_hs_squared": data.expected_sobolev_sq(s),
        "hs_quantiles": Quantiles::of(&norms),
        "tail_exponent": fit.exponent,
        "tail_r_squared": fit.r_squared,
        "tail_lower_bound_only": fit.lower_bound_only,
    })))
}
