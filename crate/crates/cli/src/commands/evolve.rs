use nlslab_core::dynamics::{evolve, plane_wave};
use nlslab_core::random::sample_initial_data;
use nlslab_core::spectral::FourierState;
use nlslab_core::Error;
use serde_json::json;

use super::{required, Report};
use crate::config::{ExperimentConfig, Preset, TrajectoryFormat};
use crate::error::Failure;
use crate::output::{num, RunDir};
use crate::plot::{Chart, Series};

pub fn run(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Report, Failure> {
    let evo = required(cfg.evolution, "evolution");
    let t_final = required(cfg.params.time, "time");
    let preset = cfg.params.preset.unwrap_or(Preset::PlaneWave);
    let wave = cfg.params.plane_wave.filter(|_| preset == Preset::PlaneWave);
    let u0 = match wave {
        Some(w) => plane_wave(w.a, w.n, w.modes, evo.sign, 0.0),
        None => sample_initial_data(&required(cfg.data, "data")),
    };
    dir.json("initial_state.json", &u0)?;

    let traj = match evolve(&u0, t_final, &evo) {
        Ok(traj) => traj,
        Err(Error::BlowUp { time, reason, last_state }) => {
            dir.json("last_state.json", &*last_state)?;
            let failure = Failure::Numerical(format!("blow-up at t = {time}: {reason}"));
            return Ok(Report {
                results: json!({ "blow_up": { "time": time, "reason": reason } }),
                failure: Some(failure),
            });
        }
        Err(e) => return Err(e.into()),
    };

    let states = traj.states();
    match cfg.params.format.unwrap_or(TrajectoryFormat::Csv) {
        TrajectoryFormat::Csv => dir.csv(
            "trajectory.csv",
            &["t", "n", "re", "im"],
            states.iter().flat_map(|st| {
                st.modes()
                    .map(move |(n, c)| vec![num(st.time()), n.to_string(), num(c.re), num(c.im)])
            }),
        )?,
        TrajectoryFormat::Json => dir.json("trajectory.json", states)?,
    }
    dir.json("final_state.json", traj.last())?;

    let mass0 = u0.l2_norm();
    let reference = |st: &FourierState| wave.map(|w| plane_wave(w.a, w.n, w.modes, evo.sign, st.time()));
    let rows: Vec<(f64, f64, f64, Option<f64>)> = states
        .iter()
        .map(|st| {
            let drift = if mass0 > 0.0 { (st.l2_norm() - mass0).abs() / mass0 } else { 0.0 };
            let error = reference(st).map(|exact| st.l2_distance(&exact).expect("same cutoff"));
            (st.time(), st.l2_norm(), drift, error)
        })
        .collect();
    let mut header = vec!["t", "l2", "relative_mass_drift"];
    if wave.is_some() {
        header.push("closed_form_error");
    }
    dir.csv(
        "mass.csv",
        &header,
        rows.iter().map(|&(t, l2, drift, error)| {
            let mut row = vec![num(t), num(l2), num(drift)];
            row.extend(error.map(num));
            row
        }),
    )?;
    if cfg.emit_plots {
        let chart = Chart::new("relative mass drift", "t", "drift")
            .with(Series::line("|M(t) - M(0)| / M(0)", rows.iter().map(|r| (r.0, r.2)).collect()));
        dir.text("mass.svg", &chart.render())?;
    }
    let max_error = rows.iter().filter_map(|r| r.3).reduce(f64::max);
    Ok(Report::ok(json!({
        "t_final": traj.t_end(),
        "snapshots": states.len(),
        "initial_mass": mass0,
        "max_relative_mass_drift": rows.iter().map(|r| r.2).fold(0.0, f64::max),
        "max_closed_form_error": max_error,
    })))
}
