use serde_json::Value;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::Failure;
use crate::output::RunDir;

mod count;
mod evolve;
mod highlow;
mod sample;
mod smoothing;
mod strichartz;
mod ucfail;

/// Results for the summary, and the failure that ends the run if any.
pub struct Report {
    pub results: Value,
    pub failure: Option<Failure>,
}

impl Report {
    fn ok(results: Value) -> Self {
        Self { results, failure: None }
    }
}

pub fn run(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Report, Failure> {
    match cfg.experiment {
        Experiment::Sample => sample::run(cfg, dir),
        Experiment::Evolve => evolve::run(cfg, dir),
        Experiment::Smoothing => smoothing::run(cfg, dir),
        Experiment::Highlow => highlow::run(cfg, dir),
        Experiment::Count => count::run(cfg, dir),
        Experiment::Strichartz => strichartz::run(cfg, dir),
        Experiment::Ucfail => ucfail::run(cfg, dir),
    }
}

fn required<T: Copy>(value: Option<T>, what: &str) -> T {
    value.unwrap_or_else(|| panic!("{what} is filled in by config resolution"))
}
