use std::path::PathBuf;

use nlslab_core::dynamics::{EvolutionConfig, Sign};
use nlslab_core::highlow::{HighLowConfig, Horizon};
use nlslab_core::random::RandomDataSpec;
use nlslab_core::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::Overrides;
use crate::error::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Sample,
    Evolve,
    Smoothing,
    Highlow,
    Count,
    Strichartz,
    Ucfail,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Sample => "sample",
            Experiment::Evolve => "evolve",
            Experiment::Smoothing => "smoothing",
            Experiment::Highlow => "highlow",
            Experiment::Count => "count",
            Experiment::Strichartz => "strichartz",
            Experiment::Ucfail => "ucfail",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `a e^{iNx}` with its closed-form solution as reference.
    PlaneWave,
    /// A random datum drawn from `data`.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryFormat {
    /// Long form `t,n,re,im`.
    Csv,
    /// Array of state snapshots.
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneWaveParams {
    pub a: Complex64,
    #[serde(rename = "N")]
    pub n: i64,
    pub modes: usize,
}

/// Experiment-specific parameters; each subcommand reads the fields it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Number of ensemble members whose coefficients are written out.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keep_coefficients: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exceedance_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmax: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_prime: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sweep: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<Sign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_n: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_theta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane_wave: Option<PlaneWaveParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<TrajectoryFormat>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<RandomDataSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolution: Option<EvolutionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub highlow: Option<HighLowConfig>,
    pub ensemble_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub emit_plots: bool,
    #[serde(default)]
    pub params: Params,
}

fn spec(alpha: f64, modes: usize) -> RandomDataSpec {
    RandomDataSpec::new(alpha, modes, 0).expect("default spec is valid")
}

impl ExperimentConfig {
    /// Configuration of the headline run of each experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut cfg = Self {
            experiment,
            data: None,
            evolution: None,
            highlow: None,
            ensemble_size: 1,
            output: None,
            emit_plots: false,
            params: Params::default(),
        };
        let p = &mut cfg.params;
        match experiment {
            Experiment::Sample => {
                cfg.data = Some(spec(0.5, 64));
                cfg.ensemble_size = 5000;
                p.s = Some(-0.05);
                p.keep_coefficients = Some(10);
            }
            Experiment::Evolve => {
                cfg.evolution = Some(EvolutionConfig::wick(1e-3).with_record_every(100));
                p.time = Some(1.0);
                p.preset = Some(Preset::PlaneWave);
                p.plane_wave = Some(PlaneWaveParams {
                    a: Complex64::new(1.0, 0.0),
                    n: 2,
                    modes: 4,
                });
                p.format = Some(TrajectoryFormat::Csv);
            }
            Experiment::Smoothing => {
                cfg.data = Some(spec(0.45, 256));
                cfg.evolution = Some(EvolutionConfig::wick(5e-5));
                cfg.ensemble_size = 100;
                p.time = Some(0.1);
                p.s_grid = Some(vec![0.0, 0.25, 0.5]);
            }
            Experiment::Highlow => {
                cfg.data = Some(spec(0.47, 256));
                cfg.highlow = Some(HighLowConfig::new(
                    32,
                    -0.04,
                    Horizon::DeltaMultiple(5.0),
                    EvolutionConfig::wick(1e-4),
                ));
                cfg.ensemble_size = 50;
            }
            Experiment::Count => {
                p.nmax = Some(256);
                p.epsilon = Some(0.3);
            }
            Experiment::Strichartz => {
                cfg.data = Some(spec(0.5, 64));
                cfg.ensemble_size = 200;
                p.delta = Some(0.25);
                p.exceedance_factor = Some(3.0);
            }
            Experiment::Ucfail => {
                p.a = Some(Complex64::new(1.0, 0.0));
                p.a_prime = Some(Complex64::new(1.1, 0.0));
                p.s = Some(-0.1);
                p.time = Some(1.0);
                p.n_sweep = Some((3..=12).map(|k| 1u64 << k).collect());
                p.sign = Some(Sign::Defocusing);
            }
        }
        cfg
    }

    /// Defaults, then the JSON document (merged key by key), then flags.
    pub fn resolve(experiment: Experiment, file: Option<&str>, overrides: &Overrides) -> Result<Self, Failure> {
        let mut value = serde_json::to_value(Self::defaults(experiment)).expect("defaults serialize");
        if let Some(text) = file {
            let doc: Value = serde_json::from_str(text).map_err(|e| Failure::config(format!("config is not valid JSON: {e}")))?;
            if let Some(name) = doc.get("experiment") {
                if name != experiment.name() {
                    return Err(Failure::config(format!(
                        "config is for experiment {name}, not {}",
                        experiment.name()
                    )));
                }
            }
            merge(&mut value, doc);
        }
        let mut cfg: Self = serde_json::from_value(value).map_err(|e| Failure::config(format!("invalid config: {e}")))?;
        if cfg.experiment == Experiment::Evolve && cfg.params.preset == Some(Preset::Random) && cfg.data.is_none() {
            cfg.data = Some(spec(0.5, 64));
        }
        cfg.apply(overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, o: &Overrides) -> Result<(), Failure> {
        let name = self.experiment.name();
        let unused = |flag: &str| Failure::config(format!("{flag} does not apply to {name}"));
        if let Some(preset) = o.preset {
            if self.experiment != Experiment::Evolve {
                return Err(unused("--preset"));
            }
            self.params.preset = Some(preset);
            if preset == Preset::Random && self.data.is_none() {
                self.data = Some(spec(0.5, 64));
            }
        }
        let evolve_random = self.params.preset == Some(Preset::Random);
        let has_data = self.data.is_some() && (self.experiment != Experiment::Evolve || evolve_random);

        if let Some(seed) = o.seed {
            let data = self.data.as_mut().filter(|_| has_data).ok_or_else(|| unused("--seed"))?;
            data.seed = seed;
        }
        if let Some(alpha) = o.alpha {
            let data = self.data.as_mut().filter(|_| has_data).ok_or_else(|| unused("--alpha"))?;
            data.alpha = alpha;
        }
        if let Some(modes) = o.modes {
            match (self.data.as_mut().filter(|_| has_data), self.params.plane_wave.as_mut()) {
                (Some(data), _) => data.cutoff = modes,
                (None, Some(wave)) => wave.modes = modes,
                (None, None) => return Err(unused("--modes")),
            }
        }
        if let Some(n) = o.cutoff_n {
            self.highlow.as_mut().ok_or_else(|| unused("--cutoff-n"))?.n = n;
        }
        if let Some(t) = o.horizon {
            match (self.highlow.as_mut(), self.params.time.as_mut()) {
                (Some(hl), _) => hl.horizon = Horizon::Time(t),
                (None, Some(time)) => *time = t,
                (None, None) => return Err(unused("--horizon")),
            }
        }
        if let Some(dt) = o.dt {
            match (self.highlow.as_mut(), self.evolution.as_mut()) {
                (Some(hl), _) => hl.evolution.dt = dt,
                (None, Some(evo)) => evo.dt = dt,
                (None, None) => return Err(unused("--dt")),
            }
        }
        if let Some(ensemble) = o.ensemble {
            if matches!(self.experiment, Experiment::Evolve | Experiment::Count | Experiment::Ucfail) {
                return Err(unused("--ensemble"));
            }
            self.ensemble_size = ensemble;
        }
        if let Some(nmax) = o.nmax {
            if self.experiment != Experiment::Count {
                return Err(unused("--nmax"));
            }
            self.params.nmax = Some(nmax);
        }
        if let Some(format) = o.format {
            if self.experiment != Experiment::Evolve {
                return Err(unused("--format"));
            }
            self.params.format = Some(format);
        }
        if o.emit_plots {
            self.emit_plots = true;
        }
        if let Some(out) = &o.out {
            self.output = Some(out.clone());
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), Failure> {
        if self.ensemble_size < 1 {
            return Err(Failure::config("ensemble_size must be >= 1"));
        }
        if let Some(data) = &self.data {
            data.validate().map_err(Failure::from_core)?;
        }
        if let Some(evo) = &self.evolution {
            evo.validate().map_err(Failure::from_core)?;
        }
        if let Some(hl) = &self.highlow {
            hl.validate().map_err(Failure::from_core)?;
            if let Some(data) = &self.data {
                if hl.n > data.cutoff {
                    return Err(Failure::config(format!(
                        "splitting frequency {} exceeds the mode cutoff {}",
                        hl.n, data.cutoff
                    )));
                }
            }
        }
        let missing = |field: &str| Failure::config(format!("params.{field} is required for {}", self.experiment.name()));
        let p = &self.params;
        match self.experiment {
            Experiment::Sample => {
                p.s.ok_or_else(|| missing("s"))?;
            }
            Experiment::Evolve => {
                p.time.ok_or_else(|| missing("time"))?;
                if p.preset == Some(Preset::PlaneWave) {
                    let wave = p.plane_wave.ok_or_else(|| missing("plane_wave"))?;
                    if wave.n.unsigned_abs() as usize > wave.modes {
                        return Err(Failure::config("plane_wave.N exceeds plane_wave.modes"));
                    }
                }
            }
            Experiment::Smoothing => {
                p.time.ok_or_else(|| missing("time"))?;
            }
            Experiment::Highlow | Experiment::Strichartz => {}
            Experiment::Count => {
                p.nmax.ok_or_else(|| missing("nmax"))?;
            }
            Experiment::Ucfail => {
                for (field, value) in [("a", p.a), ("a_prime", p.a_prime)] {
                    value.ok_or_else(|| missing(field))?;
                }
                p.n_sweep.as_ref().ok_or_else(|| missing("n_sweep"))?;
            }
        }
        Ok(())
    }

    /// Member seeds in ensemble order.
    pub fn member_seeds(&self) -> Vec<u64> {
        match &self.data {
            Some(data) if self.experiment != Experiment::Evolve => {
                (0..self.ensemble_size as u64).map(|i| data.member(i).seed).collect()
            }
            Some(data) if self.params.preset == Some(Preset::Random) => vec![data.seed],
            _ => Vec::new(),
        }
    }
}

/// Recursive object merge; anything else in `patch` replaces `base`.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(base), Value::Object(patch)) => {
            for (key, value) in patch {
                match base.get_mut(&key) {
                    Some(slot) if !value.is_null() => merge(slot, value),
                    _ => {
                        base.insert(key, value);
                    }
                }
            }
        }
        (base, patch) => *base = patch,
    }
}
