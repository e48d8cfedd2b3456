use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Experiment, Preset, TrajectoryFormat};

/// Seeded, replayable numerical experiments for the Wick-ordered cubic NLS
/// on the circle.
#[derive(Debug, Parser)]
#[command(name = "nlslab", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw random initial data and fit the tail of their H^s norms.
    Sample(Common),
    /// Evolve a single datum and write its trajectory.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Trajectory file layout.
        #[arg(long, value_enum)]
        format: Option<TrajectoryFormat>,
        /// Initial datum.
        #[arg(long, value_enum)]
        preset: Option<Preset>,
    },
    /// Spectral decay of the Duhamel part versus the free evolution.
    Smoothing(Common),
    /// High-low decomposition over a random ensemble.
    Highlow(Common),
    /// Resonance-set counting bound.
    Count {
        #[command(flatten)]
        common: Common,
        /// Largest dyadic block N1.
        #[arg(long)]
        nmax: Option<u64>,
    },
    /// L4 space-time norm against X^{0,3/8} for random free evolutions.
    Strichartz(Common),
    /// Closed-form plane-wave distances below L2.
    Ucfail(Common),
}

#[derive(Debug, Default, Args)]
pub struct Common {
    /// JSON configuration; missing fields take the experiment defaults.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Run directory (must not exist or be empty).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for ensemble members.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub emit_plots: bool,
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Mode cutoff M.
    #[arg(long)]
    pub modes: Option<usize>,
    /// Splitting frequency N of the high-low scheme.
    #[arg(long = "cutoff-n")]
    pub cutoff_n: Option<usize>,
    /// Final time.
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Ensemble size.
    #[arg(long)]
    pub ensemble: Option<usize>,
}

/// Flag values that override the configuration document.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub emit_plots: bool,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub modes: Option<usize>,
    pub cutoff_n: Option<usize>,
    pub horizon: Option<f64>,
    pub dt: Option<f64>,
    pub ensemble: Option<usize>,
    pub nmax: Option<u64>,
    pub format: Option<TrajectoryFormat>,
    pub preset: Option<Preset>,
}

pub struct Invocation {
    pub experiment: Experiment,
    pub config: Option<PathBuf>,
    pub threads: Option<usize>,
    pub overrides: Overrides,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            emit_plots: self.emit_plots,
            seed: self.seed,
            alpha: self.alpha,
            modes: self.modes,
            cutoff_n: self.cutoff_n,
            horizon: self.horizon,
            dt: self.dt,
            ensemble: self.ensemble,
            ..Overrides::default()
        }
    }
}

impl Command {
    pub fn into_invocation(self) -> Invocation {
        let (experiment, common, format, preset, nmax) = match self {
            Command::Sample(c) => (Experiment::Sample, c, None, None, None),
            Command::Evolve { common, format, preset } => (Experiment::Evolve, common, format, preset, None),
            Command::Smoothing(c) => (Experiment::Smoothing, c, None, None, None),
            Command::Highlow(c) => (Experiment::Highlow, c, None, None, None),
            Command::Count { common, nmax } => (Experiment::Count, common, None, None, nmax),
            Command::Strichartz(c) => (Experiment::Strichartz, c, None, None, None),
            Command::Ucfail(c) => (Experiment::Ucfail, c, None, None, None),
        };
        let overrides = Overrides {
            format,
            preset,
            nmax,
            ..common.overrides()
        };
        Invocation {
            experiment,
            config: common.config,
            threads: common.threads,
            overrides,
        }
    }
}
