use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

mod args;
mod commands;
mod config;
mod error;
mod output;
mod plot;

use args::{Cli, Invocation};
use config::ExperimentConfig;
use error::Failure;
use output::RunDir;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command.into_invocation()) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("nlslab: {failure}");
            failure.exit_code()
        }
    }
}

fn default_run_dir(cfg: &ExperimentConfig) -> PathBuf {
    let name = match &cfg.data {
        Some(data) => format!("{}-seed{}", cfg.experiment.name(), data.seed),
        None => cfg.experiment.name().to_string(),
    };
    output::default_root().join(name)
}

fn run(inv: Invocation) -> Result<PathBuf, Failure> {
    let text = match &inv.config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let cfg = ExperimentConfig::resolve(inv.experiment, text.as_deref(), &inv.overrides)?;
    if let Some(threads) = inv.threads {
        if threads == 0 {
            return Err(Failure::config("--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::config(format!("cannot size the worker pool: {e}")))?;
    }
    let root = cfg.output.clone().unwrap_or_else(|| default_run_dir(&cfg));
    let mut dir = RunDir::create(&root)?;

    let report = commands::run(&cfg, &mut dir)?;
    let echo = ExperimentConfig {
        output: None,
        ..cfg.clone()
    };
    let files = dir.files().to_vec();
    let summary = json!({
        "experiment": cfg.experiment.name(),
        "nlslab_version": env!("CARGO_PKG_VERSION"),
        "config": echo,
        "seeds": {
            "base": cfg.data.map(|d| d.seed),
            "members": cfg.member_seeds(),
        },
        "files": files,
        "failure": report.failure.as_ref().map(|f| f.to_string()),
        "results": report.results,
    });
    dir.json("summary.json", &summary)?;
    match report.failure {
        Some(failure) => Err(failure),
        None => Ok(dir.path().to_path_buf()),
    }
}

#[cfg(test)]
mod tests {
    use std::fs;
    use std::path::Path;

    use nlslab_core::dynamics::{plane_wave, Sign};
    use nlslab_core::spectral::FourierState;
    use nlslab_core::Complex64;

    use super::*;

    fn invoke(args: &[&str]) -> Result<PathBuf, Failure> {
        let cli = Cli::try_parse_from(std::iter::once("nlslab").chain(args.iter().copied())).unwrap();
        run(cli.command.into_invocation())
    }

    fn arg(path: &Path) -> &str {
        path.to_str().unwrap()
    }

    #[test]
    fn count_writes_csv_and_summary() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("c1");
        invoke(&["count", "--nmax", "16", "--out", arg(&out)]).unwrap();
        let csv = fs::read_to_string(out.join("counting.csv")).unwrap();
        assert!(csv.starts_with("N1,N3,mu_argmax,count_max,ratio\n"));
        let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["experiment"], "count");
        assert_eq!(summary["config"]["params"]["nmax"], 16);
        assert!(summary["results"]["max_exponent"].is_number());
    }

    #[test]
    fn evolve_plane_wave_matches_closed_form() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("e1");
        invoke(&["evolve", "--out", arg(&out)]).unwrap();
        let last: FourierState = serde_json::from_str(&fs::read_to_string(out.join("final_state.json")).unwrap()).unwrap();
        let exact = plane_wave(Complex64::new(1.0, 0.0), 2, 4, Sign::Defocusing, 1.0);
        assert!((last.time() - 1.0).abs() < 1e-12);
        assert!(last.l2_distance(&exact).unwrap() < 1e-8);
        let rows = fs::read_to_string(out.join("trajectory.csv")).unwrap();
        assert!(rows.starts_with("t,n,re,im\n"));
        assert_eq!(rows.lines().count(), 1 + 11 * 9);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = tmp.path().join("cfg.json");
        fs::write(&cfg, r#"{"data": {"modes": 32}, "evolution": {"dt": 1e-3}, "params": {"time": 0.02}, "ensemble_size": 3}"#).unwrap();
        let run_once = |name: &str| {
            let out = tmp.path().join(name);
            invoke(&["smoothing", "--config", arg(&cfg), "--seed", "7", "--out", arg(&out)]).unwrap();
            ["profile.csv", "w_sobolev.csv", "summary.json"].map(|f| fs::read(out.join(f)).unwrap())
        };
        assert_eq!(run_once("a"), run_once("b"));
    }

    #[test]
    fn exit_codes() {
        let unknown = Cli::try_parse_from(["nlslab", "bogus"]).unwrap_err();
        assert!(unknown.use_stderr());
        let help = Cli::try_parse_from(["nlslab", "--help"]).unwrap_err();
        assert!(!help.use_stderr());

        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("u");
        invoke(&["ucfail", "--out", arg(&out)]).unwrap();
        let again = invoke(&["ucfail", "--out", arg(&out)]).unwrap_err();
        assert_eq!(again.exit_code(), ExitCode::from(2));
        let bad = invoke(&["strichartz", "--ensemble", "3", "--out", arg(&tmp.path().join("s"))]).unwrap_err();
        assert_eq!(bad.exit_code(), ExitCode::from(2));
    }

    #[test]
    fn blow_up_exits_with_numerical_failure() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = tmp.path().join("cfg.json");
        fs::write(&cfg, r#"{"params": {"preset": "random", "time": 1.0}, "data": {"alpha": 0.1, "modes": 32, "seed": 1}}"#).unwrap();
        let out = tmp.path().join("b");
        let failure = invoke(&["evolve", "--config", arg(&cfg), "--dt", "0.2", "--out", arg(&out)]).unwrap_err();
        assert_eq!(failure.exit_code(), ExitCode::from(3));
        let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
        assert!(summary["failure"].is_string());
        assert!(out.join("last_state.json").exists());
    }
}
