use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;
use vpoqmc_cli::{execute, CliError, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "vpoqmc", version, about = "Smoothed QMC option-pricing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML experiment file; every field has a default.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// CSV destination (stdout when absent). Metadata goes to `<out>.meta.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Leave time columns empty so output is byte-reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Estimates and replicate variances for every payoff and method.
    Price,
    /// Variance reduction factors relative to MC.
    Vrf,
    /// Effective-dimension characteristics of the smoothed integrands.
    Effdim,
    /// Variance against sample size, for convergence plots.
    Sweep,
}

fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::from_toml("")?,
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if cli.no_timing {
        cfg.timing = false;
    }
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let cmd = match cli.command {
        Cmd::Price => Command::Price,
        Cmd::Vrf => Command::Vrf,
        Cmd::Effdim => Command::Effdim,
        Cmd::Sweep => Command::Sweep,
    };
    let outcome = execute(cmd, &cfg)?;
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &outcome.csv)?;
            let meta = serde_json::to_string_pretty(&outcome.meta).map_err(|e| CliError::Io(e.to_string()))?;
            std::fs::write(meta_path(path), meta + "\n")?;
            info!("wrote {}", path.display());
        }
        None => std::io::stdout().write_all(&outcome.csv)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vpoqmc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
