//! Command-line driver: reads a TOML run configuration, applies flag
//! overrides, writes a manifest plus per-mode CSV artifacts, and exits
//! nonzero with a diagnostic on any failure.

mod config;
mod modes;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{Mode, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Solver(#[from] eit_dg::Error),
}

/// Forward convergence studies, single forward solves, and conductivity
/// reconstructions from boundary data.
#[derive(Debug, Parser)]
#[command(name = "eit-dg", version, about)]
struct Args {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides [noise] seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Caps rayon workers; 1 runs fully sequentially.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides [output] dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: Args) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config).map_err(|e| {
        CliError::Config(format!("cannot read {}: {e}", args.config.display()))
    })?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        cfg.noise.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output.dir = out.display().to_string();
    }
    if let Some(threads) = args.threads {
        eit_dg::par::configure_threads(threads);
    }

    let dir = PathBuf::from(&cfg.output.dir);
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("manifest.toml"), cfg.manifest()?)?;

    match cfg.mode {
        Mode::Eoc => modes::run_eoc_mode(&cfg, &dir),
        Mode::Forward => modes::run_forward_mode(&cfg, &dir),
        Mode::Reconstruct => modes::run_reconstruct_mode(&cfg, &dir),
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
