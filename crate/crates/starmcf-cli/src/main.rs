//! Command-line front end: scenario configuration, pipeline execution,
//! dataset export, and validation reports.
//!
//! Exit codes: 0 on success, 1 on validation failure, 2 on usage or
//! configuration errors, 3 on numerical divergence.

mod commands;
mod config;
mod io;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, configuration, or unreadable/malformed input files.
    Usage(String),
    /// Data was readable but a check failed.
    Validation(String),
    /// The numerics blew up.
    Divergence(String),
}

impl CliError {
    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Usage(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Divergence(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Divergence(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "starmcf",
    version,
    about = "Hodge-star mean curvature flow on S3/H3 via the Gross-Pitaevskii correspondence"
)]
struct Cli {
    /// Run all internal loops on one thread (transport rows are otherwise
    /// parallelized via RAYON_NUM_THREADS).
    #[arg(long, global = true)]
    serial: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a potential dataset (vacuum | soliton | plane-wave | backlund).
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct a flow solution on S3 or H3 from a potential.
    Curve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evolve an initial curve under the flow.
    Cauchy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Backlund-dress a potential and, optionally, the reconstructed curve.
    Backlund {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-run all applicable checks on stored datasets.
    Validate {
        /// Dataset directories containing manifest.json.
        paths: Vec<PathBuf>,
    },
}

fn load_config(path: &PathBuf) -> Result<config::RootConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn print_checks(label: &str, checks: &[io::Check]) {
    for c in checks {
        if c.tolerance.is_finite() {
            eprintln!(
                "{label}: {:40} {:>13.6e}  (tol {:.1e})  {}",
                c.name,
                c.value,
                c.tolerance,
                if c.pass { "pass" } else { "FAIL" }
            );
        } else {
            eprintln!("{label}: {:40} {:>13.6e}", c.name, c.value);
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.serial {
        // single worker keeps evaluation order fixed
        let _ = rayon_force_serial();
    }
    match &cli.command {
        Command::Generate { config, out } => {
            let cfg = load_config(config)?
                .generate
                .ok_or_else(|| CliError::Usage("config has no [generate] section".into()))?;
            let manifest = commands::cmd_generate(&cfg, out)?;
            print_checks("generate", &manifest.checks);
            if !manifest.overall_pass {
                return Err(CliError::Validation("a write-time check failed".into()));
            }
            Ok(())
        }
        Command::Curve { config, out } => {
            let cfg = load_config(config)?
                .curve
                .ok_or_else(|| CliError::Usage("config has no [curve] section".into()))?;
            let manifest = commands::cmd_curve(&cfg, out)?;
            print_checks("curve", &manifest.checks);
            if !manifest.overall_pass {
                return Err(CliError::Validation("a curve check failed".into()));
            }
            Ok(())
        }
        Command::Cauchy { config, out } => {
            let cfg = load_config(config)?
                .cauchy
                .ok_or_else(|| CliError::Usage("config has no [cauchy] section".into()))?;
            let manifest = commands::cmd_cauchy(&cfg, out)?;
            print_checks("cauchy", &manifest.checks);
            if !manifest.overall_pass {
                return Err(CliError::Validation("a pipeline check failed".into()));
            }
            Ok(())
        }
        Command::Backlund { config, out } => {
            let cfg = load_config(config)?
                .backlund
                .ok_or_else(|| CliError::Usage("config has no [backlund] section".into()))?;
            let manifest = commands::cmd_backlund(&cfg, out)?;
            print_checks("backlund", &manifest.checks);
            if !manifest.overall_pass {
                return Err(CliError::Validation("a dressing check failed".into()));
            }
            Ok(())
        }
        Command::Validate { paths } => {
            if paths.is_empty() {
                return Err(CliError::Usage("validate needs at least one dataset directory".into()));
            }
            let results = commands::cmd_validate(paths)?;
            let mut all = true;
            for (dir, checks, pass) in &results {
                print_checks(&dir.display().to_string(), checks);
                all &= pass;
            }
            if !all {
                return Err(CliError::Validation("stored data failed revalidation".into()));
            }
            Ok(())
        }
    }
}

fn rayon_force_serial() -> Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new().num_threads(1).build_global()
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(()) => {
            eprintln!("done in {:.2?}", start.elapsed());
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
