//! `ebound`: analyze work loops, design elasticities, verify designs and sweep frequencies.

mod config;
mod out;
mod run;

use anyhow::Result;
use clap::{Parser, Subcommand};
use config::{ConfigError, Format, JobConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ebound", version, about = "Work-loop analysis and elastic-bound design for elastic actuators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Job configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides output.directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Artifact formats; overrides output.formats.
    #[arg(long, global = true, value_delimiter = ',')]
    format: Option<Vec<Format>>,
    /// Reserved for stochastic pipelines; recorded in reports.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Absolute bound tolerance for design/verify, relative argmin tolerance for sweep.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Build the inelastic work loop and report its power metrics.
    Analyze,
    /// Construct an elasticity and check it against the elastic bound.
    Design,
    /// Run the verification suite on a design; exit 1 if any check fails.
    Verify,
    /// Frequency scan of a linear series spring.
    Sweep,
}

const EXIT_ASSERTION: u8 = 1;
const EXIT_INADMISSIBLE: u8 = 2;
const EXIT_CONFIG: u8 = 3;

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return EXIT_CONFIG;
        }
        if let Some(core) = cause.downcast_ref::<elastic_bounds::Error>() {
            return match core {
                elastic_bounds::Error::Inadmissible(_) => EXIT_INADMISSIBLE,
                elastic_bounds::Error::Numerical(_) => EXIT_ASSERTION,
                _ => EXIT_CONFIG,
            };
        }
    }
    EXIT_CONFIG
}

fn execute(cli: &Cli) -> Result<run::Outcome> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| ConfigError("--config is required".into()))?;
    let cfg = JobConfig::load(path)?;
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(ConfigError(format!("--tol must be positive, got {t}")).into());
        }
    }
    let mut formats = cli.format.clone().unwrap_or_else(|| cfg.output.formats.clone());
    formats.sort();
    formats.dedup();
    let dir = cli.out.clone().unwrap_or_else(|| cfg.output.directory.clone());
    let mut art = out::Artifacts::new(&dir, &formats)?;
    let opts = run::RunOptions { seed: cli.seed, tol: cli.tol };
    match cli.command {
        Command::Analyze => run::analyze(&cfg, &opts, &mut art),
        Command::Design => run::design(&cfg, &opts, &mut art),
        Command::Verify => run::verify(&cfg, &opts, &mut art),
        Command::Sweep => run::sweep(&cfg, &opts, &mut art),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(o) if o.passed => {
            println!("PASS {}", o.summary);
            ExitCode::SUCCESS
        }
        Ok(o) => {
            println!("FAIL {}", o.summary);
            ExitCode::from(EXIT_ASSERTION)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
