//! Command-line front end: `evaluate`, `curve`, `sweep` and `validate`
//! for a barrier described by a JSON job file.

pub mod config;
pub mod curve;
pub mod error;
pub mod evaluate;
pub mod sweep;
pub mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use config::JobConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "safebarrier", version, about = "PFD/PFH and SIL verification for MooN safety barriers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON job file.
    #[arg(long)]
    pub config: PathBuf,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Emit a JSON report instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and approximate PFD/PFH with SIL verdicts.
    Evaluate(Common),
    /// PFD(t) traces as CSV.
    Curve {
        #[command(flatten)]
        common: Common,
        /// Samples per interval between tests.
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// One-parameter sweep from the config's `sweep` block.
    Sweep(Common),
    /// Compare analytic values with the Monte Carlo oracle.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, hide = true, default_value_t = 1.0)]
        scale_expected: f64,
    },
}

fn sink(output: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit<T: Serialize + std::fmt::Display>(report: &T, common: &Common) -> Result<(), CliError> {
    let mut out = sink(common.output.as_deref())?;
    if common.json {
        let text = serde_json::to_string_pretty(report).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(out, "{text}")?;
    } else {
        write!(out, "{report}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Evaluate(common) => {
            let job = JobConfig::load(&common.config)?;
            emit(&evaluate::evaluate(&job)?, common)
        }
        Command::Curve { common, samples } => {
            let job = JobConfig::load(&common.config)?;
            let mut out = sink(common.output.as_deref())?;
            curve::write_curve(&job, *samples, &mut out)?;
            out.flush()?;
            Ok(())
        }
        Command::Sweep(common) => {
            let job = JobConfig::load(&common.config)?;
            emit(&sweep::sweep(&job)?, common)
        }
        Command::Validate { common, scale_expected } => {
            let job = JobConfig::load(&common.config)?;
            let report = validate::validate(&job, *scale_expected)?;
            emit(&report, common)?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(CliError::ValidationFailed(report.failed))
            }
        }
    }
}
