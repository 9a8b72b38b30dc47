//! Command-line orchestration for the thermoacoustic tomography toolkit.

pub mod commands;
pub mod config;
pub mod error;
pub mod experiments;
pub mod io;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use commands::{CompareArgs, ForwardArgs, PhantomArgs, ReconArgs, ValidateArgs};
pub use error::{CliError, Result};
use error::invalid;
use experiments::Experiment;

#[derive(Parser, Debug)]
#[command(name = "tat", version, about = "Thermoacoustic tomography: phantoms, forward data, reconstructions")]
pub struct Cli {
    /// JSON file whose keys mirror the flags of the command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Exit with code 3 on numerical-quality warnings.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rasterize a ball phantom and save its description.
    Phantom(PhantomArgs),
    /// Simulate spherical means, integrals or pressure traces.
    Forward(ForwardArgs),
    /// Reconstruct an image from projection data.
    Recon(ReconArgs),
    /// Check circular-mean data against the range conditions.
    Validate(ValidateArgs),
    /// Report L², L∞ and boundary-masked errors of an image against a reference.
    Compare(CompareArgs),
    /// Run a canned experiment and write images plus `metrics.json`.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ExperimentArgs {
    /// Experiment to run.
    pub name: Option<Experiment>,
    /// Grid size [default: 64 for counterexample, 128 otherwise].
    #[arg(long)]
    pub m: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Result of a successful command.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Numerical-quality warnings; `--strict` turns them into exit code 3.
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self, strict: bool) -> i32 {
        if strict && !self.warnings.is_empty() {
            3
        } else {
            0
        }
    }
}

/// Parsed global options after applying the config file.
pub struct Globals {
    pub threads: Option<usize>,
    pub strict: bool,
}

fn globals(cli: &Cli, config: &serde_json::Map<String, Value>) -> Result<Globals> {
    let threads = match (cli.threads, config.get("threads")) {
        (Some(n), _) => Some(n),
        (None, Some(v)) => Some(
            v.as_u64()
                .ok_or_else(|| invalid("threads", "must be a positive integer"))? as usize,
        ),
        (None, None) => None,
    };
    let strict = cli.strict
        || match config.get("strict") {
            Some(v) => v.as_bool().ok_or_else(|| invalid("strict", "must be a boolean"))?,
            None => false,
        };
    if threads == Some(0) {
        return Err(invalid("threads", "must be at least 1"));
    }
    Ok(Globals { threads, strict })
}

/// Run a parsed command line; returns the outcome and whether `--strict` is in force.
pub fn run(cli: Cli) -> Result<(Outcome, bool)> {
    let config = match &cli.config {
        Some(path) => config::load(path)?,
        None => serde_json::Map::new(),
    };
    let g = globals(&cli, &config)?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = g.threads {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| invalid("threads", e.to_string()))?
    };
    let outcome = pool.install(|| match &cli.command {
        Command::Phantom(a) => commands::cmd_phantom(config::merge(a, &config)?),
        Command::Forward(a) => commands::cmd_forward(config::merge(a, &config)?),
        Command::Recon(a) => commands::cmd_recon(config::merge(a, &config)?),
        Command::Validate(a) => commands::cmd_validate(config::merge(a, &config)?),
        Command::Compare(a) => commands::cmd_compare(config::merge(a, &config)?),
        Command::Experiment(a) => cmd_experiment(config::merge(a, &config)?),
    })?;
    Ok((outcome, g.strict))
}

pub fn cmd_experiment(a: ExperimentArgs) -> Result<Outcome> {
    let experiment = a.name.ok_or_else(|| invalid("name", "is required"))?;
    let out = a.out.ok_or_else(|| invalid("out", "is required"))?;
    let run = experiments::run(experiment, a.m.unwrap_or(experiment.default_m()))?;
    for (name, img) in &run.images {
        io::write_image(&out.join(name), img)?;
    }
    io::write_json(&out.join("metrics.json"), &run.report)?;
    let mut warnings = Vec::new();
    for c in &run.report.checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {}: {:.6} {} {}", c.name, c.value, c.relation, c.threshold);
        if !c.pass {
            warnings.push(format!("{} failed", c.name));
        }
    }
    Ok(Outcome { warnings })
}
