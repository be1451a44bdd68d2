//! Command-line front end for the `bogolon` library.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Format, RunConfig};
use crate::output::Document;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl From<bogolon::Error> for CliError {
    fn from(e: bogolon::Error) -> Self {
        use bogolon::Error as E;
        match e {
            E::InvalidParameter { .. } | E::MissingRegulator | E::Unsupported(_) | E::OutOfSpan { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bogolon", version, about = "Bogoliubov radiation spectra from a moving impurity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// dn/dk dΩ and dE/dk dΩ on the configured (k, θ) grid.
    Spectrum(RunArgs),
    /// Total radiated energy up to the configured cutoff.
    Energy(RunArgs),
    /// Spectrum, energy or regulator table over one swept parameter.
    Sweep(RunArgs),
    /// Condensate depletion in a finite box.
    Depletion(RunArgs),
    /// Runs the oracle suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Seed of the Monte Carlo oracle.
    #[arg(long, default_value_t = bogolon::validation::ValidationOptions::default().seed)]
    pub seed: u64,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = bogolon::validation::ValidationOptions::default().monte_carlo_samples)]
    pub samples: usize,
    /// Relative perturbation of K₁ inside the Bessel check (sensitivity test).
    #[arg(long, hide = true, default_value_t = 0.0)]
    pub perturb_k1: f64,
}

/// Runs one invocation and writes its document.
pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {n} worker threads: {e}")))?;
    }
    let (doc, format, path, failure) = match &cli.command {
        Command::Validate(args) => {
            let (doc, failed) = commands::validate(args)?;
            let format = cli.format.unwrap_or_default();
            let failure = (!failed.is_empty()).then(|| CliError::Validation(failed.join(", ")));
            (doc, format, cli.out.clone(), failure)
        }
        Command::Spectrum(args) | Command::Energy(args) | Command::Sweep(args) | Command::Depletion(args) => {
            let mut config = RunConfig::load(&args.config)?;
            if let Some(format) = cli.format {
                config.output.format = format;
            }
            if let Some(out) = &cli.out {
                config.output.path = Some(out.clone());
            }
            let resolved = config.resolve()?;
            if resolved.condensate.diluteness_violated() {
                eprintln!(
                    "warning: n a_s³ = {:.3e} is not small; the dilute-gas description is doubtful",
                    resolved.condensate.diluteness()
                );
            }
            let doc = match &cli.command {
                Command::Spectrum(_) => commands::spectrum(&config, &resolved)?,
                Command::Energy(_) => commands::energy(&config, &resolved)?,
                Command::Sweep(_) => commands::sweep(&config, &resolved)?,
                _ => commands::depletion(&config, &resolved)?,
            };
            (doc, config.output.format, config.output.path.clone(), None)
        }
    };
    emit(&doc, format, path.as_deref())?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn emit(doc: &Document, format: Format, path: Option<&std::path::Path>) -> Result<(), CliError> {
    let text = doc.render(format)?;
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Config(format!("cannot write to standard output: {e}")))
        }
    }
}
