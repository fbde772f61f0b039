//! Config-driven front end: detuning roots, confidence and entanglement
//! sweeps, and Monte Carlo syndrome sampling, written as CSV or JSON.

pub mod commands;
pub mod config;
mod error;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

pub use commands::{execute, Overrides};
pub use config::{Config, Format};
pub use error::CliError;
pub use report::{Cell, Report};

#[derive(Debug, clap::Parser)]
#[command(
    name = "spinphoton",
    version,
    about = "Run a spinphoton sweep or simulation from a JSON config"
)]
pub struct Args {
    /// JSON run configuration.
    pub config: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for sampling commands.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Runs `args` end to end and returns the rendered output and its destination.
pub fn render(args: &Args) -> Result<(Vec<u8>, Option<PathBuf>), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|source| CliError::ReadConfig {
        path: args.config.clone(),
        source,
    })?;
    let config = Config::parse(&text, &args.config.display().to_string())?;
    let report = execute(&config, &Overrides { seed: args.seed })?;
    let fields = config.output();
    let format = args
        .format
        .or(fields.format)
        .unwrap_or_else(|| config.default_format());
    let out = args.out.clone().or(fields.out);
    Ok((report.render(format)?, out))
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let (bytes, out) = render(args)?;
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}
