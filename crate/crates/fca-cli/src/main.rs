use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

mod commands;
mod config;
mod format;

use config::Options;

#[derive(Debug, Parser)]
#[command(name = "fca", version, about = "Interacting fermionic cellular automaton toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Isotropic interaction classification, as JSON.
    Classify {
        /// Also admit degree-2 monomials, which belong to the free step.
        #[arg(long)]
        quadratic: bool,
    },
    /// Walk eigenphases over a momentum grid, as CSV.
    Dispersion,
    /// Two-particle spectrum and closed-form matches, as JSON.
    Spectrum,
    /// Relative-coordinate probabilities over time, as CSV.
    Evolve,
    /// Localization metric over a range of p or |λ|, as CSV.
    Sweep,
    /// Closed-form results against the numerics at one point, as JSON.
    Verify,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let opts = cli.options.resolve()?;
    let output = match cli.command {
        Command::Classify { quadratic } => commands::classify(quadratic)?,
        Command::Dispersion => commands::dispersion_table(&opts)?,
        Command::Spectrum => commands::spectrum(&opts)?,
        Command::Evolve => commands::evolve_table(&opts)?,
        Command::Sweep => commands::sweep_table(&opts)?,
        Command::Verify => commands::verify(&opts)?,
    };
    match &opts.out {
        Some(path) => std::fs::write(path, &output.text)?,
        None => std::io::stdout().lock().write_all(output.text.as_bytes())?,
    }
    Ok(output.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("fca: {e}");
            ExitCode::from(2)
        }
    }
}
