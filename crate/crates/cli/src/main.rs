//! `asep2`: verify identities, compute spectra and curves, solve Bethe equations and reproduce
//! the reference tables of the two-species open ASEP.
//!
//! Exit codes: 0 success, 1 a check failed, 2 configuration error.

mod commands;
mod config;

use std::process::ExitCode;

use asep2_core::bethe::TQVariant;
use clap::{Args, Parser, Subcommand};

use commands::{CommandError, Outcome};
use config::{resolve, CommonArgs, ConfigError, Format, GridSpec};

#[derive(Parser)]
#[command(
    name = "asep2",
    version,
    about = "Integrable two-species open ASEP toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suite for one family and chain length (JSON report array).
    Verify(CommonArgs),
    /// Exact Markov spectrum with multiplicities.
    Spectrum(CommonArgs),
    /// Transfer-matrix eigenvalue curves on a grid; with --variant, T-Q curves checked against them.
    Curves(CurvesArgs),
    /// Solve the Bethe equations of one T-Q variant.
    Bae(BaeArgs),
    /// Compare a reference table with freshly computed values.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct CurvesArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Grid `start:stop:count`; endpoints may be complex (`0.3+0.2i`).
    #[arg(long, default_value = "0.2:2.0:181")]
    grid: GridSpec,
    #[arg(long)]
    variant: Option<TQVariant>,
    #[arg(long = "M")]
    m: Option<usize>,
}

#[derive(Args)]
struct BaeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    variant: TQVariant,
    /// Single sector; all admissible sectors when absent.
    #[arg(long = "M")]
    m: Option<usize>,
    /// Match solutions against the exact Markov and transfer-matrix spectra.
    #[arg(long)]
    match_spectrum: bool,
}

#[derive(Args)]
struct ReproduceArgs {
    /// One of table-4.1, table-4.2, table-5.1, table-5.2, table-5.3.
    table: String,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<CommandError> for Failure {
    fn from(e: CommandError) -> Self {
        match e {
            CommandError::UnknownTable(_) | CommandError::Config(_) => {
                Failure::Config(e.to_string())
            }
            CommandError::Bethe(
                asep2_core::bethe::BetheError::Sector { .. }
                | asep2_core::bethe::BetheError::Inhomogeneous,
            ) => Failure::Config(e.to_string()),
            CommandError::Spectrum(asep2_core::spectrum::SpectrumError::TooLarge { .. }) => {
                Failure::Config(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn write_output(out: Option<&std::path::Path>, o: &Outcome) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, &o.text)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            match stdout
                .write_all(o.text.as_bytes())
                .and_then(|_| stdout.flush())
            {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    return Err(Failure::Runtime(e.to_string()))
                }
                _ => {}
            }
        }
    }
    for line in &o.summary {
        eprintln!("{line}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let (outcome, out) = match cli.command {
        Command::Verify(c) => {
            let r = resolve(&c, None)?;
            (
                commands::verify(&r, c.tol, c.seed, c.format.unwrap_or(Format::Json))?,
                c.out,
            )
        }
        Command::Spectrum(c) => {
            let r = resolve(&c, None)?;
            (
                commands::spectrum(&r, c.format.unwrap_or(Format::Csv))?,
                c.out,
            )
        }
        Command::Curves(a) => {
            let r = resolve(&a.common, a.variant.map(|v| v.family()))?;
            let c = &a.common;
            (
                commands::curves(
                    &r,
                    a.grid,
                    a.variant,
                    a.m,
                    c.seed,
                    c.tol,
                    c.format.unwrap_or(Format::Csv),
                )?,
                a.common.out,
            )
        }
        Command::Bae(a) => {
            let r = resolve(&a.common, Some(a.variant.family()))?;
            let c = &a.common;
            (
                commands::bae(
                    &r,
                    a.variant,
                    a.m,
                    a.match_spectrum,
                    c.seed,
                    c.tol,
                    c.format.unwrap_or(Format::Json),
                )?,
                a.common.out,
            )
        }
        Command::Reproduce(a) => (
            commands::reproduce(&a.table, a.format.unwrap_or(Format::Csv))?,
            a.out,
        ),
    };
    write_output(out.as_deref(), &outcome)?;
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
