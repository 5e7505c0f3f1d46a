//! `timeflow`: verification suites, circuit evaluation and NMR simulation.
//!
//! Exit codes: 0 on success, 1 when a verification or agreement check
//! fails, 2 on invalid input.

mod acausal;
mod circuit_file;
mod error;
mod nmr;
mod output;
mod teleport;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use timeflow_core::nmr::parse_angle;
use timeflow_core::timeflow::BellState;

use error::{CliError, CliResult};
use output::{emit, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "timeflow", version, about = "Time-flow evaluation of teleportation-like circuits")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Agreement tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the algebraic identities on random instances.
    Verify {
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        dims: Vec<usize>,
        /// Deliberately break the time-reversal map.
        #[arg(long, value_enum)]
        inject_fault: Option<verify::Fault>,
    },
    /// Evaluate one circuit forwards and along the time flow.
    Teleport {
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        circuit: Option<PathBuf>,
        #[arg(long, requires = "dim")]
        random: bool,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value = "photon-number")]
        encoding: String,
    },
    /// Run the four-qubit acausality circuit for both control values.
    Acausal {
        #[arg(long, default_value = "PHI+")]
        bell: String,
    },
    /// Simulate a pulse sequence on a spin system.
    Nmr {
        #[arg(long)]
        spins: PathBuf,
        #[arg(long)]
        sequence: PathBuf,
        /// Override the sequence's initial state label.
        #[arg(long)]
        init: Option<String>,
        #[arg(long)]
        spectrum_out: Option<PathBuf>,
        #[arg(long)]
        fid_out: Option<PathBuf>,
        /// Zero-order phase correction, e.g. `pi/2` or `90deg`.
        #[arg(long, conflicts_with = "auto_phase")]
        phase: Option<String>,
        /// Phase so the tallest peak is absorptive.
        #[arg(long)]
        auto_phase: bool,
    },
}

fn finish<R: Report>(report: R, cli: &Cli) -> CliResult<bool> {
    emit(&report, cli.format, cli.out.as_deref())?;
    Ok(report.passed())
}

fn dispatch(cli: &Cli) -> CliResult<bool> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(CliError::Input(format!("--tol must be positive, got {}", cli.tol)));
    }
    match &cli.command {
        Command::Verify { trials, dims, inject_fault } => {
            finish(verify::run(cli.seed, cli.tol, *trials as usize, dims.clone(), *inject_fault)?, cli)
        }
        Command::Teleport { circuit, random, dim, encoding } => {
            let source = match (circuit, random, dim) {
                (Some(path), _, _) => teleport::Source::File(path),
                (None, true, Some(d)) => teleport::Source::Random { d: *d },
                _ => return Err(CliError::Input("pass --circuit FILE or --random --dim D".into())),
            };
            finish(teleport::run(cli.seed, cli.tol, source, encoding)?, cli)
        }
        Command::Acausal { bell } => {
            let bell: BellState = bell.parse()?;
            finish(acausal::run(cli.seed, cli.tol, bell)?, cli)
        }
        Command::Nmr { spins, sequence, init, spectrum_out, fid_out, phase, auto_phase } => {
            let phase = match (phase, auto_phase) {
                (Some(p), _) => Some(Some(
                    parse_angle(p).ok_or_else(|| CliError::Input(format!("bad phase '{p}'")))?,
                )),
                (None, true) => Some(None),
                (None, false) => None,
            };
            let args = nmr::NmrArgs {
                spins,
                sequence,
                init: init.as_deref(),
                spectrum_out: spectrum_out.as_deref(),
                fid_out: fid_out.as_deref(),
                phase,
            };
            finish(nmr::run(cli.seed, cli.tol, args)?, cli)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
