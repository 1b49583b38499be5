//! `nsfv`: compressible Navier-Stokes-Fourier solver with truncated virial
//! pressure laws.

use clap::{Parser, Subcommand};
use nsf_cli::commands;
use nsf_cli::error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "nsfv",
    about = "Periodic-domain compressible Navier-Stokes-Fourier solver",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit a pressure law against the structural assumptions.
    Validate {
        /// Run configuration (INI).
        config: PathBuf,
        /// Also write validation.txt / validation.csv into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the coupled solver to t_final, writing snapshots and diagnostics.
    Run {
        config: PathBuf,
    },
    /// Manufactured-solution convergence study.
    Mms {
        config: PathBuf,
    },
    /// Recompute diagnostics from a directory of snapshots.
    Diagnose {
        /// Directory holding snap_*.nsfv (and the config.ini the run wrote).
        dir: PathBuf,
        /// Explicit config; defaults to `<dir>/config.ini`.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Dump a snapshot as CSV on standard output.
    Export {
        snapshot: PathBuf,
        /// Emit CSV (the only supported format).
        #[arg(long)]
        csv: bool,
    },
}

fn load_config(path: &PathBuf, lenient: bool) -> Result<(nsf_cli::RunConfig, String), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let config = nsf_cli::parse_config_with(&text, lenient)?;
    Ok((config, text))
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Validate { config, out } => {
            let (cfg, _) = load_config(&config, true)?;
            let report = commands::validate_command(&cfg, out.as_deref())?;
            Ok(if report.passes() { 0 } else { 1 })
        }
        Command::Run { config } => {
            let (cfg, text) = load_config(&config, false)?;
            let outcome = commands::run_command(&cfg, &text)?;
            Ok(outcome.exit_code)
        }
        Command::Mms { config } => {
            let (cfg, _) = load_config(&config, false)?;
            commands::mms_command(&cfg)?;
            Ok(0)
        }
        Command::Diagnose { dir, config } => {
            let config_path = config.unwrap_or_else(|| dir.join("config.ini"));
            let (cfg, _) = load_config(&config_path, true)?;
            commands::diagnose_command(&dir, &cfg)?;
            Ok(0)
        }
        Command::Export { snapshot, csv } => {
            if !csv {
                return Err(CliError::Config(
                    "export currently requires --csv".to_string(),
                ));
            }
            print!("{}", commands::export_command(&snapshot)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
