//! `sshsim` command-line front end.
//!
//! Every subcommand writes one table or record as CSV or JSON. Exit codes:
//! 0 on success, 1 for usage, configuration or domain errors, 2 when a
//! numerical method fails.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{Format, RunConfig, Units};
pub use output::{fmt_g12, Report, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] sshsim::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sshsim", version, about = "Driven SSH spin-array simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Bloch bands of the chain: k, E_minus, E_plus.
    Dispersion1d,
    /// Winding number of the off-diagonal Bloch element.
    Winding,
    /// Open-chain midgap states and their amplitudes.
    Edges,
    /// Band gap of the infinite chain.
    Bandgap,
    /// Four 2D bands over the full Brillouin-zone grid.
    Dispersion2d,
    /// 2D bands along M -> Gamma -> X -> M.
    Bandpath2d,
    /// Wilson-loop polarization of a 2D band.
    Zak2d,
    /// Drive-renormalized hoppings and the resulting dimerization.
    Driving,
    /// Site populations after exciting spin 1.
    Transfer,
    /// Peak transfer fidelity over several dephasing rates.
    FidelitySweep,
    /// Exact populations against the two-level prediction.
    ApproxCompare,
    /// Device parameter chain with quoted values alongside.
    EstimateParams,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dispersion1d => "dispersion1d",
            Command::Winding => "winding",
            Command::Edges => "edges",
            Command::Bandgap => "bandgap",
            Command::Dispersion2d => "dispersion2d",
            Command::Bandpath2d => "bandpath2d",
            Command::Zak2d => "zak2d",
            Command::Driving => "driving",
            Command::Transfer => "transfer",
            Command::FidelitySweep => "fidelity-sweep",
            Command::ApproxCompare => "approx-compare",
            Command::EstimateParams => "estimate-params",
        }
    }

    /// Record-style commands default to JSON, table commands to CSV.
    fn default_format(self) -> Format {
        match self {
            Command::Winding | Command::Bandgap | Command::Zak2d | Command::EstimateParams => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(cli.command, &cli.config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command and writes its artifacts.
pub fn execute(command: Command, flags: &RunConfig) -> Result<(), CliError> {
    let cfg = RunConfig::load(flags)?;
    let report = commands::dispatch(command, &cfg)?;
    let format = cfg.format.unwrap_or(command.default_format());
    let text = match format {
        Format::Csv => output::to_csv(&report),
        Format::Json => output::to_json(&report),
    };
    if cfg.gnuplot {
        let Some(path) = &cfg.output else {
            return Err(CliError::Config("gnuplot: --gnuplot needs --output".into()));
        };
        if format != Format::Csv {
            return Err(CliError::Config("gnuplot: --gnuplot needs CSV output".into()));
        }
        let Some(columns) = report.plot_columns() else {
            return Err(CliError::Config(format!("gnuplot: {} produces no table to plot", command.name())));
        };
        let script = output::gnuplot_script(&path.to_string_lossy(), columns, command.name());
        let mut gp = path.clone().into_os_string();
        gp.push(".gp");
        write_file(std::path::Path::new(&gp), &script)?;
    }
    match &cfg.output {
        Some(path) => write_file(path, &text),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::Io { path: "<stdout>".into(), source: e })
                }
                _ => Ok(()),
            }
        }
    }
}

fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}
