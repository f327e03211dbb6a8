//! Command-line front end: reads a JSON problem configuration, runs the
//! reduction / partner / family pipeline, and emits CSV grids plus a JSON
//! run report.
//!
//! Exit codes: 0 success, 1 validation failure, 2 configuration error,
//! 3 numerical failure.

mod commands;
mod config;
mod output;
mod pipeline;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("validation failure: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "isospec",
    about = "Reduce linear second-order ODEs to zero-energy Schrodinger form and generate Darboux superpartners and strictly isospectral potential families",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the gauge factor R0, the coordinate map z(x), and the
    /// potential V1(z); writes R0.csv, zmap.csv, V1.csv.
    Transform {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Integrate the configured zero mode and emit psi.csv, I.csv, and a
    /// file pair per admissible lambda.
    Family {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the residual and oracle checks; exit 0 only if every check
    /// stays within tolerance.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Rebuild the shipped figure datasets (fig1 or fig2) from embedded
    /// configurations.
    Reproduce {
        /// Which figure to rebuild: fig1 or fig2.
        figure: String,
        /// Output directory (defaults to the embedded config's choice).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid size override.
        #[arg(long)]
        grid: Option<usize>,
    },
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides outputs.directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Quadrature tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Grid size override.
    #[arg(long)]
    grid: Option<usize>,
}

impl CommonArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(&self.config).map_err(|e| {
            CliError::Config(format!("cannot read {}: {e}", self.config.display()))
        })?;
        let mut config = RunConfig::from_json(&text)?;
        if let Some(tol) = self.tol {
            config.tolerances.quadrature = tol;
        }
        if let Some(grid) = self.grid {
            config.grid_size = grid;
        }
        config.validate()?;
        Ok(config)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Transform { common } => {
            let config = common.load()?;
            let report = commands::transform::run(&config, common.out.as_deref())?;
            eprintln!(
                "transform: wrote {} files to {}",
                report.files.len(),
                common
                    .out
                    .as_deref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| config.outputs.directory.clone())
            );
            Ok(())
        }
        Command::Family { common } => {
            let config = common.load()?;
            let report = commands::family::run(&config, common.out.as_deref())?;
            let admissible = report.lambdas.iter().filter(|l| l.admissible).count();
            eprintln!(
                "family: {admissible}/{} lambdas admissible, {} files",
                report.lambdas.len(),
                report.files.len()
            );
            Ok(())
        }
        Command::Validate { common } => {
            let config = common.load()?;
            let report = commands::validate::run(&config, common.out.as_deref())?;
            eprintln!("validate: {} checks passed", report.checks.len());
            Ok(())
        }
        Command::Reproduce { figure, out, grid } => {
            let report = commands::reproduce::run(figure, out.as_deref(), *grid)?;
            eprintln!("reproduce: wrote {} files", report.files.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
