//! Command line front end: solves the cathode problem from a TOML config and
//! emits plot-ready CSV plus a plain-text summary. All outputs are
//! deterministic functions of the config; repeated runs produce identical
//! bytes.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Config;

/// Exit codes: 0 success, 2 configuration or input validation failure,
/// 3 solver failure, 4 assertion failure (verify/crosscheck bounds violated).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Solver(sofc_cathode::Error),
    #[error("{0}")]
    Assertion(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Assertion(_) => 4,
        }
    }
}

impl From<sofc_cathode::Error> for CliError {
    fn from(e: sofc_cathode::Error) -> Self {
        match e {
            sofc_cathode::Error::Validation(_) => CliError::Input(e.to_string()),
            other => CliError::Solver(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "sofc-cathode", version, about = "Isothermal 1D SOFC cathode solver")]
struct Cli {
    /// Path to the TOML configuration file.
    #[arg(long, global = true, default_value = "config.toml")]
    config: PathBuf,
    /// Output directory for CSV files and summary.txt.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps; 0 keeps the library default.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Override of the solver tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override of the nodal point count.
    #[arg(long, global = true)]
    nodes: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single operating point and emit the nodal profiles.
    Run,
    /// Solve the (temperature, current) grid from the [sweep] section.
    Sweep,
    /// Run the manufactured-solution convergence study from [verify].
    Verify,
    /// Cross-check the primal solution against the fixed-thickness dual.
    Crosscheck,
    /// Scan the feed-air oxygen fraction grid from [sensitivity].
    Sensitivity,
    /// Overlay model overpotentials on a measurement CSV from [compare].
    Compare,
}

fn load_config(path: &PathBuf) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Input(format!("cannot parse {}: {e}", path.display())))
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let config = load_config(&cli.config)?;
    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
            .map_err(|e| CliError::Input(format!("cannot configure worker pool: {e}")))?;
    }
    std::fs::create_dir_all(&cli.out)?;
    let settings = config.solver_settings(cli.nodes, cli.tol);
    settings.validate()?;
    let ctx = commands::Context {
        config,
        settings,
        out: cli.out.clone(),
        config_dir: cli
            .config
            .parent()
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    match cli.command {
        Command::Run => commands::run(&ctx),
        Command::Sweep => commands::sweep(&ctx),
        Command::Verify => commands::verify(&ctx),
        Command::Crosscheck => commands::crosscheck(&ctx),
        Command::Sensitivity => commands::sensitivity(&ctx),
        Command::Compare => commands::compare(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
