//! Command-line driver: search, classification sweeps, oracle cross-check and mesh export.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{read_config_file, Flags, RunConfig};

pub const EXIT_PARAMS: u8 = 2;
pub const EXIT_SEARCH: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;
pub const EXIT_IO: u8 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn params(message: String) -> Self {
        Self {
            code: EXIT_PARAMS,
            message,
        }
    }

    pub fn search(message: String) -> Self {
        Self {
            code: EXIT_SEARCH,
            message,
        }
    }

    pub fn verify(message: String) -> Self {
        Self {
            code: EXIT_VERIFY,
            message,
        }
    }

    pub fn io(message: String) -> Self {
        Self {
            code: EXIT_IO,
            message,
        }
    }

    fn kind(&self) -> &'static str {
        match self.code {
            EXIT_PARAMS => "invalid parameters",
            EXIT_SEARCH => "search failure",
            EXIT_VERIFY => "verification failure",
            _ => "I/O failure",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "shrinker",
    version,
    about = "Compact self-shrinkers by geodesic shooting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// `key = value` file supplying defaults for the flags below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Find the critical start and export the closed profile (or the two arcs when m1 != m2).
    Find,
    /// Classify a single start `(xi0, theta*, pi/2)`.
    Classify,
    /// Classify a grid of starts and write `sweep.csv`.
    Sweep,
    /// Compare with the shooting problem solved directly in Angenent's half-plane (g = 1).
    VerifyAngenent,
    /// Revolve the g = 1, n = 2 profile into a torus and write `mesh.obj`.
    Mesh,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Find => "find",
            Command::Classify => "classify",
            Command::Sweep => "sweep",
            Command::VerifyAngenent => "verify-angenent",
            Command::Mesh => "mesh",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = cli.config.as_deref().map(read_config_file).transpose()?;
    let cfg = RunConfig::resolve(cli.command.name(), cli.flags, file)?;
    log::debug!("configuration: {cfg:?}");
    match cli.command {
        Command::Find => commands::run_find(&cfg),
        Command::Classify => commands::run_classify(&cfg),
        Command::Sweep => commands::run_sweep(&cfg),
        Command::VerifyAngenent => commands::run_verify_angenent(&cfg),
        Command::Mesh => commands::run_mesh(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error ({}): {}", e.kind(), e.message);
            ExitCode::from(e.code)
        }
    }
}
