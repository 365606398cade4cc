//! `enz`: meshes, limit and δ spectra, Taylor reports, cascades and
//! spherical modes from the command line.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{
    cascade::CascadeArgs, eig::EigCommand, invariance::InvarianceArgs, mesh::MeshCommand,
    mie::MieCommand, taylor::TaylorArgs,
};
use config::Settings;

#[derive(Parser)]
#[command(
    name = "enz",
    version,
    about = "High-contrast core-shell spectral toolkit"
)]
struct Cli {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for independent δ samples, shapes or modes.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or inspect meshes.
    #[command(subcommand)]
    Mesh(MeshCommand),
    /// Limit spectrum, δ sweeps and the discrete compact-operator check.
    #[command(subcommand)]
    Eig(EigCommand),
    /// Circle sampling of the invariant branch and its Taylor report.
    Taylor(TaylorArgs),
    /// Order-by-order expansion of the degenerate projection.
    Cascade(CascadeArgs),
    /// Spherical modes and the concentric dispersion relation.
    #[command(subcommand)]
    Mie(MieCommand),
    /// Radial limit eigenvalue across shell shapes with a fixed core.
    Invariance(InvarianceArgs),
}

pub enum Failure {
    Validation(String),
    Numerical(enz_core::Error),
    Io(String),
}

impl From<enz_core::Error> for Failure {
    fn from(e: enz_core::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e)
        } else if let enz_core::Error::Io { .. } = e {
            Failure::Io(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

fn error_kind(e: &enz_core::Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("")
        .to_string()
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut settings = Settings::load(cli.config.as_deref())?;
    let jobs = settings.get("jobs", cli.jobs, 1usize)?;
    if jobs == 0 {
        return Err(Failure::Validation("--jobs must be at least 1".into()));
    }
    // A second initialization only happens in-process, never from main.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global();
    match cli.command {
        Command::Mesh(c) => commands::mesh::run(c, settings),
        Command::Eig(c) => commands::eig::run(c, settings),
        Command::Taylor(a) => commands::taylor::run(a, settings),
        Command::Cascade(a) => commands::cascade::run(a, settings),
        Command::Mie(c) => commands::mie::run(c, settings),
        Command::Invariance(a) => commands::invariance::run(a, settings),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(e)) => {
            let diag = serde_json::json!({
                "error": "numerical",
                "kind": error_kind(&e),
                "message": e.to_string(),
            });
            eprintln!("{diag}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
