//! `spinorbit`: simulate spin-OAM Bell-state tomography and design the
//! metasurface that generates the states.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "spinorbit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Flat key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: $SPINORBIT_OUT, else ./out].
    #[arg(long)]
    out: Option<String>,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a Bell state, simulate its tomography counts and reconstruct it.
    #[command(allow_negative_numbers = true)]
    Bell(commands::bell::BellArgs),
    /// Reconstruct a state from a counts CSV by linear inversion and MLE.
    #[command(allow_negative_numbers = true)]
    Tomo(commands::tomo::TomoArgs),
    /// Lay out a metasurface and check the OAM it imprints.
    #[command(allow_negative_numbers = true)]
    Design(commands::design::DesignArgs),
    /// Far-field intensity of a phase-mask PGM.
    #[command(allow_negative_numbers = true)]
    Farfield(commands::farfield::FarfieldArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bell(a) => commands::bell::run(a),
        Command::Tomo(a) => commands::tomo::run(a),
        Command::Design(a) => commands::design::run(a),
        Command::Farfield(a) => commands::farfield::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
