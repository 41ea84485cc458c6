//! `lgigen`: prepare corpora, train and sample generators, and evaluate the
//! generated graphs.
//!
//! Exit status: 0 on success, 2 for bad input or configuration, 3 when
//! training ran out of epochs before converging, 4 for internal failures.

mod commands;
mod config;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NOT_CONVERGED: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "lgigen", version, about = "Text-based generative modelling of sparse graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
pub struct Common {
    /// key = value file; flags override its entries
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build canonical and augmented corpora from graphs or synthetic settings
    Prep(commands::PrepArgs),
    /// Train a generator under examination
    Train(commands::TrainArgs),
    /// Draw strings from a checkpoint
    Sample(commands::SampleArgs),
    /// Score generated strings against a training set
    Evaluate(commands::EvaluateArgs),
    /// Intersection points of graphs, scaffolds and ring systems
    Intersect(commands::IntersectArgs),
    /// Canonical strings of every graph on n vertices
    Oracle(commands::OracleArgs),
}

/// Marks failures that are not the user's fault.
#[derive(Debug)]
pub struct Internal(pub String);

impl std::fmt::Display for Internal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "internal error: {}", self.0)
    }
}

impl std::error::Error for Internal {}

pub enum Outcome {
    Done,
    NotConverged,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Prep(a) => commands::prep(a),
        Command::Train(a) => commands::train(a),
        Command::Sample(a) => commands::sample(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Intersect(a) => commands::intersect(a),
        Command::Oracle(a) => commands::oracle(a),
    };
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged) => {
            eprintln!("training stopped at the epoch limit without a full passing streak");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Internal>() || e.chain().any(|c| c.is::<Internal>()) {
                ExitCode::from(EXIT_INTERNAL)
            } else {
                ExitCode::from(EXIT_INPUT)
            }
        }
    }
}
