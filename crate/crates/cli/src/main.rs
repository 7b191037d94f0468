//! `nullsim`: analyze, reconstruct, generate, match and transform null
//! Cartan curves. Exit codes: 0 success (or similar), 1 not similar, 2 error.

// `!(a > b)` is deliberate: NaN must fail every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod expr;
mod io;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::{AnalyzeArgs, GenerateArgs, MatchArgs, ReconstructArgs, TransformArgs};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "nullsim", version, about = "Similarity geometry of null Cartan curves in Minkowski space-time")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shape signature (sigma, kappa~, tau~) of a sampled curve.
    Analyze(AnalyzeArgs),
    /// Integrate the frame system for prescribed shape curvatures.
    Reconstruct(ReconstructArgs),
    /// Sample a closed-form catalog curve.
    Generate(GenerateArgs),
    /// Decide whether two sampled curves are p-similar.
    Match(MatchArgs),
    /// Apply a p-similarity to every sample.
    Transform(TransformArgs),
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("ERROR {}: {e}", e.code());
    ExitCode::from(2)
}

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|info| {
        eprintln!("ERROR Internal: {info}");
        std::process::exit(2);
    }));
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default().trim_start_matches("error: ");
            return fail(&CliError::Usage(first.to_string()));
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Reconstruct(a) => commands::reconstruct(a),
        Command::Generate(a) => commands::generate(a),
        Command::Match(a) => commands::match_curves(a),
        Command::Transform(a) => commands::transform(a),
    };
    result.unwrap_or_else(|e| fail(&e))
}
