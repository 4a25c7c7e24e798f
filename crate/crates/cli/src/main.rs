//! `umbilic`: regenerates the data behind every figure of the multiscale
//! heat-equation analysis and runs the verification suites.
//!
//! Exit status: 0 on success, 1 when verification fails, 2 on a configuration error.

// `!(a < b)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod examples;
mod plot;
mod table;
mod tracking;
mod unfold;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "umbilic",
    version,
    about = "Multiscale singularity analysis for the heat equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form critical branches of the worked example over a range of scales.
    Branches(examples::BranchesArgs),
    /// Surface samples per scale and the median section along y = 0.
    Sections(examples::SectionsArgs),
    /// Level sets and gradient vectors per scale.
    Levelsets(examples::LevelsetsArgs),
    /// Track critical points through scale and detect creation, annihilation and merge events.
    Track(tracking::TrackArgs),
    /// Run the exact and numeric verification suites and write a JSON report.
    Verify(verify::VerifyArgs),
    /// Elliptic umbilic unfolding: discriminant, critical-value graph, embedding line.
    #[command(subcommand)]
    Unfolding(unfold::UnfoldingCommand),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // reserved for randomized paths; every current command is deterministic
    if let Ok(seed) = std::env::var("UMBILIC_SEED") {
        log::debug!("UMBILIC_SEED={seed} is reserved and unused");
    }
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Branches(a) => examples::branches(a),
        Command::Sections(a) => examples::sections(a),
        Command::Levelsets(a) => examples::levelsets(a),
        Command::Track(a) => tracking::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Unfolding(c) => unfold::run(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) if err.is::<verify::VerificationFailed>() => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
        Err(err) => {
            if !err.is::<args::ConfigError>() {
                log::debug!("treating {err:?} as a configuration error");
            }
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
