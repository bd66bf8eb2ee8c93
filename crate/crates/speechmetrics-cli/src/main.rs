//! Batch front end for the transcript coherence pipeline.
//!
//! Four commands cover the pipeline stages:
//!
//! * `derail` — windowed derailment scores per participant and group
//!   comparison tables across window widths and word filters.
//! * `incohere` — modifier-coherence scores against a reference corpus,
//!   with qualified-word counts.
//! * `classify` — the 12-feature matrix and cross-validated
//!   classification reports.
//! * `stats` — word counts per question and vocabulary coverage.
//!
//! All numeric output is written with full round-trip precision and
//! every run is reproducible from its inputs and seed.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::CommonArgs;

#[derive(Parser)]
#[command(
    name = "speechmetrics",
    version,
    about = "Coherence metrics for annotated speech transcripts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score derailment and compare groups per window width and filter.
    Derail(CommonArgs),
    /// Score modifier coherence against a reference corpus.
    Incohere(CommonArgs),
    /// Build feature vectors and run cross-validated classification.
    Classify(CommonArgs),
    /// Report word counts per question and vocabulary coverage.
    Stats(CommonArgs),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (args, command): (&CommonArgs, fn(&config::RunConfig) -> anyhow::Result<()>) =
        match &cli.command {
            Command::Derail(args) => (args, commands::cmd_derail),
            Command::Incohere(args) => (args, commands::cmd_incohere),
            Command::Classify(args) => (args, commands::cmd_classify),
            Command::Stats(args) => (args, commands::cmd_stats),
        };
    let resolved = config::resolve(args)?;
    command(&resolved)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
