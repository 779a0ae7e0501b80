//! `gdv`: command-line front end for the generalized discrimination value
//! experiments.

mod cmd_ensemble;
mod cmd_fig1;
mod cmd_gdv;
mod cmd_nets;
mod config;
mod data;
mod error;
mod manifest;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::run::{drive, Global};

#[derive(Debug, Parser)]
#[command(name = "gdv", version, about = "Class separability (GDV) of datasets and network layers")]
struct Cli {
    /// Worker threads [default: all available cores].
    #[arg(long, global = true, env = "GDV_THREADS")]
    threads: Option<usize>,
    /// TOML file with options (a `[<subcommand>]` table overrides top-level
    /// keys), or a run manifest to repeat a recorded run. Flags win over both.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Where to write the run manifest [default: next to the outputs].
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// GDV of a labeled CSV file or of every layer in an activation archive.
    Gdv(cmd_gdv::GdvArgs),
    /// Two-cluster demonstrations and the embedding sweep.
    Fig1(cmd_fig1::Fig1Args),
    /// Random-ensemble GDV statistics and transformation experiments.
    Ensemble(cmd_ensemble::EnsembleArgs),
    /// Train a perceptron and report its GDV per layer.
    TrainMlp(cmd_nets::TrainMlpArgs),
    /// GDV per layer of a saved model.
    Probe(cmd_nets::ProbeArgs),
    /// Train a deep belief network greedily with contrastive divergence.
    TrainDbn(cmd_nets::TrainDbnArgs),
    /// Prototype images from sparsified DBN layer activity.
    Dream(cmd_nets::DreamArgs),
}

fn config_threads(cli: &Cli) -> Option<usize> {
    let path = cli.config.as_ref()?;
    let text = std::fs::read_to_string(path).ok()?;
    let table: toml::Table = text.parse().ok()?;
    table.get("threads")?.as_integer().and_then(|t| usize::try_from(t).ok())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| config_threads(&cli))
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("warning: could not configure {threads} worker threads: {e}");
    }
    let global = Global { config: cli.config.clone(), manifest: cli.manifest.clone(), threads };
    let code = match cli.command {
        Cmd::Gdv(a) => drive(a, &global),
        Cmd::Fig1(a) => drive(a, &global),
        Cmd::Ensemble(a) => drive(a, &global),
        Cmd::TrainMlp(a) => drive(a, &global),
        Cmd::Probe(a) => drive(a, &global),
        Cmd::TrainDbn(a) => drive(a, &global),
        Cmd::Dream(a) => drive(a, &global),
    };
    ExitCode::from(code as u8)
}
