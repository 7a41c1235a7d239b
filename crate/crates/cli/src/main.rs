//! `hippo-lab`: batch experiments over blind randomness tests.
//!
//! Exit codes: 0 when every check passes, 1 when a verified property is
//! violated, 2 on usage or configuration errors.

mod commands;
mod config;
mod plot;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "hippo-lab", version, about = "Exact finite-depth laboratory for blind randomness tests")]
pub struct Cli {
    /// Experiment configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for reports and artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate all programs up to a length budget into a complexity table.
    Enum {
        #[arg(long, allow_negative_numbers = true)]
        budget: i64,
        #[arg(long, default_value_t = 32)]
        out_cap: usize,
    },
    /// Build blind and measure test families, verify mass bounds and the sandwich.
    Test {
        /// Complexity table file (overrides the config).
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Deficiency profile of one string, or of sampled sequences.
    Deficiency {
        /// Bit string (`-` for the empty string).
        #[arg(long, conflicts_with = "samples")]
        input: Option<String>,
        /// Number of sequences to sample from the configured measure.
        #[arg(long)]
        samples: Option<usize>,
        /// Length of sampled sequences.
        #[arg(long, default_value_t = 32)]
        length: usize,
        #[arg(long)]
        table: Option<PathBuf>,
        /// Skip the SVG plot.
        #[arg(long)]
        no_plot: bool,
    },
    /// Build the level-indexed Shannon-Fano-Elias code for a test family.
    Forward {
        #[arg(long)]
        family: PathBuf,
        /// Log-approximation file (overrides the config).
        #[arg(long)]
        approx: Option<PathBuf>,
    },
    /// Sample a prefix from a measure.
    Sample {
        /// Measure file (overrides the config).
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long)]
        length: usize,
    },
    /// Check whether any measure satisfies a log-approximation to a depth.
    Feasibility {
        #[arg(long)]
        approx: Option<PathBuf>,
        #[arg(long)]
        depth: usize,
    },
    /// Exact Kraft sum of Km_B over a prefix-free set.
    Kraft {
        #[arg(long)]
        table: Option<PathBuf>,
        /// File with one string per line.
        #[arg(long, conflicts_with = "level")]
        set: Option<PathBuf>,
        /// Use all strings of this length.
        #[arg(long)]
        level: Option<usize>,
    },
    /// Build a Shannon-Fano-Elias codebook from `x a/2^b` lines.
    Sfe {
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
