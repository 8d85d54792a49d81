use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod store;

#[derive(Parser, Debug)]
#[command(
    name = "stabwire",
    version,
    about = "Classify stabilizer PEPS by how much entanglement a cylinder transmits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Largest circumference in the grid.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_max: u64,

    /// Largest depth in the grid.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub d_max: u64,

    /// Directory for the enumeration and capacity caches.
    #[arg(
        long,
        global = true,
        env = "STABWIRE_CACHE",
        default_value = ".stabwire-cache"
    )]
    pub cache_dir: PathBuf,

    /// Directory for reports.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,

    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 20_240_611)]
    pub seed: u64,

    /// Print intermediate results.
    #[arg(long, global = true)]
    pub trace: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate all tensors and their gauge orbits.
    Enumerate,
    /// Capacity of one tensor on an n × d cylinder.
    Capacity {
        /// Tensor file.
        tensor: PathBuf,
        n: usize,
        d: usize,
    },
    /// Sweep every orbit representative and write the report.
    Classify,
    /// Run the oracle and property suites.
    Verify {
        /// Deliberately break the capacity side of the oracle comparison.
        #[arg(long, hide = true)]
        corrupt_for_test: bool,
    },
    /// Capacity grid of one transmission class.
    Heatmap {
        class_id: usize,
        /// Also write an SVG rendering.
        #[arg(long)]
        svg: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers as usize)
            .build_global()
            .expect("worker pool is configured once");
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
