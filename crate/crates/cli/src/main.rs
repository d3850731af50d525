//! Command-line surface for the discrimination library: cache management,
//! probability tables, optimization runs and regression against the
//! reference tables.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

mod commands;
mod spec;

/// Unambiguous discrimination of photon distinguishability in linear optics.
#[derive(Parser)]
#[command(name = "lodis", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CacheLocation {
    /// Directory for Schur-Weyl transform caches; defaults to
    /// $LODIS_CACHE_DIR or ./lodis-cache.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

impl CacheLocation {
    fn resolve(&self) -> PathBuf {
        self.cache_dir
            .clone()
            .or_else(|| std::env::var_os("LODIS_CACHE_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("lodis-cache"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build, verify and store Schur-Weyl transforms.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
    /// Photon-counting outcome table with per-irrep columns.
    Prob(ProbArgs),
    /// Search for (or evaluate) a discriminating interferometer.
    Optimize(OptimizeArgs),
    /// Recompute the reference tables and compare cell by cell.
    Reproduce(ReproduceArgs),
    /// Inspect reduced states.
    State {
        #[command(subcommand)]
        action: StateAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Build the transform for (N, d), verify it and write it to the cache.
    Build {
        #[arg(long = "n")]
        photons: usize,
        #[arg(long = "d")]
        modes: usize,
        /// Random unitaries used for the equivariance check.
        #[arg(long, default_value_t = 5)]
        trials: usize,
        /// Seed for the verification unitaries.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        cache: CacheLocation,
    },
    /// Load a cached transform and re-verify it.
    Verify {
        #[arg(long = "n")]
        photons: usize,
        #[arg(long = "d")]
        modes: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        cache: CacheLocation,
    },
}

#[derive(Args)]
struct ProbArgs {
    #[arg(long = "n")]
    photons: usize,
    /// Target state: i, s, d, sm or fock:<file>.
    #[arg(long)]
    target: String,
    /// System mode carrying the bad photon for target s (1-based).
    #[arg(long)]
    bad_mode: Option<usize>,
    /// Interferometer: qft, table1, reck:<file> or json:<file>.
    #[arg(long, default_value = "qft")]
    network: String,
    /// Output format.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    cache: CacheLocation,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long = "n")]
    photons: usize,
    /// Target state: s, d, sm or fock:<file>.
    #[arg(long)]
    target: String,
    #[arg(long)]
    bad_mode: Option<usize>,
    /// Evaluate this fixed interferometer instead of searching.
    #[arg(long)]
    network: Option<String>,
    /// Comma-separated ξ ladder; defaults to the study ladder for N.
    #[arg(long)]
    xi_ladder: Option<String>,
    /// Coincidence-forcing penalty; implies the forced-coincidence cost.
    #[arg(long)]
    eta: Option<f64>,
    /// Shorthand for --eta 10 with ξ ladder {6}.
    #[arg(long, default_value_t = false)]
    force_coincidence: bool,
    /// Focus the search on a single outcome, e.g. 111.
    #[arg(long)]
    single_outcome: Option<String>,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = lodis::discriminate::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Worker threads for restarts (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Write the result JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    cache: CacheLocation,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Which reference table to recompute.
    #[arg(long)]
    table: u8,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[command(flatten)]
    cache: CacheLocation,
}

#[derive(Subcommand)]
enum StateAction {
    /// Print a reduced state as JSON blocks keyed by irrep.
    Show {
        #[arg(long = "n")]
        photons: usize,
        /// i, s, d, sm or fock:<file>.
        #[arg(long)]
        target: String,
        #[arg(long)]
        bad_mode: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        cache: CacheLocation,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Cache { action } => match action {
            CacheAction::Build { photons, modes, trials, seed, cache } => {
                commands::cache::build(photons, modes, trials, seed, &cache.resolve())
            }
            CacheAction::Verify { photons, modes, trials, seed, cache } => {
                commands::cache::verify(photons, modes, trials, seed, &cache.resolve())
            }
        },
        Command::Prob(args) => commands::prob::run(&args),
        Command::Optimize(args) => commands::optimize::run(&args),
        Command::Reproduce(args) => commands::reproduce::run(&args),
        Command::State { action } => match action {
            StateAction::Show { photons, target, bad_mode, out, cache } => {
                commands::state::show(photons, &target, bad_mode, out.as_deref(), &cache.resolve())
            }
        },
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
