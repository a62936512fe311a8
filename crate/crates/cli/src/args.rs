use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEVICE_ENV: &str = "IONSURGERY_DEVICE";

#[derive(Debug, Parser)]
#[command(
    name = "ionsurgery",
    version,
    about = "Communication-ion budgets for trapped-ion lattice surgery"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Device parameter JSON (defaults to the built-in trapped-ion values)
    #[arg(long, global = true, env = DEVICE_ENV)]
    pub device: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write results here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Exit with status 1 when every result is infeasible or a check fails
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Paradigm {
    T1000us,
    T100us,
    T10us,
    All,
}

impl Paradigm {
    pub fn cycle_times_us(self) -> Vec<f64> {
        match self {
            Paradigm::T1000us => vec![1000.0],
            Paradigm::T100us => vec![100.0],
            Paradigm::T10us => vec![10.0],
            Paradigm::All => vec![1000.0, 100.0, 10.0],
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum communication ions per (distance, cycle time)
    MinIons(MinIonsArgs),
    /// Maximum surgery cycle rate per (distance, ion budget)
    Rate(RateArgs),
    /// Minimum ions over a log-spaced coupling grid
    Sweep(SweepArgs),
    /// Purification circuits: simulate, search, benchmark
    Purify {
        #[command(subcommand)]
        command: PurifyCommand,
    },
    /// Compare the binomial model with Monte Carlo collection
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct ModelFlags {
    /// Require N_LS + 1 pairs, reproducing the published tables
    #[arg(long)]
    pub paper_compat: bool,
    /// Override the per-attempt coupling probability p_c
    #[arg(long)]
    pub pc: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MinIonsArgs {
    /// Code distances: `9`, `3,5,7` or `3..9`
    #[arg(long, default_value = "3..9")]
    pub distance: String,
    /// Cycle times in microseconds, comma separated
    #[arg(long, conflicts_with = "paradigm")]
    pub cycle_time_us: Option<String>,
    #[arg(long, value_enum)]
    pub paradigm: Option<Paradigm>,
    #[command(flatten)]
    pub model: ModelFlags,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Ion budgets, comma separated
    #[arg(long, default_value = "100,1000,10000")]
    pub ions: String,
    #[arg(long, default_value = "3..9")]
    pub distance: String,
    #[command(flatten)]
    pub model: ModelFlags,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "3,6,9")]
    pub distances: String,
    #[arg(long, default_value = "1000,100,10")]
    pub cycle_times_us: String,
    #[arg(long, default_value_t = 1e-4)]
    pub pc_from: f64,
    #[arg(long, default_value_t = 1.0)]
    pub pc_to: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long)]
    pub paper_compat: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseChoice {
    Paper,
    None,
}

#[derive(Debug, Subcommand)]
pub enum PurifyCommand {
    /// Exact noisy simulation of one circuit
    Simulate {
        #[arg(long)]
        circuit: PathBuf,
        /// `stephenson`, `werner:F` or `belldiag:F,px,pz,py`
        #[arg(long, default_value = "stephenson")]
        input: String,
        #[arg(long, value_enum, default_value_t = NoiseChoice::Paper)]
        noise: NoiseChoice,
    },
    /// Genetic search for n -> 1 circuits
    Search(SearchArgs),
    /// Re-simulate every circuit in a directory on Stephenson pairs
    Benchmark {
        #[arg(long, default_value = "circuits")]
        circuits: PathBuf,
        #[arg(long, value_enum, default_value_t = NoiseChoice::Paper)]
        noise: NoiseChoice,
    },
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub pop: usize,
    #[arg(long, default_value_t = 150)]
    pub gens: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Run this many consecutive seeds starting at --seed
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value = "werner:0.94")]
    pub input: String,
    #[arg(long, value_enum, default_value_t = NoiseChoice::Paper)]
    pub noise: NoiseChoice,
    #[arg(long, default_value_t = 8)]
    pub max_ops: usize,
    #[arg(long, default_value_t = 0.1)]
    pub mutation_rate: f64,
    #[arg(long, default_value_t = 0.7)]
    pub crossover_rate: f64,
    #[arg(long, default_value_t = 0.1)]
    pub elite_fraction: f64,
    /// Save the best circuit of each seed into this directory
    #[arg(long)]
    pub save_dir: Option<PathBuf>,
    /// Also pick, from every seed's archive, the highest-yield circuit whose
    /// Stephenson-pair fidelity reaches this value, and save it to --select-out
    #[arg(long, requires = "select_out")]
    pub select_fidelity: Option<f64>,
    #[arg(long)]
    pub select_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Single grid point (requires --attempts and --pc); default is the smoke grid
    #[arg(long, requires_all = ["attempts", "pc"])]
    pub ions: Option<u64>,
    #[arg(long)]
    pub attempts: Option<u64>,
    #[arg(long)]
    pub pc: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Single-point mode: write `{k: empirical P(X >= k)}` for every k as JSON
    #[arg(long, requires = "ions")]
    pub tails_json: Option<PathBuf>,
    /// Single-point mode: write per-trial entangled counts as CSV
    #[arg(long, requires = "ions")]
    pub per_trial: Option<PathBuf>,
}
