use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "guesswork",
    version,
    about = "Guesswork, Renyi entropy and entropy-budget analysis for memoryless sources",
    after_help = "Exit codes: 0 success, 1 verification failure or I/O error, \
                  2 invalid input, 3 resource guard exceeded.\n\
                  GUESSWORK_THREADS caps the worker threads."
)]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputArgs,

    #[command(flatten)]
    pub guards: GuardArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format; `verify` defaults to json, everything else to csv
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write to this file (atomically) instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Show logarithmic quantities in bits instead of nats
    #[arg(long, global = true)]
    pub bits: bool,
}

#[derive(Debug, Args)]
pub struct GuardArgs {
    /// Lift every resource cap (prints a warning)
    #[arg(long, global = true)]
    pub force_guard: bool,

    /// Cap on type-class compositions per profile
    #[arg(long, global = true, value_name = "N")]
    pub max_compositions: Option<u64>,

    /// Cap on |X|^n for the per-rank moment mode
    #[arg(long, global = true, value_name = "N")]
    pub max_enumerated: Option<u64>,

    /// Cap on lattice points in `scan-simplex`
    #[arg(long, global = true, value_name = "N")]
    pub max_scan_points: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Probabilities, e.g. `0.1,0.2,0.7` (renormalized)
    #[arg(long, value_name = "P1,P2,...", allow_hyphen_values = true)]
    pub probs: Option<String>,

    /// One-line file of whitespace-separated probabilities
    #[arg(long, value_name = "PATH", conflicts_with = "probs")]
    pub probs_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SourceSetArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// String length
    #[arg(long, short)]
    pub n: Option<u64>,

    /// Use the equal-entropy binary sources of `table1` with their lengths
    #[arg(long, conflicts_with_all = ["probs", "probs_file", "n"])]
    pub table1: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    ExactEnumerated,
    ExactInteger,
    IntegralApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Derivatives,
    Theorems,
    Oracle,
    All,
}

/// Grids accept comma lists (`0.5,1,2`) and inclusive ranges (`start:step:stop`).
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies, varentropy, skewentropy and the SEC of one source
    Analyze {
        #[command(flatten)]
        source: SourceArgs,
    },

    /// Points of the tilted family tau(theta, alpha)
    TiltScan {
        #[command(flatten)]
        source: SourceArgs,

        #[arg(long, default_value = "0:0.25:4")]
        alphas: String,
    },

    /// Rate function and the matching tilt parameter on a grid of g
    Rate {
        #[command(flatten)]
        source: SourceArgs,

        /// Per-character guesswork budgets (nats); default spans the attainable range
        #[arg(long)]
        g: Option<String>,
    },

    /// Log-moments ln E[G^rho] of optimal guesswork
    Moments {
        #[command(flatten)]
        set: SourceSetArgs,

        #[arg(long, default_value = "1")]
        rho: String,

        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
    },

    /// Success probability P[G <= floor(e^b)] for log-budgets b
    Success {
        #[command(flatten)]
        set: SourceSetArgs,

        /// Total log-budgets ln N (nats)
        #[arg(long, conflicts_with = "g")]
        log_budget: Option<String>,

        /// Per-character budgets g; the log-budget is n g
        #[arg(long)]
        g: Option<String>,
    },

    /// Compare two sources at equal total entropy
    Compare {
        #[command(flatten)]
        source: SourceArgs,

        /// Second source for a free-form moment comparison
        #[arg(long, value_name = "P1,P2,...", conflicts_with_all = ["alpha", "uniform"])]
        probs2: Option<String>,

        /// Compare against the low-entropy tilt tau(theta, alpha), alpha > 1
        #[arg(long, conflicts_with = "uniform")]
        alpha: Option<f64>,

        /// Compare against the uniform source on the same alphabet
        #[arg(long)]
        uniform: bool,

        /// Moment orders
        #[arg(long)]
        rho: Option<String>,

        /// Per-character guesswork budgets g1
        #[arg(long)]
        g: Option<String>,

        /// Length of the first source, used for n2 = n1 / eta
        #[arg(long, default_value_t = 1)]
        n1: u64,

        /// Grid-search tilts for ordering violations instead
        #[arg(long, conflicts_with_all = ["probs2", "alpha", "uniform", "rho", "g"])]
        search: bool,
    },

    /// SEC labels over the ternary simplex, the binary segment or random samples
    ScanSimplex {
        #[arg(long, default_value_t = 100)]
        resolution: u32,

        #[arg(long, default_value_t = 3)]
        dimension: usize,

        /// Scan binary sources i/resolution instead
        #[arg(long, conflicts_with = "random")]
        binary: bool,

        /// Sample this many flat-Dirichlet sources on `--dimension` symbols
        #[arg(long, value_name = "COUNT")]
        random: Option<usize>,

        #[arg(long, default_value_t = guesswork::secscan::DEFAULT_SEED)]
        seed: u64,
    },

    /// Binary sources with equal total entropy, one per length
    Table1 {
        /// Total entropy in bits
        #[arg(long, default_value_t = 9.0, conflicts_with = "total_nats")]
        total_bits: f64,

        /// Total entropy in nats
        #[arg(long)]
        total_nats: Option<f64>,

        #[arg(long, default_value = "9,10,12,15,18,22")]
        lengths: String,
    },

    /// Run the bundled self-checks
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: SuiteArg,
    },
}
