//! Command-line surface.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use episodes::model::FrequencyKind;

#[derive(Debug, Parser)]
#[command(
    name = "episodes",
    version,
    about = "Count serial episode occurrences in event streams"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count episode occurrences in a stream.
    Count(CountArgs),
    /// Generate a synthetic event stream.
    Gen(GenArgs),
    /// Check the engine against brute-force oracles on random instances.
    OracleCheck(OracleCheckArgs),
    /// Measure throughput and state size across scales.
    Bench(BenchArgs),
    /// Evaluate threshold rules over a stream and print alerts.
    Monitor(MonitorArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Nonoverlapped,
    Distinct,
}

impl From<ModeArg> for FrequencyKind {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Nonoverlapped => FrequencyKind::NonOverlapped,
            ModeArg::Distinct => FrequencyKind::Distinct,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct CountArgs {
    /// Episode to count, as `sym,sym,...@tau=N`. Repeatable.
    #[arg(long = "episode", short = 'e', required = true)]
    pub episodes: Vec<String>,

    /// Which occurrence count to track.
    #[arg(long, value_enum, default_value_t = ModeArg::Nonoverlapped)]
    pub mode: ModeArg,

    /// Stream file (defaults to stdin; `-` also means stdin).
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Worker threads events are fanned out to.
    #[arg(long, default_value_t = 1)]
    pub shards: usize,

    /// Print each completed occurrence as it is counted.
    #[arg(long)]
    pub emit: bool,

    /// Print stream metrics after the counts.
    #[arg(long)]
    pub metrics: bool,
}

#[derive(Debug, clap::Args)]
pub struct GenArgs {
    /// Number of events.
    #[arg(long)]
    pub events: u64,

    /// Alphabet size (symbols are named s0, s1, ...).
    #[arg(long, default_value_t = 4)]
    pub alphabet: usize,

    /// Gap between consecutive timestamps.
    #[arg(long, default_value_t = 1)]
    pub tick: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output file (defaults to stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct OracleCheckArgs {
    #[arg(long, default_value_t = 1_000)]
    pub trials: u64,

    /// Maximum stream length per trial.
    #[arg(long, default_value_t = 30)]
    pub max_events: usize,

    /// Maximum episode length.
    #[arg(long, default_value_t = 4)]
    pub max_k: usize,

    /// Maximum alphabet size.
    #[arg(long, default_value_t = 4)]
    pub max_sigma: usize,

    /// Maximum time constraint.
    #[arg(long, default_value_t = 12)]
    pub max_tau: u64,

    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchSuite {
    /// Stream-length sweep at fixed tau.
    N,
    /// Time-constraint sweep at fixed stream length.
    Tau,
    /// Episode-length sweep with peak state tracking.
    K,
    /// One large single-counter throughput run.
    Throughput,
    /// Everything above.
    All,
}

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = BenchSuite::All)]
    pub suite: BenchSuite,

    /// Events for the throughput and tau suites.
    #[arg(long, default_value_t = 200_000)]
    pub events: u64,

    /// Timing repeats per point (median is reported).
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Also write the rows as CSV to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct MonitorArgs {
    /// Rules file.
    #[arg(long)]
    pub rules: PathBuf,

    /// Populations file (CSV: population,group,count).
    #[arg(long)]
    pub populations: Option<PathBuf>,

    /// Stream file (defaults to stdin; `-` also means stdin).
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Tick scale for rule durations with m/h suffixes.
    #[arg(long, default_value_t = 60)]
    pub ticks_per_minute: u64,
}
