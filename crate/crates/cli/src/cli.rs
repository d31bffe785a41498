use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ptpm_core::geometry::parse_rational;
use ptpm_core::skip::DEFAULT_BUDGET;
use ptpm_core::Rational;

use crate::config::{Algo, Format, RunConfig};

/// Parametric timed pattern matching over timed words.
#[derive(Debug, Parser)]
#[command(name = "ptpm", version, about)]
pub struct Cli {
    /// More log output (repeatable); `RUST_LOG` takes precedence.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    /// Symbolic states EFsynth expands before over-approximating.
    #[arg(long, env = "PTPM_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Largest KMP shift considered; defaults to max(N, |L|).
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the match set of a word.
    Match {
        /// Pattern file or builtin name.
        pattern: String,
        /// Word file; standard input when absent or `-`.
        word: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Algo::None)]
        algo: Algo,
        #[arg(long, value_enum, default_value_t = Switch::Off)]
        quick_search: Switch,
        /// Precomputed skip tables from `ptpm tables`.
        #[arg(long)]
        tables: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Upper bound on `t'` for matches ending after the last event.
        #[arg(long, value_parser = parse_horizon)]
        horizon: Option<Rational>,
        /// Move tied timestamps just after their predecessor instead of rejecting them.
        #[arg(long)]
        perturb: bool,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Precompute skip tables for a pattern.
    Tables {
        pattern: String,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Time every matching mode on generated words and print CSV.
    Bench {
        /// Builtin names or pattern files.
        #[arg(required = true)]
        patterns: Vec<String>,
        /// Word lengths (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "20000")]
        length: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Timed runs per mode after the warm-up.
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Generate a random timed word.
    Gen {
        /// Actions to draw from (comma separated).
        #[arg(long, value_delimiter = ',', conflicts_with = "pattern", required_unless_present = "pattern")]
        alphabet: Vec<String>,
        /// Use the alphabet of a builtin pattern.
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Smallest gap between events, in units of 1/resolution.
        #[arg(long, default_value_t = 1)]
        min_gap: u64,
        #[arg(long, default_value_t = 20)]
        max_gap: u64,
        #[arg(long, default_value_t = 10)]
        resolution: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List builtin patterns, or print one.
    Patterns { name: Option<String> },
    /// Cross-check all matching modes on random words.
    Diff {
        /// Patterns to check; all benchmark patterns when empty.
        patterns: Vec<String>,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        #[arg(long, default_value_t = 200)]
        max_length: usize,
        /// Directory receiving minimized counterexamples.
        #[arg(long, default_value = "ptpm-counterexamples")]
        out: PathBuf,
        #[command(flatten)]
        table: TableArgs,
    },
}

fn parse_horizon(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

impl Command {
    /// The match configuration, when this is a `match` invocation.
    pub fn run_config(&self) -> Option<RunConfig> {
        let Command::Match { pattern, word, algo, quick_search, tables, format, horizon, perturb, table } = self else {
            return None;
        };
        Some(RunConfig {
            pattern: pattern.clone(),
            word: word.clone(),
            algo: *algo,
            quick_search: *quick_search == Switch::On,
            tables: tables.clone(),
            format: *format,
            horizon: horizon.clone(),
            perturb: *perturb,
            budget: table.budget,
            n_max: table.n_max,
        })
    }
}
