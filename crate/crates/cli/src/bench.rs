//! Timing runs: one discarded warm-up, then the median of several timed runs per mode.

use std::time::{Duration, Instant};

use ptpm_core::patterns::word_alphabet;
use ptpm_core::{generate_word, MatchStats, Pta, SkipTables, TimedWord, WordSpec};

use crate::config::Mode;
use crate::engine::match_word;

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub lengths: Vec<usize>,
    pub seed: u64,
    pub repeats: usize,
    pub modes: Vec<Mode>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { lengths: vec![20_000], seed: 1, repeats: 5, modes: Mode::ALL.to_vec() }
    }
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub pattern: String,
    pub length: usize,
    pub mode: Mode,
    pub median: Duration,
    pub stats: MatchStats,
    pub tables: Duration,
}

pub const CSV_HEADER: &str = "pattern,length,mode,median_ms,trials,configurations,disjuncts,tables_ms";

impl BenchRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{:.3},{},{},{},{:.3}",
            self.pattern,
            self.length,
            self.mode,
            self.median.as_secs_f64() * 1e3,
            self.stats.trials,
            self.stats.configurations,
            self.stats.disjuncts,
            self.tables.as_secs_f64() * 1e3,
        )
    }
}

fn median(mut samples: Vec<Duration>) -> Duration {
    samples.sort();
    samples.get(samples.len() / 2).copied().unwrap_or_default()
}

/// Times one mode on one word.
pub fn time_mode(
    pta: &Pta,
    tables: &SkipTables,
    mode: Mode,
    word: &TimedWord,
    repeats: usize,
) -> (Duration, MatchStats) {
    let tables = mode.needs_tables().then_some(tables);
    let (_, stats) = match_word(pta, tables, mode, word);
    let samples = (0..repeats.max(1))
        .map(|_| {
            let started = Instant::now();
            std::hint::black_box(match_word(pta, tables, mode, word));
            started.elapsed()
        })
        .collect();
    (median(samples), stats)
}

/// Runs the modes one after another on generated words of each length.
pub fn bench_pattern(
    name: &str,
    pta: &Pta,
    tables: &SkipTables,
    tables_time: Duration,
    options: &BenchOptions,
) -> Vec<BenchRow> {
    let alphabet = word_alphabet(name);
    let mut rows = Vec::new();
    for &length in &options.lengths {
        let word = generate_word(&WordSpec::new(alphabet.clone(), length, options.seed));
        for &mode in &options.modes {
            let (median, stats) = time_mode(pta, tables, mode, &word, options.repeats);
            rows.push(BenchRow { pattern: name.to_string(), length, mode, median, stats, tables: tables_time });
        }
    }
    rows
}
