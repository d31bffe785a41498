//! Differential testing of the matching modes against each other.

use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};

use ptpm_core::patterns::word_alphabet;
use ptpm_core::{generate_word, Pta, Region, SkipTables, TimedWord, WordSpec};

use crate::config::Mode;
use crate::engine::match_word;

/// A word on which some mode disagrees with the reference matcher.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub pattern: String,
    pub seed: u64,
    pub mode: Mode,
    pub word: TimedWord,
}

#[derive(Clone, Debug, Default)]
pub struct DiffReport {
    pub instances: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl DiffReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Word length used for `seed`: the full length and successive halvings, down to one event.
pub fn length_for_seed(max_length: usize, seed: u64) -> usize {
    let halvings = (seed % 5) as u32;
    (max_length >> halvings).max(1.min(max_length))
}

/// First skipping mode whose match set differs from the no-skip one.
pub fn disagreement(pta: &Pta, tables: &SkipTables, word: &TimedWord) -> Option<(Mode, Region, Region)> {
    let (expected, _) = match_word(pta, None, Mode::ALL[0], word);
    Mode::ALL[1..].iter().find_map(|&mode| {
        let (got, _) = match_word(pta, Some(tables), mode, word);
        (!got.equals(&expected)).then_some((mode, expected.clone(), got))
    })
}

/// Shrinks `word` by deleting runs of events while `fails` keeps holding.
pub fn minimize(word: &TimedWord, fails: impl Fn(&TimedWord) -> bool) -> TimedWord {
    let mut events = word.events().to_vec();
    let mut chunk = (events.len() / 2).max(1);
    loop {
        let mut removed = false;
        let mut i = 0;
        while i < events.len() {
            let mut candidate = events.clone();
            candidate.drain(i..(i + chunk).min(events.len()));
            let shorter = TimedWord::new(candidate).expect("deleting events keeps timestamps increasing");
            if fails(&shorter) {
                events = shorter.events().to_vec();
                removed = true;
            } else {
                i += chunk;
            }
        }
        if !removed {
            if chunk == 1 {
                break;
            }
            chunk /= 2;
        }
    }
    TimedWord::new(events).expect("subsequence of a valid word")
}

/// Runs every mode on seeded random words for one pattern.
pub fn check_pattern(name: &str, pta: &Pta, tables: &SkipTables, seeds: u64, max_length: usize) -> DiffReport {
    let alphabet = word_alphabet(name);
    let mut report = DiffReport::default();
    for seed in 0..seeds {
        let word = generate_word(&WordSpec::new(alphabet.clone(), length_for_seed(max_length, seed), seed));
        report.instances += 1;
        if let Some((mode, _, _)) = disagreement(pta, tables, &word) {
            warn!("{name}: mode {mode} disagrees on seed {seed}; minimizing");
            let small = minimize(&word, |w| disagreement(pta, tables, w).is_some());
            let mode = disagreement(pta, tables, &small).map_or(mode, |(m, _, _)| m);
            report.counterexamples.push(Counterexample { pattern: name.to_string(), seed, mode, word: small });
        }
    }
    info!("{name}: {} words, {} counterexamples", report.instances, report.counterexamples.len());
    report
}

/// Writes a counterexample as a word file whose header comments name the pattern and mode.
pub fn persist(dir: &Path, cx: &Counterexample) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let stem: String =
        cx.pattern.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
    let path = dir.join(format!("{stem}-seed{}-{}.word", cx.seed, cx.mode.to_string().replace('+', "-")));
    let body = format!("# pattern: {}\n# seed: {}\n# mode: {}\n{}", cx.pattern, cx.seed, cx.mode, cx.word.to_text());
    fs::write(&path, body)?;
    Ok(path)
}
