//! Fixtures shared by the criterion benches.

use ptpm_core::patterns::word_alphabet;
use ptpm_core::{builtin, compute_tables, generate_word, Pta, SkipTables, TableOptions, TimedWord, WordSpec};

pub struct Fixture {
    pub name: &'static str,
    pub pta: Pta,
    pub tables: SkipTables,
    pub word: TimedWord,
}

/// A builtin pattern, its skip tables and a seeded random word of `length` events.
pub fn fixture(name: &'static str, length: usize) -> Fixture {
    let pta = builtin(name).unwrap_or_else(|| panic!("unknown builtin `{name}`"));
    let tables = compute_tables(&pta, TableOptions::default()).expect("builtin patterns are satisfiable");
    let word = generate_word(&WordSpec::new(word_alphabet(name), length, 1));
    Fixture { name, pta, tables, word }
}
