//! Parametric timed pattern matching: given a timed word and a parametric
//! timed automaton, compute every `(t, t', v)` such that the segment of the
//! word between `t` and `t'` is accepted under parameter valuation `v`.
//!
//! Match sets are finite unions of convex polyhedra over exact rationals.
//! [`match_online`] is the reference matcher; [`match_fjs`] adds
//! KMP- and Quick-Search-style skipping from precomputed [`SkipTables`].

pub mod fjs;
pub mod generate;
pub mod geometry;
pub mod online;
pub mod patterns;
pub mod pta;
pub mod skip;
pub mod word;

pub use fjs::{match_fjs, FjsMatcher, FjsOptions, KmpMode};
pub use generate::{generate_word, WordSpec};
pub use geometry::{Polyhedron, Rational, Region, Variable, VariableNames};
pub use online::{match_online, MatchStats, OnlineMatcher};
pub use patterns::builtin;
pub use pta::{parse_pta, Pta, PtaError};
pub use skip::{compute_tables, SkipError, SkipTables, TableOptions, TablesJson};
pub use word::{parse_word, Event, TimedWord, WordError, WordReader};
