use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;

use ptpm_core::skip::DEFAULT_BUDGET;
use ptpm_core::{FjsOptions, KmpMode, Rational};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Try every start position.
    #[default]
    None,
    /// Skip by parametric KMP values.
    KmpParam,
    /// Skip by the parameter-independent KMP table.
    KmpNonparam,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// A matcher selection: algorithm plus the Quick-Search lookahead switch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mode {
    pub algo: Algo,
    pub quick_search: bool,
}

impl Mode {
    /// The five distinct modes; Quick-Search only applies to skipping algorithms.
    pub const ALL: [Mode; 5] = [
        Mode { algo: Algo::None, quick_search: false },
        Mode { algo: Algo::KmpParam, quick_search: false },
        Mode { algo: Algo::KmpParam, quick_search: true },
        Mode { algo: Algo::KmpNonparam, quick_search: false },
        Mode { algo: Algo::KmpNonparam, quick_search: true },
    ];

    pub fn fjs_options(self) -> Option<FjsOptions> {
        let mode = match self.algo {
            Algo::None => return None,
            Algo::KmpParam => KmpMode::Parametric,
            Algo::KmpNonparam => KmpMode::NonParametric,
        };
        Some(FjsOptions { mode, quick_search: self.quick_search })
    }

    pub fn needs_tables(self) -> bool {
        self.algo != Algo::None
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.algo {
            Algo::None => "none",
            Algo::KmpParam => "kmp-param",
            Algo::KmpNonparam => "kmp-nonparam",
        };
        if self.quick_search && self.algo != Algo::None {
            write!(f, "{name}+qs")
        } else {
            f.write_str(name)
        }
    }
}

/// Everything `match` needs.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Pattern file, or the name of a builtin pattern.
    pub pattern: String,
    /// Word file; `None` reads standard input.
    pub word: Option<PathBuf>,
    pub algo: Algo,
    pub quick_search: bool,
    pub tables: Option<PathBuf>,
    pub format: Format,
    pub horizon: Option<Rational>,
    pub perturb: bool,
    pub budget: usize,
    pub n_max: Option<usize>,
}

impl RunConfig {
    pub fn new(pattern: impl Into<String>) -> Self {
        RunConfig {
            pattern: pattern.into(),
            word: None,
            algo: Algo::None,
            quick_search: false,
            tables: None,
            format: Format::Text,
            horizon: None,
            perturb: false,
            budget: DEFAULT_BUDGET,
            n_max: None,
        }
    }

    pub fn mode(&self) -> Mode {
        Mode { algo: self.algo, quick_search: self.quick_search && self.algo != Algo::None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_labels() {
        let labels: Vec<String> = Mode::ALL.iter().map(Mode::to_string).collect();
        assert_eq!(labels, ["none", "kmp-param", "kmp-param+qs", "kmp-nonparam", "kmp-nonparam+qs"]);
    }

    #[test]
    fn quick_search_needs_skipping() {
        let mut config = RunConfig::new("gear");
        config.quick_search = true;
        assert_eq!(config.mode(), Mode { algo: Algo::None, quick_search: false });
        config.algo = Algo::KmpNonparam;
        assert!(config.mode().fjs_options().unwrap().quick_search);
    }
}
