//! Loading inputs and dispatching to a matcher.

use std::convert::Infallible;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use log::{debug, info};

use ptpm_core::pta::parse_pta_json;
use ptpm_core::{
    builtin, compute_tables, parse_pta, Event, FjsMatcher, MatchStats, OnlineMatcher, Polyhedron, Pta, Rational,
    Region, SkipTables, TableOptions, TablesJson, TimedWord, WordReader,
};

use crate::config::Mode;
use crate::error::{CliError, Result};

/// Reads a pattern file (text, or JSON by `.json` extension), falling back to builtin names.
pub fn load_pattern(spec: &str) -> Result<Pta> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{spec}: {e}")))?;
        let pta =
            if path.extension().is_some_and(|e| e == "json") { parse_pta_json(&text)? } else { parse_pta(&text)? };
        return Ok(pta);
    }
    builtin(spec).ok_or_else(|| CliError::input(format!("{spec}: no such pattern file or builtin pattern")))
}

/// Fails with the unsatisfiable exit status when no accepting location is reachable.
pub fn ensure_satisfiable(pta: &Pta) -> Result<()> {
    match pta.shortest_untimed_accepting() {
        Some(_) => Ok(()),
        None => Err(CliError::Unsatisfiable("no accepting location is reachable".into())),
    }
}

pub fn compute(pta: &Pta, budget: usize, n_max: Option<usize>) -> Result<SkipTables> {
    let started = std::time::Instant::now();
    let tables = compute_tables(pta, TableOptions { budget, n_max })?;
    info!("skip tables: N = {}, n_max = {}, {:?}", tables.n, tables.n_max, started.elapsed());
    Ok(tables)
}

pub fn read_tables(pta: &Pta, path: &Path) -> Result<SkipTables> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let json: TablesJson =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(SkipTables::from_json(&json, pta)?)
}

/// Tables from `path` when given, computed otherwise.
pub fn load_tables(pta: &Pta, path: Option<&Path>, budget: usize, n_max: Option<usize>) -> Result<SkipTables> {
    match path {
        Some(p) => {
            debug!("loading skip tables from {}", p.display());
            read_tables(pta, p)
        }
        None => compute(pta, budget, n_max),
    }
}

/// Streams a word from a file, or from standard input when `path` is `None` or `-`.
pub fn open_word(path: Option<&Path>, perturb: bool) -> Result<WordReader<Box<dyn BufRead>>> {
    let reader: Box<dyn BufRead> = match path {
        None => Box::new(BufReader::new(io::stdin())),
        Some(p) if p == Path::new("-") => Box::new(BufReader::new(io::stdin())),
        Some(p) => {
            let file = File::open(p).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
            Box::new(BufReader::new(file))
        }
    };
    Ok(WordReader::new(reader).with_perturb(perturb))
}

/// Runs `mode` over a fallible event stream, handing each match polyhedron to `sink`.
pub fn run_mode<I, E>(
    pta: &Pta,
    tables: Option<&SkipTables>,
    mode: Mode,
    horizon: Option<&Rational>,
    events: I,
    sink: &mut dyn FnMut(Polyhedron),
) -> Result<MatchStats, E>
where
    I: Iterator<Item = Result<Event, E>>,
{
    match mode.fjs_options() {
        None => {
            let mut matcher = OnlineMatcher::new(pta);
            for event in events {
                matcher.feed(&event?, sink);
            }
            Ok(matcher.finish(horizon, sink))
        }
        Some(options) => {
            let tables = tables.expect("skipping modes need tables");
            FjsMatcher::new(pta, tables, options).with_horizon(horizon.cloned()).run(events, sink)
        }
    }
}

/// Whole-word convenience over [`run_mode`].
pub fn match_word(pta: &Pta, tables: Option<&SkipTables>, mode: Mode, word: &TimedWord) -> (Region, MatchStats) {
    let mut region = Region::empty();
    let events = word.events().iter().cloned().map(Ok::<_, Infallible>);
    let stats = match run_mode(pta, tables, mode, None, events, &mut |p| region.add(p)) {
        Ok(stats) => stats,
        Err(never) => match never {},
    };
    (region, stats)
}
