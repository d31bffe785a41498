//! Subcommand bodies. Each writes its primary output to `out`.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use log::{info, warn};

use ptpm_core::patterns::{builtin_source, word_alphabet, BENCHMARK_NAMES, BUILTIN_NAMES};
use ptpm_core::{builtin, generate_word, Region, WordSpec};

use crate::bench::{bench_pattern, BenchOptions, CSV_HEADER};
use crate::cli::{Command, TableArgs};
use crate::config::RunConfig;
use crate::differential::{check_pattern, persist};
use crate::engine::{compute, ensure_satisfiable, load_pattern, load_tables, open_word, run_mode};
use crate::error::{CliError, Result};
use crate::output::render;

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Match { .. } => cmd_match(&command.run_config().expect("match command"), out),
        Command::Tables { pattern, output, table } => cmd_tables(pattern, output.as_deref(), table, out),
        Command::Bench { patterns, length, seed, repeats, output, table } => {
            let options =
                BenchOptions { lengths: length.clone(), seed: *seed, repeats: *repeats, ..BenchOptions::default() };
            cmd_bench(patterns, &options, table, output.as_deref(), out)
        }
        Command::Gen { alphabet, pattern, length, seed, min_gap, max_gap, resolution, output } => {
            let alphabet = match pattern {
                Some(name) => word_alphabet(name),
                None => alphabet.clone(),
            };
            if *min_gap == 0 || min_gap > max_gap || *resolution == 0 {
                return Err(CliError::input("gaps need 1 <= min-gap <= max-gap and a positive resolution"));
            }
            if alphabet.is_empty() && *length > 0 {
                return Err(CliError::input("empty alphabet"));
            }
            let spec = WordSpec {
                alphabet,
                length: *length,
                min_gap: *min_gap,
                max_gap: *max_gap,
                resolution: *resolution,
                seed: *seed,
            };
            write_to(output.as_deref(), &generate_word(&spec).to_text(), out)
        }
        Command::Patterns { name } => cmd_patterns(name.as_deref(), out),
        Command::Diff { patterns, seeds, max_length, out: dir, table } => {
            cmd_diff(patterns, *seeds, *max_length, dir, table, out)
        }
    }
}

fn write_to(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Internal(format!("{}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

pub fn cmd_match(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let pta = load_pattern(&config.pattern)?;
    ensure_satisfiable(&pta)?;
    let mode = config.mode();
    if config.quick_search && !mode.quick_search {
        warn!("--quick-search only applies to skipping algorithms; ignored");
    }
    let tables = if mode.needs_tables() {
        Some(load_tables(&pta, config.tables.as_deref(), config.budget, config.n_max)?)
    } else {
        None
    };
    let events = open_word(config.word.as_deref(), config.perturb)?;
    let started = Instant::now();
    let mut region = Region::empty();
    let stats = run_mode(&pta, tables.as_ref(), mode, config.horizon.as_ref(), events, &mut |p| region.add(p))?;
    info!(
        "{mode}: {} trials, {} configurations, {} disjuncts in {:?}",
        stats.trials,
        stats.configurations,
        stats.disjuncts,
        started.elapsed()
    );
    out.write_all(render(&region, &pta, config.format).as_bytes())?;
    Ok(())
}

pub fn cmd_tables(pattern: &str, output: Option<&Path>, table: &TableArgs, out: &mut dyn Write) -> Result<()> {
    let pta = load_pattern(pattern)?;
    ensure_satisfiable(&pta)?;
    let tables = compute(&pta, table.budget, table.n_max)?;
    let mut text =
        serde_json::to_string_pretty(&tables.to_json(&pta)).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    write_to(output, &text, out)
}

pub fn cmd_bench(
    patterns: &[String],
    options: &BenchOptions,
    table: &TableArgs,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let mut csv = format!("{CSV_HEADER}\n");
    for name in patterns {
        let pta = load_pattern(name)?;
        ensure_satisfiable(&pta)?;
        let started = Instant::now();
        let tables = compute(&pta, table.budget, table.n_max)?;
        let tables_time = started.elapsed();
        for row in bench_pattern(name, &pta, &tables, tables_time, options) {
            info!("{} n={} {}: {:?}, {} trials", row.pattern, row.length, row.mode, row.median, row.stats.trials);
            csv.push_str(&row.csv());
            csv.push('\n');
        }
    }
    write_to(output, &csv, out)
}

pub fn cmd_patterns(name: Option<&str>, out: &mut dyn Write) -> Result<()> {
    match name {
        None => {
            for name in BUILTIN_NAMES {
                let pta = builtin(name).expect("listed builtin");
                let n = pta.shortest_untimed_accepting().unwrap_or(0);
                writeln!(
                    out,
                    "{name:<14} clocks={} params={} locations={} edges={} N={n}",
                    pta.clocks.len(),
                    pta.params.len(),
                    pta.locations.len(),
                    pta.edges.len()
                )?;
            }
            Ok(())
        }
        Some(name) => {
            let pta = builtin(name).ok_or_else(|| CliError::input(format!("unknown builtin pattern `{name}`")))?;
            // parametric builtins print their authored source; valuated ones the canonical form
            let text = builtin_source(name).map_or_else(|| pta.to_text(), str::to_string);
            Ok(out.write_all(text.as_bytes())?)
        }
    }
}

pub fn cmd_diff(
    patterns: &[String],
    seeds: u64,
    max_length: usize,
    dir: &Path,
    table: &TableArgs,
    out: &mut dyn Write,
) -> Result<()> {
    let names: Vec<String> =
        if patterns.is_empty() { BENCHMARK_NAMES.iter().map(|s| s.to_string()).collect() } else { patterns.to_vec() };
    let mut failures = 0;
    for name in &names {
        let pta = load_pattern(name)?;
        ensure_satisfiable(&pta)?;
        let tables = compute(&pta, table.budget, table.n_max)?;
        let report = check_pattern(name, &pta, &tables, seeds, max_length);
        for cx in &report.counterexamples {
            let path = persist(dir, cx)?;
            writeln!(out, "{name}: {} disagrees, minimized word in {}", cx.mode, path.display())?;
        }
        failures += report.counterexamples.len();
        writeln!(out, "{name}: {} words, {} counterexamples", report.instances, report.counterexamples.len())?;
    }
    if failures > 0 {
        return Err(CliError::Internal(format!("{failures} disagreements between matching modes")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Algo, Format, Mode};

    fn run(config: &RunConfig) -> Result<String> {
        let mut out = Vec::new();
        cmd_match(config, &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    fn fig3_config(dir: &Path) -> RunConfig {
        let word = dir.join("fig3.word");
        std::fs::write(&word, "a 0.7\na 2.0\na 4.1\n").unwrap();
        let mut config = RunConfig::new("fig3");
        config.word = Some(word);
        config
    }

    #[test]
    fn fig3_modes_print_identical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = fig3_config(dir.path());
        let reference = run(&config).unwrap();
        assert_eq!(reference, "1*t >= 7/10\n1*t < 1\n1*p + 1*t > 41/10\n1*t' > 41/10\n1*t' < 51/10\n");
        for mode in Mode::ALL {
            config.algo = mode.algo;
            config.quick_search = mode.quick_search;
            assert_eq!(run(&config).unwrap(), reference, "{mode}");
        }
    }

    #[test]
    fn tables_file_is_reused_and_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fig3.tables");
        let args = TableArgs { budget: 100, n_max: None };
        cmd_tables("fig3", Some(&path), &args, &mut Vec::new()).unwrap();
        let first = std::fs::read(&path).unwrap();
        cmd_tables("fig3", Some(&path), &args, &mut Vec::new()).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), first);

        let mut config = fig3_config(dir.path());
        config.algo = Algo::KmpParam;
        config.tables = Some(path.clone());
        assert!(run(&config).unwrap().contains("1*t' < 51/10"));
        config.pattern = "gear".into();
        assert_eq!(run(&config).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = fig3_config(dir.path());
        config.pattern = dir.path().join("missing.pta").display().to_string();
        assert_eq!(run(&config).unwrap_err().exit_code(), 2);

        let dead = dir.path().join("dead.pta");
        std::fs::write(&dead, "clocks: x\nparams:\nloc a initial\nloc b\nloc f accepting\nedge b -> f on $\n").unwrap();
        config.pattern = dead.display().to_string();
        assert_eq!(run(&config).unwrap_err().exit_code(), 3);
        let err = cmd_tables(&config.pattern, None, &TableArgs { budget: 1, n_max: None }, &mut Vec::new());
        assert_eq!(err.unwrap_err().exit_code(), 3);

        let mut config = fig3_config(dir.path());
        std::fs::write(config.word.as_ref().unwrap(), "a 2\na 1\n").unwrap();
        assert_eq!(run(&config).unwrap_err().exit_code(), 2);
        config.perturb = true;
        std::fs::write(config.word.as_ref().unwrap(), "a 1\na 1\n").unwrap();
        assert!(run(&config).is_ok());
    }

    #[test]
    fn json_output_carries_hash() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = fig3_config(dir.path());
        config.format = Format::Json;
        let text = run(&config).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["pattern_hash"], builtin("fig3").unwrap().content_hash());
        assert_eq!(value["disjuncts"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn listing_and_source() {
        let mut out = Vec::new();
        cmd_patterns(None, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), BUILTIN_NAMES.len());
        assert!(text.lines().next().unwrap().contains("N=2"));
        let mut out = Vec::new();
        cmd_patterns(Some("gear-np"), &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().contains("x < 2"));
        assert_eq!(cmd_patterns(Some("nope"), &mut Vec::new()).unwrap_err().exit_code(), 2);
    }
}
