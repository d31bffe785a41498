//! Matching with Quick-Search lookahead and KMP-style skipping between trials.

use std::collections::{HashMap, VecDeque};
use std::convert::Infallible;

use crate::geometry::{Polyhedron, Rational, Region, Variable};
use crate::online::{Configuration, MatchStats, Stepper};
use crate::pta::{LocationId, Pta};
use crate::skip::SkipTables;
use crate::word::{Event, TimedWord};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KmpMode {
    /// `Δ_KMP(ℓ, V)`: inclusion tests against `V_{ℓ,n}`.
    #[default]
    Parametric,
    /// `Δ′_KMP(ℓ)`: a table lookup.
    NonParametric,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FjsOptions {
    pub mode: KmpMode,
    pub quick_search: bool,
}

/// Events from a fallible stream, kept from the current trial start onward.
struct Lookahead<I> {
    source: I,
    buffer: VecDeque<Event>,
    /// 1-based index of `buffer[0]`.
    base: usize,
    /// `τ_{base−1}`.
    before: Rational,
    exhausted: bool,
}

impl<I, E> Lookahead<I>
where
    I: Iterator<Item = Result<Event, E>>,
{
    fn new(source: I) -> Self {
        Lookahead { source, buffer: VecDeque::new(), base: 1, before: Rational::default(), exhausted: false }
    }

    /// Event `k` (1-based), reading ahead as needed.
    fn get(&mut self, k: usize) -> Result<Option<&Event>, E> {
        debug_assert!(k >= self.base, "event {k} already released");
        while !self.exhausted && self.base + self.buffer.len() <= k {
            match self.source.next() {
                Some(ev) => self.buffer.push_back(ev?),
                None => self.exhausted = true,
            }
        }
        Ok(self.buffer.get(k - self.base))
    }

    fn exists(&mut self, k: usize) -> Result<bool, E> {
        Ok(self.get(k)?.is_some())
    }

    /// `τ_k` for `k ≥ base − 1`.
    fn tau(&mut self, k: usize) -> Result<Option<Rational>, E> {
        if k + 1 == self.base {
            return Ok(Some(self.before.clone()));
        }
        Ok(self.get(k)?.map(|e| e.timestamp.clone()))
    }

    /// Drops events before `k`, remembering `τ_{k−1}`.
    fn release_before(&mut self, k: usize) {
        while self.base < k {
            match self.buffer.pop_front() {
                Some(ev) => {
                    self.before = ev.timestamp;
                    self.base += 1;
                }
                None => break,
            }
        }
    }

    /// Index and timestamp of the last event, after draining the source.
    fn last(&mut self) -> Result<(usize, Rational), E> {
        while !self.exhausted {
            let k = self.base + self.buffer.len();
            self.get(k)?;
            self.release_before(self.base + self.buffer.len().saturating_sub(1));
        }
        let last = self.base + self.buffer.len() - 1;
        let tau = self.buffer.back().map_or_else(|| self.before.clone(), |e| e.timestamp.clone());
        Ok((last, tau))
    }
}

/// Streaming matcher with skipping. Emits each match polyhedron once its trial completes.
pub struct FjsMatcher<'a> {
    stepper: Stepper<'a>,
    tables: &'a SkipTables,
    options: FjsOptions,
    horizon: Option<Rational>,
    cache: HashMap<(LocationId, Vec<Polyhedron>), usize>,
    stats: MatchStats,
}

impl<'a> FjsMatcher<'a> {
    pub fn new(pta: &'a Pta, tables: &'a SkipTables, options: FjsOptions) -> Self {
        FjsMatcher {
            stepper: Stepper::new(pta),
            tables,
            options,
            horizon: None,
            cache: HashMap::new(),
            stats: MatchStats::default(),
        }
    }

    /// Bounds `t'` for matches extending past the last event.
    pub fn with_horizon(mut self, horizon: Option<Rational>) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn run<I, E>(mut self, events: I, sink: &mut dyn FnMut(Polyhedron)) -> Result<MatchStats, E>
    where
        I: Iterator<Item = Result<Event, E>>,
    {
        if !self.stepper.satisfiable() {
            events.into_iter().try_for_each(|e| e.map(drop))?;
            return Ok(self.stats);
        }
        let mut word = Lookahead::new(events);
        let n = self.tables.n;
        let nth = self.tables.nth_letters();
        // a trial at i needs events i..i+N−1; with N = 0 it still needs event i
        let reach = n.max(1) - 1;
        let mut i = 1;
        'scan: while word.exists(i + reach)? {
            if self.options.quick_search && n >= 1 {
                loop {
                    let letter = &word.get(i + n - 1)?.expect("checked").action;
                    if nth.contains(letter) {
                        break;
                    }
                    let Some(next) = word.get(i + n)? else {
                        break 'scan;
                    };
                    i += self.tables.delta_qs(&next.action);
                    if !word.exists(i + reach)? {
                        break 'scan;
                    }
                }
            }
            word.release_before(i);
            let frontier = self.trial(&mut word, i, sink)?;
            i += self.kmp_skip(&frontier);
        }
        let (_, last) = word.last()?;
        self.stats.trials += 1;
        let init = self.stepper.initial_configuration(&last, None);
        self.stats.disjuncts += self.stepper.insert_terminal(&init, &last, self.horizon.as_ref(), sink);
        Ok(self.stats)
    }

    /// Tries every match start in `[τ_{i−1}, τ_i)`; returns the configurations at the deepest index reached.
    fn trial<I, E>(
        &mut self,
        word: &mut Lookahead<I>,
        i: usize,
        sink: &mut dyn FnMut(Polyhedron),
    ) -> Result<Vec<Configuration>, E>
    where
        I: Iterator<Item = Result<Event, E>>,
    {
        self.stats.trials += 1;
        let lo = word.tau(i - 1)?.expect("trial start is buffered");
        let hi = word.tau(i)?.expect("trial needs event i");
        let mut confs = vec![self.stepper.initial_configuration(&lo, Some(&hi))];
        let mut frontier = confs.clone();
        let mut k = i;
        loop {
            let prev = word.tau(k - 1)?.expect("buffered");
            let Some(event) = word.get(k)?.cloned() else {
                for c in &confs {
                    self.stats.disjuncts += self.stepper.insert_terminal(c, &prev, self.horizon.as_ref(), sink);
                }
                break;
            };
            for c in &confs {
                self.stats.disjuncts += self.stepper.insert_terminal(c, &prev, Some(&event.timestamp), sink);
            }
            let next = self.stepper.step(&confs, &event);
            if next.is_empty() {
                break;
            }
            self.stats.configurations += next.len();
            confs = next;
            frontier.clone_from(&confs);
            k += 1;
        }
        Ok(frontier)
    }

    fn kmp_skip(&mut self, frontier: &[Configuration]) -> usize {
        match self.options.mode {
            KmpMode::NonParametric => frontier.iter().map(|c| self.tables.delta_kmp_np(c.location)).max().unwrap_or(1),
            KmpMode::Parametric => {
                let mut by_location: HashMap<LocationId, Region> = HashMap::new();
                for c in frontier {
                    let v = c.constraint.project(Variable::is_param).minimize();
                    by_location.entry(c.location).or_default().add_absorbing(v);
                }
                let mut skip = 1;
                for (loc, region) in by_location {
                    let mut key: Vec<Polyhedron> = region.disjuncts().to_vec();
                    key.sort_by_key(|p| format!("{p:?}"));
                    let tables = self.tables;
                    let d = *self.cache.entry((loc, key)).or_insert_with(|| tables.delta_kmp(loc, &region));
                    skip = skip.max(d);
                }
                skip
            }
        }
    }
}

/// Match set of a whole word with skipping.
pub fn match_fjs(pta: &Pta, tables: &SkipTables, word: &TimedWord, options: FjsOptions) -> (Region, MatchStats) {
    let mut region = Region::empty();
    let events = word.events().iter().cloned().map(Ok::<_, Infallible>);
    let stats = match FjsMatcher::new(pta, tables, options).run(events, &mut |p| region.add(p)) {
        Ok(stats) => stats,
        Err(never) => match never {},
    };
    (region, stats)
}
