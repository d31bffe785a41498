//! Online parametric timed pattern matching without skipping.

use std::collections::HashMap;

use crate::geometry::{LinearExpr, LinearInequality, Polyhedron, Rational, Region, Variable};
use crate::pta::{Atom, Bound, ClockId, Edge, Label, LocationId, Pta};
use crate::word::{Event, TimedWord};

/// Latest reset of a clock: the match start `t`, or an absolute time.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ResetValue {
    Start,
    At(Rational),
}

pub type ResetMap = Vec<ResetValue>;

/// `ρ∅`: no clock reset since the match start.
pub fn initial_resets(clocks: usize) -> ResetMap {
    vec![ResetValue::Start; clocks]
}

/// `reset(ρ, R, τ)`.
pub fn apply_reset(resets: &ResetMap, clocks: &[ClockId], now: &Rational) -> ResetMap {
    let mut out = resets.clone();
    for &c in clocks {
        out[c] = ResetValue::At(now.clone());
    }
    out
}

/// A time point: a concrete timestamp or the match end `t'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instant {
    At(Rational),
    End,
}

impl Instant {
    fn expr(&self) -> LinearExpr {
        match self {
            Instant::At(tau) => LinearExpr::constant(tau.clone()),
            Instant::End => LinearExpr::var(Variable::End),
        }
    }
}

fn clock_value(reset: &ResetValue, now: &Instant) -> LinearExpr {
    let since = match reset {
        ResetValue::Start => LinearExpr::var(Variable::Start),
        ResetValue::At(r) => LinearExpr::constant(r.clone()),
    };
    now.expr() - since
}

/// `eval(ρ, τ) = ⋀ₓ x = τ − ρ(x)`.
pub fn eval_constraint(resets: &ResetMap, now: &Instant) -> Polyhedron {
    Polyhedron::from_rows(
        resets.iter().enumerate().map(|(x, r)| LinearExpr::var(Variable::Clock(x as u32)).equals(clock_value(r, now))),
    )
}

/// `g ∧ eval(ρ, τ)` with the clocks already eliminated.
pub fn guard_at(guard: &[Atom], resets: &ResetMap, now: &Instant) -> Vec<LinearInequality> {
    guard
        .iter()
        .map(|atom| {
            let bound = match &atom.bound {
                Bound::Const(c) => LinearExpr::constant(c.clone()),
                Bound::Param(p) => LinearExpr::var(Variable::Param(*p as u32)),
            };
            clock_value(&resets[atom.clock], now).cmp_op(atom.op, bound)
        })
        .collect()
}

/// Symbolic matcher state `(ℓ, ρ, C)`, with `C` over parameters and `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub location: LocationId,
    pub resets: ResetMap,
    pub constraint: Polyhedron,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MatchStats {
    /// Matching trials started (one per candidate start interval).
    pub trials: usize,
    /// Configurations created by discrete steps.
    pub configurations: usize,
    /// Match polyhedra emitted.
    pub disjuncts: usize,
}

/// Shared stepping logic over a fixed pattern.
pub struct Stepper<'a> {
    pta: &'a Pta,
    terminal: Vec<Vec<&'a Edge>>,
    observable: Vec<HashMap<usize, Vec<&'a Edge>>>,
    satisfiable: bool,
}

impl<'a> Stepper<'a> {
    pub fn new(pta: &'a Pta) -> Self {
        let mut terminal = vec![Vec::new(); pta.locations.len()];
        let mut observable = vec![HashMap::new(); pta.locations.len()];
        for edge in &pta.edges {
            match edge.label {
                Label::Terminal if pta.is_accepting(edge.target) => terminal[edge.source].push(edge),
                Label::Action(a) => observable[edge.source].entry(a).or_insert_with(Vec::new).push(edge),
                _ => {}
            }
        }
        Stepper { pta, terminal, observable, satisfiable: pta.shortest_untimed_accepting().is_some() }
    }

    pub fn pta(&self) -> &'a Pta {
        self.pta
    }

    /// False when no accepting location is reachable; matching then emits nothing.
    pub fn satisfiable(&self) -> bool {
        self.satisfiable
    }

    /// `(ℓ₀, ρ∅, lo ≤ t < hi)` with every parameter nonnegative.
    pub fn initial_configuration(&self, lo: &Rational, hi: Option<&Rational>) -> Configuration {
        let t = || LinearExpr::var(Variable::Start);
        let mut rows = vec![t().ge(LinearExpr::constant(lo.clone()))];
        if let Some(hi) = hi {
            rows.push(t().lt(LinearExpr::constant(hi.clone())));
        }
        for p in self.pta.param_vars() {
            rows.push(LinearExpr::var(p).ge(LinearExpr::zero()));
        }
        Configuration {
            location: self.pta.initial,
            resets: initial_resets(self.pta.clocks.len()),
            constraint: Polyhedron::from_rows(rows),
        }
    }

    /// Tries every `$` edge from `conf` with `lo < t' ≤ hi` (or `lo < t'` when unbounded).
    pub fn insert_terminal(
        &self,
        conf: &Configuration,
        lo: &Rational,
        hi: Option<&Rational>,
        sink: &mut dyn FnMut(Polyhedron),
    ) -> usize {
        let mut emitted = 0;
        for edge in &self.terminal[conf.location] {
            let te = || LinearExpr::var(Variable::End);
            let mut rows = vec![te().gt(LinearExpr::constant(lo.clone())), LinearExpr::var(Variable::Start).lt(te())];
            if let Some(hi) = hi {
                rows.push(te().le(LinearExpr::constant(hi.clone())));
            }
            rows.extend(guard_at(&edge.guard, &conf.resets, &Instant::End));
            let poly = conf.constraint.conjoin_rows(rows);
            if !poly.is_empty() {
                sink(poly);
                emitted += 1;
            }
        }
        emitted
    }

    /// Consumes one event from every configuration.
    pub fn step(&self, confs: &[Configuration], event: &Event) -> Vec<Configuration> {
        let mut out = ConfigurationPool::default();
        let Some(action) = self.pta.action_id(&event.action) else {
            return Vec::new();
        };
        let now = Instant::At(event.timestamp.clone());
        for conf in confs {
            let Some(edges) = self.observable[conf.location].get(&action) else {
                continue;
            };
            for edge in edges {
                let constraint = conf.constraint.conjoin_rows(guard_at(&edge.guard, &conf.resets, &now));
                if constraint.is_empty() {
                    continue;
                }
                out.insert(Configuration {
                    location: edge.target,
                    resets: apply_reset(&conf.resets, &edge.resets, &event.timestamp),
                    constraint,
                });
            }
        }
        out.into_vec()
    }
}

/// Configurations keyed by `(ℓ, ρ)`; a constraint included in a sibling is dropped.
#[derive(Default)]
pub struct ConfigurationPool {
    order: Vec<(LocationId, ResetMap)>,
    groups: HashMap<(LocationId, ResetMap), Vec<Polyhedron>>,
}

impl ConfigurationPool {
    pub fn insert(&mut self, conf: Configuration) {
        let key = (conf.location, conf.resets);
        let group = match self.groups.get_mut(&key) {
            Some(g) => g,
            None => {
                self.order.push(key.clone());
                self.groups.entry(key).or_default()
            }
        };
        if group.iter().any(|c| c.includes(&conf.constraint)) {
            return;
        }
        group.retain(|c| !conf.constraint.includes(c));
        group.push(conf.constraint);
    }

    pub fn into_vec(mut self) -> Vec<Configuration> {
        let mut out = Vec::new();
        for key in self.order {
            if let Some(group) = self.groups.remove(&key) {
                for constraint in group {
                    out.push(Configuration { location: key.0, resets: key.1.clone(), constraint });
                }
            }
        }
        out
    }
}

/// Incremental matcher: feed events, receive match polyhedra as soon as they are final.
pub struct OnlineMatcher<'a> {
    stepper: Stepper<'a>,
    confs: Vec<Configuration>,
    prev: Rational,
    stats: MatchStats,
}

impl<'a> OnlineMatcher<'a> {
    pub fn new(pta: &'a Pta) -> Self {
        OnlineMatcher {
            stepper: Stepper::new(pta),
            confs: Vec::new(),
            prev: Rational::default(),
            stats: MatchStats::default(),
        }
    }

    pub fn live_configurations(&self) -> &[Configuration] {
        &self.confs
    }

    pub fn feed(&mut self, event: &Event, sink: &mut dyn FnMut(Polyhedron)) {
        if !self.stepper.satisfiable() {
            self.prev = event.timestamp.clone();
            return;
        }
        let tau = &event.timestamp;
        self.confs.push(self.stepper.initial_configuration(&self.prev, Some(tau)));
        self.stats.trials += 1;
        for conf in &self.confs {
            self.stats.disjuncts += self.stepper.insert_terminal(conf, &self.prev, Some(tau), sink);
        }
        self.confs = self.stepper.step(&self.confs, event);
        self.stats.configurations += self.confs.len();
        self.prev = tau.clone();
    }

    /// End of stream: matches with `t' > τ_|w|`, truncated at `horizon` if given.
    pub fn finish(mut self, horizon: Option<&Rational>, sink: &mut dyn FnMut(Polyhedron)) -> MatchStats {
        if !self.stepper.satisfiable() {
            return self.stats;
        }
        self.confs.push(self.stepper.initial_configuration(&self.prev, None));
        self.stats.trials += 1;
        for conf in &self.confs {
            self.stats.disjuncts += self.stepper.insert_terminal(conf, &self.prev, horizon, sink);
        }
        self.stats
    }
}

/// Match set of a whole word.
pub fn match_online(pta: &Pta, word: &TimedWord) -> (Region, MatchStats) {
    let mut region = Region::empty();
    let mut sink = |p: Polyhedron| region.add(p);
    let mut matcher = OnlineMatcher::new(pta);
    for event in word.events() {
        matcher.feed(event, &mut sink);
    }
    let stats = matcher.finish(None, &mut sink);
    (region, stats)
}
