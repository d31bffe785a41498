//! Concrete acceptance of timed words by parameter-free automata.
//!
//! Delays are fixed by the word's timestamps, so runs are simulated exactly
//! with reset times as rationals. Silent edges may fire at any instant
//! between two events; the candidate instants are the breakpoints
//! `τ_j − c` of every later guard plus the midpoints between them, which is
//! exact for runs with at most one silent edge per gap.

use std::collections::HashSet;

use super::{Bound, Edge, Label, LocationId, Pta, TERMINAL};
use crate::geometry::Rational;

/// A word letter: an observable action by name, or the terminal `$`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Action(String),
    Terminal,
}

impl Symbol {
    pub fn from_name(name: &str) -> Symbol {
        if name == TERMINAL {
            Symbol::Terminal
        } else {
            Symbol::Action(name.to_string())
        }
    }
}

type State = (LocationId, Vec<Rational>);

fn guard_holds(edge: &Edge, resets: &[Rational], now: &Rational) -> bool {
    edge.guard.iter().all(|atom| {
        let value = now - &resets[atom.clock];
        match &atom.bound {
            Bound::Const(c) => atom.op.compare(&value, c),
            Bound::Param(_) => panic!("accepts requires a parameter-free automaton"),
        }
    })
}

fn fire(edge: &Edge, resets: &[Rational], now: &Rational) -> Vec<Rational> {
    let mut next = resets.to_vec();
    for &c in &edge.resets {
        next[c] = now.clone();
    }
    next
}

fn constants(ta: &Pta) -> Vec<Rational> {
    let mut out: Vec<Rational> = vec![Rational::default()];
    for edge in &ta.edges {
        for atom in &edge.guard {
            if let Bound::Const(c) = &atom.bound {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
        }
    }
    out
}

/// Instants in `[lo, hi]` at which a silent edge may usefully fire.
fn candidate_instants(lo: &Rational, hi: &Rational, later: &[Rational], consts: &[Rational]) -> Vec<Rational> {
    let mut points = vec![lo.clone(), hi.clone()];
    for tau in later {
        for c in consts {
            let p = tau - c;
            if &p > lo && &p < hi {
                points.push(p);
            }
        }
    }
    points.sort();
    points.dedup();
    let two = Rational::from_integer(2.into());
    let mids: Vec<Rational> = points.windows(2).map(|w| (&w[0] + &w[1]) / &two).collect();
    points.extend(mids);
    points
}

fn silent_closure(
    ta: &Pta,
    states: HashSet<State>,
    lo: &Rational,
    hi: &Rational,
    later: &[Rational],
    consts: &[Rational],
) -> HashSet<State> {
    if !ta.edges.iter().any(|e| e.label == Label::Silent) {
        return states;
    }
    let instants = candidate_instants(lo, hi, later, consts);
    let mut seen = states.clone();
    let mut frontier: Vec<State> = states.into_iter().collect();
    while let Some((loc, resets)) = frontier.pop() {
        for edge in ta.outgoing(loc).filter(|e| e.label == Label::Silent) {
            for now in &instants {
                // a silent edge cannot fire before the latest reset it observed
                if resets.iter().any(|r| r > now) {
                    continue;
                }
                if guard_holds(edge, &resets, now) {
                    let next = (edge.target, fire(edge, &resets, now));
                    if seen.insert(next.clone()) {
                        frontier.push(next);
                    }
                }
            }
        }
    }
    seen
}

/// Whether a parameter-free automaton accepts the timed word.
///
/// Timestamps must be nondecreasing; the run starts at time 0 with all clocks zero.
pub fn accepts(ta: &Pta, word: &[(Symbol, Rational)]) -> bool {
    assert!(ta.params.is_empty(), "accepts requires a parameter-free automaton");
    let consts = constants(ta);
    let zero = Rational::default();
    let mut states: HashSet<State> = HashSet::from([(ta.initial, vec![zero.clone(); ta.clocks.len()])]);
    let mut prev = zero;
    let times: Vec<Rational> = word.iter().map(|(_, t)| t.clone()).collect();
    for (k, (symbol, now)) in word.iter().enumerate() {
        states = silent_closure(ta, states, &prev, now, &times[k..], &consts);
        let label = match symbol {
            Symbol::Terminal => Some(Label::Terminal),
            Symbol::Action(name) => ta.action_id(name).map(Label::Action),
        };
        let Some(label) = label else {
            return false;
        };
        let mut next = HashSet::new();
        for (loc, resets) in &states {
            for edge in ta.outgoing(*loc).filter(|e| e.label == label) {
                if guard_holds(edge, resets, now) {
                    next.insert((edge.target, fire(edge, resets, now)));
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        states = next;
        prev = now.clone();
    }
    let horizon = consts.iter().max().cloned().unwrap_or_default() + &prev + Rational::from_integer(1.into());
    states = silent_closure(ta, states, &prev, &horizon, std::slice::from_ref(&horizon), &consts);
    states.iter().any(|(loc, _)| ta.is_accepting(*loc))
}
