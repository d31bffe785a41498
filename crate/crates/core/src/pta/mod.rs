//! Parametric timed automata: data model, validation and valuation.

mod construct;
mod parse;
mod semantics;

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geometry::{CmpOp, LinearExpr, LinearInequality, Rational, Variable};

pub use construct::{
    prefix_shift, rename_apart, suffix_closure, synchronized_product, without_terminal, ProductAcceptance,
};
pub use parse::{parse_pta, parse_pta_json, pta_to_json, EdgeJson, LocationJson, PtaJson};
pub use semantics::{accepts, Symbol};

pub const TERMINAL: &str = "$";
pub const SILENT: &str = "eps";

pub type LocationId = usize;
pub type ClockId = usize;
pub type ParamId = usize;
pub type ActionId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PtaError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown clock `{0}`")]
    UnknownClock(String),
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("`{0}` is reserved")]
    Reserved(String),
    #[error("no initial location")]
    NoInitial,
    #[error("more than one initial location")]
    MultipleInitial,
    #[error("`$` edge {from} -> {to} must target an accepting location")]
    TerminalToNonAccepting { from: String, to: String },
    #[error("edge {from} -> {to} on `{action}` enters an accepting location; only `$` edges may")]
    ObservableToAccepting { from: String, to: String, action: String },
    #[error("silent transitions are not allowed in patterns")]
    SilentInPattern,
    #[error("parameter valuation has {got} values, expected {expected}")]
    ValuationArity { expected: usize, got: usize },
    #[error("parameter values must be nonnegative")]
    NegativeValuation,
    #[error("invalid JSON pattern: {0}")]
    Json(String),
}

/// Edge label: an observable action, the terminal `$`, or the silent `ε`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Action(ActionId),
    Terminal,
    Silent,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Const(Rational),
    Param(ParamId),
}

/// `clock ⋈ bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub clock: ClockId,
    pub op: CmpOp,
    pub bound: Bound,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: LocationId,
    pub target: LocationId,
    pub label: Label,
    pub guard: Vec<Atom>,
    pub resets: Vec<ClockId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pta {
    /// Observable alphabet Σ; `$` and `ε` are not listed here.
    pub actions: Vec<String>,
    pub locations: Vec<String>,
    pub initial: LocationId,
    pub accepting: BTreeSet<LocationId>,
    pub clocks: Vec<String>,
    pub params: Vec<String>,
    pub edges: Vec<Edge>,
}

impl Pta {
    pub fn add_location(&mut self, name: impl Into<String>) -> LocationId {
        self.locations.push(name.into());
        self.locations.len() - 1
    }

    pub fn add_clock(&mut self, name: impl Into<String>) -> ClockId {
        self.clocks.push(name.into());
        self.clocks.len() - 1
    }

    pub fn add_param(&mut self, name: impl Into<String>) -> ParamId {
        self.params.push(name.into());
        self.params.len() - 1
    }

    /// Id of an observable action, registering it if new.
    pub fn intern_action(&mut self, name: &str) -> ActionId {
        match self.action_id(name) {
            Some(id) => id,
            None => {
                self.actions.push(name.to_string());
                self.actions.len() - 1
            }
        }
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == name)
    }

    pub fn location_id(&self, name: &str) -> Option<LocationId> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn clock_id(&self, name: &str) -> Option<ClockId> {
        self.clocks.iter().position(|c| c == name)
    }

    pub fn param_id(&self, name: &str) -> Option<ParamId> {
        self.params.iter().position(|p| p == name)
    }

    pub fn label_name(&self, label: Label) -> &str {
        match label {
            Label::Action(a) => &self.actions[a],
            Label::Terminal => TERMINAL,
            Label::Silent => SILENT,
        }
    }

    pub fn is_accepting(&self, loc: LocationId) -> bool {
        self.accepting.contains(&loc)
    }

    pub fn outgoing(&self, loc: LocationId) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.source == loc)
    }

    pub fn clock_vars(&self) -> Vec<Variable> {
        (0..self.clocks.len()).map(|i| Variable::Clock(i as u32)).collect()
    }

    pub fn param_vars(&self) -> Vec<Variable> {
        (0..self.params.len()).map(|i| Variable::Param(i as u32)).collect()
    }

    /// The guard as rows over clock and parameter variables.
    pub fn guard_rows(guard: &[Atom]) -> Vec<LinearInequality> {
        guard
            .iter()
            .map(|atom| {
                let lhs = LinearExpr::var(Variable::Clock(atom.clock as u32));
                let rhs = match &atom.bound {
                    Bound::Const(c) => LinearExpr::constant(c.clone()),
                    Bound::Param(p) => LinearExpr::var(Variable::Param(*p as u32)),
                };
                lhs.cmp_op(atom.op, rhs)
            })
            .collect()
    }

    /// `v(A)`: replaces every parameter by its value; the result has no parameters.
    pub fn valuate(&self, values: &[Rational]) -> Result<Pta, PtaError> {
        if values.len() != self.params.len() {
            return Err(PtaError::ValuationArity { expected: self.params.len(), got: values.len() });
        }
        if values.iter().any(|v| *v < Rational::default()) {
            return Err(PtaError::NegativeValuation);
        }
        let mut out = self.clone();
        out.params.clear();
        for edge in &mut out.edges {
            for atom in &mut edge.guard {
                if let Bound::Param(p) = atom.bound {
                    atom.bound = Bound::Const(values[p].clone());
                }
            }
        }
        Ok(out)
    }

    /// `A_ℓ`: same automaton with accepting set `{ℓ}`.
    pub fn restrict_accepting(&self, loc: LocationId) -> Pta {
        let mut out = self.clone();
        out.accepting = BTreeSet::from([loc]);
        out
    }

    /// Checks pattern well-formedness; returns warnings for non-fatal issues.
    pub fn validate_pattern(&self) -> Result<Vec<String>, PtaError> {
        for edge in &self.edges {
            let from = self.locations[edge.source].clone();
            let to = self.locations[edge.target].clone();
            match edge.label {
                Label::Silent => return Err(PtaError::SilentInPattern),
                Label::Terminal if !self.is_accepting(edge.target) => {
                    return Err(PtaError::TerminalToNonAccepting { from, to })
                }
                Label::Action(a) if self.is_accepting(edge.target) => {
                    return Err(PtaError::ObservableToAccepting { from, to, action: self.actions[a].clone() })
                }
                _ => {}
            }
        }
        let reachable = self.reachable_locations();
        let warnings = self
            .accepting
            .iter()
            .filter(|l| !reachable.contains(l))
            .map(|l| format!("accepting location `{}` is unreachable", self.locations[*l]))
            .collect();
        Ok(warnings)
    }

    /// Locations reachable in the untimed graph (guards ignored).
    pub fn reachable_locations(&self) -> BTreeSet<LocationId> {
        let mut seen = BTreeSet::from([self.initial]);
        let mut queue = VecDeque::from([self.initial]);
        while let Some(loc) = queue.pop_front() {
            for edge in self.outgoing(loc) {
                if seen.insert(edge.target) {
                    queue.push_back(edge.target);
                }
            }
        }
        seen
    }

    /// `N`: the number of observable edges on a shortest untimed path to an
    /// accepting location, the final `$` edge excluded.
    pub fn shortest_untimed_accepting(&self) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.locations.len()];
        dist[self.initial] = 0;
        let mut queue = VecDeque::from([self.initial]);
        let mut best: Option<usize> = None;
        while let Some(loc) = queue.pop_front() {
            if self.is_accepting(loc) {
                best = Some(best.map_or(dist[loc], |b: usize| b.min(dist[loc])));
            }
            for edge in self.outgoing(loc) {
                let step = usize::from(matches!(edge.label, Label::Action(_)));
                let d = dist[loc] + step;
                if d < dist[edge.target] {
                    dist[edge.target] = d;
                    // 0-cost edges go to the front to keep the search 0-1 BFS.
                    if step == 0 {
                        queue.push_front(edge.target);
                    } else {
                        queue.push_back(edge.target);
                    }
                }
            }
        }
        best
    }

    /// Canonical text form, parseable by [`parse_pta`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "clocks: {}", self.clocks.join(" "));
        let _ = writeln!(out, "params: {}", self.params.join(" "));
        let _ = writeln!(out, "actions: {}", self.actions.join(" "));
        for (id, name) in self.locations.iter().enumerate() {
            let mut line = format!("loc {name}");
            if id == self.initial {
                line.push_str(" initial");
            }
            if self.is_accepting(id) {
                line.push_str(" accepting");
            }
            let _ = writeln!(out, "{line}");
        }
        for edge in &self.edges {
            let _ = writeln!(out, "{}", self.edge_text(edge));
        }
        out
    }

    pub fn edge_text(&self, edge: &Edge) -> String {
        let mut line = format!(
            "edge {} -> {} on {}",
            self.locations[edge.source],
            self.locations[edge.target],
            self.label_name(edge.label)
        );
        if !edge.guard.is_empty() {
            line.push_str(" when ");
            line.push_str(&self.guard_text(&edge.guard));
        }
        if !edge.resets.is_empty() {
            let names: Vec<&str> = edge.resets.iter().map(|c| self.clocks[*c].as_str()).collect();
            line.push_str(" reset ");
            line.push_str(&names.join(","));
        }
        line
    }

    pub fn guard_text(&self, guard: &[Atom]) -> String {
        guard
            .iter()
            .map(|atom| {
                let bound = match &atom.bound {
                    Bound::Const(c) => crate::geometry::format_rational(c),
                    Bound::Param(p) => self.params[*p].clone(),
                };
                format!("{} {} {}", self.clocks[atom.clock], atom.op, bound)
            })
            .collect::<Vec<_>>()
            .join(" & ")
    }

    /// Hex SHA-256 of the canonical text form.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
