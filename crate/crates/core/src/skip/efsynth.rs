//! Parametric reachability synthesis over the parametric zone graph.

use std::collections::{BTreeSet, VecDeque};

use crate::geometry::{LinearExpr, Polyhedron, Region, Variable};
use crate::pta::{LocationId, Pta};

/// Symbolic states explored before the remaining frontier is speculated reachable.
pub const DEFAULT_BUDGET: usize = 100;

/// A location with a zone over clocks and parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicState {
    pub location: LocationId,
    pub zone: Polyhedron,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Synthesis {
    /// Parameter valuations reaching a target; a superset when `exhausted` is false.
    pub region: Region,
    pub explored: usize,
    /// True when the whole zone graph was explored within the budget.
    pub exhausted: bool,
}

fn initial_zone(pta: &Pta) -> Polyhedron {
    let clocks = pta.clock_vars();
    let rows = clocks
        .iter()
        .map(|&x| LinearExpr::var(x).equals(LinearExpr::zero()))
        .chain(pta.param_vars().into_iter().map(|p| LinearExpr::var(p).ge(LinearExpr::zero())));
    Polyhedron::from_rows(rows).time_elapse(&clocks)
}

fn param_projection(zone: &Polyhedron) -> Polyhedron {
    zone.project(Variable::is_param).minimize()
}

/// Breadth-first synthesis with inclusion subsumption per location.
///
/// Once `budget` states have been expanded, the parameter projections of the
/// states still waiting are added to the result, so the answer over-approximates.
pub fn efsynth(pta: &Pta, targets: &BTreeSet<LocationId>, budget: usize) -> Synthesis {
    let clocks = pta.clock_vars();
    let mut region = Region::empty();
    let mut seen: Vec<Vec<Polyhedron>> = vec![Vec::new(); pta.locations.len()];
    let mut queue = VecDeque::new();
    let mut explored = 0;

    let mut admit = |state: SymbolicState, region: &mut Region, queue: &mut VecDeque<SymbolicState>| {
        if targets.contains(&state.location) {
            // successors only restrict parameters further
            region.add_absorbing(param_projection(&state.zone));
            return;
        }
        let bucket = &mut seen[state.location];
        if bucket.iter().any(|z| z.includes(&state.zone)) {
            return;
        }
        bucket.push(state.zone.clone());
        queue.push_back(state);
    };

    let init = initial_zone(pta);
    if !init.is_empty() {
        admit(SymbolicState { location: pta.initial, zone: init }, &mut region, &mut queue);
    }
    while let Some(state) = queue.pop_front() {
        if explored >= budget {
            queue.push_front(state);
            for rest in queue {
                region.add_absorbing(param_projection(&rest.zone));
            }
            return Synthesis { region, explored, exhausted: false };
        }
        explored += 1;
        for edge in pta.outgoing(state.location) {
            let guarded = state.zone.conjoin_rows(Pta::guard_rows(&edge.guard));
            if guarded.is_empty() {
                continue;
            }
            let resets: Vec<Variable> = edge.resets.iter().map(|&c| Variable::Clock(c as u32)).collect();
            let zone = guarded.reset(&resets).time_elapse(&clocks).minimize();
            admit(SymbolicState { location: edge.target, zone }, &mut region, &mut queue);
        }
    }
    Synthesis { region, explored, exhausted: true }
}
