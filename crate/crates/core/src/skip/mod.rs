//! Skip values for matching: KMP-style tables over parameter regions and
//! Quick-Search-style tables over actions.

mod efsynth;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use efsynth::{efsynth, SymbolicState, Synthesis, DEFAULT_BUDGET};

use crate::geometry::text::{region_from_json, region_to_json, RegionJson};
use crate::geometry::{Polyhedron, Region, Variable, VariableNames};
use crate::pta::{
    prefix_shift, rename_apart, suffix_closure, synchronized_product, without_terminal, Edge, Label, LocationId,
    ProductAcceptance, Pta,
};

const TABLE_VERSION: u32 = 1;

/// Suffix for the parameter and clock copy of the shifted automaton.
const SHIFTED_COPY: &str = "#2";

#[derive(Debug, Error)]
pub enum SkipError {
    #[error("pattern unsatisfiable: no accepting location is reachable")]
    Unsatisfiable,
    #[error("skip tables were computed for pattern {found}, expected {expected}")]
    HashMismatch { expected: String, found: String },
    #[error("unsupported skip table version {0}")]
    Version(u32),
    #[error("malformed skip tables: {0}")]
    Malformed(String),
}

/// Precomputed skip data for one pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct SkipTables {
    pub pattern_hash: String,
    /// Shortest untimed match length, `$` excluded.
    pub n: usize,
    pub n_max: usize,
    pub budget: usize,
    /// `v[ℓ][n − 1] = V_{ℓ,n}` over the pattern parameters.
    pub v: Vec<Vec<Region>>,
    /// `Δ′_KMP(ℓ)`.
    pub kmp_np: Vec<usize>,
    /// `Δ_QS(a)` for the pattern's actions; other actions skip `N + 1`.
    pub qs: BTreeMap<String, usize>,
}

/// Configuration knobs for [`compute_tables`].
#[derive(Clone, Copy, Debug)]
pub struct TableOptions {
    pub budget: usize,
    /// Largest KMP shift considered; `None` means `max(N, |L|)`.
    pub n_max: Option<usize>,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { budget: DEFAULT_BUDGET, n_max: None }
    }
}

/// `A′_ℓ ∥ A′₊ₙ` with the shifted copy's clocks and parameters renamed apart.
pub fn overlap_product(pta: &Pta, loc: LocationId, n: usize) -> Pta {
    let left = suffix_closure(&without_terminal(pta), loc);
    let right = rename_apart(&without_terminal(&prefix_shift(pta, n)), SHIFTED_COPY);
    synchronized_product(&[&left, &right], ProductAcceptance::All)
}

/// `V_{ℓ,n}`: valuations `v` for which a run of `v(A)` reaching `ℓ` can
/// overlap a match of some `v′(A)` starting `n` events later.
pub fn compute_vln(pta: &Pta, loc: LocationId, n: usize, budget: usize) -> Region {
    let product = overlap_product(pta, loc, n);
    let synth = efsynth(&product, &product.accepting, budget);
    // the left component's parameters come first in the product
    let own = pta.params.len() as u32;
    let keep = move |v: Variable| matches!(v, Variable::Param(i) if i < own);
    let mut out = Region::empty();
    for d in synth.region.disjuncts() {
        out.add_absorbing(d.project(keep).minimize());
    }
    out
}

/// Accepts words whose `k`-th observable letter is `a` (1-based).
fn position_automaton(pta: &Pta, k: usize, a: usize) -> Pta {
    let mut out = Pta { actions: pta.actions.clone(), ..Pta::default() };
    let states: Vec<LocationId> = (0..=k).map(|i| out.add_location(format!("pos{i}"))).collect();
    out.initial = states[0];
    out.accepting = BTreeSet::from([states[k]]);
    let edge = |s, t, b| Edge { source: s, target: t, label: Label::Action(b), guard: Vec::new(), resets: Vec::new() };
    for i in 0..k - 1 {
        for b in 0..pta.actions.len() {
            out.edges.push(edge(states[i], states[i + 1], b));
        }
    }
    out.edges.push(edge(states[k - 1], states[k], a));
    for b in 0..pta.actions.len() {
        out.edges.push(edge(states[k], states[k], b));
    }
    out
}

/// Whether some accepted word of some valuation has `a` as its `k`-th letter.
fn letter_at(pta: &Pta, k: usize, a: usize, budget: usize) -> bool {
    let product = synchronized_product(&[pta, &position_automaton(pta, k, a)], ProductAcceptance::All);
    !efsynth(&product, &product.accepting, budget).region.is_empty()
}

/// `Δ_QS(a) = N + 1 − k` for the largest position `k ≤ N` at which `a` occurs in an accepted word.
pub fn compute_qs(pta: &Pta, n: usize, budget: usize) -> BTreeMap<String, usize> {
    (0..pta.actions.len())
        .into_par_iter()
        .map(|a| {
            let k = (1..=n).rev().find(|&k| letter_at(pta, k, a, budget)).unwrap_or(0);
            (pta.actions[a].clone(), n + 1 - k)
        })
        .collect()
}

pub fn compute_tables(pta: &Pta, options: TableOptions) -> Result<SkipTables, SkipError> {
    let n = pta.shortest_untimed_accepting().ok_or(SkipError::Unsatisfiable)?;
    let n_max = options.n_max.unwrap_or(n.max(pta.locations.len())).max(1);
    let reachable = pta.reachable_locations();
    let pairs: Vec<(LocationId, usize)> =
        (0..pta.locations.len()).flat_map(|l| (1..=n_max).map(move |k| (l, k))).collect();
    let regions: Vec<Region> = pairs
        .par_iter()
        .map(|&(l, k)| {
            if reachable.contains(&l) && !pta.is_accepting(l) {
                compute_vln(pta, l, k, options.budget)
            } else {
                Region::empty()
            }
        })
        .collect();
    let mut v = vec![Vec::with_capacity(n_max); pta.locations.len()];
    for ((l, _), r) in pairs.into_iter().zip(regions) {
        v[l].push(r);
    }
    let kmp_np = v.iter().map(|row| row.iter().position(|r| !r.is_empty()).map_or(n_max, |i| i + 1)).collect();
    let qs = compute_qs(pta, n, options.budget);
    Ok(SkipTables { pattern_hash: pta.content_hash(), n, n_max, budget: options.budget, v, kmp_np, qs })
}

impl SkipTables {
    /// `Δ_KMP(ℓ, V)`: the least `n` with `V ⊆ V_{ℓ,n}`, capped at `n_max`.
    pub fn delta_kmp(&self, loc: LocationId, valuations: &Region) -> usize {
        (1..self.n_max)
            .find(|&k| {
                let vln = &self.v[loc][k - 1];
                valuations.disjuncts().iter().all(|d| vln.covers(d))
            })
            .unwrap_or(self.n_max)
    }

    pub fn delta_kmp_polyhedron(&self, loc: LocationId, valuations: &Polyhedron) -> usize {
        (1..self.n_max).find(|&k| self.v[loc][k - 1].covers(valuations)).unwrap_or(self.n_max)
    }

    /// `Δ′_KMP(ℓ)`.
    pub fn delta_kmp_np(&self, loc: LocationId) -> usize {
        self.kmp_np[loc]
    }

    /// `Δ_QS(a)`; actions foreign to the pattern never occur in a match.
    pub fn delta_qs(&self, action: &str) -> usize {
        self.qs.get(action).copied().unwrap_or(self.n + 1)
    }

    /// Actions that can be the `N`-th letter of a match.
    pub fn nth_letters(&self) -> BTreeSet<String> {
        self.qs.iter().filter(|(_, &d)| d == 1).map(|(a, _)| a.clone()).collect()
    }

    pub fn to_json(&self, pta: &Pta) -> TablesJson {
        let names = VariableNames::new(pta.params.clone(), Vec::new());
        let v = self
            .v
            .iter()
            .enumerate()
            .map(|(l, row)| {
                let regions = row.iter().map(|r| region_to_json(r, &names, &self.pattern_hash)).collect();
                (pta.locations[l].clone(), regions)
            })
            .collect();
        TablesJson {
            version: TABLE_VERSION,
            pattern_hash: self.pattern_hash.clone(),
            n: self.n,
            n_max: self.n_max,
            budget: self.budget,
            v,
            kmp_np: self.kmp_np.iter().enumerate().map(|(l, &d)| (pta.locations[l].clone(), d)).collect(),
            qs: self.qs.clone(),
        }
    }

    pub fn from_json(json: &TablesJson, pta: &Pta) -> Result<SkipTables, SkipError> {
        if json.version != TABLE_VERSION {
            return Err(SkipError::Version(json.version));
        }
        let expected = pta.content_hash();
        if json.pattern_hash != expected {
            return Err(SkipError::HashMismatch { expected, found: json.pattern_hash.clone() });
        }
        let malformed = |m: String| SkipError::Malformed(m);
        let names = VariableNames::new(pta.params.clone(), Vec::new());
        let mut v = Vec::with_capacity(pta.locations.len());
        let mut kmp_np = Vec::with_capacity(pta.locations.len());
        for loc in &pta.locations {
            let row = json.v.get(loc).ok_or_else(|| malformed(format!("no regions for location `{loc}`")))?;
            if row.len() != json.n_max {
                return Err(malformed(format!("location `{loc}` has {} regions, expected {}", row.len(), json.n_max)));
            }
            let regions = row
                .iter()
                .map(|r| region_from_json(r, &names).map_err(|e| malformed(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            v.push(regions);
            let d = *json.kmp_np.get(loc).ok_or_else(|| malformed(format!("no KMP value for `{loc}`")))?;
            if d == 0 || d > json.n_max {
                return Err(malformed(format!("KMP value {d} for `{loc}` out of range")));
            }
            kmp_np.push(d);
        }
        if let Some((a, d)) = json.qs.iter().find(|(_, &d)| d == 0 || d > json.n + 1) {
            return Err(malformed(format!("Quick-Search value {d} for `{a}` out of range")));
        }
        Ok(SkipTables {
            pattern_hash: json.pattern_hash.clone(),
            n: json.n,
            n_max: json.n_max,
            budget: json.budget,
            v,
            kmp_np,
            qs: json.qs.clone(),
        })
    }
}

/// On-disk form of [`SkipTables`], keyed by location and action names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TablesJson {
    pub version: u32,
    pub pattern_hash: String,
    pub n: usize,
    pub n_max: usize,
    pub budget: usize,
    pub v: BTreeMap<String, Vec<RegionJson>>,
    pub kmp_np: BTreeMap<String, usize>,
    pub qs: BTreeMap<String, usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rational::{int, rat};
    use crate::geometry::{LinearExpr, Rational};
    use crate::pta::parse_pta;

    const FIG3: &str = "clocks: x\nparams: p\nloc l0 initial\nloc l1\nloc l2\nloc acc accepting\n\
        edge l0 -> l1 on a when x > 1\nedge l1 -> l2 on a when x < p reset x\nedge l2 -> acc on $ when x < 1\n";

    const GEAR: &str = "clocks: x\nparams: p\nloc l0 initial\nloc g1\nloc g2\nloc acc accepting\n\
        actions: g3 g4\n\
        edge l0 -> g1 on g1 reset x\nedge g1 -> g2 on g2 when x < p\nedge g2 -> acc on $\n";

    fn p_is(v: Rational) -> impl Fn(Variable) -> Option<Rational> {
        move |x| (x == Variable::Param(0)).then(|| v.clone())
    }

    #[test]
    fn gear_quick_search() {
        let pta = parse_pta(GEAR).unwrap();
        let tables = compute_tables(&pta, TableOptions::default()).unwrap();
        assert_eq!(tables.n, 2);
        assert_eq!(tables.delta_qs("g2"), 1);
        assert_eq!(tables.delta_qs("g1"), 2);
        assert_eq!(tables.delta_qs("g3"), 3);
        assert_eq!(tables.delta_qs("unknown"), 3);
        assert_eq!(tables.nth_letters(), BTreeSet::from(["g2".to_string()]));
    }

    #[test]
    fn fig3_tables() {
        let pta = parse_pta(FIG3).unwrap();
        let tables = compute_tables(&pta, TableOptions::default()).unwrap();
        assert_eq!(tables.n, 2);
        assert_eq!(tables.v.len(), 4);
        assert_eq!(tables.n_max, 4);
        for d in tables.qs.values() {
            assert!((1..=tables.n + 1).contains(d));
        }
        for &d in &tables.kmp_np {
            assert!((1..=tables.n_max).contains(&d));
        }
    }

    #[test]
    fn fig3_overlap_at_l1() {
        // After `a` at some time reaching l1, a later match needs two more `a`s
        // with the second within p of the first: always possible for a large v′.
        let pta = parse_pta(FIG3).unwrap();
        let l1 = pta.location_id("l1").unwrap();
        let v1 = compute_vln(&pta, l1, 1, 1_000_000);
        for v in [int(0), int(1), int(5)] {
            assert!(v1.contains(p_is(v)));
        }
    }

    #[test]
    fn unsatisfiable_pattern() {
        let pta = parse_pta("clocks:\nparams:\nloc s initial\nloc f accepting\nloc m\nedge m -> f on $\n").unwrap();
        assert!(matches!(compute_tables(&pta, TableOptions::default()), Err(SkipError::Unsatisfiable)));
    }

    #[test]
    fn tables_json_round_trip() {
        let pta = parse_pta(FIG3).unwrap();
        let tables = compute_tables(&pta, TableOptions::default()).unwrap();
        let json = tables.to_json(&pta);
        let text = serde_json::to_string(&json).unwrap();
        let back: TablesJson = serde_json::from_str(&text).unwrap();
        let restored = SkipTables::from_json(&back, &pta).unwrap();
        assert_eq!(restored.n, tables.n);
        assert_eq!(restored.kmp_np, tables.kmp_np);
        assert_eq!(restored.qs, tables.qs);
        for (a, b) in restored.v.iter().flatten().zip(tables.v.iter().flatten()) {
            assert!(a.equals(b));
        }
        let other = parse_pta(GEAR).unwrap();
        assert!(matches!(SkipTables::from_json(&back, &other), Err(SkipError::HashMismatch { .. })));
    }

    #[test]
    fn kmp_is_least_inclusion() {
        let pta = parse_pta(FIG3).unwrap();
        let tables = compute_tables(&pta, TableOptions::default()).unwrap();
        let p = || LinearExpr::var(Variable::Param(0));
        let v = Region::from_polyhedron(Polyhedron::from_rows([
            p().gt(LinearExpr::constant(int(1))),
            p().lt(LinearExpr::constant(rat(3, 2))),
        ]));
        for l in 0..pta.locations.len() {
            let d = tables.delta_kmp(l, &v);
            assert!(d >= tables.delta_kmp_np(l) || tables.v[l][d - 1].is_empty());
            for k in 1..d {
                assert!(!tables.v[l][k - 1].includes(&v));
            }
        }
    }
}
