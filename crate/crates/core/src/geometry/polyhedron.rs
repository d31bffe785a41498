//! Convex NNC polyhedra as conjunctions of rows, with Fourier–Motzkin
//! elimination tracking strictness exactly.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::linear::{LinearInequality, Relation, Variable};
use super::rational::Rational;
use super::simplex::feasible;

/// A convex polyhedron over the rationals, possibly with strict faces.
///
/// Variables not mentioned by any row are unconstrained. Rows are kept with
/// parallel constraints merged; full redundancy removal only happens in
/// [`Polyhedron::minimize`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polyhedron {
    rows: Vec<LinearInequality>,
    empty: bool,
}

impl Polyhedron {
    pub fn universe() -> Self {
        Polyhedron::default()
    }

    pub fn empty() -> Self {
        Polyhedron { rows: Vec::new(), empty: true }
    }

    pub fn from_rows<I: IntoIterator<Item = LinearInequality>>(rows: I) -> Self {
        match normalize(rows.into_iter().collect()) {
            Some(rows) => Polyhedron { rows, empty: false },
            None => Polyhedron::empty(),
        }
    }

    pub fn rows(&self) -> &[LinearInequality] {
        &self.rows
    }

    /// True when the polyhedron is syntactically known to be empty. Use
    /// [`Polyhedron::is_empty`] for the exact test.
    pub fn is_trivially_empty(&self) -> bool {
        self.empty
    }

    pub fn is_universe(&self) -> bool {
        !self.empty && self.rows.is_empty()
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        self.rows.iter().flat_map(|r| r.variables()).collect()
    }

    pub fn add(&mut self, row: LinearInequality) {
        if self.empty {
            return;
        }
        let mut rows = std::mem::take(&mut self.rows);
        rows.push(row);
        *self = Polyhedron::from_rows(rows);
    }

    pub fn with(&self, row: LinearInequality) -> Self {
        let mut out = self.clone();
        out.add(row);
        out
    }

    pub fn intersect(&self, other: &Polyhedron) -> Self {
        if self.empty || other.empty {
            return Polyhedron::empty();
        }
        Polyhedron::from_rows(self.rows.iter().chain(other.rows.iter()).cloned())
    }

    pub fn conjoin_rows<I: IntoIterator<Item = LinearInequality>>(&self, rows: I) -> Self {
        if self.empty {
            return Polyhedron::empty();
        }
        Polyhedron::from_rows(self.rows.iter().cloned().chain(rows))
    }

    /// Exact emptiness test: elimination while it stays small, simplex otherwise.
    pub fn is_empty(&self) -> bool {
        if self.empty {
            return true;
        }
        if self.rows.is_empty() {
            return false;
        }
        let limit = 4 * self.rows.len() + 32;
        match eliminate_everything(self.rows.clone(), limit) {
            Some(empty) => empty,
            None => !feasible(&self.rows),
        }
    }

    /// Emptiness by the simplex method alone.
    pub fn is_empty_by_simplex(&self) -> bool {
        self.empty || (!self.rows.is_empty() && !feasible(&self.rows))
    }

    /// Emptiness by eliminating every variable; slower, kept as a cross-check.
    pub fn is_empty_by_elimination(&self) -> bool {
        if self.empty {
            return true;
        }
        let vars = self.variables();
        eliminate_all(self.rows.clone(), |v| vars.contains(&v)).is_none()
    }

    /// Existentially quantifies the given variable.
    pub fn eliminate(&self, v: Variable) -> Self {
        if self.empty {
            return Polyhedron::empty();
        }
        match eliminate_one(self.rows.clone(), v) {
            Some(rows) => Polyhedron { rows, empty: false },
            None => Polyhedron::empty(),
        }
    }

    /// Existentially quantifies every variable for which `drop` holds.
    pub fn eliminate_where<F: Fn(Variable) -> bool>(&self, drop: F) -> Self {
        if self.empty {
            return Polyhedron::empty();
        }
        match eliminate_all(self.rows.clone(), drop) {
            Some(rows) => Polyhedron { rows, empty: false },
            None => Polyhedron::empty(),
        }
    }

    /// Projection onto the variables for which `keep` holds.
    pub fn project<F: Fn(Variable) -> bool>(&self, keep: F) -> Self {
        self.eliminate_where(|v| !keep(v))
    }

    /// `other ⊆ self`.
    pub fn includes(&self, other: &Polyhedron) -> bool {
        if other.is_empty() {
            return true;
        }
        if self.empty {
            return false;
        }
        self.rows
            .iter()
            .all(|row| other.rows.contains(row) || row.negations().into_iter().all(|neg| other.with(neg).is_empty()))
    }

    /// Semantic equality.
    pub fn equals(&self, other: &Polyhedron) -> bool {
        self == other || (self.includes(other) && other.includes(self))
    }

    /// Whether `self ∧ other` is non-empty.
    pub fn intersects(&self, other: &Polyhedron) -> bool {
        !self.intersect(other).is_empty()
    }

    /// Membership of a (possibly partial) point. Unassigned variables are
    /// existentially quantified.
    pub fn contains<F>(&self, value: F) -> bool
    where
        F: Fn(Variable) -> Option<Rational>,
    {
        if self.empty {
            return false;
        }
        !self.substitute(value).is_empty()
    }

    /// Substitutes fixed values for some variables.
    pub fn substitute<F>(&self, value: F) -> Self
    where
        F: Fn(Variable) -> Option<Rational>,
    {
        if self.empty {
            return Polyhedron::empty();
        }
        Polyhedron::from_rows(self.rows.iter().map(|r| r.substitute(&value)))
    }

    pub fn rename<F: Fn(Variable) -> Variable>(&self, f: F) -> Self {
        if self.empty {
            return Polyhedron::empty();
        }
        Polyhedron::from_rows(self.rows.iter().map(|r| r.rename(&f)))
    }

    /// Sets the given clocks to zero.
    pub fn reset(&self, clocks: &[Variable]) -> Self {
        if clocks.is_empty() {
            return self.clone();
        }
        let set: BTreeSet<Variable> = clocks.iter().copied().collect();
        let projected = self.eliminate_where(|v| set.contains(&v));
        projected.conjoin_rows(
            clocks.iter().map(|&x| {
                LinearInequality::from_integer_terms(vec![(x, BigInt::from(1))], Rational::zero(), Relation::Eq)
            }),
        )
    }

    /// Lets time elapse: `{v + d·1 | v ∈ self, d ≥ 0}` on the given clocks.
    pub fn time_elapse(&self, clocks: &[Variable]) -> Self {
        if self.empty || clocks.is_empty() {
            return self.clone();
        }
        let d = Variable::Aux(u32::MAX);
        let clock_set: BTreeSet<Variable> = clocks.iter().copied().collect();
        let mut rows: Vec<LinearInequality> = self
            .rows
            .iter()
            .map(|row| {
                // x_old = x_new - d, so a term c·x contributes -c·d.
                let shift: BigInt =
                    row.terms().iter().filter(|(v, _)| clock_set.contains(v)).map(|(_, c)| c.clone()).sum();
                if shift.is_zero() {
                    row.clone()
                } else {
                    let mut terms = row.terms().to_vec();
                    terms.push((d, -shift));
                    LinearInequality::from_integer_terms(terms, row.constant().clone(), row.relation())
                }
            })
            .collect();
        rows.push(LinearInequality::from_integer_terms(vec![(d, BigInt::from(-1))], Rational::zero(), Relation::Le));
        match normalize(rows).and_then(|rows| eliminate_one(rows, d)) {
            Some(rows) => Polyhedron { rows, empty: false },
            None => Polyhedron::empty(),
        }
    }

    /// Detects implicit equalities and removes redundant rows. The result is
    /// semantically equal to `self`; an empty input becomes [`Polyhedron::empty`].
    pub fn minimize(&self) -> Self {
        if self.is_empty() {
            return Polyhedron::empty();
        }
        let mut rows = self.rows.clone();
        // Implicit equalities: e <= 0 with no point satisfying e < 0.
        let mut changed = false;
        for i in 0..rows.len() {
            if rows[i].relation() != Relation::Le {
                continue;
            }
            let strict = LinearInequality::from_integer_terms(
                rows[i].terms().to_vec(),
                rows[i].constant().clone(),
                Relation::Lt,
            );
            let mut probe = rows.clone();
            probe[i] = strict;
            if Polyhedron::from_rows(probe).is_empty() {
                rows[i] = LinearInequality::from_integer_terms(
                    rows[i].terms().to_vec(),
                    rows[i].constant().clone(),
                    Relation::Eq,
                );
                changed = true;
            }
        }
        if changed {
            rows = normalize(rows).expect("implicit equalities preserve non-emptiness");
        }
        // Redundancy: a row is dropped when the remaining rows imply it.
        let mut i = 0;
        while i < rows.len() {
            let row = rows[i].clone();
            let rest: Vec<LinearInequality> =
                rows.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r.clone()).collect();
            let redundant = row.negations().into_iter().all(|neg| {
                let mut probe = rest.clone();
                probe.push(neg);
                Polyhedron::from_rows(probe).is_empty()
            });
            if redundant {
                rows.remove(i);
            } else {
                i += 1;
            }
        }
        rows.sort_by(|a, b| a.canonical_cmp(b));
        Polyhedron { rows, empty: false }
    }
}

#[derive(Default)]
struct Bounds {
    eq: Option<Rational>,
    upper: Option<(Rational, bool)>,
    lower: Option<(Rational, bool)>,
}

/// Merges parallel rows, drops tautologies, and detects contradictions
/// between rows over the same direction. `None` means empty.
fn normalize(rows: Vec<LinearInequality>) -> Option<Vec<LinearInequality>> {
    let mut by_dir: BTreeMap<Vec<(Variable, BigInt)>, Bounds> = BTreeMap::new();
    for row in rows {
        if let Some(truth) = row.constant_truth() {
            if truth {
                continue;
            }
            return None;
        }
        let strict = row.relation() == Relation::Lt;
        let leading_positive = row.terms()[0].1.is_positive();
        if leading_positive {
            let key = row.terms().to_vec();
            let value = -row.constant().clone();
            let bounds = by_dir.entry(key).or_default();
            match row.relation() {
                Relation::Eq => match &bounds.eq {
                    Some(e) if *e != value => return None,
                    _ => bounds.eq = Some(value),
                },
                _ => tighten_upper(&mut bounds.upper, value, strict),
            }
        } else {
            // -K·v + c ⋈ 0  ==>  K·v ⋈' c
            let key: Vec<(Variable, BigInt)> = row.terms().iter().map(|(v, c)| (*v, -c)).collect();
            let value = row.constant().clone();
            let bounds = by_dir.entry(key).or_default();
            tighten_lower(&mut bounds.lower, value, strict);
        }
    }
    let mut out = Vec::with_capacity(by_dir.len());
    for (key, bounds) in by_dir {
        let neg_key = || key.iter().map(|(v, c)| (*v, -c)).collect::<Vec<_>>();
        if let Some(e) = bounds.eq {
            if let Some((u, s)) = &bounds.upper {
                if e > *u || (e == *u && *s) {
                    return None;
                }
            }
            if let Some((l, s)) = &bounds.lower {
                if e < *l || (e == *l && *s) {
                    return None;
                }
            }
            out.push(LinearInequality::from_integer_terms(key, -e, Relation::Eq));
            continue;
        }
        match (bounds.lower, bounds.upper) {
            (Some((l, ls)), Some((u, us))) => {
                if l > u || (l == u && (ls || us)) {
                    return None;
                }
                if l == u {
                    out.push(LinearInequality::from_integer_terms(key, -u, Relation::Eq));
                } else {
                    out.push(LinearInequality::from_integer_terms(neg_key(), l, rel(ls)));
                    out.push(LinearInequality::from_integer_terms(key, -u, rel(us)));
                }
            }
            (Some((l, ls)), None) => out.push(LinearInequality::from_integer_terms(neg_key(), l, rel(ls))),
            (None, Some((u, us))) => out.push(LinearInequality::from_integer_terms(key, -u, rel(us))),
            (None, None) => {}
        }
    }
    Some(out)
}

fn rel(strict: bool) -> Relation {
    if strict {
        Relation::Lt
    } else {
        Relation::Le
    }
}

fn tighten_upper(slot: &mut Option<(Rational, bool)>, value: Rational, strict: bool) {
    let replace = match slot {
        None => true,
        Some((u, s)) => value < *u || (value == *u && strict && !*s),
    };
    if replace {
        *slot = Some((value, strict));
    }
}

fn tighten_lower(slot: &mut Option<(Rational, bool)>, value: Rational, strict: bool) {
    let replace = match slot {
        None => true,
        Some((l, s)) => value > *l || (value == *l && strict && !*s),
    };
    if replace {
        *slot = Some((value, strict));
    }
}

fn eliminate_one(mut rows: Vec<LinearInequality>, v: Variable) -> Option<Vec<LinearInequality>> {
    if let Some(idx) = rows.iter().position(|r| r.relation() == Relation::Eq && r.mentions(v)) {
        let eq = rows.swap_remove(idx);
        let a = eq.coeff(v).expect("mentioned").clone();
        let out = rows
            .into_iter()
            .map(|r| match r.coeff(v) {
                None => r,
                Some(b) => {
                    let g = a.gcd(b);
                    let (k1, k2) = if a.is_positive() { (&a / &g, -(b / &g)) } else { (-(&a / &g), b / &g) };
                    r.linear_combination(&k1, &eq, &k2, r.relation())
                }
            })
            .collect();
        return normalize(out);
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for r in rows {
        match r.coeff(v).map(|c| c.is_positive()) {
            Some(true) => pos.push(r),
            Some(false) => neg.push(r),
            None => out.push(r),
        }
    }
    for p in &pos {
        let a = p.coeff(v).expect("positive");
        for n in &neg {
            let b = n.coeff(v).expect("negative");
            let g = a.gcd(b);
            let k1 = -(b / &g);
            let k2 = a / &g;
            let relation =
                if p.relation().is_strict() || n.relation().is_strict() { Relation::Lt } else { Relation::Le };
            out.push(p.linear_combination(&k1, n, &k2, relation));
        }
    }
    normalize(out)
}

/// Eliminates every variable matching `drop`, choosing the cheapest one first.
fn eliminate_all<F: Fn(Variable) -> bool>(rows: Vec<LinearInequality>, drop: F) -> Option<Vec<LinearInequality>> {
    match eliminate_capped(rows, drop, usize::MAX) {
        Elimination::Done(rows) => Some(rows),
        Elimination::Empty => None,
        Elimination::Aborted => unreachable!("no row limit"),
    }
}

/// `Some(emptiness)`, or `None` if elimination grew past `limit` rows.
fn eliminate_everything(rows: Vec<LinearInequality>, limit: usize) -> Option<bool> {
    match eliminate_capped(rows, |_| true, limit) {
        Elimination::Done(_) => Some(false),
        Elimination::Empty => Some(true),
        Elimination::Aborted => None,
    }
}

enum Elimination {
    Done(Vec<LinearInequality>),
    Empty,
    Aborted,
}

fn eliminate_capped<F: Fn(Variable) -> bool>(mut rows: Vec<LinearInequality>, drop: F, limit: usize) -> Elimination {
    loop {
        if rows.len() > limit {
            return Elimination::Aborted;
        }
        let mut best: Option<(Variable, isize)> = None;
        let mut stats: BTreeMap<Variable, (usize, usize, bool)> = BTreeMap::new();
        for r in &rows {
            for (v, c) in r.terms() {
                if !drop(*v) {
                    continue;
                }
                let entry = stats.entry(*v).or_default();
                if r.relation() == Relation::Eq {
                    entry.2 = true;
                } else if c.is_positive() {
                    entry.0 += 1;
                } else {
                    entry.1 += 1;
                }
            }
        }
        for (v, (p, n, has_eq)) in stats {
            // Equalities substitute for free; otherwise minimise rows added minus rows removed.
            let cost = if has_eq { isize::MIN } else { (p * n) as isize - (p + n) as isize };
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some((v, cost));
            }
        }
        match best {
            None => return Elimination::Done(rows),
            Some((v, _)) => match eliminate_one(rows, v) {
                Some(next) => rows = next,
                None => return Elimination::Empty,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::linear::LinearExpr;
    use crate::geometry::rational::{int, rat};

    fn t() -> LinearExpr {
        LinearExpr::var(Variable::Start)
    }
    fn x() -> LinearExpr {
        LinearExpr::var(Variable::Clock(0))
    }
    fn p() -> LinearExpr {
        LinearExpr::var(Variable::Param(0))
    }
    fn k(v: Rational) -> LinearExpr {
        LinearExpr::constant(v)
    }

    #[test]
    fn strict_bounds_meeting_are_empty() {
        let poly = Polyhedron::from_rows([t().lt(k(int(1))), t().ge(k(int(1)))]);
        assert!(poly.is_empty());
        let poly = Polyhedron::from_rows([t().le(k(int(1))), t().ge(k(int(1)))]);
        assert!(!poly.is_empty());
        assert_eq!(poly.rows().len(), 1);
        assert_eq!(poly.rows()[0].relation(), Relation::Eq);
    }

    #[test]
    fn elimination_keeps_strictness() {
        // t < x, x <= p  ==>  t < p
        let poly = Polyhedron::from_rows([t().lt(x()), x().le(p())]);
        let proj = poly.project(|v| v != Variable::Clock(0));
        assert_eq!(proj, Polyhedron::from_rows([t().lt(p())]));
    }

    #[test]
    fn chained_strictness_detects_emptiness() {
        // t < x < p <= t
        let poly = Polyhedron::from_rows([t().lt(x()), x().lt(p()), p().le(t())]);
        assert!(poly.is_empty());
    }

    #[test]
    fn inclusion_respects_open_faces() {
        let closed = Polyhedron::from_rows([t().ge(k(int(0))), t().le(k(int(1)))]);
        let open = Polyhedron::from_rows([t().gt(k(int(0))), t().lt(k(int(1)))]);
        assert!(closed.includes(&open));
        assert!(!open.includes(&closed));
        assert!(closed.includes(&Polyhedron::empty()));
    }

    #[test]
    fn time_elapse_extends_upwards() {
        let zone = Polyhedron::from_rows([x().equals(k(int(0)))]);
        let elapsed = zone.time_elapse(&[Variable::Clock(0)]);
        assert!(elapsed.equals(&Polyhedron::from_rows([x().ge(k(int(0)))])));
        let two = Polyhedron::from_rows([x().equals(k(int(0))), LinearExpr::var(Variable::Clock(1)).equals(k(int(3)))]);
        let elapsed = two.time_elapse(&[Variable::Clock(0), Variable::Clock(1)]);
        let expected =
            Polyhedron::from_rows([x().ge(k(int(0))), (LinearExpr::var(Variable::Clock(1)) - x()).equals(k(int(3)))]);
        assert!(elapsed.equals(&expected));
    }

    #[test]
    fn minimize_drops_implied_rows() {
        let poly = Polyhedron::from_rows([
            t().lt(k(int(1))),
            (p() + t()).gt(k(rat(41, 10))),
            p().ge(k(int(0))),
            p().gt(k(int(2))),
        ]);
        let min = poly.minimize();
        assert_eq!(min.rows().len(), 2);
        assert!(min.equals(&poly));
    }

    #[test]
    fn minimize_finds_implicit_equalities() {
        let y = || LinearExpr::var(Variable::Clock(1));
        let poly = Polyhedron::from_rows([x().le(y()), y().le(p()), p().le(x())]);
        let min = poly.minimize();
        assert!(min.rows().iter().all(|r| r.relation() == Relation::Eq));
        assert!(min.equals(&poly));
    }

    #[test]
    fn partial_points_are_existential() {
        let poly = Polyhedron::from_rows([(p() + t()).gt(k(rat(41, 10))), t().lt(k(int(1)))]);
        let at = |tv: Rational| move |v: Variable| (v == Variable::Start).then(|| tv.clone());
        assert!(poly.contains(at(rat(7, 10))));
        assert!(!poly.contains(at(int(1))));
    }
}
