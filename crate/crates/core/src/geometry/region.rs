use super::linear::{LinearInequality, Variable};
use super::polyhedron::Polyhedron;
use super::rational::Rational;

/// A finite union of convex polyhedra.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Region {
    disjuncts: Vec<Polyhedron>,
}

impl Region {
    pub fn empty() -> Self {
        Region::default()
    }

    pub fn universe() -> Self {
        Region { disjuncts: vec![Polyhedron::universe()] }
    }

    pub fn from_polyhedron(poly: Polyhedron) -> Self {
        let mut region = Region::empty();
        region.add(poly);
        region
    }

    pub fn disjuncts(&self) -> &[Polyhedron] {
        &self.disjuncts
    }

    pub fn into_disjuncts(self) -> Vec<Polyhedron> {
        self.disjuncts
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.iter().all(Polyhedron::is_empty)
    }

    /// Appends a disjunct unless it is empty.
    pub fn add(&mut self, poly: Polyhedron) {
        if !poly.is_empty() {
            self.disjuncts.push(poly);
        }
    }

    /// Appends a disjunct unless it is already covered by one existing disjunct.
    pub fn add_absorbing(&mut self, poly: Polyhedron) {
        if poly.is_empty() || self.disjuncts.iter().any(|d| d.includes(&poly)) {
            return;
        }
        self.disjuncts.retain(|d| !poly.includes(d));
        self.disjuncts.push(poly);
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut out = self.clone();
        out.disjuncts.extend(other.disjuncts.iter().cloned());
        out
    }

    pub fn intersect(&self, other: &Region) -> Region {
        let mut out = Region::empty();
        for a in &self.disjuncts {
            for b in &other.disjuncts {
                out.add(a.intersect(b));
            }
        }
        out
    }

    pub fn conjoin(&self, poly: &Polyhedron) -> Region {
        let mut out = Region::empty();
        for d in &self.disjuncts {
            out.add(d.intersect(poly));
        }
        out
    }

    pub fn conjoin_row(&self, row: &LinearInequality) -> Region {
        let mut out = Region::empty();
        for d in &self.disjuncts {
            out.add(d.with(row.clone()));
        }
        out
    }

    pub fn project<F: Fn(Variable) -> bool>(&self, keep: F) -> Region {
        let mut out = Region::empty();
        for d in &self.disjuncts {
            out.add(d.project(&keep));
        }
        out
    }

    pub fn rename<F: Fn(Variable) -> Variable>(&self, f: F) -> Region {
        Region { disjuncts: self.disjuncts.iter().map(|d| d.rename(&f)).collect() }
    }

    pub fn substitute<F: Fn(Variable) -> Option<Rational>>(&self, value: F) -> Region {
        let mut out = Region::empty();
        for d in &self.disjuncts {
            out.add(d.substitute(&value));
        }
        out
    }

    pub fn contains<F: Fn(Variable) -> Option<Rational>>(&self, value: F) -> bool {
        self.disjuncts.iter().any(|d| d.contains(&value))
    }

    /// `poly ⊆ ⋃ self`, by recursive set difference.
    pub fn covers(&self, poly: &Polyhedron) -> bool {
        covered(poly, &self.disjuncts)
    }

    /// `other ⊆ self`.
    pub fn includes(&self, other: &Region) -> bool {
        other.disjuncts.iter().all(|d| self.covers(d))
    }

    /// Semantic equality.
    pub fn equals(&self, other: &Region) -> bool {
        if self.disjuncts == other.disjuncts {
            return true;
        }
        self.includes(other) && other.includes(self)
    }

    /// Drops disjuncts included in another disjunct and minimizes the rest.
    pub fn simplify(&self) -> Region {
        let mut out = Region::empty();
        for d in &self.disjuncts {
            out.add_absorbing(d.clone());
        }
        out.disjuncts = out.disjuncts.iter().map(Polyhedron::minimize).collect();
        out
    }
}

impl FromIterator<Polyhedron> for Region {
    fn from_iter<I: IntoIterator<Item = Polyhedron>>(iter: I) -> Self {
        let mut region = Region::empty();
        for poly in iter {
            region.add(poly);
        }
        region
    }
}

fn covered(poly: &Polyhedron, cover: &[Polyhedron]) -> bool {
    if poly.is_empty() {
        return true;
    }
    let Some((first, rest)) = cover.split_first() else {
        return false;
    };
    if first.includes(poly) {
        return true;
    }
    if !first.intersects(poly) {
        return covered(poly, rest);
    }
    // poly \ first = ⋃ₖ poly ∧ c₁ ∧ … ∧ cₖ₋₁ ∧ ¬cₖ
    let mut prefix = poly.clone();
    for row in first.rows() {
        for neg in row.negations() {
            if !covered(&prefix.with(neg), rest) {
                return false;
            }
        }
        prefix = prefix.with(row.clone());
        if prefix.is_empty() {
            break;
        }
    }
    true
}
