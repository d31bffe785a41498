//! Exact feasibility of strict and non-strict linear constraints.
//!
//! Each row `Σ aⱼxⱼ + c ⋈ 0` gets a slack `s = Σ aⱼxⱼ` bounded by `−c`.
//! Strict bounds are shifted by an infinitesimal `δ`, so values are pairs
//! `r + kδ` compared lexicographically. Pivoting follows Bland's rule.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::linear::{LinearInequality, Relation, Variable};
use super::rational::Rational;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Delta {
    real: Rational,
    inf: Rational,
}

impl Delta {
    fn new(real: Rational, inf: Rational) -> Self {
        Delta { real, inf }
    }

    fn add_scaled(&mut self, other: &Delta, k: &Rational) {
        self.real += &other.real * k;
        self.inf += &other.inf * k;
    }

    fn sub(&self, other: &Delta) -> Delta {
        Delta::new(&self.real - &other.real, &self.inf - &other.inf)
    }

    fn scale(&self, k: &Rational) -> Delta {
        Delta::new(&self.real * k, &self.inf * k)
    }
}

impl PartialOrd for Delta {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Delta {
    fn cmp(&self, other: &Self) -> Ordering {
        self.real.cmp(&other.real).then_with(|| self.inf.cmp(&other.inf))
    }
}

struct Tableau {
    /// `rows[r]` expresses `basic[r]` over all columns; only nonbasic columns are nonzero.
    rows: Vec<Vec<Rational>>,
    basic: Vec<usize>,
    /// Row index of each basic column.
    row_of: Vec<Option<usize>>,
    value: Vec<Delta>,
    lower: Vec<Option<Delta>>,
    upper: Vec<Option<Delta>>,
}

impl Tableau {
    fn violated(&self) -> Option<(usize, bool)> {
        let mut best: Option<(usize, bool)> = None;
        for &x in &self.basic {
            let low = self.lower[x].as_ref().is_some_and(|l| self.value[x] < *l);
            let high = self.upper[x].as_ref().is_some_and(|u| self.value[x] > *u);
            if (low || high) && best.is_none_or(|(b, _)| x < b) {
                best = Some((x, low));
            }
        }
        best
    }

    fn can_increase(&self, x: usize) -> bool {
        self.upper[x].as_ref().is_none_or(|u| self.value[x] < *u)
    }

    fn can_decrease(&self, x: usize) -> bool {
        self.lower[x].as_ref().is_none_or(|l| self.value[x] > *l)
    }

    /// Makes `leaving` nonbasic at `target` and `entering` basic.
    fn pivot_and_update(&mut self, leaving: usize, entering: usize, target: Delta) {
        let r = self.row_of[leaving].expect("leaving is basic");
        let a = self.rows[r][entering].clone();
        let theta = target.sub(&self.value[leaving]).scale(&a.recip());
        self.value[leaving] = target;
        let mut entering_value = self.value[entering].clone();
        entering_value.add_scaled(&theta, &Rational::one());
        self.value[entering] = entering_value;
        for (k, row) in self.rows.iter().enumerate() {
            if k != r && !row[entering].is_zero() {
                let coeff = row[entering].clone();
                let b = self.basic[k];
                let mut v = self.value[b].clone();
                v.add_scaled(&theta, &coeff);
                self.value[b] = v;
            }
        }
        // leaving = Σ a_j x_j  ==>  entering = (leaving − Σ_{j≠e} a_j x_j) / a_e
        let inv = a.recip();
        let mut pivot_row: Vec<Rational> = self.rows[r].iter().map(|c| -(c * &inv)).collect();
        pivot_row[entering] = Rational::zero();
        pivot_row[leaving] = inv;
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r || row[entering].is_zero() {
                continue;
            }
            let coeff = std::mem::take(&mut row[entering]);
            for (j, p) in pivot_row.iter().enumerate() {
                if !p.is_zero() {
                    row[j] += &coeff * p;
                }
            }
        }
        self.rows[r] = pivot_row;
        self.basic[r] = entering;
        self.row_of[entering] = Some(r);
        self.row_of[leaving] = None;
    }

    fn check(&mut self) -> bool {
        while let Some((x, below)) = self.violated() {
            let r = self.row_of[x].expect("basic");
            let entering = (0..self.value.len()).find(|&j| {
                let a = &self.rows[r][j];
                if a.is_zero() || self.row_of[j].is_some() {
                    return false;
                }
                // raising x needs a positive coefficient on a variable that can grow, or vice versa
                (below == a.is_positive() && self.can_increase(j)) || (below != a.is_positive() && self.can_decrease(j))
            });
            let Some(entering) = entering else {
                return false;
            };
            let target = if below { self.lower[x].clone() } else { self.upper[x].clone() }.expect("bound");
            self.pivot_and_update(x, entering, target);
        }
        true
    }
}

/// Whether the conjunction of `rows` has a rational solution.
pub(crate) fn feasible(rows: &[LinearInequality]) -> bool {
    let mut columns: BTreeMap<Variable, usize> = BTreeMap::new();
    for row in rows {
        for (v, _) in row.terms() {
            let next = columns.len();
            columns.entry(*v).or_insert(next);
        }
    }
    let n = columns.len();
    let total = n + rows.len();
    let mut tab = Tableau {
        rows: Vec::with_capacity(rows.len()),
        basic: Vec::with_capacity(rows.len()),
        row_of: vec![None; total],
        value: vec![Delta::default(); total],
        lower: vec![None; total],
        upper: vec![None; total],
    };
    for (i, row) in rows.iter().enumerate() {
        if let Some(truth) = row.constant_truth() {
            if !truth {
                return false;
            }
        }
        let slack = n + i;
        let mut coeffs = vec![Rational::zero(); total];
        for (v, c) in row.terms() {
            coeffs[columns[v]] = Rational::from_integer(c.clone());
        }
        let bound = -row.constant().clone();
        match row.relation() {
            Relation::Eq => {
                tab.lower[slack] = Some(Delta::new(bound.clone(), Rational::zero()));
                tab.upper[slack] = Some(Delta::new(bound, Rational::zero()));
            }
            Relation::Le => tab.upper[slack] = Some(Delta::new(bound, Rational::zero())),
            Relation::Lt => tab.upper[slack] = Some(Delta::new(bound, -Rational::one())),
        }
        tab.row_of[slack] = Some(tab.rows.len());
        tab.basic.push(slack);
        tab.rows.push(coeffs);
    }
    tab.check()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::linear::LinearExpr;
    use crate::geometry::rational::{int, rat};

    fn x() -> LinearExpr {
        LinearExpr::var(Variable::Param(0))
    }

    fn y() -> LinearExpr {
        LinearExpr::var(Variable::Param(1))
    }

    fn k(v: Rational) -> LinearExpr {
        LinearExpr::constant(v)
    }

    #[test]
    fn strictness() {
        assert!(feasible(&[x().le(k(int(1))), x().ge(k(int(1)))]));
        assert!(!feasible(&[x().lt(k(int(1))), x().ge(k(int(1)))]));
        assert!(feasible(&[x().lt(k(int(1))), x().gt(k(rat(99, 100)))]));
        assert!(!feasible(&[(x() + y()).lt(k(int(1))), x().gt(k(int(0))), y().ge(k(int(1)))]));
        assert!(feasible(&[]));
    }

    #[test]
    fn equalities() {
        assert!(feasible(&[(x() + y()).equals(k(int(3))), (x() - y()).equals(k(int(1)))]));
        assert!(!feasible(&[(x() + y()).equals(k(int(3))), (x() + y()).ge(k(int(4)))]));
        assert!(!feasible(&[x().equals(k(int(2))), y().equals(x()), y().lt(k(int(2)))]));
    }
}
