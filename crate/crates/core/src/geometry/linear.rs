use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::Rational;

/// A dimension of a polyhedron.
///
/// The derived order is the canonical variable order: `t`, `t'`, parameters,
/// clocks. `Aux` dimensions are scratch space for derived operations and never
/// survive in a returned polyhedron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variable {
    /// Absolute start time of a match (`t`).
    Start,
    /// Absolute end time of a match (`t'`).
    End,
    Param(u32),
    Clock(u32),
    Aux(u32),
}

impl Variable {
    pub fn is_param(self) -> bool {
        matches!(self, Variable::Param(_))
    }

    pub fn is_clock(self) -> bool {
        matches!(self, Variable::Clock(_))
    }
}

/// Relation of a row `Σ cᵢ·vᵢ + c ⋈ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    Lt,
    Le,
    Eq,
}

impl Relation {
    pub fn is_strict(self) -> bool {
        self == Relation::Lt
    }

    fn holds(self, value: &Rational) -> bool {
        match self {
            Relation::Lt => value.is_negative(),
            Relation::Le => !value.is_positive(),
            Relation::Eq => value.is_zero(),
        }
    }
}

/// Comparison operator as written by users, before normalization to [`Relation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn parse(text: &str) -> Option<CmpOp> {
        Some(match text {
            "<" => CmpOp::Lt,
            "<=" | "≤" => CmpOp::Le,
            "=" | "==" => CmpOp::Eq,
            ">=" | "≥" => CmpOp::Ge,
            ">" => CmpOp::Gt,
            _ => return None,
        })
    }

    pub fn compare(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Affine expression with rational coefficients, used to build rows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearExpr {
    pub terms: BTreeMap<Variable, Rational>,
    pub constant: Rational,
}

impl LinearExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn var(v: Variable) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(v, Rational::one());
        LinearExpr { terms, constant: Rational::zero() }
    }

    pub fn constant(c: Rational) -> Self {
        LinearExpr { terms: BTreeMap::new(), constant: c }
    }

    pub fn term(v: Variable, coeff: Rational) -> Self {
        LinearExpr::var(v) * coeff
    }

    fn compare(self, op: CmpOp, rhs: LinearExpr) -> LinearInequality {
        // lhs ⋈ rhs  ==>  (lhs - rhs) ⋈ 0, flipping ≥/> into ≤/< by negation
        match op {
            CmpOp::Lt => LinearInequality::from_expr(self - rhs, Relation::Lt),
            CmpOp::Le => LinearInequality::from_expr(self - rhs, Relation::Le),
            CmpOp::Eq => LinearInequality::from_expr(self - rhs, Relation::Eq),
            CmpOp::Ge => LinearInequality::from_expr(rhs - self, Relation::Le),
            CmpOp::Gt => LinearInequality::from_expr(rhs - self, Relation::Lt),
        }
    }

    pub fn cmp_op(self, op: CmpOp, rhs: LinearExpr) -> LinearInequality {
        self.compare(op, rhs)
    }

    pub fn lt(self, rhs: LinearExpr) -> LinearInequality {
        self.compare(CmpOp::Lt, rhs)
    }

    pub fn le(self, rhs: LinearExpr) -> LinearInequality {
        self.compare(CmpOp::Le, rhs)
    }

    pub fn equals(self, rhs: LinearExpr) -> LinearInequality {
        self.compare(CmpOp::Eq, rhs)
    }

    pub fn ge(self, rhs: LinearExpr) -> LinearInequality {
        self.compare(CmpOp::Ge, rhs)
    }

    pub fn gt(self, rhs: LinearExpr) -> LinearInequality {
        self.compare(CmpOp::Gt, rhs)
    }
}

impl From<Variable> for LinearExpr {
    fn from(v: Variable) -> Self {
        LinearExpr::var(v)
    }
}

impl From<Rational> for LinearExpr {
    fn from(c: Rational) -> Self {
        LinearExpr::constant(c)
    }
}

impl Add for LinearExpr {
    type Output = LinearExpr;

    fn add(mut self, rhs: LinearExpr) -> LinearExpr {
        for (v, c) in rhs.terms {
            let entry = self.terms.entry(v).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                self.terms.remove(&v);
            }
        }
        self.constant += rhs.constant;
        self
    }
}

impl Neg for LinearExpr {
    type Output = LinearExpr;

    fn neg(self) -> LinearExpr {
        LinearExpr { terms: self.terms.into_iter().map(|(v, c)| (v, -c)).collect(), constant: -self.constant }
    }
}

impl Sub for LinearExpr {
    type Output = LinearExpr;

    fn sub(self, rhs: LinearExpr) -> LinearExpr {
        self + (-rhs)
    }
}

impl Mul<Rational> for LinearExpr {
    type Output = LinearExpr;

    fn mul(self, k: Rational) -> LinearExpr {
        if k.is_zero() {
            return LinearExpr::zero();
        }
        LinearExpr { terms: self.terms.into_iter().map(|(v, c)| (v, c * &k)).collect(), constant: self.constant * k }
    }
}

/// A row `Σ cᵢ·vᵢ + constant ⋈ 0` in canonical form.
///
/// Coefficients are coprime integers sorted by variable; zero coefficients are
/// never stored. For equalities the leading coefficient is positive. Rows with
/// no terms denote a constant truth value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearInequality {
    terms: Vec<(Variable, BigInt)>,
    constant: Rational,
    relation: Relation,
}

impl LinearInequality {
    pub fn from_expr(expr: LinearExpr, relation: Relation) -> Self {
        let den_lcm = expr.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scale = Rational::from_integer(den_lcm);
        let terms: Vec<(Variable, BigInt)> =
            expr.terms.into_iter().filter(|(_, c)| !c.is_zero()).map(|(v, c)| (v, (c * &scale).to_integer())).collect();
        Self::from_integer_terms(terms, expr.constant * scale, relation)
    }

    /// Builds a row from already-integral coefficients (sorted, nonzero).
    pub(crate) fn from_integer_terms(
        mut terms: Vec<(Variable, BigInt)>,
        mut constant: Rational,
        relation: Relation,
    ) -> Self {
        if terms.is_empty() {
            return LinearInequality { terms, constant, relation };
        }
        let gcd = terms.iter().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c));
        if !gcd.is_one() {
            for (_, c) in terms.iter_mut() {
                *c /= &gcd;
            }
            constant /= Rational::from_integer(gcd);
        }
        if relation == Relation::Eq && terms[0].1.is_negative() {
            for (_, c) in terms.iter_mut() {
                *c = -&*c;
            }
            constant = -constant;
        }
        LinearInequality { terms, constant, relation }
    }

    pub fn terms(&self) -> &[(Variable, BigInt)] {
        &self.terms
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn coeff(&self, v: Variable) -> Option<&BigInt> {
        self.terms.binary_search_by(|(w, _)| w.cmp(&v)).ok().map(|i| &self.terms[i].1)
    }

    pub fn variables(&self) -> impl Iterator<Item = Variable> + '_ {
        self.terms.iter().map(|(v, _)| *v)
    }

    pub fn mentions(&self, v: Variable) -> bool {
        self.coeff(v).is_some()
    }

    /// Truth value when the row has no terms.
    pub fn constant_truth(&self) -> Option<bool> {
        if self.terms.is_empty() {
            Some(self.relation.holds(&self.constant))
        } else {
            None
        }
    }

    /// Value of `Σ cᵢ·vᵢ + constant` at a point; `None` if a variable is unassigned.
    pub fn evaluate<F>(&self, point: F) -> Option<Rational>
    where
        F: Fn(Variable) -> Option<Rational>,
    {
        let mut acc = self.constant.clone();
        for (v, c) in &self.terms {
            acc += point(*v)? * Rational::from_integer(c.clone());
        }
        Some(acc)
    }

    pub fn satisfied_by<F>(&self, point: F) -> Option<bool>
    where
        F: Fn(Variable) -> Option<Rational>,
    {
        self.evaluate(point).map(|value| self.relation.holds(&value))
    }

    /// Rows whose disjunction is the complement of this row.
    pub fn negations(&self) -> Vec<LinearInequality> {
        let negated = self.scaled_negation();
        match self.relation {
            // ¬(e < 0) = -e <= 0
            Relation::Lt => vec![negated.with_relation(Relation::Le)],
            // ¬(e <= 0) = -e < 0
            Relation::Le => vec![negated.with_relation(Relation::Lt)],
            // ¬(e = 0) = e < 0 ∨ -e < 0
            Relation::Eq => vec![self.clone().with_relation(Relation::Lt), negated.with_relation(Relation::Lt)],
        }
    }

    fn scaled_negation(&self) -> LinearInequality {
        LinearInequality {
            terms: self.terms.iter().map(|(v, c)| (*v, -c)).collect(),
            constant: -self.constant.clone(),
            relation: self.relation,
        }
    }

    fn with_relation(mut self, relation: Relation) -> LinearInequality {
        self.relation = relation;
        if relation == Relation::Eq && self.terms.first().is_some_and(|(_, c)| c.is_negative()) {
            return self.scaled_negation();
        }
        self
    }

    /// Splits an equality into its two non-strict halves.
    pub fn as_inequalities(&self) -> Vec<LinearInequality> {
        match self.relation {
            Relation::Eq => {
                vec![self.clone().with_relation(Relation::Le), self.scaled_negation().with_relation(Relation::Le)]
            }
            _ => vec![self.clone()],
        }
    }

    /// `k₁·self + k₂·other`, with `k₁, k₂ > 0` unless the scaled row is an equality.
    pub(crate) fn linear_combination(
        &self,
        k1: &BigInt,
        other: &LinearInequality,
        k2: &BigInt,
        relation: Relation,
    ) -> LinearInequality {
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some((a, _)), Some((b, _))) => a.cmp(b),
                (Some(_), None) => Ordering::Less,
                (None, _) => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    terms.push((self.terms[i].0, &self.terms[i].1 * k1));
                    i += 1;
                }
                Ordering::Greater => {
                    terms.push((other.terms[j].0, &other.terms[j].1 * k2));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 * k1 + &other.terms[j].1 * k2;
                    if !c.is_zero() {
                        terms.push((self.terms[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        let constant =
            &self.constant * Rational::from_integer(k1.clone()) + &other.constant * Rational::from_integer(k2.clone());
        LinearInequality::from_integer_terms(terms, constant, relation)
    }

    /// Replaces each variable by another one (the map must preserve the variable order's injectivity).
    pub fn rename<F>(&self, f: F) -> LinearInequality
    where
        F: Fn(Variable) -> Variable,
    {
        let mut terms: Vec<(Variable, BigInt)> = self.terms.iter().map(|(v, c)| (f(*v), c.clone())).collect();
        terms.sort_by_key(|a| a.0);
        LinearInequality::from_integer_terms(terms, self.constant.clone(), self.relation)
    }

    /// Substitutes fixed values for some variables.
    pub fn substitute<F>(&self, value: F) -> LinearInequality
    where
        F: Fn(Variable) -> Option<Rational>,
    {
        let mut expr = LinearExpr::constant(self.constant.clone());
        for (v, c) in &self.terms {
            let c = Rational::from_integer(c.clone());
            match value(*v) {
                Some(x) => expr.constant += c * x,
                None => {
                    expr.terms.insert(*v, c);
                }
            }
        }
        LinearInequality::from_expr(expr, self.relation)
    }

    /// Display form: leading coefficient positive, relation among `<, <=, =, >=, >`.
    pub fn oriented(&self) -> OrientedRow {
        let flip = self.relation != Relation::Eq && self.terms.first().is_some_and(|(_, c)| c.is_negative());
        let terms: Vec<(Variable, BigInt)> =
            if flip { self.terms.iter().map(|(v, c)| (*v, -c)).collect() } else { self.terms.clone() };
        // Σ c·v + k ⋈ 0  ==>  Σ c·v ⋈ -k ; flipped: Σ (-c)·v ⋈' k
        let rhs = if flip { self.constant.clone() } else { -self.constant.clone() };
        let op = match (self.relation, flip) {
            (Relation::Eq, _) => CmpOp::Eq,
            (Relation::Lt, false) => CmpOp::Lt,
            (Relation::Le, false) => CmpOp::Le,
            (Relation::Lt, true) => CmpOp::Gt,
            (Relation::Le, true) => CmpOp::Ge,
        };
        OrientedRow { terms, op, rhs }
    }

    /// Canonical row order: leading variable, then coefficient vector, then
    /// lower bounds before upper bounds before equalities, then right-hand side.
    pub fn canonical_cmp(&self, other: &LinearInequality) -> Ordering {
        let a = self.oriented();
        let b = other.oriented();
        a.terms
            .cmp(&b.terms)
            .then_with(|| a.direction_rank().cmp(&b.direction_rank()))
            .then_with(|| a.rhs.cmp(&b.rhs))
            .then_with(|| a.op.symbol().cmp(b.op.symbol()))
    }
}

/// A row written as `Σ cᵢ·vᵢ op rhs` with a positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedRow {
    pub terms: Vec<(Variable, BigInt)>,
    pub op: CmpOp,
    pub rhs: Rational,
}

impl OrientedRow {
    fn direction_rank(&self) -> u8 {
        match self.op {
            CmpOp::Ge | CmpOp::Gt => 0,
            CmpOp::Le | CmpOp::Lt => 1,
            CmpOp::Eq => 2,
        }
    }
}
