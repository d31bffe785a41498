//! Canonical text and JSON serializations of polyhedra and regions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::linear::{CmpOp, LinearExpr, LinearInequality, Relation, Variable};
use super::polyhedron::Polyhedron;
use super::rational::{format_fraction, format_rational, parse_rational, Rational};
use super::region::Region;

/// Display names for parameters and clocks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VariableNames {
    pub params: Vec<String>,
    pub clocks: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegionSyntaxError {
    #[error("line {line}: {message}")]
    Text { line: usize, message: String },
    #[error("json: {0}")]
    Json(String),
}

impl VariableNames {
    pub fn new(params: Vec<String>, clocks: Vec<String>) -> Self {
        VariableNames { params, clocks }
    }

    pub fn name(&self, v: Variable) -> String {
        match v {
            Variable::Start => "t".to_string(),
            Variable::End => "t'".to_string(),
            Variable::Param(i) => self.params.get(i as usize).cloned().unwrap_or_else(|| format!("p{i}")),
            Variable::Clock(i) => self.clocks.get(i as usize).cloned().unwrap_or_else(|| format!("x{i}")),
            Variable::Aux(i) => format!("_aux{i}"),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Variable> {
        match name {
            "t" => return Some(Variable::Start),
            "t'" => return Some(Variable::End),
            _ => {}
        }
        if let Some(i) = self.params.iter().position(|p| p == name) {
            return Some(Variable::Param(i as u32));
        }
        self.clocks.iter().position(|x| x == name).map(|i| Variable::Clock(i as u32))
    }
}

/// Terms are printed parameters first, then clocks, then `t` and `t'`.
fn display_rank(v: Variable) -> (u8, u32) {
    match v {
        Variable::Param(i) => (0, i),
        Variable::Clock(i) => (1, i),
        Variable::Start => (2, 0),
        Variable::End => (3, 0),
        Variable::Aux(i) => (4, i),
    }
}

pub fn format_row(row: &LinearInequality, names: &VariableNames) -> String {
    let oriented = row.oriented();
    let mut terms = oriented.terms.clone();
    terms.sort_by_key(|(v, _)| display_rank(*v));
    let lhs = terms.iter().map(|(v, c)| format!("{}*{}", c, names.name(*v))).collect::<Vec<_>>().join(" + ");
    format!("{} {} {}", lhs, oriented.op, format_rational(&oriented.rhs))
}

/// Canonical text of one polyhedron: minimized, one row per line.
pub fn format_polyhedron(poly: &Polyhedron, names: &VariableNames) -> String {
    let min = poly.minimize();
    if min.is_trivially_empty() {
        return "false".to_string();
    }
    if min.rows().is_empty() {
        return "true".to_string();
    }
    min.rows().iter().map(|r| format_row(r, names)).collect::<Vec<_>>().join("\n")
}

/// Canonical text of a region: one block per disjunct, blank-line separated.
pub fn format_region(region: &Region, names: &VariableNames) -> String {
    let mut out = region.disjuncts().iter().map(|d| format_polyhedron(d, names)).collect::<Vec<_>>().join("\n\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

pub fn parse_row(line: &str, names: &VariableNames) -> Result<LinearInequality, String> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let op_pos =
        tokens.iter().position(|t| CmpOp::parse(t).is_some()).ok_or_else(|| format!("missing relation in `{line}`"))?;
    if op_pos + 2 != tokens.len() {
        return Err(format!("expected a single right-hand side in `{line}`"));
    }
    let op = CmpOp::parse(tokens[op_pos]).expect("checked");
    let rhs = parse_rational(tokens[op_pos + 1]).map_err(|e| e.to_string())?;
    let mut lhs = LinearExpr::zero();
    let mut sign = Rational::from_integer(BigInt::from(1));
    let mut expect_term = true;
    for tok in &tokens[..op_pos] {
        if !expect_term {
            match *tok {
                "+" => sign = Rational::from_integer(BigInt::from(1)),
                "-" => sign = Rational::from_integer(BigInt::from(-1)),
                other => return Err(format!("expected `+` or `-`, found `{other}`")),
            }
            expect_term = true;
            continue;
        }
        let (coeff, name) = tok.split_once('*').ok_or_else(|| format!("malformed term `{tok}`"))?;
        let coeff = parse_rational(coeff).map_err(|e| e.to_string())?;
        let var = names.lookup(name).ok_or_else(|| format!("unknown variable `{name}`"))?;
        lhs = lhs + LinearExpr::term(var, coeff * &sign);
        expect_term = false;
    }
    if expect_term {
        return Err(format!("malformed left-hand side in `{line}`"));
    }
    Ok(lhs.cmp_op(op, LinearExpr::constant(rhs)))
}

pub fn parse_region(text: &str, names: &VariableNames) -> Result<Region, RegionSyntaxError> {
    let mut region = Region::empty();
    let mut current: Option<Vec<LinearInequality>> = None;
    let flush = |current: &mut Option<Vec<LinearInequality>>, region: &mut Region| {
        if let Some(rows) = current.take() {
            region.add(Polyhedron::from_rows(rows));
        }
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            flush(&mut current, &mut region);
            continue;
        }
        let rows = current.get_or_insert_with(Vec::new);
        match line {
            "true" => {}
            "false" => rows.push(LinearInequality::from_expr(
                LinearExpr::constant(Rational::from_integer(BigInt::from(1))),
                Relation::Le,
            )),
            _ => {
                rows.push(parse_row(line, names).map_err(|message| RegionSyntaxError::Text { line: idx + 1, message })?)
            }
        }
    }
    flush(&mut current, &mut region);
    Ok(region)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionJson {
    pub pattern_hash: String,
    pub disjuncts: Vec<PolyhedronJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyhedronJson {
    pub inequalities: Vec<InequalityJson>,
}

/// `Σ coeffs[v]·v rel rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityJson {
    pub coeffs: BTreeMap<String, Value>,
    pub rel: String,
    pub rhs: String,
}

fn int_value(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(c.to_string()),
    }
}

fn value_int(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| format!("coefficient `{n}` is not an integer")),
        Value::String(s) => s.parse().map_err(|_| format!("coefficient `{s}` is not an integer")),
        other => Err(format!("coefficient `{other}` is not an integer")),
    }
}

pub fn region_to_json(region: &Region, names: &VariableNames, pattern_hash: &str) -> RegionJson {
    let disjuncts = region
        .disjuncts()
        .iter()
        .map(|d| {
            let min = d.minimize();
            PolyhedronJson {
                inequalities: min
                    .rows()
                    .iter()
                    .map(|row| InequalityJson {
                        coeffs: row.terms().iter().map(|(v, c)| (names.name(*v), int_value(c))).collect(),
                        rel: match row.relation() {
                            Relation::Lt => "<",
                            Relation::Le => "<=",
                            Relation::Eq => "=",
                        }
                        .to_string(),
                        rhs: format_fraction(&-row.constant().clone()),
                    })
                    .collect(),
            }
        })
        .collect();
    RegionJson { pattern_hash: pattern_hash.to_string(), disjuncts }
}

pub fn region_from_json(json: &RegionJson, names: &VariableNames) -> Result<Region, RegionSyntaxError> {
    let err = RegionSyntaxError::Json;
    let mut region = Region::empty();
    for d in &json.disjuncts {
        let mut rows = Vec::new();
        for ineq in &d.inequalities {
            let mut lhs = LinearExpr::zero();
            for (name, c) in &ineq.coeffs {
                let var = names.lookup(name).ok_or_else(|| err(format!("unknown variable `{name}`")))?;
                let c = value_int(c).map_err(err)?;
                if !c.is_zero() {
                    lhs = lhs + LinearExpr::term(var, Rational::from_integer(c));
                }
            }
            let op = match ineq.rel.as_str() {
                "<" => CmpOp::Lt,
                "<=" => CmpOp::Le,
                "=" => CmpOp::Eq,
                other => return Err(err(format!("unknown relation `{other}`"))),
            };
            let rhs = parse_rational(&ineq.rhs).map_err(|e| err(e.to_string()))?;
            rows.push(lhs.cmp_op(op, LinearExpr::constant(rhs)));
        }
        region.add(Polyhedron::from_rows(rows));
    }
    Ok(region)
}

/// True when a coefficient list would print with a leading minus sign.
pub fn has_negative_terms(row: &LinearInequality) -> bool {
    row.oriented().terms.iter().any(|(_, c)| c.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rational::{int, rat};

    fn names() -> VariableNames {
        VariableNames::new(vec!["p".into()], vec!["x".into()])
    }

    fn fig3_region() -> Region {
        let t = || LinearExpr::var(Variable::Start);
        let te = || LinearExpr::var(Variable::End);
        let p = || LinearExpr::var(Variable::Param(0));
        let k = LinearExpr::constant;
        Region::from_polyhedron(Polyhedron::from_rows([
            te().lt(k(rat(51, 10))),
            (p() + t()).gt(k(rat(41, 10))),
            t().ge(k(rat(7, 10))),
            te().gt(k(rat(41, 10))),
            t().lt(k(int(1))),
            p().ge(k(int(0))),
            t().lt(te()),
        ]))
    }

    #[test]
    fn canonical_text_order() {
        let text = format_region(&fig3_region(), &names());
        assert_eq!(text, "1*t >= 7/10\n1*t < 1\n1*p + 1*t > 41/10\n1*t' > 41/10\n1*t' < 51/10\n");
    }

    #[test]
    fn negative_coefficients_print_inline() {
        let row = LinearExpr::var(Variable::Start).lt(LinearExpr::var(Variable::Param(0)));
        assert_eq!(format_row(&row, &names()), "-1*p + 1*t < 0");
        assert!(has_negative_terms(&row));
    }

    #[test]
    fn text_round_trip() {
        let region = fig3_region();
        let text = format_region(&region, &names());
        let back = parse_region(&text, &names()).unwrap();
        assert!(back.equals(&region));
        assert_eq!(format_region(&back, &names()), text);
    }

    #[test]
    fn json_round_trip() {
        let region = fig3_region();
        let json = region_to_json(&region, &names(), "abc");
        let encoded = serde_json::to_string(&json).unwrap();
        let decoded: RegionJson = serde_json::from_str(&encoded).unwrap();
        let back = region_from_json(&decoded, &names()).unwrap();
        assert!(back.equals(&region));
        assert!(encoded.contains("\"rhs\":\"-7/10\"") || encoded.contains("\"rhs\":\"7/10\""));
    }

    #[test]
    fn bad_text_reports_line() {
        let err = parse_region("1*t < 1\n1*q < 2\n", &names()).unwrap_err();
        assert!(matches!(err, RegionSyntaxError::Text { line: 2, .. }));
    }
}
