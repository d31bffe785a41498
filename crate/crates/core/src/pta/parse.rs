use std::collections::BTreeSet;

use log::warn;
use serde::{Deserialize, Serialize};

use super::{Atom, Bound, Edge, Label, Pta, PtaError, SILENT, TERMINAL};
use crate::geometry::{parse_rational, CmpOp, Rational};

fn syntax(line: usize, column: usize, message: impl Into<String>) -> PtaError {
    PtaError::Syntax { line, column, message: message.into() }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '#' || c == '.')
}

fn check_name(name: &str, line: usize, column: usize) -> Result<(), PtaError> {
    if name == TERMINAL || name == SILENT || name == "ε" {
        return Err(PtaError::Reserved(name.to_string()));
    }
    if !is_identifier(name) {
        return Err(syntax(line, column, format!("invalid name `{name}`")));
    }
    Ok(())
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(s, t)| (line[..s].chars().count() + 1, t)).collect()
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        // `#` inside names (used by renamed copies) is only allowed right after a word character.
        Some(i) if i == 0 || line[..i].ends_with(char::is_whitespace) => &line[..i],
        _ => line,
    }
}

/// Parses the line-oriented pattern format and validates it as a pattern.
pub fn parse_pta(text: &str) -> Result<Pta, PtaError> {
    let pta = parse_unvalidated(text)?;
    for warning in pta.validate_pattern()? {
        warn!("{warning}");
    }
    Ok(pta)
}

pub(crate) fn parse_unvalidated(text: &str) -> Result<Pta, PtaError> {
    let mut pta = Pta::default();
    let mut initial: Option<usize> = None;
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();

    // Declarations first so edges may refer to locations declared later.
    for &(lineno, line) in &lines {
        let toks = tokens(line);
        let (col, head) = toks[0];
        if let Some(rest) = head.strip_suffix(':') {
            let names: Vec<(usize, &str)> = toks[1..].to_vec();
            for &(c, name) in &names {
                check_name(name, lineno, c)?;
            }
            match rest {
                "clocks" => {
                    for (_, name) in names {
                        if pta.clock_id(name).is_some() {
                            return Err(PtaError::Duplicate(name.to_string()));
                        }
                        pta.add_clock(name);
                    }
                }
                "params" => {
                    for (_, name) in names {
                        if pta.param_id(name).is_some() {
                            return Err(PtaError::Duplicate(name.to_string()));
                        }
                        pta.add_param(name);
                    }
                }
                "actions" => {
                    for (_, name) in names {
                        pta.intern_action(name);
                    }
                }
                other => return Err(syntax(lineno, col, format!("unknown header `{other}:`"))),
            }
        } else if head == "loc" {
            let &(c, name) = toks.get(1).ok_or_else(|| syntax(lineno, col + 3, "missing location name"))?;
            check_name(name, lineno, c)?;
            if pta.location_id(name).is_some() {
                return Err(PtaError::Duplicate(name.to_string()));
            }
            let id = pta.add_location(name);
            for &(c, flag) in &toks[2..] {
                match flag {
                    "initial" => {
                        if initial.is_some() {
                            return Err(PtaError::MultipleInitial);
                        }
                        initial = Some(id);
                    }
                    "accepting" => {
                        pta.accepting.insert(id);
                    }
                    other => return Err(syntax(lineno, c, format!("unknown location flag `{other}`"))),
                }
            }
        } else if head != "edge" {
            return Err(syntax(lineno, col, format!("unexpected `{head}`")));
        }
    }
    pta.initial = initial.ok_or(PtaError::NoInitial)?;

    for &(lineno, line) in &lines {
        let toks = tokens(line);
        if toks[0].1 != "edge" {
            continue;
        }
        let edge = parse_edge(&mut pta, &toks, lineno)?;
        pta.edges.push(edge);
    }
    Ok(pta)
}

fn parse_edge(pta: &mut Pta, toks: &[(usize, &str)], lineno: usize) -> Result<Edge, PtaError> {
    let end_col = toks.last().map(|(c, t)| c + t.chars().count()).unwrap_or(1);
    let at = |i: usize| toks.get(i).copied().ok_or_else(|| syntax(lineno, end_col, "unexpected end of edge"));
    let (_, source) = at(1)?;
    let (c, arrow) = at(2)?;
    if arrow != "->" {
        return Err(syntax(lineno, c, format!("expected `->`, found `{arrow}`")));
    }
    let (_, target) = at(3)?;
    let (c, on) = at(4)?;
    if on != "on" {
        return Err(syntax(lineno, c, format!("expected `on`, found `{on}`")));
    }
    let (ac, action) = at(5)?;
    let source = pta.location_id(source).ok_or_else(|| PtaError::UnknownLocation(source.to_string()))?;
    let target = pta.location_id(target).ok_or_else(|| PtaError::UnknownLocation(target.to_string()))?;
    let label = match action {
        TERMINAL => Label::Terminal,
        SILENT | "ε" => Label::Silent,
        name => {
            check_name(name, lineno, ac)?;
            Label::Action(pta.intern_action(name))
        }
    };

    let mut guard = Vec::new();
    let mut resets = Vec::new();
    let mut i = 6;
    while i < toks.len() {
        let (c, kw) = toks[i];
        match kw {
            "when" => {
                // Collect tokens up to `reset` and split on `&`.
                let mut j = i + 1;
                while j < toks.len() && toks[j].1 != "reset" {
                    j += 1;
                }
                let atom_toks = &toks[i + 1..j];
                if atom_toks.is_empty() {
                    return Err(syntax(lineno, c, "empty guard"));
                }
                for group in atom_toks.split(|(_, t)| *t == "&") {
                    if group.is_empty() {
                        return Err(syntax(lineno, c, "empty guard atom"));
                    }
                    if group.len() == 1 && group[0].1 == "true" {
                        continue;
                    }
                    guard.push(parse_atom(pta, group, lineno)?);
                }
                i = j;
            }
            "reset" => {
                let rest: String = toks[i + 1..].iter().map(|(_, t)| *t).collect::<Vec<_>>().join("");
                if rest.is_empty() {
                    return Err(syntax(lineno, c, "empty reset list"));
                }
                for name in rest.split(',').filter(|n| !n.is_empty()) {
                    let clock = pta.clock_id(name).ok_or_else(|| PtaError::UnknownClock(name.to_string()))?;
                    if !resets.contains(&clock) {
                        resets.push(clock);
                    }
                }
                i = toks.len();
            }
            other => return Err(syntax(lineno, c, format!("expected `when` or `reset`, found `{other}`"))),
        }
    }
    resets.sort_unstable();
    Ok(Edge { source, target, label, guard, resets })
}

const OPERATORS: [&str; 6] = ["<=", ">=", "==", "<", ">", "="];

fn parse_atom(pta: &Pta, group: &[(usize, &str)], lineno: usize) -> Result<Atom, PtaError> {
    let col = group[0].0;
    let text: String = group.iter().map(|(_, t)| *t).collect::<Vec<_>>().join("");
    let (pos, op_text) = OPERATORS
        .iter()
        .filter_map(|op| text.find(op).map(|p| (p, *op)))
        .min_by_key(|(p, op)| (*p, usize::MAX - op.len()))
        .ok_or_else(|| syntax(lineno, col, format!("missing comparison in `{text}`")))?;
    let op = CmpOp::parse(op_text).expect("listed operator");
    let lhs = &text[..pos];
    let rhs = &text[pos + op_text.len()..];
    let clock = pta.clock_id(lhs).ok_or_else(|| {
        if lhs.is_empty() {
            syntax(lineno, col, "missing clock in guard atom")
        } else {
            PtaError::UnknownClock(lhs.to_string())
        }
    })?;
    let bound = if let Some(p) = pta.param_id(rhs) {
        Bound::Param(p)
    } else if rhs.starts_with(|c: char| c.is_ascii_digit() || c == '.' || c == '-' || c == '+') {
        let value = parse_rational(rhs).map_err(|e| syntax(lineno, col, e.to_string()))?;
        if value < Rational::default() {
            return Err(syntax(lineno, col, "guard constants must be nonnegative"));
        }
        Bound::Const(value)
    } else if rhs.is_empty() {
        return Err(syntax(lineno, col, "missing bound in guard atom"));
    } else {
        return Err(PtaError::UnknownParam(rhs.to_string()));
    };
    Ok(Atom { clock, op, bound })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PtaJson {
    pub clocks: Vec<String>,
    pub params: Vec<String>,
    #[serde(default)]
    pub actions: Vec<String>,
    pub locations: Vec<LocationJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationJson {
    pub name: String,
    #[serde(default)]
    pub initial: bool,
    #[serde(default)]
    pub accepting: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub source: String,
    pub target: String,
    pub action: String,
    /// Atoms in text form, e.g. `x < p`.
    #[serde(default)]
    pub guard: Vec<String>,
    #[serde(default)]
    pub resets: Vec<String>,
}

pub fn pta_to_json(pta: &Pta) -> PtaJson {
    PtaJson {
        clocks: pta.clocks.clone(),
        params: pta.params.clone(),
        actions: pta.actions.clone(),
        locations: pta
            .locations
            .iter()
            .enumerate()
            .map(|(id, name)| LocationJson {
                name: name.clone(),
                initial: id == pta.initial,
                accepting: pta.is_accepting(id),
            })
            .collect(),
        edges: pta
            .edges
            .iter()
            .map(|e| EdgeJson {
                source: pta.locations[e.source].clone(),
                target: pta.locations[e.target].clone(),
                action: pta.label_name(e.label).to_string(),
                guard: e.guard.iter().map(|a| pta.guard_text(std::slice::from_ref(a))).collect(),
                resets: e.resets.iter().map(|c| pta.clocks[*c].clone()).collect(),
            })
            .collect(),
    }
}

/// Imports the JSON mirror by rendering it to the text format, so both share validation.
pub fn parse_pta_json(json: &str) -> Result<Pta, PtaError> {
    let doc: PtaJson = serde_json::from_str(json).map_err(|e| PtaError::Json(e.to_string()))?;
    let mut text = format!(
        "clocks: {}\nparams: {}\nactions: {}\n",
        doc.clocks.join(" "),
        doc.params.join(" "),
        doc.actions.join(" ")
    );
    let initials: BTreeSet<&str> = doc.locations.iter().filter(|l| l.initial).map(|l| l.name.as_str()).collect();
    if initials.len() > 1 {
        return Err(PtaError::MultipleInitial);
    }
    for loc in &doc.locations {
        text.push_str(&format!(
            "loc {}{}{}\n",
            loc.name,
            if loc.initial { " initial" } else { "" },
            if loc.accepting { " accepting" } else { "" }
        ));
    }
    for e in &doc.edges {
        text.push_str(&format!("edge {} -> {} on {}", e.source, e.target, e.action));
        if !e.guard.is_empty() {
            text.push_str(&format!(" when {}", e.guard.join(" & ")));
        }
        if !e.resets.is_empty() {
            text.push_str(&format!(" reset {}", e.resets.join(",")));
        }
        text.push('\n');
    }
    parse_pta(&text)
}
