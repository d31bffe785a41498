//! Derived automata: suffix closure, prefix shift and synchronized product.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{Atom, Bound, Edge, Label, LocationId, Pta};

/// Acceptance condition of a synchronized product.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ProductAcceptance {
    /// Some component is accepting.
    #[default]
    Any,
    /// Every component is accepting; the product language is the intersection.
    All,
}

fn fresh_name(pta: &Pta, base: &str) -> String {
    let mut name = base.to_string();
    while pta.location_id(&name).is_some() {
        name.push('_');
    }
    name
}

fn plain_edge(source: LocationId, target: LocationId, label: Label) -> Edge {
    Edge { source, target, label, guard: Vec::new(), resets: Vec::new() }
}

/// `A′_ℓ`: accepts `L(A_ℓ)·T(Σ)` through a fresh sink location.
pub fn suffix_closure(pta: &Pta, loc: LocationId) -> Pta {
    let mut out = pta.clone();
    let fin = out.add_location(fresh_name(pta, "fin"));
    out.accepting = BTreeSet::from([loc, fin]);
    for a in 0..pta.actions.len() {
        out.edges.push(plain_edge(loc, fin, Label::Action(a)));
    }
    for a in 0..pta.actions.len() {
        out.edges.push(plain_edge(fin, fin, Label::Action(a)));
    }
    out
}

/// `A′₊ₙ`: reads `n` arbitrary events, silently resets every clock and
/// enters the initial location, then accepts once a location with an edge
/// into the original accepting set is reached, followed by anything.
pub fn prefix_shift(pta: &Pta, n: usize) -> Pta {
    assert!(n >= 1, "prefix length must be positive");
    let mut out = pta.clone();
    let chain: Vec<LocationId> = (1..=n + 1).map(|i| out.add_location(fresh_name(pta, &format!("pre{i}")))).collect();
    let fin = out.add_location(fresh_name(pta, "fin"));
    let sigma = 0..pta.actions.len();
    // chain[i] is l_{i+1}; l_{i+1} -a-> l_i
    for i in 1..=n {
        for a in sigma.clone() {
            out.edges.push(plain_edge(chain[i], chain[i - 1], Label::Action(a)));
        }
    }
    out.edges.push(Edge {
        source: chain[0],
        target: pta.initial,
        label: Label::Silent,
        guard: Vec::new(),
        resets: (0..pta.clocks.len()).collect(),
    });
    let mut accepting: BTreeSet<LocationId> =
        pta.edges.iter().filter(|e| pta.is_accepting(e.target)).map(|e| e.source).collect();
    accepting.insert(fin);
    for &l in &accepting {
        for a in sigma.clone() {
            out.edges.push(plain_edge(l, fin, Label::Action(a)));
        }
    }
    out.initial = chain[n];
    out.accepting = accepting;
    out
}

/// Renames every clock and parameter by appending `suffix`, making them disjoint from another copy.
pub fn rename_apart(pta: &Pta, suffix: &str) -> Pta {
    let mut out = pta.clone();
    for c in &mut out.clocks {
        c.push_str(suffix);
    }
    for p in &mut out.params {
        p.push_str(suffix);
    }
    out
}

/// Drops every `$` edge.
pub fn without_terminal(pta: &Pta) -> Pta {
    let mut out = pta.clone();
    out.edges.retain(|e| e.label != Label::Terminal);
    out
}

struct Component<'a> {
    pta: &'a Pta,
    clock_map: Vec<usize>,
    param_map: Vec<usize>,
    /// Product label -> this component's label.
    alphabet: BTreeMap<Label, Label>,
}

fn union_index(names: &mut Vec<String>, name: &str) -> usize {
    match names.iter().position(|n| n == name) {
        Some(i) => i,
        None => {
            names.push(name.to_string());
            names.len() - 1
        }
    }
}

/// Synchronized product with strong broadcast on shared actions; `ε` is
/// always local. Clocks, parameters and actions with equal names are shared.
/// Only tuples reachable in the untimed product graph are built.
pub fn synchronized_product(parts: &[&Pta], acceptance: ProductAcceptance) -> Pta {
    let mut out = Pta::default();
    let mut components = Vec::with_capacity(parts.len());
    for pta in parts {
        let clock_map = pta.clocks.iter().map(|c| union_index(&mut out.clocks, c)).collect();
        let param_map = pta.params.iter().map(|p| union_index(&mut out.params, p)).collect();
        let mut alphabet = BTreeMap::new();
        for (a, name) in pta.actions.iter().enumerate() {
            alphabet.insert(Label::Action(union_index(&mut out.actions, name)), Label::Action(a));
        }
        if pta.edges.iter().any(|e| e.label == Label::Terminal) {
            alphabet.insert(Label::Terminal, Label::Terminal);
        }
        components.push(Component { pta, clock_map, param_map, alphabet });
    }
    let labels: BTreeSet<Label> = components.iter().flat_map(|c| c.alphabet.keys().copied()).collect();

    let initial: Vec<LocationId> = parts.iter().map(|p| p.initial).collect();
    let mut ids: HashMap<Vec<LocationId>, LocationId> = HashMap::new();
    let mut tuples: Vec<Vec<LocationId>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |tuple: Vec<LocationId>, tuples: &mut Vec<Vec<LocationId>>, queue: &mut VecDeque<LocationId>| {
        *ids.entry(tuple.clone()).or_insert_with(|| {
            tuples.push(tuple);
            queue.push_back(tuples.len() - 1);
            tuples.len() - 1
        })
    };
    out.initial = intern(initial, &mut tuples, &mut queue);

    while let Some(id) = queue.pop_front() {
        let tuple = tuples[id].clone();
        for &label in &labels {
            let participants: Vec<usize> =
                (0..components.len()).filter(|&i| components[i].alphabet.contains_key(&label)).collect();
            let choices: Vec<Vec<&Edge>> = participants
                .iter()
                .map(|&i| {
                    let local = components[i].alphabet[&label];
                    components[i].pta.outgoing(tuple[i]).filter(|e| e.label == local).collect()
                })
                .collect();
            if choices.iter().any(Vec::is_empty) {
                continue;
            }
            for combo in cartesian(&choices) {
                let mut target = tuple.clone();
                let mut guard = Vec::new();
                let mut resets = BTreeSet::new();
                for (&i, edge) in participants.iter().zip(&combo) {
                    target[i] = edge.target;
                    guard.extend(edge.guard.iter().map(|a| remap_atom(a, &components[i])));
                    resets.extend(edge.resets.iter().map(|c| components[i].clock_map[*c]));
                }
                let target = intern(target, &mut tuples, &mut queue);
                out.edges.push(Edge { source: id, target, label, guard, resets: resets.into_iter().collect() });
            }
        }
        for (i, comp) in components.iter().enumerate() {
            for edge in comp.pta.outgoing(tuple[i]).filter(|e| e.label == Label::Silent) {
                let mut target = tuple.clone();
                target[i] = edge.target;
                let target = intern(target, &mut tuples, &mut queue);
                out.edges.push(Edge {
                    source: id,
                    target,
                    label: Label::Silent,
                    guard: edge.guard.iter().map(|a| remap_atom(a, comp)).collect(),
                    resets: edge.resets.iter().map(|c| comp.clock_map[*c]).collect(),
                });
            }
        }
    }

    for (id, tuple) in tuples.iter().enumerate() {
        let names: Vec<&str> = tuple.iter().zip(parts).map(|(l, p)| p.locations[*l].as_str()).collect();
        out.locations.push(names.join("|"));
        let flags = tuple.iter().zip(parts).map(|(l, p)| p.is_accepting(*l));
        let accepting = match acceptance {
            ProductAcceptance::Any => flags.into_iter().any(|f| f),
            ProductAcceptance::All => flags.into_iter().all(|f| f),
        };
        if accepting {
            out.accepting.insert(id);
        }
    }
    out
}

fn remap_atom(atom: &Atom, comp: &Component<'_>) -> Atom {
    Atom {
        clock: comp.clock_map[atom.clock],
        op: atom.op,
        bound: match &atom.bound {
            Bound::Const(c) => Bound::Const(c.clone()),
            Bound::Param(p) => Bound::Param(comp.param_map[*p]),
        },
    }
}

fn cartesian<'a>(choices: &[Vec<&'a Edge>]) -> Vec<Vec<&'a Edge>> {
    let mut acc: Vec<Vec<&Edge>> = vec![Vec::new()];
    for options in choices {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |e| {
                    let mut next = prefix.clone();
                    next.push(*e);
                    next
                })
            })
            .collect();
    }
    acc
}
