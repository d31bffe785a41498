//! Builtin benchmark patterns and the two small worked examples.

use crate::geometry::rational::int;
use crate::geometry::Rational;
use crate::pta::{parse_pta, Pta};

const GEAR: &str = "\
clocks: x
params: p
actions: g1 g2 g3 g4
loc l0 initial
loc g1
loc g2
loc acc accepting
edge l0 -> g1 on g1 reset x
edge g1 -> g2 on g2 when x < p
edge g2 -> acc on $
";

const ACCEL: &str = "\
clocks: x
params: p
actions: g1 g2 g3 g4 rpmHigh
loc s000 initial
loc s100
loc s200
loc s300
loc s400
loc s001
loc s101
loc s201
loc s301
loc s401
loc f accepting
edge s000 -> s100 on g1
edge s100 -> s200 on g2
edge s200 -> s300 on g3
edge s300 -> s400 on g4 when x <= p reset x
edge s000 -> s001 on rpmHigh
edge s100 -> s101 on rpmHigh
edge s200 -> s201 on rpmHigh
edge s300 -> s301 on rpmHigh
edge s400 -> s401 on rpmHigh
edge s001 -> s101 on g1
edge s101 -> s201 on g2
edge s201 -> s301 on g3
edge s301 -> s401 on g4 when x <= p reset x
edge s401 -> f on $ when x > 0
";

const BLOWUP: &str = "\
clocks: x y
params: p1 p2 p3
actions: a b
loc l1 initial
loc l2
loc l3
loc l4 accepting
edge l1 -> l2 on a reset y
edge l2 -> l3 on b when x < p1
edge l3 -> l4 on $ when x = p1
edge l3 -> l2 on a when y >= p3 & y < p2 reset y
";

const ONLY_TIMING: &str = "\
clocks: x
params: p
actions: a
loc l1 initial
loc l2
loc l3
loc l4
loc l5 accepting
edge l1 -> l2 on a reset x
edge l2 -> l3 on a when x > 1 reset x
edge l3 -> l4 on a when x < p
edge l4 -> l5 on $
";

const INTRO: &str = "\
clocks: x
params: p1 p2
actions: a b
loc l0 initial
loc l1
loc l2
loc l3
loc l4 accepting
edge l0 -> l1 on a when x > p1 reset x
edge l1 -> l2 on a when x < p2 reset x
edge l2 -> l3 on a when x < p2
edge l3 -> l4 on $
";

const RUNNING: &str = "\
clocks: x
params: p
actions: a
loc l0 initial
loc l1
loc l2
loc acc accepting
edge l0 -> l1 on a when x > 1
edge l1 -> l2 on a when x < p reset x
edge l2 -> acc on $ when x < 1
";

/// Names accepted by [`builtin`], benchmark families first.
pub const BUILTIN_NAMES: [&str; 10] =
    ["gear", "gear-np", "accel", "accel-np", "blowup", "blowup-np", "onlytiming", "onlytiming-np", "fig1a", "fig3"];

/// The eight benchmark patterns: four parametric ones and their valuated variants.
pub const BENCHMARK_NAMES: [&str; 8] =
    ["gear", "gear-np", "accel", "accel-np", "blowup", "blowup-np", "onlytiming", "onlytiming-np"];

fn source(family: &str) -> Option<(&'static str, Vec<Rational>)> {
    Some(match family {
        "gear" => (GEAR, vec![int(2)]),
        "accel" => (ACCEL, vec![int(3)]),
        "blowup" => (BLOWUP, vec![int(10), int(2), int(1)]),
        "onlytiming" => (ONLY_TIMING, vec![int(1)]),
        "fig1a" => (INTRO, vec![int(1), int(1)]),
        "fig3" => (RUNNING, vec![int(2)]),
        _ => return None,
    })
}

/// Text source of a parametric builtin, in the pattern file format.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    source(name).map(|(text, _)| text)
}

/// Alphabet words are drawn from when benchmarking a pattern family.
pub fn word_alphabet(name: &str) -> Vec<String> {
    let family = name.strip_suffix("-np").unwrap_or(name);
    let letters: &[&str] = match family {
        "gear" => &["g1", "g2", "g3", "g4"],
        "accel" => &["g1", "g2", "g3", "g4", "rpmHigh"],
        "blowup" | "fig1a" => &["a", "b"],
        _ => &["a"],
    };
    letters.iter().map(|s| s.to_string()).collect()
}

/// A builtin pattern by name; `-np` variants fix the parameters to the benchmark values.
pub fn builtin(name: &str) -> Option<Pta> {
    let (family, valuated) = match name.strip_suffix("-np") {
        Some(f) => (f, true),
        None => (name, false),
    };
    if valuated && !["gear", "accel", "blowup", "onlytiming"].contains(&family) {
        return None;
    }
    let (text, values) = source(family)?;
    let pta = parse_pta(text).expect("builtin pattern parses");
    Some(if valuated { pta.valuate(&values).expect("builtin valuation") } else { pta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pta::{Bound, Label};

    #[test]
    fn all_builtins_parse() {
        for name in BUILTIN_NAMES {
            let pta = builtin(name).unwrap();
            assert!(pta.shortest_untimed_accepting().is_some(), "{name}");
        }
        assert!(builtin("fig3-np").is_none());
        assert!(builtin("nope").is_none());
    }

    #[test]
    fn shapes() {
        let gear = builtin("gear").unwrap();
        assert_eq!((gear.clocks.len(), gear.params.len(), gear.locations.len()), (1, 1, 4));
        let blowup = builtin("blowup").unwrap();
        assert_eq!(blowup.params, vec!["p1", "p2", "p3"]);
        let l3 = blowup.location_id("l3").unwrap();
        let l2 = blowup.location_id("l2").unwrap();
        assert!(blowup.edges.iter().any(|e| e.source == l3 && e.target == l2));
        let accel = builtin("accel").unwrap();
        assert_eq!((accel.locations.len(), accel.edges.len()), (11, 14));
    }

    #[test]
    fn np_substitutions() {
        let blowup = builtin("blowup-np").unwrap();
        assert!(blowup.params.is_empty());
        let consts: Vec<Rational> = blowup
            .edges
            .iter()
            .flat_map(|e| e.guard.iter())
            .map(|a| match &a.bound {
                Bound::Const(c) => c.clone(),
                Bound::Param(_) => unreachable!(),
            })
            .collect();
        assert_eq!(consts, vec![int(10), int(10), int(1), int(2)]);
        let gear = builtin("gear-np").unwrap();
        let g2 = gear.edges.iter().find(|e| gear.label_name(e.label) == "g2").unwrap();
        assert_eq!(g2.guard[0].bound, Bound::Const(int(2)));
        assert!(gear.edges.iter().any(|e| e.label == Label::Terminal));
    }

    #[test]
    fn shortest_matches() {
        let n = |name| builtin(name).unwrap().shortest_untimed_accepting().unwrap();
        assert_eq!(n("gear"), 2);
        assert_eq!(n("fig1a"), 3);
        assert_eq!(n("blowup"), 2);
        assert_eq!(n("accel"), 5);
        assert_eq!(n("onlytiming"), 3);
        assert_eq!(n("fig3"), 2);
    }
}
