use proptest::prelude::*;

use ptpm_core::geometry::LinearExpr;
use ptpm_core::online::Stepper;
use ptpm_core::patterns::word_alphabet;
use ptpm_core::pta::{accepts, rename_apart, synchronized_product, ProductAcceptance, Symbol};
use ptpm_core::skip::{compute_vln, DEFAULT_BUDGET};
use ptpm_core::{
    builtin, compute_tables, generate_word, match_online, parse_pta, Event, Polyhedron, Rational, Region, TableOptions,
    TimedWord, Variable, WordSpec,
};

fn tenths(k: i64) -> Rational {
    Rational::new(k.into(), 10.into())
}

/// Words over `alphabet` with gaps of 0.1–1.5.
fn word(alphabet: &'static [&'static str], max_len: usize) -> impl Strategy<Value = TimedWord> {
    prop::collection::vec((0..alphabet.len(), 1i64..=15), 0..=max_len).prop_map(move |steps| {
        let mut now = 0;
        let events = steps
            .into_iter()
            .map(|(a, gap)| {
                now += gap;
                Event::new(alphabet[a], tenths(now))
            })
            .collect();
        TimedWord::new(events).unwrap()
    })
}

/// Matches starting in `[τ_{k−1}, τ_k)`.
fn window(region: &Region, word: &TimedWord, k: usize) -> Region {
    let t = LinearExpr::var(Variable::Start);
    region
        .conjoin_row(&t.clone().ge(LinearExpr::constant(word.tau(k - 1))))
        .conjoin_row(&t.lt(LinearExpr::constant(word.tau(k))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fig3_region_matches_oracle(w in word(&["a"], 5), t in 0i64..=80, len in 1i64..=40, p in 0i64..=30) {
        let pta = builtin("fig3").unwrap();
        let (region, _) = match_online(&pta, &w);
        let (t, t_end, p) = (tenths(t), tenths(t + len), tenths(p));
        let member = region.contains(|v| match v {
            Variable::Start => Some(t.clone()),
            Variable::End => Some(t_end.clone()),
            Variable::Param(0) => Some(p.clone()),
            _ => None,
        });
        let ta = pta.valuate(&[p]).unwrap();
        prop_assert_eq!(member, accepts(&ta, &w.segment(&t, &t_end).unwrap()));
    }

    #[test]
    fn product_is_intersection(w in word(&["a", "b"], 5), end in 1i64..=20) {
        let left = parse_pta("clocks: x\nparams:\nactions: a b\nloc s initial\nloc m\nloc f accepting\n\
            edge s -> s on b\nedge s -> m on a when x > 1\nedge m -> m on a\nedge m -> m on b\nedge m -> f on $\n").unwrap();
        let right = parse_pta("clocks: x\nparams:\nactions: a b\nloc s initial\nloc f accepting\n\
            edge s -> s on a reset x\nedge s -> s on b when x < 1\nedge s -> f on $ when x <= 2\n").unwrap();
        let right = rename_apart(&right, "#2");
        let product = synchronized_product(&[&left, &right], ProductAcceptance::All);
        let mut timed: Vec<(Symbol, Rational)> =
            w.events().iter().map(|e| (Symbol::Action(e.action.clone()), e.timestamp.clone())).collect();
        timed.push((Symbol::Terminal, w.tau(w.len()) + tenths(end)));
        prop_assert_eq!(accepts(&product, &timed), accepts(&left, &timed) && accepts(&right, &timed));
    }
}

/// KMP windows: after any configuration `(ℓ, C)` reached by the trial
/// from `i`, the next `Δ_KMP(ℓ, C↓P) − 1` start windows hold no match.
#[test]
fn kmp_skipped_windows_are_empty() {
    for name in ["gear", "fig3", "onlytiming", "fig1a", "accel", "gear-np", "onlytiming-np"] {
        let pta = builtin(name).unwrap();
        let tables = compute_tables(&pta, TableOptions::default()).unwrap();
        let stepper = Stepper::new(&pta);
        for seed in 0..6 {
            let w = generate_word(&WordSpec::new(word_alphabet(name), 24, seed));
            let (region, _) = match_online(&pta, &w);
            let events = w.events();
            for i in 1..=w.len() {
                let mut confs = vec![stepper.initial_configuration(&w.tau(i - 1), Some(&w.tau(i)))];
                for event in &events[i - 1..] {
                    confs = stepper.step(&confs, event);
                    for c in &confs {
                        let v: Polyhedron = c.constraint.project(Variable::is_param);
                        let skip = tables.delta_kmp_polyhedron(c.location, &v);
                        for n in (1..skip).filter(|n| i + n <= w.len()) {
                            assert!(
                                window(&region, &w, i + n).is_empty(),
                                "{name} seed {seed}: trial {i} at {} skips window {}",
                                pta.locations[c.location],
                                i + n
                            );
                        }
                    }
                    if confs.is_empty() {
                        break;
                    }
                }
            }
        }
    }
}

/// Quick Search windows: looking at `a_{i+N}`, the next `Δ_QS − 1` start windows hold no match.
#[test]
fn quick_search_skipped_windows_are_empty() {
    for name in ["gear", "fig3", "onlytiming", "fig1a", "accel"] {
        let pta = builtin(name).unwrap();
        let tables = compute_tables(&pta, TableOptions::default()).unwrap();
        for seed in 0..6 {
            let w = generate_word(&WordSpec::new(word_alphabet(name), 30, seed));
            let (region, _) = match_online(&pta, &w);
            for i in (1..=w.len()).filter(|i| i + tables.n <= w.len()) {
                let skip = tables.delta_qs(&w.events()[i + tables.n - 1].action);
                assert!((1..=tables.n + 1).contains(&skip));
                for m in (1..skip).filter(|m| i + m <= w.len()) {
                    assert!(window(&region, &w, i + m).is_empty(), "{name} seed {seed}: i={i} m={m}");
                }
            }
        }
    }
}

#[test]
fn smaller_budgets_over_approximate() {
    for name in ["gear", "fig3", "onlytiming"] {
        let pta = builtin(name).unwrap();
        for loc in 0..pta.locations.len() {
            for n in 1..=3 {
                let exact = compute_vln(&pta, loc, n, DEFAULT_BUDGET);
                for budget in [0, 1, 3, 10] {
                    let approx = compute_vln(&pta, loc, n, budget);
                    assert!(approx.includes(&exact), "{name} {} n={n} budget={budget}", pta.locations[loc]);
                }
            }
        }
    }
}

#[test]
fn tables_are_reproducible() {
    for name in ["gear", "accel", "onlytiming"] {
        let pta = builtin(name).unwrap();
        let a = compute_tables(&pta, TableOptions::default()).unwrap();
        let b = compute_tables(&pta, TableOptions::default()).unwrap();
        let text = |t: &ptpm_core::SkipTables| serde_json::to_string(&t.to_json(&pta)).unwrap();
        assert_eq!(text(&a), text(&b));
        assert!(a.kmp_np.iter().all(|&d| (1..=a.n_max).contains(&d)));
    }
}
