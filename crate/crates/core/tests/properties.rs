// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;

use reasoner_core::generator::{log_softmax, rank_candidates, Candidate, Provenance};
use reasoner_core::kernel::Tactic;
use reasoner_core::logic::{canonical_text, Binder, Formula, Term};
use reasoner_core::retrieval::recall_at_k;
use reasoner_core::syntax::{parse_formula, parse_tactic, print_formula};

#[derive(Clone, Debug)]
enum Shape {
    Falsum,
    Atom(usize, Vec<u8>),
    Not(Box<Shape>),
    Bin(u8, Box<Shape>, Box<Shape>),
    Quant(bool, usize, Box<Shape>),
}

const PREDS: [(&str, usize); 4] = [("P", 1), ("Q", 1), ("R", 2), ("S", 0)];
const CONSTS: [&str; 3] = ["a", "b", "Cat"];
const NAMES: [&str; 3] = ["x", "y", "z"];

fn shape() -> impl Strategy<Value = Shape> {
    let leaf = prop_oneof![
        1 => Just(Shape::Falsum),
        6 => (0..PREDS.len(), prop::collection::vec(any::<u8>(), 2)).prop_map(|(p, a)| Shape::Atom(p, a)),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|s| Shape::Not(Box::new(s))),
            (0u8..4, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Shape::Bin(op, Box::new(a), Box::new(b))),
            (any::<bool>(), 0..NAMES.len(), inner).prop_map(|(q, n, b)| Shape::Quant(q, n, Box::new(b))),
        ]
    })
}

fn build(s: &Shape, bound: u32, names: &[&str]) -> Formula {
    match s {
        Shape::Falsum => Formula::Falsum,
        Shape::Atom(p, args) => {
            let (name, arity) = PREDS[*p];
            let args = args[..arity]
                .iter()
                .map(|&b| {
                    if bound > 0 && b % 2 == 0 {
                        Term::Var(u32::from(b / 2) % bound)
                    } else {
                        Term::constant(CONSTS[usize::from(b) % CONSTS.len()])
                    }
                })
                .collect();
            Formula::Atom(name.into(), args)
        }
        Shape::Not(a) => Formula::not(build(a, bound, names)),
        Shape::Bin(op, a, b) => {
            let (a, b) = (build(a, bound, names), build(b, bound, names));
            match op {
                0 => Formula::and(a, b),
                1 => Formula::or(a, b),
                2 => Formula::implies(a, b),
                _ => Formula::iff(a, b),
            }
        }
        Shape::Quant(forall, n, body) => {
            let binder = Binder::new(names[*n], "obj");
            let body = Box::new(build(body, bound + 1, names));
            if *forall {
                Formula::Forall(binder, body)
            } else {
                Formula::Exists(binder, body)
            }
        }
    }
}

fn cand(text: &str, logprob: f64) -> Candidate {
    Candidate {
        tactic: parse_tactic(text).unwrap(),
        logprob,
        provenance: Provenance::Builtin,
    }
}

fn texts(cs: &[Candidate]) -> Vec<String> {
    cs.iter().map(|c| c.tactic.to_string()).collect()
}

proptest! {
    #[test]
    fn printed_formulas_parse_back(s in shape()) {
        let f = build(&s, 0, &NAMES);
        let printed = print_formula(&f);
        let back = parse_formula(&printed).map_err(|e| TestCaseError::fail(format!("{printed}: {e}")))?;
        prop_assert_eq!(canonical_text(&back), canonical_text(&f), "{}", printed);
    }

    #[test]
    fn canonical_text_ignores_binder_names(s in shape()) {
        let a = build(&s, 0, &NAMES);
        let b = build(&s, 0, &["u", "v", "w"]);
        prop_assert_eq!(canonical_text(&a), canonical_text(&b));
    }

    #[test]
    fn recall_is_monotone_in_k(gt in prop::collection::vec(0u8..10, 1..6), pred in prop::collection::vec(0u8..10, 0..10)) {
        let gt: Vec<String> = gt.iter().map(|i| format!("A{i}")).collect();
        let mut pred: Vec<String> = pred.iter().map(|i| format!("A{i}")).collect();
        let mut seen = std::collections::HashSet::new();
        pred.retain(|p| seen.insert(p.clone()));
        let mut last = 0.0;
        for k in 1..=pred.len() + 1 {
            let r = recall_at_k(&gt, &pred, k).unwrap();
            prop_assert!((0.0..=1.0).contains(&r) && r >= last);
            last = r;
        }
    }

    #[test]
    fn ranking_ignores_a_shared_offset(scores in prop::collection::vec(-20.0f64..0.0, 1..8), shift in -5.0f64..0.0, k in 1usize..10) {
        let names = ["exact A1", "apply A2", "intro h", "split", "left", "right", "assumption", "contradiction"];
        let base: Vec<Candidate> = scores.iter().zip(names).map(|(&s, n)| cand(n, s)).collect();
        let shifted: Vec<Candidate> = scores.iter().zip(names).map(|(&s, n)| cand(n, s + shift)).collect();
        prop_assert_eq!(texts(&rank_candidates(base, k)), texts(&rank_candidates(shifted, k)));
    }

    #[test]
    fn log_softmax_normalizes(mut scores in prop::collection::vec(-30.0f64..30.0, 1..10)) {
        let before = scores.clone();
        log_softmax(&mut scores);
        let total: f64 = scores.iter().map(|s| s.exp()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        for i in 0..scores.len() {
            prop_assert!(scores[i] <= 0.0);
            for j in 0..scores.len() {
                if before[i] < before[j] {
                    prop_assert!(scores[i] <= scores[j]);
                }
            }
        }
    }
}

#[test]
fn ties_break_on_tactic_text() {
    let ranked = rank_candidates(vec![cand("split", -1.0), cand("apply A1", -1.0), cand("exact A2", -0.5)], 2);
    assert_eq!(texts(&ranked), ["exact A2", "apply A1"]);
    assert!(matches!(ranked[1].tactic, Tactic::Apply(_)));
}
