// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::time::Duration;

use reasoner_core::generator::{BuiltinGenerator, GeneratorError};
use reasoner_core::interpret::{interpret, Verdict};
use reasoner_core::kernel::check_proof;
use reasoner_core::logic::{negate, Theory};
use reasoner_core::search::{prove_both, SearchConfig};
use reasoner_core::syntax::{parse_formula_in, parse_theory};

fn corpus(rel: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn context(rel: &str) -> Theory {
    parse_theory(&corpus(rel)).unwrap().without_theorems()
}

fn solve(theory: &Theory, question: &str) -> Verdict {
    let q = parse_formula_in(theory, question).unwrap();
    let config = SearchConfig {
        time_budget: Duration::from_secs(10),
        ..SearchConfig::default()
    };
    let (pos, neg) = prove_both(theory, &q, || Ok::<_, GeneratorError>(BuiltinGenerator::default()), &config).unwrap();
    for (outcome, target) in [(&pos, q.clone()), (&neg, negate(&q).unwrap())] {
        if let Some(script) = outcome.script() {
            assert!(check_proof(theory, &target, &script).unwrap().is_valid(), "{script}");
        }
    }
    interpret(&pos, &neg).verdict
}

#[test]
fn hudson_questions() {
    let t = context("theories/hudson.thy");
    assert_eq!(solve(&t, "often_meow Hudson"), Verdict::True);
    assert_eq!(solve(&t, "is_animal Hudson"), Verdict::True);
}

#[test]
fn cow_questions() {
    let t = context("theories/cow.thy");
    assert_eq!(solve(&t, "Chases Cow Cow"), Verdict::False);
    assert_eq!(solve(&t, "Red Cat"), Verdict::True);
    assert_eq!(solve(&t, "Round Cow"), Verdict::True);
    assert_eq!(solve(&t, "Round Tiger"), Verdict::Unknown);
}

#[test]
fn turkey_questions() {
    let t = context("parts/turkey_context.thy");
    assert_eq!(solve(&t, "is_ocellated_wild_turkey Tom"), Verdict::True);
    assert_eq!(solve(&t, "is_eastern_wild_turkey Tom"), Verdict::False);
    assert_eq!(solve(&t, "is_wild_turkey Joey"), Verdict::Unknown);
}

#[test]
fn sea_eel_questions() {
    let t = context("parts/sea_eel_context.thy");
    assert_eq!(solve(&t, "is_paper sea_eel"), Verdict::False);
    assert_eq!(solve(&t, "breathes sea_eel"), Verdict::True);
    assert_eq!(solve(&t, "is_fish sea_eel"), Verdict::Unknown);
}
