// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use reasoner_core::kernel::{check_script, check_theorem, ProofStatus, TacticErrorKind};
use reasoner_core::syntax::{parse_script, parse_theory};

fn corpus(rel: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn cow_negative_proof_is_valid() {
    let t = parse_theory(&corpus("theories/cow.thy")).unwrap();
    let r = check_theorem(&t, "not_cow_chases_cow").unwrap();
    assert!(r.is_valid(), "{r:?}");
}

#[test]
fn cow_positive_attempt_is_rejected() {
    let t = parse_theory(&corpus("theories/cow.thy")).unwrap();
    let r = check_theorem(&t, "cow_chases_cow").unwrap();
    assert!(!r.is_valid());
    // The third `have` mismatches `R3 Cow`'s antecedent, so `sorry` never runs.
    match &r.status {
        ProofStatus::FailedAt { step, error } => {
            assert_eq!(*step, 3);
            assert_eq!(error.kind, TacticErrorKind::TargetMismatch);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn turkey_positive_valid_and_flawed_negative_rejected() {
    let t = parse_theory(&corpus("theories/turkey.thy")).unwrap();
    assert!(check_theorem(&t, "tom_is_ocellated_wild_turkey").unwrap().is_valid());
    let bad = check_theorem(&t, "not_tom_is_ocellated_wild_turkey").unwrap();
    assert!(matches!(bad.status, ProofStatus::FailedAt { step: 1, .. }), "{bad:?}");
    assert!(check_theorem(&t, "not_tom_is_eastern_wild_turkey").unwrap().is_valid());
    let sorry = check_theorem(&t, "tom_is_eastern_wild_turkey").unwrap();
    assert_eq!(sorry.status, ProofStatus::Complete);
    assert!(sorry.tainted && !sorry.is_valid());
}

#[test]
fn sea_eel_both_styles_are_valid() {
    let t = parse_theory(&corpus("theories/sea_eel.thy")).unwrap();
    assert!(check_theorem(&t, "not_sea_eel_is_paper").unwrap().is_valid());
    let concise = parse_script(&corpus("parts/sea_eel_concise.proof")).unwrap();
    let r = check_script(&t, "not_sea_eel_is_paper", &concise).unwrap();
    assert!(r.is_valid(), "{r:?}");
}

#[test]
fn hudson_proof_is_valid() {
    let t = parse_theory(&corpus("theories/hudson.thy")).unwrap();
    assert!(check_theorem(&t, "hudson_often_meows").unwrap().is_valid());
}
