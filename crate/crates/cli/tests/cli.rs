// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../harness/corpus").join(rel)
}

fn reasoner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reasoner")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn parse_prints_a_reparsable_theory() {
    let o = reasoner(&["parse", path(&corpus("theories/hudson.thy"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("theorem"));
}

#[test]
fn check_reports_invalid_proofs_with_status_2() {
    let bad = reasoner(&["check", path(&corpus("theories/turkey.thy"))]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stdout(&bad).contains("not_tom_is_ocellated_wild_turkey: failed at step 1"));
    let good = reasoner(&["check", path(&corpus("theories/sea_eel.thy"))]);
    assert_eq!(good.status.code(), Some(0), "{}", stdout(&good));
}

#[test]
fn solve_gives_verdict() {
    let o = reasoner(&["solve", path(&corpus("theories/cow.thy")), "--question", "Chases Cow Cow", "--timeout-secs", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("verdict: False"), "{}", stdout(&o));
}

#[test]
fn prove_failure_is_status_2() {
    let o = reasoner(&["prove", path(&corpus("theories/turkey.thy")), "--theorem", "joey_is_wild_turkey", "--timeout-secs", "5"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
}

#[test]
fn oracle_labels_and_rejects_unknown_constants() {
    let t = corpus("theories/hudson.thy");
    let o = reasoner(&["oracle", path(&t), "--question", "often_meow Hudson"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("label: True"));
    let bad = reasoner(&["oracle", path(&t), "--question", "often_meow Nobody"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn gen_is_reproducible() {
    let a = reasoner(&["gen", "--seed", "7", "--count", "6", "--depth", "3"]);
    let b = reasoner(&["gen", "--seed", "7", "--count", "6", "--depth", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 6);
}

#[test]
fn eval_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let o = reasoner(&[
        "eval",
        path(&corpus("golden.jsonl")),
        "--replay",
        path(&corpus("golden_replay.jsonl")),
        "--timeout-secs",
        "30",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("accuracy 13/13"), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(report["metrics"]["accuracy"], 1.0);
}

#[test]
fn usage_errors_are_status_1() {
    assert_eq!(reasoner(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(reasoner(&["parse", "/no/such/file.thy"]).status.code(), Some(1));
    assert_eq!(reasoner(&["--scorer", "magic", "parse", "x"]).status.code(), Some(1));
    assert_eq!(reasoner(&["--help"]).status.code(), Some(0));
}

#[test]
fn retrieve_lists_k_premises() {
    let o = reasoner(&["retrieve", path(&corpus("theories/hudson.thy")), "--goal", "is_animal Hudson", "-k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
}
