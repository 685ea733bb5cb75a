// SPDX-License-Identifier: Apache-2.0

use std::time::Duration;

use reasoner_core::generator::{ExternalGenerator, ExternalScorer, GeneratorConfig, GeneratorError};
use reasoner_core::logic::Formula;
use reasoner_core::search::{search, SearchConfig, SearchStatus};
use reasoner_core::syntax::parse_theory;

const THEORY: &str = "constant P : Prop\naxiom A1 : P\n";

fn reply_loop(reply: &str) -> String {
    format!("while read -r line; do echo '{reply}'; done")
}

fn run(cmd: &str, timeout: Duration) -> (SearchStatus, usize) {
    let theory = parse_theory(THEORY).unwrap();
    let scorer = ExternalScorer::spawn(cmd, timeout).unwrap();
    let mut gen = ExternalGenerator::new(scorer, GeneratorConfig::default());
    let out = search(&theory, &Formula::atom("P", &[]), &mut gen, &SearchConfig::default()).unwrap();
    (out.status, gen.scorer().warnings())
}

#[test]
fn stub_scorer_proves_by_exact() {
    let cmd = reply_loop(r#"{"candidates":[{"tactic":"exact A1","logprob":-0.1}]}"#);
    let (status, warnings) = run(&cmd, Duration::from_secs(5));
    match status {
        SearchStatus::Proved { path } => assert_eq!(path.len(), 1),
        other => panic!("expected a proof, got {other:?}"),
    }
    assert_eq!(warnings, 0);
}

#[test]
fn unparseable_and_bad_candidates_are_dropped() {
    let cmd = reply_loop(
        r#"{"candidates":[{"tactic":"%% nonsense","logprob":-0.2},{"tactic":"sorry","logprob":-0.3},{"tactic":"exact A1","logprob":0.5},{"tactic":"exact A1","logprob":-0.4}]}"#,
    );
    let (status, warnings) = run(&cmd, Duration::from_secs(5));
    assert!(matches!(status, SearchStatus::Proved { .. }), "{status:?}");
    assert_eq!(warnings, 3);
}

#[test]
fn crash_is_a_generator_failure() {
    let (status, _) = run("read -r line; exit 3", Duration::from_secs(5));
    assert!(matches!(status, SearchStatus::GeneratorFailure { .. }), "{status:?}");
}

#[test]
fn silence_times_out() {
    let (status, _) = run("sleep 5", Duration::from_millis(200));
    match status {
        SearchStatus::GeneratorFailure { error } => assert!(error.contains("did not answer"), "{error}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn malformed_reply_is_a_protocol_error() {
    let mut scorer = ExternalScorer::spawn(&reply_loop("not json"), Duration::from_secs(5)).unwrap();
    let err = scorer.generate("⊢ P", &[], 4).unwrap_err();
    assert!(matches!(err, GeneratorError::Protocol(_)), "{err}");
}

#[test]
fn embed_round_trip() {
    let mut scorer =
        ExternalScorer::spawn(&reply_loop(r#"{"embeddings":[[1.0,0.0],[0.0,1.0]]}"#), Duration::from_secs(5)).unwrap();
    let e = scorer.embed(&["a".into(), "b".into()]).unwrap();
    assert_eq!(e, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    assert!(matches!(scorer.embed(&["a".into()]), Err(GeneratorError::Protocol(_))));
}
