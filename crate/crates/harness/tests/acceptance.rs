// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite (custom harness). Prints one PASS/FAIL line per
//! criterion and exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use reasoner_core::generator::{Candidate, GeneratorConfig, GeneratorError, Provenance, TacticGenerator};
use reasoner_core::interpret::{interpret, Verdict};
use reasoner_core::kernel::{check_theorem, ProofState, ProofStatus, Tactic};
use reasoner_core::logic::{Binder, Declaration, Formula, Term, Theory};
use reasoner_core::retrieval::recall_at_k;
use reasoner_core::search::{prove_both, search, SearchConfig, SearchOutcome, SearchStatus};
use reasoner_core::syntax::{parse_theory, parse_theory_unchecked, print_theory};
use reasoner_harness::corpus::{golden_corpus_path, golden_replay_path, load_corpus};
use reasoner_harness::evaluate::{evaluate, EvaluationReport, PipelineConfig, ScorerSpec, TheorySource};
use reasoner_harness::formalizer::{GenerationParams, PromptTemplate, ReplayClient};
use reasoner_harness::instances::{generate_instances, GenParams, Instance};
use reasoner_harness::oracle::oracle;
use reasoner_harness::report::{strip_wall_time, to_json};

type Outcome = Result<String, String>;

fn corpus_file(rel: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn golden_replay() -> Outcome {
    let start = Instant::now();
    let cow = parse_theory(&corpus_file("theories/cow.thy")).map_err(|e| e.to_string())?;
    let turkey = parse_theory(&corpus_file("theories/turkey.thy")).map_err(|e| e.to_string())?;
    let eel = parse_theory(&corpus_file("theories/sea_eel.thy")).map_err(|e| e.to_string())?;
    let eel_concise = parse_theory(&corpus_file("theories/sea_eel_concise.thy")).map_err(|e| e.to_string())?;
    for (t, name) in [
        (&cow, "not_cow_chases_cow"),
        (&turkey, "tom_is_ocellated_wild_turkey"),
        (&eel, "not_sea_eel_is_paper"),
        (&eel_concise, "not_sea_eel_is_paper"),
    ] {
        let r = check_theorem(t, name).map_err(|e| e.to_string())?;
        ensure(r.is_valid(), format!("{name} is not valid: {r:?}"))?;
    }
    let flawed = check_theorem(&turkey, "not_tom_is_ocellated_wild_turkey").map_err(|e| e.to_string())?;
    ensure(
        matches!(flawed.status, ProofStatus::FailedAt { .. }),
        format!("flawed proof not rejected: {flawed:?}"),
    )?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("4 proofs valid, flawed proof rejected, {elapsed:?}"))
}

fn golden_config() -> PipelineConfig {
    let mut c = PipelineConfig::default();
    c.search.time_budget = Duration::from_secs(180);
    c.search.num_candidates = 64;
    c.generator.num_candidates = 64;
    c
}

fn check_golden_report(report: &EvaluationReport, elapsed: Duration) -> Outcome {
    let m = &report.metrics;
    ensure(m.total >= 12, format!("only {} records", m.total))?;
    let wrong: Vec<&str> = report.records.iter().filter(|r| !r.correct).map(|r| r.id.as_str()).collect();
    ensure(wrong.is_empty(), format!("incorrect: {wrong:?}"))?;
    ensure(m.inconsistent == 0, format!("{} inconsistent", m.inconsistent))?;
    ensure(elapsed < Duration::from_secs(300), format!("took {elapsed:?}"))?;
    Ok(format!(
        "accuracy {}/{}, 0 inconsistent, proof validity {:?}, {elapsed:.2?}",
        m.correct, m.total, m.proof_validity
    ))
}

fn golden_accuracy() -> Outcome {
    let records = load_corpus(&golden_corpus_path()).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let report = evaluate(&records, &golden_config(), &TheorySource::Attached);
    check_golden_report(&report, start.elapsed())
}

const ABLATION_CAP: usize = 4000;

struct Run {
    verdict: Verdict,
    timed_out: bool,
    expanded: usize,
}

fn run_instances(insts: &[Instance], subsumption: bool, max_expansions: Option<usize>) -> Vec<Run> {
    let config = SearchConfig {
        time_budget: Duration::from_secs(10),
        subsumption,
        max_expansions,
        ..SearchConfig::default()
    };
    insts
        .par_iter()
        .map(|inst| {
            let gen = || ScorerSpec::Builtin.make(&GeneratorConfig::default(), Duration::from_secs(1));
            let (pos, neg) = prove_both(&inst.theory, &inst.question, gen, &config).expect("closed question");
            let timed = |o: &SearchOutcome| o.status == SearchStatus::Timeout;
            Run {
                verdict: interpret(&pos, &neg).verdict,
                timed_out: timed(&pos) || timed(&neg),
                expanded: pos.stats.expanded + neg.stats.expanded,
            }
        })
        .collect()
}

fn instances() -> Vec<Instance> {
    generate_instances(1, 200, &GenParams::default()).expect("generator params are feasible")
}

fn oracle_equivalence(insts: &[Instance], runs: &[Run]) -> Outcome {
    let mut terminated = 0;
    for (inst, run) in insts.iter().zip(runs) {
        let label = oracle(&inst.theory, &inst.question, None).map_err(|e| e.to_string())?.label;
        ensure(label == inst.label, format!("{}: stored label disagrees with oracle", inst.id))?;
        if !run.timed_out {
            terminated += 1;
            ensure(
                run.verdict == label,
                format!("{}: pipeline {:?}, oracle {:?}", inst.id, run.verdict, label),
            )?;
        }
    }
    let rate = terminated as f64 / insts.len() as f64;
    ensure(rate >= 0.95, format!("only {terminated}/{} terminated", insts.len()))?;
    Ok(format!("{terminated}/{} terminated, all agree with the oracle", insts.len()))
}

fn pruning_ablation(insts: &[Instance], on: &[Run], off: &[Run]) -> Outcome {
    let mut fewer = 0;
    for ((inst, a), b) in insts.iter().zip(on).zip(off) {
        let proved = |v: Verdict| (matches!(v, Verdict::True | Verdict::Inconsistent), matches!(v, Verdict::False | Verdict::Inconsistent));
        ensure(
            proved(a.verdict) == proved(b.verdict),
            format!("{}: {:?} with pruning, {:?} without", inst.id, a.verdict, b.verdict),
        )?;
        ensure(
            a.expanded <= b.expanded,
            format!("{}: {} expansions with pruning, {} without", inst.id, a.expanded, b.expanded),
        )?;
        fewer += (a.expanded < b.expanded) as usize;
    }
    ensure(fewer >= 1, "pruning never reduced expansions")?;
    let total = |rs: &[Run]| rs.iter().map(|r| r.expanded).sum::<usize>();
    Ok(format!(
        "verdicts unchanged; expansions {} vs {}; strictly fewer on {fewer} instances",
        total(on),
        total(off)
    ))
}

fn determinism() -> Outcome {
    let records = load_corpus(&golden_corpus_path()).map_err(|e| e.to_string())?;
    let run = || {
        let report = evaluate(&records, &golden_config(), &TheorySource::Attached);
        let mut v: serde_json::Value = serde_json::from_str(&to_json(&report)).expect("valid json");
        strip_wall_time(&mut v);
        let proofs: Vec<(Option<String>, Option<String>)> = report
            .records
            .iter()
            .map(|r| (r.positive_proof.clone(), r.negative_proof.clone()))
            .collect();
        (serde_json::to_string_pretty(&v).expect("serializes"), proofs)
    };
    let (a, pa) = run();
    let (b, pb) = run();
    ensure(a == b, "reports differ")?;
    ensure(pa == pb, "proof scripts differ")?;
    Ok(format!("identical reports ({} bytes) and proof scripts", a.len()))
}

fn recall_suite() -> Outcome {
    let gt = ["A1", "A2"];
    let pred = ["A2", "A3", "A1"];
    ensure(recall_at_k(&gt, &pred, 1) == Ok(0.5), "k=1")?;
    ensure(recall_at_k(&gt, &pred, 3) == Ok(1.0), "k=3")?;
    ensure(recall_at_k(&["A1"], &["A2", "A3"], 2) == Ok(0.0), "disjoint")?;
    let mut runner = TestRunner::new_with_rng(
        PropConfig {
            cases: 1000,
            ..PropConfig::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    let names = prop::collection::vec(0u8..12, 1..8);
    runner
        .run(&(names.clone(), prop::collection::vec(0u8..12, 0..12)), |(gt, pred)| {
            let gt: Vec<String> = gt.iter().map(|i| format!("P{i}")).collect();
            let mut seen = std::collections::HashSet::new();
            let pred: Vec<String> = pred.iter().map(|i| format!("P{i}")).filter(|p| seen.insert(p.clone())).collect();
            let mut last = 0.0;
            for k in 1..=pred.len() + 2 {
                let r = recall_at_k(&gt, &pred, k).unwrap();
                prop_assert!(r >= last && (0.0..=1.0).contains(&r));
                last = r;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("3 examples exact; monotone in k over 1000 random pairs".into())
}

/// Always offers `have h : <target>`, which succeeds and never closes.
/// Sleeps like a model call.
struct Stalling;

impl TacticGenerator for Stalling {
    fn generate(&mut self, _: &Theory, state: &ProofState) -> Result<Vec<Candidate>, GeneratorError> {
        std::thread::sleep(Duration::from_millis(5));
        let g = &state.goals[0];
        Ok(vec![Candidate {
            tactic: Tactic::Have {
                name: Some("h".into()),
                formula: Some(g.target.clone()),
                proof: None,
            },
            logprob: -0.1,
            provenance: Provenance::External,
        }])
    }
}

fn timeout_contract() -> Outcome {
    let t = parse_theory("constant P : Prop").map_err(|e| e.to_string())?;
    let budget = Duration::from_secs(2);
    let config = SearchConfig {
        time_budget: budget,
        subsumption: false,
        ..SearchConfig::default()
    };
    let start = Instant::now();
    let out = search(&t, &Formula::Atom("P".into(), vec![]), &mut Stalling, &config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(out.status == SearchStatus::Timeout, format!("status {:?}", out.status))?;
    ensure(elapsed.as_secs_f64() <= budget.as_secs_f64() * 1.05, format!("took {elapsed:?}"))?;
    Ok(format!(
        "Timeout after {elapsed:.3?}, search reported {} ms ({} expansions)",
        out.stats.wall_time_ms, out.stats.expanded
    ))
}

fn random_formula(rng: &mut ChaCha8Rng, consts: &[&str], preds: &[(&str, usize)], depth: u32, bound: u32) -> Formula {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        if rng.gen_bool(0.05) {
            return Formula::Falsum;
        }
        let (p, arity) = preds[rng.gen_range(0..preds.len())];
        let args = (0..arity)
            .map(|_| {
                if bound > 0 && rng.gen_bool(0.5) {
                    Term::Var(rng.gen_range(0..bound))
                } else {
                    Term::constant(consts[rng.gen_range(0..consts.len())])
                }
            })
            .collect();
        return Formula::Atom(p.into(), args);
    }
    let sub = |rng: &mut ChaCha8Rng, b: u32| random_formula(rng, consts, preds, depth - 1, b);
    match rng.gen_range(0..8) {
        0 => Formula::not(sub(rng, bound)),
        1 => Formula::and(sub(rng, bound), sub(rng, bound)),
        2 => Formula::or(sub(rng, bound), sub(rng, bound)),
        3 => Formula::implies(sub(rng, bound), sub(rng, bound)),
        4 => Formula::iff(sub(rng, bound), sub(rng, bound)),
        5 => Formula::Forall(Binder::new(["x", "y", "t"][rng.gen_range(0..3)], "obj"), Box::new(sub(rng, bound + 1))),
        6 => Formula::Exists(Binder::new(["x", "z"][rng.gen_range(0..2)], "obj"), Box::new(sub(rng, bound + 1))),
        _ => sub(rng, bound),
    }
}

fn random_theory(rng: &mut ChaCha8Rng) -> Theory {
    let consts = ["a", "b", "Cat", "x"];
    let preds = [("P", 1), ("Q", 1), ("R", 2), ("S", 0)];
    let mut t = Theory::new();
    t.push(Declaration::sort("obj"));
    for c in consts {
        t.push(Declaration::constant(c, "obj"));
    }
    for (p, n) in preds {
        t.push(Declaration::predicate(p, &vec!["obj"; n]));
    }
    for i in 0..rng.gen_range(1..6) {
        let mut d = Declaration::axiom(&format!("A{i}"), random_formula(rng, &consts, &preds, 4, 0));
        if rng.gen_bool(0.3) {
            d.comments.push(format!("axiom number {i}"));
        }
        t.push(d);
    }
    if rng.gen_bool(0.5) {
        t.push(Declaration::theorem("goal", random_formula(rng, &consts, &preds, 3, 0)));
    }
    t
}

fn round_trip() -> Outcome {
    let mut sources: Vec<(String, String)> = Vec::new();
    for name in ["cow", "hudson", "turkey", "sea_eel", "sea_eel_concise"] {
        sources.push((name.into(), corpus_file(&format!("theories/{name}.thy"))));
    }
    for r in load_corpus(&golden_corpus_path()).map_err(|e| e.to_string())? {
        if let Some(t) = r.theory {
            sources.push((r.id, t));
        }
    }
    let files = sources.len();
    for (name, src) in &sources {
        let t = parse_theory(src).map_err(|e| format!("{name}: {e}"))?;
        let again = parse_theory(&print_theory(&t)).map_err(|e| format!("{name} reprint: {e}"))?;
        ensure(t.alpha_eq(&again), format!("{name}: round trip changed the theory"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..500 {
        let t = random_theory(&mut rng);
        let printed = print_theory(&t);
        let again = parse_theory_unchecked(&printed).map_err(|e| format!("random {i}: {e}\n{printed}"))?;
        ensure(t.alpha_eq(&again), format!("random {i}: round trip changed the theory\n{printed}"))?;
    }
    Ok(format!("{files} corpus theories and 500 random theories"))
}

fn offline_pipeline() -> Outcome {
    let records = load_corpus(&golden_corpus_path()).map_err(|e| e.to_string())?;
    let client = ReplayClient::load(&golden_replay_path()).map_err(|e| e.to_string())?;
    let template = PromptTemplate::default();
    let source = TheorySource::Formalizer {
        client: &client,
        template: &template,
        params: GenerationParams::default(),
    };
    let start = Instant::now();
    let report = evaluate(&records, &golden_config(), &source);
    let retried = report
        .records
        .iter()
        .filter(|r| r.formalization.as_ref().is_some_and(|f| f.attempts == 2))
        .count();
    ensure(retried >= 1, "no record exercised the retry path")?;
    let summary = check_golden_report(&report, start.elapsed())?;
    Ok(format!("{summary}; {retried} record(s) needed a retry"))
}

fn main() -> std::process::ExitCode {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "golden-corpus replay", golden_replay()));
    results.push((2, "end-to-end golden accuracy", golden_accuracy()));
    let insts = instances();
    let timed = run_instances(&insts, true, None);
    results.push((3, "oracle equivalence", oracle_equivalence(&insts, &timed)));
    // A shared expansion cap keeps non-terminating searches comparable.
    let on = run_instances(&insts, true, Some(ABLATION_CAP));
    let off = run_instances(&insts, false, Some(ABLATION_CAP));
    results.push((4, "pruning ablation", pruning_ablation(&insts, &on, &off)));
    results.push((5, "determinism", determinism()));
    results.push((6, "recall@k suite", recall_suite()));
    results.push((7, "timeout contract", timeout_contract()));
    results.push((8, "round-trip", round_trip()));
    results.push((9, "offline pipeline", offline_pipeline()));
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(msg) => println!("criterion {n} ({name}): PASS: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL: {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        return std::process::ExitCode::FAILURE;
    }
    println!("all {} acceptance criteria passed", results.len());
    std::process::ExitCode::SUCCESS
}
