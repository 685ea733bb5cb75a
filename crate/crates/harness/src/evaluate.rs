// SPDX-License-Identifier: Apache-2.0

//! End-to-end evaluation: theory, dual search, verdict, metrics.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use reasoner_core::generator::{
    BuiltinGenerator, ExternalGenerator, ExternalScorer, GeneratorConfig, GeneratorError, TacticGenerator,
};
use reasoner_core::interpret::{interpret, Verdict};
use reasoner_core::kernel::{check_proof, init_state};
use reasoner_core::logic::{negate, Formula, Theory};
use reasoner_core::retrieval::{recall_at_k, PremiseIndex};
use reasoner_core::search::{prove_both, SearchConfig, SearchOutcome, SearchStatus};
use reasoner_core::syntax::{parse_script, parse_theory};

use crate::corpus::{question_of, ProblemRecord};
use crate::formalizer::{formalize_with_retry, ChatClient, GenerationParams, PromptTemplate};

/// Which tactic generator backs the search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScorerSpec {
    Builtin,
    /// Shell command of a scorer subprocess.
    Subprocess(String),
}

impl std::str::FromStr for ScorerSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "builtin" {
            Ok(ScorerSpec::Builtin)
        } else if let Some(cmd) = s.strip_prefix("subprocess:") {
            if cmd.trim().is_empty() {
                Err("empty scorer command".into())
            } else {
                Ok(ScorerSpec::Subprocess(cmd.to_string()))
            }
        } else {
            Err(format!("expected `builtin` or `subprocess:<command>`, got `{s}`"))
        }
    }
}

impl ScorerSpec {
    pub fn make(
        &self,
        config: &GeneratorConfig,
        timeout: Duration,
    ) -> Result<Box<dyn TacticGenerator + Send>, GeneratorError> {
        Ok(match self {
            ScorerSpec::Builtin => Box::new(BuiltinGenerator::new(config.clone())),
            ScorerSpec::Subprocess(cmd) => {
                Box::new(ExternalGenerator::new(ExternalScorer::spawn(cmd, timeout)?, config.clone()))
            }
        })
    }
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub search: SearchConfig,
    pub generator: GeneratorConfig,
    pub scorer: ScorerSpec,
    /// Per-request timeout for scorer subprocesses.
    pub scorer_timeout: Duration,
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            search: SearchConfig::default(),
            generator: GeneratorConfig::default(),
            scorer: ScorerSpec::Builtin,
            scorer_timeout: Duration::from_secs(30),
            workers: 0,
        }
    }
}

/// Where each record's theory comes from.
pub enum TheorySource<'a> {
    Attached,
    Formalizer {
        client: &'a dyn ChatClient,
        template: &'a PromptTemplate,
        params: GenerationParams,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormalizationSummary {
    pub attempts: usize,
    pub diagnostics: Vec<String>,
    pub answer_marker: Option<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoldProofCheck {
    pub style: String,
    pub valid: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecordResult {
    pub id: String,
    pub gold: String,
    pub predicted: Option<String>,
    pub verdict: Option<Verdict>,
    pub correct: bool,
    pub question: Option<String>,
    pub positive: Option<SearchOutcome>,
    pub negative: Option<SearchOutcome>,
    pub positive_proof: Option<String>,
    pub negative_proof: Option<String>,
    /// Every found proof replays as complete and untainted.
    pub proofs_valid: Option<bool>,
    pub recall_at_1: Option<f64>,
    pub recall_at_4: Option<f64>,
    pub gold_proofs: Vec<GoldProofCheck>,
    pub formalization: Option<FormalizationSummary>,
    pub error: Option<String>,
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct StatusCounts {
    pub proved: usize,
    pub timeout: usize,
    pub exhausted: usize,
    pub generator_failure: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Metrics {
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub inconsistent: usize,
    pub errors: usize,
    /// Over both dual searches of every record.
    pub searches: StatusCounts,
    /// Valid replays among all Proved searches.
    pub proof_validity: Option<f64>,
    /// Records with a True/False gold label whose gold-side theorem was
    /// proved with a valid proof.
    pub proof_accuracy: Option<f64>,
    /// Bundled gold proof scripts that replay as valid.
    pub gold_proof_validity: Option<f64>,
    pub recall_at_1: Option<f64>,
    pub recall_at_4: Option<f64>,
    /// Predicted Unknown while at least one search timed out or failed.
    pub unknown_by_failure: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportConfig {
    pub timeout_secs: f64,
    pub num_candidates: usize,
    pub subsumption: bool,
    pub scorer: ScorerSpec,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub config: ReportConfig,
    pub metrics: Metrics,
    pub records: Vec<RecordResult>,
    pub wall_time_ms: u64,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = xs.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn fraction(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

struct Prepared {
    context: Theory,
    question: Formula,
}

fn prepare(theory: &Theory) -> Result<Prepared, String> {
    let (_, q) = question_of(theory).ok_or("theory has no theorem stating the question")?;
    Ok(Prepared {
        context: theory.without_theorems(),
        question: q.clone(),
    })
}

fn blank(rec: &ProblemRecord) -> RecordResult {
    RecordResult {
        id: rec.id.clone(),
        gold: rec.label.clone(),
        predicted: None,
        verdict: None,
        correct: false,
        question: None,
        positive: None,
        negative: None,
        positive_proof: None,
        negative_proof: None,
        proofs_valid: None,
        recall_at_1: None,
        recall_at_4: None,
        gold_proofs: Vec::new(),
        formalization: None,
        error: None,
        wall_time_ms: 0,
    }
}

fn gold_target(p: &Prepared, gold: Option<Verdict>) -> Option<Formula> {
    match gold {
        Some(Verdict::True) => Some(p.question.clone()),
        Some(Verdict::False) => negate(&p.question).ok(),
        _ => None,
    }
}

fn check_gold_proofs(rec: &ProblemRecord, p: &Prepared, out: &mut RecordResult) {
    let Some(proofs) = &rec.proofs else { return };
    let Some(target) = gold_target(p, rec.gold_verdict()) else { return };
    for (style, text) in proofs.styles() {
        let (valid, detail) = match parse_script(text) {
            Err(e) => (false, format!("parse error: {e}")),
            Ok(script) => match check_proof(&p.context, &target, &script) {
                Ok(r) => (r.is_valid(), serde_json::to_string(&r).unwrap_or_default()),
                Err(e) => (false, e.to_string()),
            },
        };
        out.gold_proofs.push(GoldProofCheck {
            style: style.to_string(),
            valid,
            detail,
        });
    }
}

fn recall(rec: &ProblemRecord, p: &Prepared, out: &mut RecordResult) {
    let Some(gt) = &rec.gold_premises else { return };
    let target = gold_target(p, rec.gold_verdict()).unwrap_or_else(|| p.question.clone());
    let (Ok(index), Ok(state)) = (PremiseIndex::<f64>::for_theory(&p.context, 4), init_state(&p.context, &target)) else {
        return;
    };
    let ranked: Vec<String> = index.rank(&state.goals[0]).into_iter().map(|(n, _)| n.to_string()).collect();
    out.recall_at_1 = recall_at_k(gt, &ranked, 1).ok();
    out.recall_at_4 = recall_at_k(gt, &ranked, 4).ok();
}

fn run_record(rec: &ProblemRecord, config: &PipelineConfig, source: &TheorySource) -> RecordResult {
    let start = Instant::now();
    let mut out = blank(rec);
    let theory = match source {
        TheorySource::Attached => match rec.theory.as_deref().map(parse_theory) {
            Some(Ok(t)) => Some(t),
            Some(Err(e)) => {
                out.error = Some(format!("theory: {e}"));
                None
            }
            None => {
                out.error = Some("record has no attached theory".into());
                None
            }
        },
        TheorySource::Formalizer {
            client,
            template,
            params,
        } => match formalize_with_retry(*client, template, rec, params) {
            Ok(f) => {
                out.formalization = Some(FormalizationSummary {
                    attempts: f.attempts,
                    diagnostics: f.diagnostics.clone(),
                    answer_marker: f.answer,
                });
                if f.theory.is_none() {
                    out.error = Some("formalization failed after retry".into());
                }
                f.theory
            }
            Err(e) => {
                out.error = Some(format!("formalizer: {e}"));
                None
            }
        },
    };
    let prepared = theory.as_ref().map(prepare);
    match prepared {
        Some(Ok(p)) => {
            out.question = Some(p.question.to_string());
            check_gold_proofs(rec, &p, &mut out);
            recall(rec, &p, &mut out);
            let make = || config.scorer.make(&config.generator, config.scorer_timeout);
            match prove_both(&p.context, &p.question, make, &config.search) {
                Ok((pos, neg)) => {
                    let verdict = interpret(&pos, &neg).verdict;
                    let mapping = rec.mapping().ok();
                    out.predicted = mapping.as_ref().and_then(|m| m.label(verdict)).map(str::to_string);
                    out.correct = out.predicted.as_deref() == Some(rec.label.as_str());
                    out.verdict = Some(verdict);
                    let mut all_valid = None;
                    for (outcome, target, slot) in [
                        (&pos, Some(p.question.clone()), &mut out.positive_proof),
                        (&neg, negate(&p.question).ok(), &mut out.negative_proof),
                    ] {
                        if let (Some(script), Some(target)) = (outcome.script(), target) {
                            let valid = check_proof(&p.context, &target, &script).is_ok_and(|r| r.is_valid());
                            all_valid = Some(all_valid.unwrap_or(true) && valid);
                            *slot = Some(script.to_string());
                        }
                    }
                    out.proofs_valid = all_valid;
                    out.positive = Some(pos);
                    out.negative = Some(neg);
                }
                Err(e) => out.error = Some(format!("search: {e}")),
            }
        }
        Some(Err(e)) => out.error = Some(e),
        None => {}
    }
    out.wall_time_ms = start.elapsed().as_millis() as u64;
    out
}

fn metrics(records: &[RecordResult]) -> Metrics {
    let mut m = Metrics {
        total: records.len(),
        ..Metrics::default()
    };
    let (mut proved, mut proved_valid) = (0, 0);
    let (mut gold_side, mut gold_side_proved) = (0, 0);
    let (mut gold_scripts, mut gold_scripts_valid) = (0, 0);
    for r in records {
        m.correct += r.correct as usize;
        m.errors += r.error.is_some() as usize;
        m.inconsistent += (r.verdict == Some(Verdict::Inconsistent)) as usize;
        let mut failed_search = false;
        for o in [&r.positive, &r.negative].into_iter().flatten() {
            match o.status {
                SearchStatus::Proved { .. } => m.searches.proved += 1,
                SearchStatus::Timeout => {
                    m.searches.timeout += 1;
                    failed_search = true;
                }
                SearchStatus::Exhausted => m.searches.exhausted += 1,
                SearchStatus::GeneratorFailure { .. } => {
                    m.searches.generator_failure += 1;
                    failed_search = true;
                }
            }
        }
        if r.verdict == Some(Verdict::Unknown) && failed_search {
            m.unknown_by_failure += 1;
        }
        let proofs = r.positive_proof.iter().count() + r.negative_proof.iter().count();
        proved += proofs;
        if r.proofs_valid == Some(true) {
            proved_valid += proofs;
        }
        let gold = reasoner_core::interpret::OptionMapping::parse_label(&r.gold);
        if matches!(gold, Some(Verdict::True) | Some(Verdict::False)) {
            gold_side += 1;
            let side = if gold == Some(Verdict::True) { &r.positive_proof } else { &r.negative_proof };
            if r.correct && side.is_some() && r.proofs_valid == Some(true) {
                gold_side_proved += 1;
            }
        }
        gold_scripts += r.gold_proofs.len();
        gold_scripts_valid += r.gold_proofs.iter().filter(|g| g.valid).count();
    }
    m.accuracy = fraction(m.correct, m.total).unwrap_or(0.0);
    m.proof_validity = fraction(proved_valid, proved);
    m.proof_accuracy = fraction(gold_side_proved, gold_side);
    m.gold_proof_validity = fraction(gold_scripts_valid, gold_scripts);
    m.recall_at_1 = mean(records.iter().filter_map(|r| r.recall_at_1));
    m.recall_at_4 = mean(records.iter().filter_map(|r| r.recall_at_4));
    m
}

/// Evaluates every record; per-record failures are recorded, never fatal.
pub fn evaluate(records: &[ProblemRecord], config: &PipelineConfig, source: &TheorySource) -> EvaluationReport {
    let start = Instant::now();
    let run = || -> Vec<RecordResult> { records.par_iter().map(|r| run_record(r, config, source)).collect() };
    let mut results = if config.workers > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(config.workers).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                log::warn!("thread pool: {e}; using the global pool");
                run()
            }
        }
    } else {
        run()
    };
    results.sort_by(|a, b| a.id.cmp(&b.id));
    EvaluationReport {
        config: ReportConfig {
            timeout_secs: config.search.time_budget.as_secs_f64(),
            num_candidates: config.search.num_candidates,
            subsumption: config.search.subsumption,
            scorer: config.scorer.clone(),
            source: match source {
                TheorySource::Attached => "attached".into(),
                TheorySource::Formalizer { .. } => "formalizer".into(),
            },
        },
        metrics: metrics(&results),
        records: results,
        wall_time_ms: start.elapsed().as_millis() as u64,
    }
}
