// SPDX-License-Identifier: Apache-2.0

//! Report rendering: JSON and a plain-text table.

use serde_json::Value;

use crate::evaluate::EvaluationReport;

pub fn to_json(report: &EvaluationReport) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize")
}

/// Removes every `wall_time_ms` field, recursively.
pub fn strip_wall_time(value: &mut Value) {
    match value {
        Value::Object(map) => {
            map.remove("wall_time_ms");
            map.values_mut().for_each(strip_wall_time);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_wall_time),
        _ => {}
    }
}

fn pct(x: Option<f64>) -> String {
    x.map(|v| format!("{:.1}%", v * 100.0)).unwrap_or_else(|| "-".into())
}

fn status(o: &Option<reasoner_core::search::SearchOutcome>) -> &'static str {
    use reasoner_core::search::SearchStatus::*;
    match o.as_ref().map(|o| &o.status) {
        Some(Proved { .. }) => "proved",
        Some(Timeout) => "timeout",
        Some(Exhausted) => "exhausted",
        Some(GeneratorFailure { .. }) => "gen-failure",
        None => "-",
    }
}

pub fn render_table(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let w = report.records.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
    out.push_str(&format!(
        "{:w$}  {:10}  {:10}  {:11}  {:11}  {}\n",
        "id", "gold", "predicted", "positive", "negative", "ok"
    ));
    for r in &report.records {
        out.push_str(&format!(
            "{:w$}  {:10}  {:10}  {:11}  {:11}  {}\n",
            r.id,
            r.gold,
            r.predicted.as_deref().unwrap_or("-"),
            status(&r.positive),
            status(&r.negative),
            if r.correct { "yes" } else { "no" },
        ));
        if let Some(e) = &r.error {
            out.push_str(&format!("{:w$}  error: {e}\n", ""));
        }
    }
    let m = &report.metrics;
    out.push_str(&format!(
        "\naccuracy {}/{} ({})  inconsistent {}  errors {}\n",
        m.correct,
        m.total,
        pct(Some(m.accuracy)),
        m.inconsistent,
        m.errors
    ));
    out.push_str(&format!(
        "searches: proved {}  exhausted {}  timeout {}  generator-failure {}\n",
        m.searches.proved, m.searches.exhausted, m.searches.timeout, m.searches.generator_failure
    ));
    out.push_str(&format!(
        "proof validity {}  proof accuracy {}  gold proof validity {}\n",
        pct(m.proof_validity),
        pct(m.proof_accuracy),
        pct(m.gold_proof_validity)
    ));
    out.push_str(&format!(
        "recall@1 {}  recall@4 {}  unknown-by-failure {}\n",
        pct(m.recall_at_1),
        pct(m.recall_at_4),
        m.unknown_by_failure
    ));
    out.push_str(&format!("wall time {} ms\n", report.wall_time_ms));
    out
}
