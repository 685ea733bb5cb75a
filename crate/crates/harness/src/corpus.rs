// SPDX-License-Identifier: Apache-2.0

//! Line-delimited JSON problem corpora.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use reasoner_core::interpret::{OptionMapping, Verdict};
use reasoner_core::logic::{DeclKind, Formula, Theory};
use reasoner_core::syntax::parse_theory;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GoldProofs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intuitive: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concise: Option<String>,
}

impl GoldProofs {
    /// `(style, script)` pairs that are present.
    pub fn styles(&self) -> Vec<(&'static str, &str)> {
        let mut out = Vec::new();
        if let Some(s) = &self.intuitive {
            out.push(("intuitive", s.as_str()));
        }
        if let Some(s) = &self.concise {
            out.push(("concise", s.as_str()));
        }
        out
    }
}

/// One question. When `theory` is present, its first theorem states the
/// question and the remaining declarations before it are the context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemRecord {
    pub id: String,
    pub context: Vec<String>,
    pub question: String,
    pub options: Vec<String>,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_premises: Option<Vec<String>>,
    /// Scripts proving the gold-label side (the question for True, its
    /// negation for False).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proofs: Option<GoldProofs>,
}

impl ProblemRecord {
    pub fn mapping(&self) -> Result<OptionMapping, String> {
        OptionMapping::new(&self.options).map_err(|e| e.to_string())
    }

    pub fn gold_verdict(&self) -> Option<Verdict> {
        OptionMapping::parse_label(&self.label)
    }

    fn validate(&self) -> Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("empty identifier".into());
        }
        let mapping = self.mapping()?;
        if !self.options.contains(&self.label) {
            return Err(format!("label `{}` is not one of the options {:?}", self.label, self.options));
        }
        if mapping.verdict(&self.label).is_none() {
            return Err(format!("label `{}` names no verdict", self.label));
        }
        if let Some(src) = &self.theory {
            let theory = parse_theory(src).map_err(|e| format!("theory: {e}"))?;
            if question_of(&theory).is_none() {
                return Err("theory has no theorem stating the question".into());
            }
        }
        Ok(())
    }
}

/// Name and statement of the first theorem.
pub fn question_of(theory: &Theory) -> Option<(&str, &Formula)> {
    theory.decls().iter().find_map(|d| match &d.kind {
        DeclKind::Theorem { statement, .. } => Some((&*d.name, statement)),
        _ => None,
    })
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("record `{id}`: {reason}")]
    Invalid { id: String, reason: String },
    #[error("duplicate record id `{0}`")]
    Duplicate(String),
}

/// Parses and validates corpus text; records come back sorted by id.
pub fn parse_corpus(text: &str) -> Result<Vec<ProblemRecord>, CorpusError> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ProblemRecord = serde_json::from_str(line).map_err(|source| CorpusError::Json { line: i + 1, source })?;
        rec.validate().map_err(|reason| CorpusError::Invalid {
            id: rec.id.clone(),
            reason,
        })?;
        if !ids.insert(rec.id.clone()) {
            return Err(CorpusError::Duplicate(rec.id));
        }
        out.push(rec);
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

pub fn load_corpus(path: &Path) -> Result<Vec<ProblemRecord>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus(&text)
}

/// One JSON object per line, newline-terminated.
pub fn write_corpus(records: &[ProblemRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// The bundled golden corpus.
pub fn golden_corpus_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join("golden.jsonl")
}

/// Canned formalizer completions for the golden corpus.
pub fn golden_replay_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join("golden_replay.jsonl")
}
