// SPDX-License-Identifier: Apache-2.0

//! Dual theorems for a question and the verdict their outcomes imply.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{canonical_text, negate, Formula, LogicError};
use crate::search::{SearchOutcome, SearchStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    True,
    False,
    Unknown,
    /// Both the question and its negation were proved.
    Inconsistent,
}

impl Verdict {
    pub fn from_proved(positive: bool, negative: bool) -> Self {
        match (positive, negative) {
            (true, false) => Verdict::True,
            (false, true) => Verdict::False,
            (false, false) => Verdict::Unknown,
            (true, true) => Verdict::Inconsistent,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "True",
            Verdict::False => "False",
            Verdict::Unknown => "Unknown",
            Verdict::Inconsistent => "Inconsistent",
        })
    }
}

/// A verdict together with the statuses it was read from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Interpretation {
    pub verdict: Verdict,
    pub positive: SearchStatus,
    pub negative: SearchStatus,
}

pub fn interpret(positive: &SearchOutcome, negative: &SearchOutcome) -> Interpretation {
    Interpretation {
        verdict: Verdict::from_proved(positive.is_proved(), negative.is_proved()),
        positive: positive.status.clone(),
        negative: negative.status.clone(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualTheorem {
    pub name: String,
    pub statement: Formula,
}

/// Identifier built from the formula's canonical text, e.g.
/// `often_meow Hudson` gives `often_meow_hudson`.
pub fn theorem_name(f: &Formula) -> String {
    let text = canonical_text(f);
    let mut words: Vec<String> = Vec::new();
    let mut cur = String::new();
    let flush = |cur: &mut String, words: &mut Vec<String>| {
        if !cur.is_empty() {
            words.push(std::mem::take(cur));
        }
    };
    for ch in text.chars() {
        let word = match ch {
            '¬' => Some("not"),
            '∧' => Some("and"),
            '∨' => Some("or"),
            '→' => Some("implies"),
            '↔' => Some("iff"),
            '∀' => Some("forall"),
            '∃' => Some("exists"),
            '⊥' => Some("false"),
            '=' => Some("eq"),
            _ => None,
        };
        if let Some(w) = word {
            flush(&mut cur, &mut words);
            words.push(w.to_string());
        } else if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
        } else {
            flush(&mut cur, &mut words);
        }
    }
    flush(&mut cur, &mut words);
    if words.is_empty() || words[0].starts_with(|c: char| c.is_ascii_digit()) {
        words.insert(0, "q".to_string());
    }
    words.join("_")
}

/// `(question, ¬question)` with deterministic names; the negative one is
/// named `not_<positive>`.
pub fn build_duals(question: &Formula) -> Result<(DualTheorem, DualTheorem), LogicError> {
    let negative = negate(question)?;
    let name = theorem_name(question);
    Ok((
        DualTheorem {
            name: name.clone(),
            statement: question.clone(),
        },
        DualTheorem {
            name: format!("not_{name}"),
            statement: negative,
        },
    ))
}

#[derive(Debug, Error, PartialEq)]
pub enum OptionError {
    #[error("option `{0}` does not name a verdict")]
    Unrecognized(String),
    #[error("options `{0}` and `{1}` name the same verdict")]
    Duplicate(String, String),
}

/// Dataset answer labels paired with verdicts.
#[derive(Clone, Debug, PartialEq)]
pub struct OptionMapping {
    labels: HashMap<Verdict, String>,
}

impl OptionMapping {
    /// Recognizes true/yes, false/no and unknown/uncertain (any case).
    pub fn new<S: AsRef<str>>(options: &[S]) -> Result<Self, OptionError> {
        let mut labels: HashMap<Verdict, String> = HashMap::new();
        for o in options {
            let o = o.as_ref();
            let v = Self::parse_label(o).ok_or_else(|| OptionError::Unrecognized(o.to_string()))?;
            if let Some(prev) = labels.insert(v, o.to_string()) {
                return Err(OptionError::Duplicate(prev, o.to_string()));
            }
        }
        Ok(OptionMapping { labels })
    }

    pub fn parse_label(label: &str) -> Option<Verdict> {
        match label.trim().to_ascii_lowercase().as_str() {
            "true" | "yes" => Some(Verdict::True),
            "false" | "no" => Some(Verdict::False),
            "unknown" | "uncertain" => Some(Verdict::Unknown),
            _ => None,
        }
    }

    /// The option a verdict selects; `Inconsistent` selects none.
    pub fn label(&self, verdict: Verdict) -> Option<&str> {
        self.labels.get(&verdict).map(String::as_str)
    }

    pub fn verdict(&self, label: &str) -> Option<Verdict> {
        Self::parse_label(label).filter(|v| self.labels.contains_key(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_follow_canonical_text() {
        let f = Formula::atom("Chases", &["Cow", "Cow"]);
        let (p, n) = build_duals(&f).unwrap();
        assert_eq!(p.name, "chases_cow_cow");
        assert_eq!(n.name, "not_chases_cow_cow");
        assert_eq!(n.statement, Formula::not(f));
    }

    #[test]
    fn verdict_grid() {
        assert_eq!(Verdict::from_proved(true, false), Verdict::True);
        assert_eq!(Verdict::from_proved(false, true), Verdict::False);
        assert_eq!(Verdict::from_proved(false, false), Verdict::Unknown);
        assert_eq!(Verdict::from_proved(true, true), Verdict::Inconsistent);
    }

    #[test]
    fn option_mapping_is_injective() {
        let m = OptionMapping::new(&["True", "False", "Uncertain"]).unwrap();
        assert_eq!(m.label(Verdict::Unknown), Some("Uncertain"));
        assert_eq!(m.label(Verdict::Inconsistent), None);
        assert!(matches!(
            OptionMapping::new(&["unknown", "Uncertain"]),
            Err(OptionError::Duplicate(..))
        ));
        assert!(OptionMapping::new(&["maybe"]).is_err());
    }
}
