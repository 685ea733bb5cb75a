// SPDX-License-Identifier: Apache-2.0

//! Lean-subset surface language: `universe`, `constant`, `axiom`,
//! `theorem ... := begin ... end`, `--` comments, unicode connectives and
//! their ASCII aliases.

mod lexer;
mod parser;
mod printer;

use serde::Serialize;
use thiserror::Error;

use crate::logic::{check_wf, Diagnostic, Formula, Theory};

pub use parser::{
    parse_formula, parse_proof_term, parse_script, parse_tactic, parse_theory_unchecked,
};
pub use printer::{print_formula, print_script, print_theory};

/// Byte range into the (NFC-normalised) source, with 1-based line/column of
/// the start. Columns count characters, not bytes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    pub fn merge(self, other: SourceSpan) -> SourceSpan {
        SourceSpan {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
            line: self.line,
            column: self.column,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Serialize)]
#[error("{}:{}: {message}", span.line, span.column)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("theory is ill-formed: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    IllFormed(Vec<Diagnostic>),
}

impl TheoryError {
    /// Human-readable diagnostics, one per line, as fed back to a formalizer.
    pub fn render(&self) -> String {
        match self {
            TheoryError::Syntax(e) => format!("error: {e}"),
            TheoryError::IllFormed(ds) => ds
                .iter()
                .map(|d| format!("error: {d}"))
                .collect::<Vec<_>>()
                .join("\n"),
        }
    }
}

/// Parses a theory and checks it; a returned theory passes `check_wf`.
pub fn parse_theory(source: &str) -> Result<Theory, TheoryError> {
    let theory = parse_theory_unchecked(source)?;
    let diags = check_wf(&theory);
    if diags.is_empty() {
        Ok(theory)
    } else {
        Err(TheoryError::IllFormed(diags))
    }
}

/// Parses a formula and resolves omitted binder sorts against `theory`.
pub fn parse_formula_in(theory: &Theory, source: &str) -> Result<Formula, ParseError> {
    let mut f = parse_formula(source)?;
    if let Some(sort) = theory.single_sort() {
        f.resolve_sorts(&sort);
    }
    Ok(f)
}
