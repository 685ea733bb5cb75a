// SPDX-License-Identifier: Apache-2.0

//! Proof states and the tactic kernel.

mod script;
mod tactic;
mod term;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::logic::{canonical_text, check_formula, Formula, Symbol, Theory};
use crate::syntax::SourceSpan;

pub use script::{check_proof, check_script, check_theorem, ProofReport, ProofStatus};
pub use tactic::{apply_tactic, contradiction_holds, fresh_name};
pub use term::{check_term, infer_term};

/// Proof expressions accepted as tactic arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProofTerm {
    /// Axiom or hypothesis, or a constant when used as a `∀` argument.
    Name(Symbol),
    App(Box<ProofTerm>, Vec<ProofTerm>),
    AndIntro(Box<ProofTerm>, Box<ProofTerm>),
    OrInl(Box<ProofTerm>),
    OrInr(Box<ProofTerm>),
}

impl ProofTerm {
    pub fn name(s: &str) -> Self {
        ProofTerm::Name(crate::logic::sym(s))
    }

    /// `head a b c`, or just `head` when there are no arguments.
    pub fn app(head: ProofTerm, args: Vec<ProofTerm>) -> Self {
        if args.is_empty() {
            head
        } else {
            ProofTerm::App(Box::new(head), args)
        }
    }

    /// The premise a term is built from, if any.
    pub fn head_name(&self) -> Option<&Symbol> {
        match self {
            ProofTerm::Name(n) => Some(n),
            ProofTerm::App(h, _) => h.head_name(),
            ProofTerm::AndIntro(..) | ProofTerm::OrInl(_) | ProofTerm::OrInr(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tactic {
    Intro(Option<Symbol>),
    Apply(ProofTerm),
    Exact(ProofTerm),
    Assumption,
    Split,
    Left,
    Right,
    Cases {
        target: ProofTerm,
        names: Vec<Symbol>,
    },
    /// `have n : F` opens a subgoal for `F`; with a proof term (`:= t` or
    /// `, from t`) the fact is checked and added directly.
    Have {
        name: Option<Symbol>,
        formula: Option<Formula>,
        proof: Option<ProofTerm>,
    },
    Contradiction,
    Use(Symbol),
    Sorry,
    /// Anything outside the supported tactic set; rejected on application.
    Opaque(String),
}

/// Serialized as its surface syntax.
impl Serialize for Tactic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TacticKind {
    Intro,
    Apply,
    Exact,
    Assumption,
    Split,
    Left,
    Right,
    Cases,
    Have,
    Contradiction,
    Use,
    Sorry,
    Opaque,
}

impl Tactic {
    pub fn kind(&self) -> TacticKind {
        match self {
            Tactic::Intro(_) => TacticKind::Intro,
            Tactic::Apply(_) => TacticKind::Apply,
            Tactic::Exact(_) => TacticKind::Exact,
            Tactic::Assumption => TacticKind::Assumption,
            Tactic::Split => TacticKind::Split,
            Tactic::Left => TacticKind::Left,
            Tactic::Right => TacticKind::Right,
            Tactic::Cases { .. } => TacticKind::Cases,
            Tactic::Have { .. } => TacticKind::Have,
            Tactic::Contradiction => TacticKind::Contradiction,
            Tactic::Use(_) => TacticKind::Use,
            Tactic::Sorry => TacticKind::Sorry,
            Tactic::Opaque(_) => TacticKind::Opaque,
        }
    }

    /// Premise named by the tactic's proof term, used for retrieval scoring.
    pub fn premise(&self) -> Option<&Symbol> {
        match self {
            Tactic::Apply(t) | Tactic::Exact(t) | Tactic::Cases { target: t, .. } => t.head_name(),
            Tactic::Have { proof: Some(t), .. } => t.head_name(),
            _ => None,
        }
    }
}

/// A tactic, or a `{ ... }` block focused on the first goal.
#[derive(Clone, Debug)]
pub enum ScriptItem {
    Tactic(Tactic, SourceSpan),
    Block(Vec<ScriptItem>, SourceSpan),
}

impl ScriptItem {
    pub fn span(&self) -> SourceSpan {
        match self {
            ScriptItem::Tactic(_, s) | ScriptItem::Block(_, s) => *s,
        }
    }
}

impl PartialEq for ScriptItem {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ScriptItem::Tactic(a, _), ScriptItem::Tactic(b, _)) => a == b,
            (ScriptItem::Block(a, _), ScriptItem::Block(b, _)) => a == b,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct TacticScript {
    pub items: Vec<ScriptItem>,
}

impl TacticScript {
    /// A flat script, e.g. a search path.
    pub fn from_tactics(tactics: impl IntoIterator<Item = Tactic>) -> Self {
        let zero = SourceSpan {
            start: 0,
            end: 0,
            line: 1,
            column: 1,
        };
        TacticScript {
            items: tactics
                .into_iter()
                .map(|t| ScriptItem::Tactic(t, zero))
                .collect(),
        }
    }

    /// Number of atomic tactics, blocks flattened.
    pub fn len(&self) -> usize {
        fn count(items: &[ScriptItem]) -> usize {
            items
                .iter()
                .map(|i| match i {
                    ScriptItem::Tactic(..) => 1,
                    ScriptItem::Block(b, _) => count(b),
                })
                .sum()
        }
        count(&self.items)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for TacticScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_script(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypothesis {
    pub name: Symbol,
    pub formula: Formula,
}

/// Local context plus target. Later hypotheses shadow earlier ones with the
/// same name; shadowed ones stay usable by `assumption` and `contradiction`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Goal {
    /// Local constants `(name, sort)` introduced by `intro` or `cases`.
    pub locals: Vec<(Symbol, Symbol)>,
    pub hyps: Vec<Hypothesis>,
    pub target: Formula,
}

impl Goal {
    pub fn new(target: Formula) -> Self {
        Goal {
            locals: Vec::new(),
            hyps: Vec::new(),
            target,
        }
    }

    /// The visible hypothesis with this name.
    pub fn hyp(&self, name: &str) -> Option<&Hypothesis> {
        self.hyps.iter().rev().find(|h| &*h.name == name)
    }

    /// Visible (non-shadowed) hypotheses, oldest first.
    pub fn visible_hyps(&self) -> impl Iterator<Item = &Hypothesis> {
        self.hyps
            .iter()
            .enumerate()
            .filter(|(i, h)| !self.hyps[i + 1..].iter().any(|later| later.name == h.name))
            .map(|(_, h)| h)
    }

    pub fn has_fact(&self, f: &Formula) -> bool {
        self.hyps.iter().any(|h| &h.formula == f)
    }

    /// Alpha-normalised rendering. Hypotheses are rendered as a sorted set
    /// of formulas: names do not affect what is provable.
    pub fn canonical_text(&self) -> String {
        let mut hyps: Vec<String> = self.hyps.iter().map(|h| canonical_text(&h.formula)).collect();
        hyps.sort();
        hyps.dedup();
        let mut out = String::new();
        if !self.locals.is_empty() {
            out.push('[');
            for (i, (n, s)) in self.locals.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&format!("{n} : {s}"));
            }
            out.push_str("] ");
        }
        out.push_str(&hyps.join(", "));
        if !hyps.is_empty() {
            out.push(' ');
        }
        out.push_str("⊢ ");
        out.push_str(&canonical_text(&self.target));
        out
    }

    pub(crate) fn is_well_formed(&self, theory: &Theory, f: &Formula) -> Result<(), String> {
        if !f.is_closed() {
            return Err(format!("`{f}` has free variables"));
        }
        match check_formula(theory, &self.locals, f).first() {
            None => Ok(()),
            Some(d) => Err(d.message.clone()),
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, s) in &self.locals {
            writeln!(f, "{n} : {s}")?;
        }
        for h in &self.hyps {
            writeln!(f, "{} : {}", h.name, h.formula)?;
        }
        write!(f, "⊢ {}", self.target)
    }
}

/// Ordered open goals; the first is the one tactics act on.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ProofState {
    pub goals: Vec<Arc<Goal>>,
    /// Set once any `sorry` has run.
    pub tainted: bool,
}

impl ProofState {
    pub fn is_complete(&self) -> bool {
        self.goals.is_empty()
    }

    pub fn canonical_text(&self) -> String {
        if self.goals.is_empty() {
            return "no goals".into();
        }
        self.goals
            .iter()
            .map(|g| g.canonical_text())
            .collect::<Vec<_>>()
            .join(" ;; ")
    }
}

impl fmt::Display for ProofState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.goals.is_empty() {
            return f.write_str("no goals");
        }
        for (i, g) in self.goals.iter().enumerate() {
            if i > 0 {
                f.write_str("\n\n")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("target is ill-formed: {0}")]
    IllFormedTarget(String),
    #[error("unknown theorem `{0}`")]
    UnknownTheorem(String),
    #[error("theorem `{0}` has no attached proof script")]
    NoScript(String),
}

/// Starting state for proving `target`: one goal, empty local context.
pub fn init_state(theory: &Theory, target: &Formula) -> Result<ProofState, KernelError> {
    let goal = Goal::new(target.clone());
    goal.is_well_formed(theory, target)
        .map_err(KernelError::IllFormedTarget)?;
    Ok(ProofState {
        goals: vec![Arc::new(goal)],
        tainted: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TacticErrorKind {
    NoGoals,
    TargetMismatch,
    UnknownHypothesis,
    WrongConnective,
    Unsupported,
    IllFormed,
    CannotInfer,
    NameClash,
    UnsolvedBlock,
}

#[derive(Clone, Debug, Error, PartialEq, Serialize)]
#[error("{tactic}: {message}")]
pub struct TacticError {
    pub tactic: String,
    pub kind: TacticErrorKind,
    pub message: String,
}

impl TacticError {
    pub(crate) fn new(tactic: &Tactic, kind: TacticErrorKind, message: impl Into<String>) -> Self {
        TacticError {
            tactic: tactic.to_string(),
            kind,
            message: message.into(),
        }
    }
}
