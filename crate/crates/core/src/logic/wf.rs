// SPDX-License-Identifier: Apache-2.0

//! Well-formedness checking of theories and formulas.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::{DeclKind, Formula, Symbol, Term, Theory, UNRESOLVED_SORT};
use crate::syntax::SourceSpan;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    UnknownSymbol,
    ArityMismatch,
    DuplicateName,
    FreeVariable,
    SortMismatch,
    /// Equality, numerals, function symbols, uninferable binder sorts.
    Unsupported,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub decl: String,
    pub kind: DiagnosticKind,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.span {
            Some(sp) => write!(f, "{}:{}: {}: {}", sp.line, sp.column, self.decl, self.message),
            None => write!(f, "{}: {}", self.decl, self.message),
        }
    }
}

/// Symbols visible while checking a formula: the theory prefix plus any
/// local constants introduced inside a proof.
pub trait LocalScope {
    fn local_sort(&self, name: &str) -> Option<Symbol>;
}

impl LocalScope for () {
    fn local_sort(&self, _: &str) -> Option<Symbol> {
        None
    }
}

impl LocalScope for Vec<(Symbol, Symbol)> {
    fn local_sort(&self, name: &str) -> Option<Symbol> {
        self.iter().rev().find(|(n, _)| &**n == name).map(|(_, s)| s.clone())
    }
}

#[derive(Clone)]
enum Entry {
    Sort,
    Constant(Symbol),
    Predicate(Vec<Symbol>),
    Other,
}

struct Checker<'a> {
    visible: HashMap<Symbol, Entry>,
    locals: &'a dyn LocalScope,
    decl: String,
    span: Option<SourceSpan>,
    out: Vec<Diagnostic>,
}

impl<'a> Checker<'a> {
    fn report(&mut self, kind: DiagnosticKind, message: String) {
        self.out.push(Diagnostic {
            decl: self.decl.clone(),
            kind,
            message,
            span: self.span,
        });
    }

    fn sort_of_const(&self, name: &str) -> Result<Symbol, DiagnosticKind> {
        if let Some(s) = self.locals.local_sort(name) {
            return Ok(s);
        }
        match self.visible.get(name) {
            Some(Entry::Constant(s)) => Ok(s.clone()),
            Some(_) => Err(DiagnosticKind::SortMismatch),
            None => Err(DiagnosticKind::UnknownSymbol),
        }
    }

    fn check_term(&mut self, t: &Term, binders: &[Symbol], expected: Option<&Symbol>) {
        let found = match t {
            Term::Var(i) => {
                let i = *i as usize;
                if i >= binders.len() {
                    self.report(DiagnosticKind::FreeVariable, format!("variable #{i} is not bound"));
                    return;
                }
                binders[binders.len() - 1 - i].clone()
            }
            Term::Numeral(n) => {
                self.report(
                    DiagnosticKind::Unsupported,
                    format!("numeric literal `{n}` is not supported"),
                );
                return;
            }
            Term::Const(c) => match self.sort_of_const(c) {
                Ok(s) => s,
                Err(DiagnosticKind::UnknownSymbol) => {
                    self.report(DiagnosticKind::UnknownSymbol, format!("unknown constant `{c}`"));
                    return;
                }
                Err(kind) => {
                    self.report(kind, format!("`{c}` is not an object constant"));
                    return;
                }
            },
        };
        if let Some(expected) = expected {
            if &found != expected {
                self.report(
                    DiagnosticKind::SortMismatch,
                    format!("term of sort `{found}` used where `{expected}` is expected"),
                );
            }
        }
    }

    fn check_formula(&mut self, f: &Formula, binders: &mut Vec<Symbol>) {
        match f {
            Formula::Atom(p, args) => match self.visible.get(p).cloned() {
                Some(Entry::Predicate(sig)) => {
                    if sig.len() != args.len() {
                        self.report(
                            DiagnosticKind::ArityMismatch,
                            format!(
                                "`{p}` expects {} argument(s), found {}",
                                sig.len(),
                                args.len()
                            ),
                        );
                        for a in args {
                            self.check_term(a, binders, None);
                        }
                    } else {
                        for (a, s) in args.iter().zip(&sig) {
                            self.check_term(a, binders, Some(s));
                        }
                    }
                }
                Some(_) => {
                    self.report(DiagnosticKind::ArityMismatch, format!("`{p}` is not a predicate"))
                }
                None => self.report(DiagnosticKind::UnknownSymbol, format!("unknown predicate `{p}`")),
            },
            Formula::Equals(..) => {
                self.report(DiagnosticKind::Unsupported, "equality is not supported".into())
            }
            Formula::Falsum => {}
            Formula::Not(a) => self.check_formula(a, binders),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                self.check_formula(a, binders);
                self.check_formula(b, binders);
            }
            Formula::Forall(bd, body) | Formula::Exists(bd, body) => {
                if &*bd.sort == UNRESOLVED_SORT {
                    self.report(
                        DiagnosticKind::Unsupported,
                        format!("cannot infer the sort of binder `{}`", bd.name),
                    );
                } else if !matches!(self.visible.get(&bd.sort), Some(Entry::Sort)) {
                    self.report(DiagnosticKind::UnknownSymbol, format!("unknown sort `{}`", bd.sort));
                }
                binders.push(bd.sort.clone());
                self.check_formula(body, binders);
                binders.pop();
            }
        }
    }

    fn check_sort_ref(&mut self, s: &Symbol) {
        if !matches!(self.visible.get(s), Some(Entry::Sort)) {
            self.report(DiagnosticKind::UnknownSymbol, format!("unknown sort `{s}`"));
        }
    }
}

/// Returns every violated theory invariant; empty means well-formed.
/// Each declaration only sees the declarations before it.
pub fn check_wf(theory: &Theory) -> Vec<Diagnostic> {
    let mut ck = Checker {
        visible: HashMap::new(),
        locals: &(),
        decl: String::new(),
        span: None,
        out: Vec::new(),
    };
    let mut seen: HashSet<Symbol> = HashSet::new();
    for d in theory.decls() {
        ck.decl = d.name.to_string();
        ck.span = d.span;
        if !seen.insert(d.name.clone()) {
            ck.report(DiagnosticKind::DuplicateName, format!("`{}` is declared twice", d.name));
            continue;
        }
        let entry = match &d.kind {
            DeclKind::Sort => Entry::Sort,
            DeclKind::Constant { sort } => {
                ck.check_sort_ref(sort);
                Entry::Constant(sort.clone())
            }
            DeclKind::Predicate { args } => {
                for s in args {
                    ck.check_sort_ref(s);
                }
                Entry::Predicate(args.clone())
            }
            DeclKind::Function { result, .. } => {
                ck.report(
                    DiagnosticKind::Unsupported,
                    format!("function symbols into `{result}` are not supported"),
                );
                Entry::Other
            }
            DeclKind::Axiom(f) | DeclKind::Theorem { statement: f, .. } => {
                ck.check_formula(f, &mut Vec::new());
                Entry::Other
            }
        };
        ck.visible.insert(d.name.clone(), entry);
    }
    ck.out
}

/// Checks a closed formula against the whole theory plus local constants.
pub fn check_formula(theory: &Theory, locals: &dyn LocalScope, f: &Formula) -> Vec<Diagnostic> {
    let mut visible = HashMap::new();
    for d in theory.decls() {
        let entry = match &d.kind {
            DeclKind::Sort => Entry::Sort,
            DeclKind::Constant { sort } => Entry::Constant(sort.clone()),
            DeclKind::Predicate { args } => Entry::Predicate(args.clone()),
            _ => Entry::Other,
        };
        visible.entry(d.name.clone()).or_insert(entry);
    }
    let mut ck = Checker {
        visible,
        locals,
        decl: "<formula>".into(),
        span: None,
        out: Vec::new(),
    };
    ck.check_formula(f, &mut Vec::new());
    ck.out
}
