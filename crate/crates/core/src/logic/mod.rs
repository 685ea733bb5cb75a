// SPDX-License-Identifier: Apache-2.0

//! Terms, formulas, declarations and theories for the first-order fragment.
//!
//! Bound variables are de Bruijn indices (`Var(0)` is the innermost binder);
//! binder names are kept for printing only, so the derived `PartialEq`/`Hash`
//! on [`Formula`] is alpha-equivalence.

mod canonical;
mod subst;
mod wf;

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::TacticScript;
use crate::syntax::SourceSpan;

pub use canonical::canonical_text;
pub use subst::{
    abstract_const, has_placeholders, instantiate, match_formula, negate, open_binder, placeholder,
    placeholder_index, substitute, Bindings,
};
pub use wf::{check_formula, check_wf, Diagnostic, DiagnosticKind, LocalScope};

/// Interned-ish symbol. Cheap to clone, shared across threads.
pub type Symbol = Arc<str>;

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

/// Placeholder sort used by the parser when a binder omits its sort.
pub const UNRESOLVED_SORT: &str = "_";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Symbol),
    /// De Bruijn index of an enclosing binder.
    Var(u32),
    /// Only produced by the parser so that `check_wf` can reject it.
    Numeral(u64),
}

impl Term {
    pub fn constant(name: &str) -> Self {
        Term::Const(sym(name))
    }

    pub fn as_const(&self) -> Option<&Symbol> {
        match self {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }
}

/// Quantifier binder. Equality and hashing look at the sort only.
#[derive(Clone, Debug)]
pub struct Binder {
    pub name: Symbol,
    pub sort: Symbol,
}

impl Binder {
    pub fn new(name: &str, sort: &str) -> Self {
        Binder {
            name: sym(name),
            sort: sym(sort),
        }
    }
}

impl PartialEq for Binder {
    fn eq(&self, other: &Self) -> bool {
        self.sort == other.sort
    }
}

impl Eq for Binder {}

impl Hash for Binder {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.sort.hash(state);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Symbol, Vec<Term>),
    /// Equality between applications; unsupported, rejected by `check_wf`.
    Equals(Vec<Term>, Vec<Term>),
    /// Falsehood. Target of `intro` on a negated goal.
    Falsum,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Binder, Box<Formula>),
    Exists(Binder, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: &str, args: &[&str]) -> Self {
        Formula::Atom(sym(pred), args.iter().map(|a| Term::constant(a)).collect())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(name: &str, sort: &str, body: Formula) -> Self {
        Formula::Forall(Binder::new(name, sort), Box::new(body))
    }

    pub fn exists(name: &str, sort: &str, body: Formula) -> Self {
        Formula::Exists(Binder::new(name, sort), Box::new(body))
    }

    /// Ground atom or negated ground atom.
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Atom(..) => true,
            Formula::Not(inner) => matches!(**inner, Formula::Atom(..)),
            _ => false,
        }
    }

    /// `¬A` for `A`, and `A` for `¬A`.
    pub fn complement(&self) -> Formula {
        match self {
            Formula::Not(inner) => (**inner).clone(),
            other => Formula::not(other.clone()),
        }
    }

    /// Flattens a right-nested conjunction.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Formula::And(a, b) = cur {
            out.push(&**a);
            cur = b;
        }
        out.push(cur);
        out
    }

    /// Flattens a right-nested disjunction.
    pub fn disjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Formula::Or(a, b) = cur {
            out.push(&**a);
            cur = b;
        }
        out.push(cur);
        out
    }

    /// True when no de Bruijn index escapes its binders.
    pub fn is_closed(&self) -> bool {
        self.max_free_var(0).is_none()
    }

    fn max_free_var(&self, depth: u32) -> Option<u32> {
        let term_free = |t: &Term| match t {
            Term::Var(i) if *i >= depth => Some(*i - depth),
            _ => None,
        };
        match self {
            Formula::Atom(_, args) => args.iter().filter_map(term_free).max(),
            Formula::Equals(l, r) => l.iter().chain(r.iter()).filter_map(term_free).max(),
            Formula::Falsum => None,
            Formula::Not(a) => a.max_free_var(depth),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.max_free_var(depth).max(b.max_free_var(depth)),
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.max_free_var(depth + 1),
        }
    }

    /// Calls `f` on every constant symbol occurring in term position.
    pub fn for_each_const(&self, f: &mut impl FnMut(&Symbol)) {
        let on_terms = |ts: &[Term], f: &mut dyn FnMut(&Symbol)| {
            for t in ts {
                if let Term::Const(c) = t {
                    f(c);
                }
            }
        };
        match self {
            Formula::Atom(_, args) => on_terms(args, f),
            Formula::Equals(l, r) => {
                on_terms(l, f);
                on_terms(r, f);
            }
            Formula::Falsum => {}
            Formula::Not(a) => a.for_each_const(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.for_each_const(f);
                b.for_each_const(f);
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.for_each_const(f),
        }
    }

    /// Rewrites every unresolved binder sort to `sort`.
    pub fn resolve_sorts(&mut self, sort: &Symbol) {
        match self {
            Formula::Forall(b, body) | Formula::Exists(b, body) => {
                if &*b.sort == UNRESOLVED_SORT {
                    b.sort = sort.clone();
                }
                body.resolve_sorts(sort);
            }
            Formula::Not(a) => a.resolve_sorts(sort),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.resolve_sorts(sort);
                b.resolve_sorts(sort);
            }
            Formula::Atom(..) | Formula::Equals(..) | Formula::Falsum => {}
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_formula(self))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeclKind {
    /// `constant obj : Type u`
    Sort,
    /// `constant Cat : obj`
    Constant { sort: Symbol },
    /// `constant Likes : obj → obj → Prop`
    Predicate { args: Vec<Symbol> },
    /// Non-`Prop` valued symbol such as `Turkey → ℕ`; rejected by `check_wf`.
    Function { args: Vec<Symbol>, result: Symbol },
    Axiom(Formula),
    Theorem {
        statement: Formula,
        script: Option<TacticScript>,
    },
}

#[derive(Clone, Debug)]
pub struct Declaration {
    pub name: Symbol,
    pub kind: DeclKind,
    /// `--` comments immediately preceding the declaration.
    pub comments: Vec<String>,
    pub span: Option<SourceSpan>,
}

impl Declaration {
    pub fn new(name: &str, kind: DeclKind) -> Self {
        Declaration {
            name: sym(name),
            kind,
            comments: Vec::new(),
            span: None,
        }
    }

    pub fn sort(name: &str) -> Self {
        Self::new(name, DeclKind::Sort)
    }

    pub fn constant(name: &str, sort: &str) -> Self {
        Self::new(name, DeclKind::Constant { sort: sym(sort) })
    }

    pub fn predicate(name: &str, args: &[&str]) -> Self {
        Self::new(
            name,
            DeclKind::Predicate {
                args: args.iter().map(|a| sym(a)).collect(),
            },
        )
    }

    pub fn axiom(name: &str, formula: Formula) -> Self {
        Self::new(name, DeclKind::Axiom(formula))
    }

    pub fn theorem(name: &str, statement: Formula) -> Self {
        Self::new(
            name,
            DeclKind::Theorem {
                statement,
                script: None,
            },
        )
    }

    /// The formula carried by an axiom or theorem.
    pub fn formula(&self) -> Option<&Formula> {
        match &self.kind {
            DeclKind::Axiom(f) => Some(f),
            DeclKind::Theorem { statement, .. } => Some(statement),
            _ => None,
        }
    }

    /// Structural equality ignoring spans.
    pub fn alpha_eq(&self, other: &Declaration) -> bool {
        self.name == other.name && self.kind == other.kind && self.comments == other.comments
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LogicError {
    #[error("expected a universally quantified formula, found `{0}`")]
    NotUniversal(String),
    #[error("witness `{witness}` has sort `{found}`, binder expects `{expected}`")]
    SortMismatch {
        witness: String,
        expected: String,
        found: String,
    },
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("formula `{0}` has free variables")]
    OpenFormula(String),
}

/// An ordered list of declarations with a name index.
#[derive(Clone, Debug, Default)]
pub struct Theory {
    decls: Vec<Declaration>,
    index: HashMap<Symbol, usize>,
    /// Comments after the last declaration (e.g. `-- The answer is False`).
    pub trailing_comments: Vec<String>,
    /// Non-fatal parser warnings, such as prose after a proof block.
    pub warnings: Vec<String>,
}

impl Theory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_decls(decls: impl IntoIterator<Item = Declaration>) -> Self {
        let mut t = Theory::new();
        for d in decls {
            t.push(d);
        }
        t
    }

    /// Appends a declaration. A duplicate name keeps the index pointing at
    /// the first occurrence; `check_wf` reports it.
    pub fn push(&mut self, decl: Declaration) {
        let pos = self.decls.len();
        self.index.entry(decl.name.clone()).or_insert(pos);
        self.decls.push(decl);
    }

    pub fn decls(&self) -> &[Declaration] {
        &self.decls
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Declaration> {
        self.index.get(name).map(|&i| &self.decls[i])
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Declaration> {
        let i = *self.index.get(name)?;
        Some(&mut self.decls[i])
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Symbol> {
        self.decls
            .iter()
            .filter(|d| matches!(d.kind, DeclKind::Sort))
            .map(|d| &d.name)
    }

    /// The sole declared sort, if exactly one exists.
    pub fn single_sort(&self) -> Option<Symbol> {
        let mut it = self.sorts();
        let first = it.next()?.clone();
        if it.next().is_some() {
            None
        } else {
            Some(first)
        }
    }

    /// `(name, sort)` of every declared constant, in declaration order.
    pub fn constants(&self) -> impl Iterator<Item = (&Symbol, &Symbol)> {
        self.decls.iter().filter_map(|d| match &d.kind {
            DeclKind::Constant { sort } => Some((&d.name, sort)),
            _ => None,
        })
    }

    pub fn constant_sort(&self, name: &str) -> Option<&Symbol> {
        match &self.get(name)?.kind {
            DeclKind::Constant { sort } => Some(sort),
            _ => None,
        }
    }

    pub fn predicate_args(&self, name: &str) -> Option<&[Symbol]> {
        match &self.get(name)?.kind {
            DeclKind::Predicate { args } => Some(args),
            _ => None,
        }
    }

    pub fn axioms(&self) -> impl Iterator<Item = (&Symbol, &Formula)> {
        self.decls.iter().filter_map(|d| match &d.kind {
            DeclKind::Axiom(f) => Some((&d.name, f)),
            _ => None,
        })
    }

    pub fn axiom(&self, name: &str) -> Option<&Formula> {
        match &self.get(name)?.kind {
            DeclKind::Axiom(f) => Some(f),
            _ => None,
        }
    }

    pub fn theorems(&self) -> impl Iterator<Item = &Declaration> {
        self.decls
            .iter()
            .filter(|d| matches!(d.kind, DeclKind::Theorem { .. }))
    }

    /// Copy of the theory with all theorem declarations removed.
    pub fn without_theorems(&self) -> Theory {
        let mut t = Theory::from_decls(
            self.decls
                .iter()
                .filter(|d| !matches!(d.kind, DeclKind::Theorem { .. }))
                .cloned(),
        );
        t.trailing_comments = self.trailing_comments.clone();
        t
    }

    /// Declaration-by-declaration structural equality, ignoring spans.
    pub fn alpha_eq(&self, other: &Theory) -> bool {
        self.decls.len() == other.decls.len()
            && self
                .decls
                .iter()
                .zip(&other.decls)
                .all(|(a, b)| a.alpha_eq(b))
            && self.trailing_comments == other.trailing_comments
    }
}
