// SPDX-License-Identifier: Apache-2.0

//! Typing of proof terms against a goal's local context and the theory's
//! axioms. Theorems are not usable as premises.

use super::{Goal, ProofTerm};
use crate::logic::{open_binder, Formula, Symbol, Term, Theory};

/// Sort of a constant visible in `goal`: local constants first.
pub(crate) fn constant_sort(theory: &Theory, goal: &Goal, name: &str) -> Option<Symbol> {
    goal.locals
        .iter()
        .rev()
        .find(|(n, _)| &**n == name)
        .map(|(_, s)| s.clone())
        .or_else(|| theory.constant_sort(name).cloned())
}

pub(crate) fn premise(theory: &Theory, goal: &Goal, name: &str) -> Option<Formula> {
    goal.hyp(name)
        .map(|h| h.formula.clone())
        .or_else(|| theory.axiom(name).cloned())
}

/// Eliminates one argument from a premise type.
fn apply_arg(theory: &Theory, goal: &Goal, ty: Formula, arg: &ProofTerm) -> Result<Formula, String> {
    match ty {
        Formula::Forall(b, body) => {
            let ProofTerm::Name(c) = arg else {
                return Err(format!("expected a constant of sort `{}`, found `{arg}`", b.sort));
            };
            match constant_sort(theory, goal, c) {
                Some(s) if s == b.sort => Ok(open_binder(&body, &Term::Const(c.clone()))),
                Some(s) => Err(format!("`{c}` has sort `{s}`, expected `{}`", b.sort)),
                None => Err(format!("unknown constant `{c}`")),
            }
        }
        Formula::Implies(a, b) => {
            check_term(theory, goal, arg, &a)?;
            Ok(*b)
        }
        Formula::Not(a) => {
            check_term(theory, goal, arg, &a)?;
            Ok(Formula::Falsum)
        }
        other => Err(format!("`{other}` cannot be applied to `{arg}`")),
    }
}

/// The formula proved by `term`, when it can be determined without an
/// expected type.
pub fn infer_term(theory: &Theory, goal: &Goal, term: &ProofTerm) -> Result<Formula, String> {
    match term {
        ProofTerm::Name(n) => premise(theory, goal, n).ok_or_else(|| format!("unknown identifier `{n}`")),
        ProofTerm::App(head, args) => {
            let mut ty = infer_term(theory, goal, head)?;
            for a in args {
                ty = apply_arg(theory, goal, ty, a)?;
            }
            Ok(ty)
        }
        ProofTerm::AndIntro(a, b) => Ok(Formula::and(
            infer_term(theory, goal, a)?,
            infer_term(theory, goal, b)?,
        )),
        ProofTerm::OrInl(_) | ProofTerm::OrInr(_) => {
            Err(format!("cannot infer the type of `{term}` without an expected type"))
        }
    }
}

/// Checks that `term` proves `expected` (up to alpha-equivalence).
pub fn check_term(theory: &Theory, goal: &Goal, term: &ProofTerm, expected: &Formula) -> Result<(), String> {
    match (term, expected) {
        (ProofTerm::AndIntro(a, b), Formula::And(x, y)) => {
            check_term(theory, goal, a, x)?;
            check_term(theory, goal, b, y)
        }
        (ProofTerm::OrInl(a), Formula::Or(x, _)) => check_term(theory, goal, a, x),
        (ProofTerm::OrInr(a), Formula::Or(_, y)) => check_term(theory, goal, a, y),
        (ProofTerm::AndIntro(..), _) | (ProofTerm::OrInl(_), _) | (ProofTerm::OrInr(_), _) => {
            Err(format!("`{term}` cannot prove `{expected}`"))
        }
        _ => {
            let got = infer_term(theory, goal, term)?;
            if &got == expected {
                Ok(())
            } else {
                Err(format!("`{term}` proves `{got}`, expected `{expected}`"))
            }
        }
    }
}
