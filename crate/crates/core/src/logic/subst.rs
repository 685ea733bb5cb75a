// SPDX-License-Identifier: Apache-2.0

//! Substitution, instantiation and first-order matching.
//!
//! Matching uses placeholder constants named `?0`, `?1`, ... which the lexer
//! can never produce, so they cannot collide with user symbols.

use super::{sym, Formula, LogicError, Symbol, Term, Theory};

/// Assignment of placeholder `?i` to a term, indexed by `i`.
pub type Bindings = Vec<Option<Term>>;

pub fn placeholder(i: usize) -> Term {
    Term::Const(sym(&format!("?{i}")))
}

pub fn placeholder_index(s: &Symbol) -> Option<usize> {
    s.strip_prefix('?').and_then(|rest| rest.parse().ok())
}

fn map_terms(f: &Formula, depth: u32, g: &mut impl FnMut(&Term, u32) -> Term) -> Formula {
    match f {
        Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|t| g(t, depth)).collect()),
        Formula::Equals(l, r) => Formula::Equals(
            l.iter().map(|t| g(t, depth)).collect(),
            r.iter().map(|t| g(t, depth)).collect(),
        ),
        Formula::Falsum => Formula::Falsum,
        Formula::Not(a) => Formula::not(map_terms(a, depth, g)),
        Formula::And(a, b) => Formula::and(map_terms(a, depth, g), map_terms(b, depth, g)),
        Formula::Or(a, b) => Formula::or(map_terms(a, depth, g), map_terms(b, depth, g)),
        Formula::Implies(a, b) => {
            Formula::implies(map_terms(a, depth, g), map_terms(b, depth, g))
        }
        Formula::Iff(a, b) => Formula::iff(map_terms(a, depth, g), map_terms(b, depth, g)),
        Formula::Forall(bd, body) => {
            Formula::Forall(bd.clone(), Box::new(map_terms(body, depth + 1, g)))
        }
        Formula::Exists(bd, body) => {
            Formula::Exists(bd.clone(), Box::new(map_terms(body, depth + 1, g)))
        }
    }
}

/// Replaces the variable bound by the binder just removed with `witness`.
/// `witness` must be closed, so no index shifting is needed on it.
pub fn open_binder(body: &Formula, witness: &Term) -> Formula {
    map_terms(body, 0, &mut |t, depth| match t {
        Term::Var(i) if *i == depth => witness.clone(),
        Term::Var(i) if *i > depth => Term::Var(i - 1),
        other => other.clone(),
    })
}

/// Inverse of [`open_binder`]: abstracts every occurrence of constant `c`
/// into the variable of a binder about to be wrapped around the result.
pub fn abstract_const(f: &Formula, c: &Symbol) -> Formula {
    map_terms(f, 0, &mut |t, depth| match t {
        Term::Const(k) if k == c => Term::Var(depth),
        Term::Var(i) if *i >= depth => Term::Var(i + 1),
        other => other.clone(),
    })
}

/// Eliminates the outermost universal of `formula` at `witness`.
pub fn instantiate(theory: &Theory, formula: &Formula, witness: &Term) -> Result<Formula, LogicError> {
    let Formula::Forall(binder, body) = formula else {
        return Err(LogicError::NotUniversal(formula.to_string()));
    };
    let Term::Const(name) = witness else {
        return Err(LogicError::UnknownConstant(format!("{witness:?}")));
    };
    let sort = theory
        .constant_sort(name)
        .ok_or_else(|| LogicError::UnknownConstant(name.to_string()))?;
    if *sort != binder.sort {
        return Err(LogicError::SortMismatch {
            witness: name.to_string(),
            expected: binder.sort.to_string(),
            found: sort.to_string(),
        });
    }
    Ok(open_binder(body, witness))
}

/// Syntactic negation. No double-negation elimination.
pub fn negate(formula: &Formula) -> Result<Formula, LogicError> {
    if !formula.is_closed() {
        return Err(LogicError::OpenFormula(formula.to_string()));
    }
    Ok(Formula::not(formula.clone()))
}

/// Replaces bound placeholders; unbound ones are left in place.
pub fn substitute(f: &Formula, bindings: &Bindings) -> Formula {
    map_terms(f, 0, &mut |t, _| match t {
        Term::Const(c) => match placeholder_index(c).and_then(|i| bindings.get(i).cloned().flatten()) {
            Some(bound) => bound,
            None => t.clone(),
        },
        other => other.clone(),
    })
}

pub fn has_placeholders(f: &Formula) -> bool {
    let mut found = false;
    f.for_each_const(&mut |c| found |= placeholder_index(c).is_some());
    found
}

fn match_term(pattern: &Term, target: &Term, bindings: &mut Bindings) -> bool {
    if let Term::Const(c) = pattern {
        if let Some(i) = placeholder_index(c) {
            // Placeholders stand for closed constants only.
            if !matches!(target, Term::Const(_)) {
                return false;
            }
            if bindings.len() <= i {
                bindings.resize(i + 1, None);
            }
            return match &bindings[i] {
                Some(bound) => bound == target,
                None => {
                    bindings[i] = Some(target.clone());
                    true
                }
            };
        }
    }
    pattern == target
}

fn match_terms(ps: &[Term], ts: &[Term], bindings: &mut Bindings) -> bool {
    ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, t)| match_term(p, t, bindings))
}

/// First-order matching of `pattern` (containing placeholders) against
/// `target`. On failure `bindings` may be partially extended; callers
/// match against a clone when they need to backtrack.
pub fn match_formula(pattern: &Formula, target: &Formula, bindings: &mut Bindings) -> bool {
    match (pattern, target) {
        (Formula::Atom(p, pa), Formula::Atom(q, qa)) => p == q && match_terms(pa, qa, bindings),
        (Formula::Equals(pl, pr), Formula::Equals(ql, qr)) => {
            match_terms(pl, ql, bindings) && match_terms(pr, qr, bindings)
        }
        (Formula::Falsum, Formula::Falsum) => true,
        (Formula::Not(a), Formula::Not(b)) => match_formula(a, b, bindings),
        (Formula::And(a1, a2), Formula::And(b1, b2))
        | (Formula::Or(a1, a2), Formula::Or(b1, b2))
        | (Formula::Implies(a1, a2), Formula::Implies(b1, b2))
        | (Formula::Iff(a1, a2), Formula::Iff(b1, b2)) => {
            match_formula(a1, b1, bindings) && match_formula(a2, b2, bindings)
        }
        (Formula::Forall(x, a), Formula::Forall(y, b))
        | (Formula::Exists(x, a), Formula::Exists(y, b)) => x == y && match_formula(a, b, bindings),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Binder, Declaration};

    fn hudson_theory() -> Theory {
        Theory::from_decls([
            Declaration::sort("obj"),
            Declaration::sort("other"),
            Declaration::constant("Hudson", "obj"),
            Declaration::constant("Rock", "other"),
            Declaration::predicate("is_cat", &["obj"]),
            Declaration::predicate("is_animal", &["obj"]),
        ])
    }

    fn cat_rule() -> Formula {
        Formula::forall(
            "x",
            "obj",
            Formula::implies(
                Formula::Atom(sym("is_cat"), vec![Term::Var(0)]),
                Formula::Atom(sym("is_animal"), vec![Term::Var(0)]),
            ),
        )
    }

    #[test]
    fn instantiate_substitutes_the_binder() {
        let t = hudson_theory();
        let got = instantiate(&t, &cat_rule(), &Term::constant("Hudson")).unwrap();
        let want = Formula::implies(
            Formula::atom("is_cat", &["Hudson"]),
            Formula::atom("is_animal", &["Hudson"]),
        );
        assert_eq!(got, want);
        assert!(got.is_closed());
    }

    #[test]
    fn instantiate_rejects_wrong_sort_and_non_universal() {
        let t = hudson_theory();
        let err = instantiate(&t, &cat_rule(), &Term::constant("Rock")).unwrap_err();
        assert!(matches!(err, LogicError::SortMismatch { .. }));
        let err = instantiate(&t, &Formula::atom("is_cat", &["Hudson"]), &Term::constant("Hudson"))
            .unwrap_err();
        assert!(matches!(err, LogicError::NotUniversal(_)));
    }

    #[test]
    fn instantiate_shifts_outer_variables() {
        // ∀ y, ∀ x, R x y  -- instantiate inside the outer binder.
        let inner = Formula::Forall(
            Binder::new("x", "obj"),
            Box::new(Formula::Atom(sym("R"), vec![Term::Var(0), Term::Var(1)])),
        );
        let opened = open_binder(
            &Formula::Atom(sym("R"), vec![Term::Var(0), Term::Var(1)]),
            &Term::constant("a"),
        );
        assert_eq!(opened, Formula::Atom(sym("R"), vec![Term::constant("a"), Term::Var(0)]));
        let abstracted = abstract_const(&opened, &sym("a"));
        assert_eq!(abstracted, Formula::Atom(sym("R"), vec![Term::Var(0), Term::Var(1)]));
        assert!(!inner.is_closed());
    }

    #[test]
    fn negate_wraps_without_normalising() {
        let p = Formula::atom("often_meow", &["Hudson"]);
        let np = negate(&p).unwrap();
        assert_eq!(np, Formula::not(p.clone()));
        let nnp = negate(&np).unwrap();
        assert_ne!(nnp, p);
        assert_eq!(nnp, Formula::not(Formula::not(p)));
        assert!(negate(&Formula::Atom(sym("P"), vec![Term::Var(0)])).is_err());
    }

    #[test]
    fn matching_binds_placeholders_consistently() {
        let pat = Formula::Atom(sym("Needs"), vec![placeholder(0), placeholder(0)]);
        let mut b = Bindings::new();
        assert!(match_formula(&pat, &Formula::atom("Needs", &["Cow", "Cow"]), &mut b));
        assert_eq!(b[0], Some(Term::constant("Cow")));
        let mut b = Bindings::new();
        assert!(!match_formula(&pat, &Formula::atom("Needs", &["Cow", "Cat"]), &mut b));
    }
}
