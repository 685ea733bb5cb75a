// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;

use super::{Formula, Term};

/// Deterministic, alpha-normalised rendering. Bound variables are named by
/// binder depth (`x0` outermost), binary connectives are always
/// parenthesised and quantifiers are wrapped as `(∀ x0 : s, body)`.
pub fn canonical_text(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, 0, &mut out);
    out
}

fn write_term(t: &Term, depth: u32, out: &mut String) {
    match t {
        Term::Const(c) => out.push_str(c),
        Term::Var(i) => {
            // Dangling indices still render deterministically.
            let level = depth as i64 - 1 - *i as i64;
            let _ = write!(out, "x{level}");
        }
        Term::Numeral(n) => {
            let _ = write!(out, "{n}");
        }
    }
}

fn write_app(terms: &[Term], depth: u32, out: &mut String) {
    for (i, t) in terms.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write_term(t, depth, out);
    }
}

fn write_formula(f: &Formula, depth: u32, out: &mut String) {
    let binary = |a: &Formula, op: &str, b: &Formula, out: &mut String| {
        out.push('(');
        write_formula(a, depth, out);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        write_formula(b, depth, out);
        out.push(')');
    };
    match f {
        Formula::Atom(p, args) => {
            out.push_str(p);
            for a in args {
                out.push(' ');
                write_term(a, depth, out);
            }
        }
        Formula::Equals(l, r) => {
            out.push('(');
            write_app(l, depth, out);
            out.push_str(" = ");
            write_app(r, depth, out);
            out.push(')');
        }
        Formula::Falsum => out.push('⊥'),
        Formula::Not(a) => {
            out.push('¬');
            write_formula(a, depth, out);
        }
        Formula::And(a, b) => binary(a, "∧", b, out),
        Formula::Or(a, b) => binary(a, "∨", b, out),
        Formula::Implies(a, b) => binary(a, "→", b, out),
        Formula::Iff(a, b) => binary(a, "↔", b, out),
        Formula::Forall(bd, body) | Formula::Exists(bd, body) => {
            let q = if matches!(f, Formula::Forall(..)) { '∀' } else { '∃' };
            let _ = write!(out, "({q} x{depth} : {}, ", bd.sort);
            write_formula(body, depth + 1, out);
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::sym;

    fn px(name: &str) -> Formula {
        Formula::forall(name, "obj", Formula::Atom(sym("P"), vec![Term::Var(0)]))
    }

    #[test]
    fn alpha_equivalent_formulas_render_identically() {
        assert_eq!(canonical_text(&px("x")), canonical_text(&px("y")));
        assert_eq!(canonical_text(&px("x")), "(∀ x0 : obj, P x0)");
    }

    #[test]
    fn conjunction_is_parenthesised() {
        let f = Formula::and(Formula::atom("A", &[]), Formula::atom("B", &[]));
        assert_eq!(canonical_text(&f), "(A ∧ B)");
    }

    #[test]
    fn double_negation_is_kept() {
        let p = Formula::atom("P", &[]);
        let nn = Formula::not(Formula::not(p.clone()));
        assert_ne!(canonical_text(&nn), canonical_text(&p));
        assert_eq!(canonical_text(&nn), "¬¬P");
    }
}
