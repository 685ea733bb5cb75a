// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;
use std::fmt::{self, Write};

use crate::kernel::{ProofTerm, ScriptItem, Tactic, TacticScript};
use crate::logic::{DeclKind, Formula, Symbol, Term, Theory, UNRESOLVED_SORT};

// Binding strength, loosest first.
const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const NOT: u8 = 5;

struct Printer<'a> {
    out: &'a mut String,
    /// Printed names of enclosing binders, innermost last.
    names: Vec<String>,
}

impl Printer<'_> {
    fn term(&mut self, t: &Term) {
        match t {
            Term::Const(c) => self.out.push_str(c),
            Term::Var(i) => match self.names.len().checked_sub(*i as usize + 1) {
                Some(k) => {
                    let n = self.names[k].clone();
                    self.out.push_str(&n);
                }
                None => {
                    let _ = write!(self.out, "#{i}");
                }
            },
            Term::Numeral(n) => {
                let _ = write!(self.out, "{n}");
            }
        }
    }

    fn terms(&mut self, ts: &[Term]) {
        for (i, t) in ts.iter().enumerate() {
            if i > 0 {
                self.out.push(' ');
            }
            self.term(t);
        }
    }

    /// A binder name that neither captures a constant of the body nor
    /// hides an enclosing binder still referenced inside.
    fn fresh(&self, wanted: &str, body: &Formula) -> String {
        let mut consts: HashSet<Symbol> = HashSet::new();
        body.for_each_const(&mut |c| {
            consts.insert(c.clone());
        });
        let clashes = |n: &str| consts.contains(n) || self.names.iter().any(|m| m == n);
        if !clashes(wanted) {
            return wanted.to_string();
        }
        (1..)
            .map(|k| format!("{wanted}_{k}"))
            .find(|n| !clashes(n))
            .unwrap()
    }

    fn formula(&mut self, f: &Formula, prec: u8) {
        let (level, open) = match f {
            Formula::Iff(..) => (IFF, true),
            Formula::Implies(..) => (IMP, true),
            Formula::Or(..) => (OR, true),
            Formula::And(..) => (AND, true),
            Formula::Not(_) => (NOT, false),
            // Quantifier bodies extend to the right, so they need parentheses
            // anywhere but the top of an expression.
            Formula::Forall(..) | Formula::Exists(..) => (0, true),
            _ => (u8::MAX, false),
        };
        let paren = open && level < prec || (level == 0 && prec > 0);
        if paren {
            self.out.push('(');
        }
        match f {
            Formula::Atom(p, args) => {
                self.out.push_str(p);
                for a in args {
                    self.out.push(' ');
                    self.term(a);
                }
            }
            Formula::Equals(l, r) => {
                self.terms(l);
                self.out.push_str(" = ");
                self.terms(r);
            }
            Formula::Falsum => self.out.push_str("false"),
            Formula::Not(a) => {
                self.out.push_str("¬ ");
                self.formula(a, NOT);
            }
            Formula::And(a, b) => self.binary(a, "∧", b, AND),
            Formula::Or(a, b) => self.binary(a, "∨", b, OR),
            Formula::Implies(a, b) => self.binary(a, "→", b, IMP),
            Formula::Iff(a, b) => self.binary(a, "↔", b, IFF),
            Formula::Forall(bd, body) | Formula::Exists(bd, body) => {
                let q = if matches!(f, Formula::Forall(..)) { "∀" } else { "∃" };
                let name = self.fresh(&bd.name, body);
                if &*bd.sort == UNRESOLVED_SORT {
                    let _ = write!(self.out, "{q} {name}, ");
                } else {
                    let _ = write!(self.out, "{q} {name} : {}, ", bd.sort);
                }
                self.names.push(name);
                self.formula(body, 0);
                self.names.pop();
            }
        }
        if paren {
            self.out.push(')');
        }
    }

    fn binary(&mut self, a: &Formula, op: &str, b: &Formula, level: u8) {
        // All binary connectives are right-associative.
        self.formula(a, level + 1);
        let _ = write!(self.out, " {op} ");
        self.formula(b, level);
    }
}

/// Surface syntax for a formula; re-parses to an alpha-equal formula.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    Printer {
        out: &mut out,
        names: Vec::new(),
    }
    .formula(f, 0);
    out
}

impl fmt::Display for ProofTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn arg(t: &ProofTerm, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                ProofTerm::Name(n) => f.write_str(n),
                other => write!(f, "({other})"),
            }
        }
        match self {
            ProofTerm::Name(n) => f.write_str(n),
            ProofTerm::App(head, args) => {
                arg(head, f)?;
                for a in args {
                    f.write_str(" ")?;
                    arg(a, f)?;
                }
                Ok(())
            }
            ProofTerm::AndIntro(a, b) => {
                f.write_str("and.intro ")?;
                arg(a, f)?;
                f.write_str(" ")?;
                arg(b, f)
            }
            ProofTerm::OrInl(a) => {
                f.write_str("or.inl ")?;
                arg(a, f)
            }
            ProofTerm::OrInr(a) => {
                f.write_str("or.inr ")?;
                arg(a, f)
            }
        }
    }
}

impl fmt::Display for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tactic::Intro(None) => f.write_str("intro"),
            Tactic::Intro(Some(n)) => write!(f, "intro {n}"),
            Tactic::Apply(t) => write!(f, "apply {t}"),
            Tactic::Exact(t) => write!(f, "exact {t}"),
            Tactic::Assumption => f.write_str("assumption"),
            Tactic::Split => f.write_str("split"),
            Tactic::Left => f.write_str("left"),
            Tactic::Right => f.write_str("right"),
            Tactic::Cases { target, names } => {
                write!(f, "cases {target}")?;
                if !names.is_empty() {
                    f.write_str(" with")?;
                    for n in names {
                        write!(f, " {n}")?;
                    }
                }
                Ok(())
            }
            Tactic::Have { name, formula, proof } => {
                f.write_str("have")?;
                if let Some(n) = name {
                    write!(f, " {n}")?;
                }
                if let Some(phi) = formula {
                    write!(f, " : {}", print_formula(phi))?;
                }
                if let Some(p) = proof {
                    write!(f, " := {p}")?;
                }
                Ok(())
            }
            Tactic::Contradiction => f.write_str("contradiction"),
            Tactic::Use(c) => write!(f, "use {c}"),
            Tactic::Sorry => f.write_str("sorry"),
            Tactic::Opaque(text) => f.write_str(text),
        }
    }
}

fn write_items(items: &[ScriptItem], indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    for item in items {
        match item {
            ScriptItem::Tactic(t, _) => {
                let _ = writeln!(out, "{pad}{t},");
            }
            ScriptItem::Block(inner, _) => {
                let _ = writeln!(out, "{pad}{{");
                write_items(inner, indent + 1, out);
                let _ = writeln!(out, "{pad}}},");
            }
        }
    }
}

/// `begin ... end` block, one tactic per line.
pub fn print_script(script: &TacticScript) -> String {
    let mut out = String::from("begin\n");
    write_items(&script.items, 1, &mut out);
    out.push_str("end");
    out
}

fn write_comment(c: &str, out: &mut String) {
    if c.contains('\n') {
        let _ = writeln!(out, "/- {c} -/");
    } else if c.is_empty() {
        out.push_str("--\n");
    } else {
        let _ = writeln!(out, "-- {c}");
    }
}

/// Renders a theory in the surface syntax. Empty theory gives empty text.
pub fn print_theory(theory: &Theory) -> String {
    let mut out = String::new();
    for (i, d) in theory.decls().iter().enumerate() {
        let is_theorem = matches!(d.kind, DeclKind::Theorem { .. });
        if i > 0 && (is_theorem || !d.comments.is_empty()) {
            out.push('\n');
        }
        for c in &d.comments {
            write_comment(c, &mut out);
        }
        let _ = match &d.kind {
            DeclKind::Sort => writeln!(out, "constant {} : Type", d.name),
            DeclKind::Constant { sort } => writeln!(out, "constant {} : {sort}", d.name),
            DeclKind::Predicate { args } => {
                let mut parts: Vec<&str> = args.iter().map(|a| &**a).collect();
                parts.push("Prop");
                writeln!(out, "constant {} : {}", d.name, parts.join(" → "))
            }
            DeclKind::Function { args, result } => {
                let mut parts: Vec<&str> = args.iter().map(|a| &**a).collect();
                parts.push(result);
                writeln!(out, "constant {} : {}", d.name, parts.join(" → "))
            }
            DeclKind::Axiom(f) => writeln!(out, "axiom {} : {}", d.name, print_formula(f)),
            DeclKind::Theorem { statement, script } => match script {
                None => writeln!(out, "theorem {} : {}", d.name, print_formula(statement)),
                Some(s) => writeln!(
                    out,
                    "theorem {} : {} :=\n{}",
                    d.name,
                    print_formula(statement),
                    print_script(s)
                ),
            },
        };
    }
    if !theory.trailing_comments.is_empty() {
        if !out.is_empty() {
            out.push('\n');
        }
        for c in &theory.trailing_comments {
            write_comment(c, &mut out);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{sym, Binder};
    use crate::syntax::parse_formula;

    fn round_trip(s: &str) {
        let f = parse_formula(s).unwrap();
        let printed = print_formula(&f);
        assert_eq!(parse_formula(&printed).unwrap(), f, "{s} printed as {printed}");
    }

    #[test]
    fn formulas_round_trip() {
        for s in [
            "∀ x : obj, Likes x Cat ∧ Chases x Cat → Blue x",
            "(P → Q) → R",
            "¬ (P ∧ Q)",
            "¬ ¬ P",
            "(P ↔ Q) ↔ R",
            "P ∧ (∀ x : obj, Q x) ∧ R",
            "(∃ x : obj, Q x) → R",
            "(P ∨ Q) ∧ R",
            "false",
        ] {
            round_trip(s);
        }
    }

    #[test]
    fn binder_names_avoid_capture() {
        // ∀ x, ∀ x, R x1 x0 -- the inner binder must be renamed.
        let f = Formula::Forall(
            Binder::new("x", "obj"),
            Box::new(Formula::Forall(
                Binder::new("x", "obj"),
                Box::new(Formula::Atom(sym("R"), vec![Term::Var(1), Term::Var(0)])),
            )),
        );
        assert_eq!(print_formula(&f), "∀ x : obj, ∀ x_1 : obj, R x x_1");
        assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f);
        // Binder named like a constant in its body.
        let g = Formula::Forall(
            Binder::new("Cat", "obj"),
            Box::new(Formula::Atom(sym("R"), vec![Term::Var(0), Term::constant("Cat")])),
        );
        assert_eq!(parse_formula(&print_formula(&g)).unwrap(), g);
    }

    #[test]
    fn tactics_display() {
        let t = Tactic::Exact(ProofTerm::App(
            Box::new(ProofTerm::name("A4")),
            vec![
                ProofTerm::name("sea_eel"),
                ProofTerm::App(Box::new(ProofTerm::name("A5")), vec![ProofTerm::name("sea_eel"), ProofTerm::name("h")]),
            ],
        ));
        assert_eq!(t.to_string(), "exact A4 sea_eel (A5 sea_eel h)");
    }

    #[test]
    fn empty_theory_prints_empty() {
        assert_eq!(print_theory(&Theory::new()), "");
    }
}
