// SPDX-License-Identifier: Apache-2.0

//! Symbolic enumeration of the tactics worth trying on a goal.

use std::collections::HashSet;

use crate::kernel::{contradiction_holds, fresh_name, Goal, ProofTerm, Tactic};
use crate::logic::{
    match_formula, open_binder, placeholder, placeholder_index, substitute, Bindings, Formula, Symbol, Term, Theory,
};

/// Upper bound on explicit instantiations tried per premise.
const MAX_INSTANCES: usize = 64;
/// Nesting depth for `and.intro` / `or.inl` / `or.inr` argument terms.
const MAX_TERM_DEPTH: usize = 3;

struct Premise<'a> {
    name: Symbol,
    formula: &'a Formula,
    is_axiom: bool,
}

/// Leading universal binder sorts and the body with them replaced by
/// placeholders `?0`, `?1`, ...
fn open_leading(f: &Formula) -> (Vec<Symbol>, Formula) {
    let mut sorts = Vec::new();
    let mut cur = f.clone();
    while let Formula::Forall(b, body) = cur {
        cur = open_binder(&body, &placeholder(sorts.len()));
        sorts.push(b.sort);
    }
    (sorts, cur)
}

/// `(antecedents, conclusion)` for every way of peeling `→` and `¬` off
/// `body`, shallowest first, as the kernel's `apply` does.
fn stages(body: &Formula) -> Vec<(Vec<Formula>, Formula)> {
    let mut out = Vec::new();
    let mut ants = Vec::new();
    let mut cur = body.clone();
    loop {
        out.push((ants.clone(), cur.clone()));
        cur = match cur {
            Formula::Implies(a, c) => {
                ants.push(*a);
                *c
            }
            Formula::Not(a) => {
                ants.push(*a);
                Formula::Falsum
            }
            _ => break,
        };
    }
    out
}

/// Antecedents and final conclusion, peeling `→` only.
fn implication_chain(body: &Formula) -> (Vec<Formula>, Formula) {
    let mut ants = Vec::new();
    let mut cur = body.clone();
    while let Formula::Implies(a, c) = cur {
        ants.push(*a);
        cur = *c;
    }
    (ants, cur)
}

fn mentions(f: &Formula, i: usize) -> bool {
    let mut found = false;
    f.for_each_const(&mut |c| found |= placeholder_index(c) == Some(i));
    found
}

struct Enumerator<'a> {
    theory: &'a Theory,
    goal: &'a Goal,
    premises: Vec<Premise<'a>>,
    constants: Vec<(Symbol, Symbol)>,
    out: Vec<Tactic>,
    seen: HashSet<String>,
}

impl<'a> Enumerator<'a> {
    fn new(theory: &'a Theory, goal: &'a Goal) -> Self {
        let hyps: Vec<_> = goal.visible_hyps().collect();
        let mut premises: Vec<Premise> = hyps
            .iter()
            .map(|h| Premise {
                name: h.name.clone(),
                formula: &h.formula,
                is_axiom: false,
            })
            .collect();
        for (n, f) in theory.axioms() {
            if !hyps.iter().any(|h| &h.name == n) {
                premises.push(Premise {
                    name: n.clone(),
                    formula: f,
                    is_axiom: true,
                });
            }
        }
        let mut constants: Vec<(Symbol, Symbol)> =
            theory.constants().map(|(n, s)| (n.clone(), s.clone())).collect();
        constants.extend(goal.locals.iter().cloned());
        Enumerator {
            theory,
            goal,
            premises,
            constants,
            out: Vec::new(),
            seen: HashSet::new(),
        }
    }

    fn emit(&mut self, t: Tactic) {
        if self.seen.insert(t.to_string()) {
            self.out.push(t);
        }
    }

    fn constants_of(&self, sort: &Symbol) -> Vec<Symbol> {
        let mut v: Vec<Symbol> = self
            .constants
            .iter()
            .filter(|(_, s)| s == sort)
            .map(|(n, _)| n.clone())
            .collect();
        v.dedup();
        v
    }

    fn sort_of(&self, c: &Symbol) -> Option<&Symbol> {
        self.constants.iter().rev().find(|(n, _)| n == c).map(|(_, s)| s)
    }

    /// Cartesian product of candidate constants per binder, capped.
    fn instantiations(&self, choices: &[Vec<Symbol>]) -> Vec<Vec<Symbol>> {
        let mut acc: Vec<Vec<Symbol>> = vec![Vec::new()];
        for opts in choices {
            let mut next = Vec::new();
            for prefix in &acc {
                for c in opts {
                    if next.len() >= MAX_INSTANCES {
                        break;
                    }
                    let mut p = prefix.clone();
                    p.push(c.clone());
                    next.push(p);
                }
            }
            acc = next;
        }
        acc
    }

    /// A proof term for `f` built only from facts at hand: hypotheses,
    /// axioms, universal axiom instances, and `∧`/`∨` introductions.
    fn available(&self, f: &Formula, depth: usize) -> Option<ProofTerm> {
        for p in &self.premises {
            if p.formula == f {
                return Some(ProofTerm::Name(p.name.clone()));
            }
        }
        for p in &self.premises {
            if !matches!(p.formula, Formula::Forall(..)) {
                continue;
            }
            let (sorts, body) = open_leading(p.formula);
            let mut b = Bindings::new();
            if match_formula(&body, f, &mut b) && b.len() == sorts.len() {
                let args: Option<Vec<ProofTerm>> = b
                    .iter()
                    .zip(&sorts)
                    .map(|(t, s)| match t {
                        Some(Term::Const(c)) if self.sort_of(c) == Some(s) => Some(ProofTerm::Name(c.clone())),
                        _ => None,
                    })
                    .collect();
                if let Some(args) = args {
                    return Some(ProofTerm::app(ProofTerm::Name(p.name.clone()), args));
                }
            }
        }
        if depth == 0 {
            return None;
        }
        match f {
            Formula::And(a, b) => Some(ProofTerm::AndIntro(
                Box::new(self.available(a, depth - 1)?),
                Box::new(self.available(b, depth - 1)?),
            )),
            Formula::Or(a, b) => self
                .available(a, depth - 1)
                .map(|t| ProofTerm::OrInl(Box::new(t)))
                .or_else(|| self.available(b, depth - 1).map(|t| ProofTerm::OrInr(Box::new(t)))),
            _ => None,
        }
    }

    fn all_available(&self, fs: &[Formula]) -> Option<Vec<ProofTerm>> {
        fs.iter().map(|f| self.available(f, MAX_TERM_DEPTH)).collect()
    }

    fn call(name: &Symbol, consts: &[Symbol], proofs: Vec<ProofTerm>) -> ProofTerm {
        let mut args: Vec<ProofTerm> = consts.iter().map(|c| ProofTerm::Name(c.clone())).collect();
        args.extend(proofs);
        ProofTerm::app(ProofTerm::Name(name.clone()), args)
    }

    fn fresh_hyp(&self) -> Symbol {
        fresh_name(self.theory, self.goal, "h", false)
    }

    /// `f`, or one of its conjuncts, is a local hypothesis.
    fn touches_local(&self, f: &Formula) -> bool {
        let local = |g: &Formula| self.premises.iter().any(|p| !p.is_axiom && p.formula == g);
        local(f) || f.conjuncts().iter().any(|c| local(c))
    }

    fn has(&self, f: &Formula) -> bool {
        self.goal.has_fact(f)
    }

    /// Case analysis adds nothing when one branch is already the
    /// current goal (a disjunct or existential instance is known) or all
    /// conjuncts are known.
    fn cases_useful(&self, f: &Formula) -> bool {
        match f {
            Formula::Or(..) => !f.disjuncts().iter().any(|d| self.has(d)),
            Formula::And(..) => !f.conjuncts().iter().all(|c| self.has(c)),
            Formula::Iff(a, b) => {
                !(self.has(&Formula::implies((**a).clone(), (**b).clone()))
                    && self.has(&Formula::implies((**b).clone(), (**a).clone())))
            }
            Formula::Exists(_, body) => !self
                .constants
                .iter()
                .any(|(c, _)| self.has(&open_binder(body, &Term::Const(c.clone())))),
            _ => false,
        }
    }

    fn closing_moves(&mut self) {
        if self.has(&self.goal.target) {
            self.emit(Tactic::Assumption);
        }
        if contradiction_holds(self.goal) {
            self.emit(Tactic::Contradiction);
        }
    }

    /// `exact` / `apply` / backward `have` for premises whose conclusion
    /// matches the target.
    fn backward_moves(&mut self) {
        let target = self.goal.target.clone();
        for pi in 0..self.premises.len() {
            let (name, formula, is_axiom) = {
                let p = &self.premises[pi];
                (p.name.clone(), p.formula, p.is_axiom)
            };
            let (sorts, body) = open_leading(formula);
            for (ants, concl) in stages(&body) {
                let mut b = Bindings::new();
                if !match_formula(&concl, &target, &mut b) {
                    continue;
                }
                let mut choices = Vec::with_capacity(sorts.len());
                let mut ok = true;
                for (i, s) in sorts.iter().enumerate() {
                    match b.get(i).cloned().flatten() {
                        Some(Term::Const(c)) => {
                            if self.sort_of(&c) != Some(s) {
                                ok = false;
                            }
                            choices.push(vec![c]);
                        }
                        _ => {
                            let opts = self.constants_of(s);
                            if ants.iter().any(|a| mentions(a, i)) {
                                choices.push(opts);
                            } else {
                                // Vacuous binder: any witness will do.
                                choices.push(opts.into_iter().take(1).collect());
                            }
                        }
                    }
                }
                if !ok {
                    continue;
                }
                for consts in self.instantiations(&choices) {
                    let full: Bindings = consts.iter().map(|c| Some(Term::Const(c.clone()))).collect();
                    let inst: Vec<Formula> = ants.iter().map(|a| substitute(a, &full)).collect();
                    // Set of support: refute only through a local hypothesis.
                    if target == Formula::Falsum && is_axiom && !inst.iter().any(|a| self.touches_local(a)) {
                        continue;
                    }
                    if inst.is_empty() {
                        self.emit(Tactic::Exact(Self::call(&name, &consts, Vec::new())));
                        continue;
                    }
                    if let Some(proofs) = self.all_available(&inst) {
                        self.emit(Tactic::Exact(Self::call(&name, &consts, proofs)));
                    }
                    self.emit(Tactic::Apply(Self::call(&name, &consts, Vec::new())));
                    if is_axiom {
                        for a in &inst {
                            if !self.has(a) && self.available(a, MAX_TERM_DEPTH).is_none() {
                                self.emit(Tactic::Have {
                                    name: Some(self.fresh_hyp()),
                                    formula: Some(a.clone()),
                                    proof: None,
                                });
                            }
                        }
                    }
                }
                break;
            }
        }
    }

    fn structural_moves(&mut self) {
        let target = self.goal.target.clone();
        match &target {
            Formula::Implies(..) | Formula::Not(_) => {
                let h = self.fresh_hyp();
                self.emit(Tactic::Intro(Some(h)));
            }
            Formula::Forall(b, _) => {
                let x = fresh_name(self.theory, self.goal, &b.name, true);
                self.emit(Tactic::Intro(Some(x)));
            }
            Formula::And(..) | Formula::Iff(..) => self.emit(Tactic::Split),
            Formula::Or(..) => {
                self.emit(Tactic::Left);
                self.emit(Tactic::Right);
            }
            Formula::Exists(b, _) => {
                for c in self.constants_of(&b.sort) {
                    self.emit(Tactic::Use(c));
                }
            }
            _ => {}
        }
    }

    /// Every closed instance `(name, constants, antecedents, conclusion)`
    /// of a premise whose antecedents are all available.
    fn usable_instances(&self) -> Vec<(Symbol, Vec<Symbol>, Vec<ProofTerm>, Formula)> {
        let mut out = Vec::new();
        for p in &self.premises {
            let (sorts, body) = open_leading(p.formula);
            let (ants, concl) = implication_chain(&body);
            let choices: Vec<Vec<Symbol>> = sorts.iter().map(|s| self.constants_of(s)).collect();
            for consts in self.instantiations(&choices) {
                let full: Bindings = consts.iter().map(|c| Some(Term::Const(c.clone()))).collect();
                let inst: Vec<Formula> = ants.iter().map(|a| substitute(a, &full)).collect();
                if let Some(proofs) = self.all_available(&inst) {
                    out.push((p.name.clone(), consts, proofs, substitute(&concl, &full)));
                }
            }
        }
        out
    }

    fn case_and_forward_moves(&mut self) {
        let hyps: Vec<(Symbol, Formula)> = self
            .goal
            .visible_hyps()
            .map(|h| (h.name.clone(), h.formula.clone()))
            .collect();
        for (n, f) in &hyps {
            if self.cases_useful(f) {
                self.emit(Tactic::Cases {
                    target: ProofTerm::Name(n.clone()),
                    names: Vec::new(),
                });
            }
        }
        let local: HashSet<Symbol> = hyps.iter().map(|(n, _)| n.clone()).collect();
        let mut forward: Option<(String, Tactic)> = None;
        for (name, consts, proofs, concl) in self.usable_instances() {
            // Forward step from local facts: only the first new literal, in
            // canonical order, to keep branching at one.
            let uses_local = local.contains(&name) || proofs.iter().any(|p| mentions_any(p, &local));
            if uses_local && concl.is_literal() && !self.has(&concl) && !self.has(&concl.complement()) {
                let key = crate::logic::canonical_text(&concl);
                if forward.as_ref().is_none_or(|(k, _)| key < *k) {
                    let t = Tactic::Have {
                        name: Some(self.fresh_hyp()),
                        formula: Some(concl.clone()),
                        proof: Some(Self::call(&name, &consts, proofs.clone())),
                    };
                    forward = Some((key, t));
                }
            }
            let direct = consts.is_empty() && proofs.is_empty();
            if !direct && self.cases_useful(&concl) {
                self.emit(Tactic::Cases {
                    target: Self::call(&name, &consts, proofs.clone()),
                    names: Vec::new(),
                });
            }
            // Forward step that sets up `contradiction`.
            let clashes = concl == Formula::Falsum || self.has(&concl.complement());
            if clashes && !self.has(&concl) {
                self.emit(Tactic::Have {
                    name: Some(self.fresh_hyp()),
                    formula: Some(concl.clone()),
                    proof: Some(Self::call(&name, &consts, proofs)),
                });
            }
        }
        if let Some((_, t)) = forward {
            self.emit(t);
        }
    }
}

fn mentions_any(p: &ProofTerm, names: &HashSet<Symbol>) -> bool {
    match p {
        ProofTerm::Name(n) => names.contains(n),
        ProofTerm::App(h, args) => mentions_any(h, names) || args.iter().any(|a| mentions_any(a, names)),
        ProofTerm::AndIntro(a, b) => mentions_any(a, names) || mentions_any(b, names),
        ProofTerm::OrInl(a) | ProofTerm::OrInr(a) => mentions_any(a, names),
    }
}

/// An atomic target that is not at hand, concluded by no premise, and not
/// reachable by `contradiction` or case analysis. No enumerated tactic can
/// ever close such a goal.
pub fn is_dead(theory: &Theory, goal: &Goal) -> bool {
    if !matches!(goal.target, Formula::Atom(..)) {
        return false;
    }
    let e = Enumerator::new(theory, goal);
    if e.has(&goal.target) || contradiction_holds(goal) {
        return false;
    }
    let splittable = |f: &Formula| {
        let (_, body) = open_leading(f);
        let (_, concl) = implication_chain(&body);
        matches!(concl, Formula::Or(..) | Formula::Exists(..) | Formula::Iff(..))
    };
    if e.premises.iter().any(|p| e.cases_useful(p.formula) || splittable(p.formula)) {
        return false;
    }
    !e.premises.iter().any(|p| {
        let (_, body) = open_leading(p.formula);
        stages(&body)
            .iter()
            .any(|(_, concl)| match_formula(concl, &goal.target, &mut Bindings::new()))
    })
}

/// Candidate tactics for `goal`, deterministic and free of duplicates.
/// Never yields `sorry`.
pub fn enumerate(theory: &Theory, goal: &Goal) -> Vec<Tactic> {
    let mut e = Enumerator::new(theory, goal);
    e.closing_moves();
    e.backward_moves();
    e.structural_moves();
    e.case_and_forward_moves();
    e.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula_in, parse_theory};

    fn hudson() -> Theory {
        parse_theory(
            "constant obj : Type\nconstant Hudson : obj\nconstant is_cat : obj → Prop\n\
             constant is_animal : obj → Prop\nconstant often_meow : obj → Prop\n\
             axiom A1 : is_cat Hudson\naxiom A2 : ∀ x : obj, is_cat x → is_animal x\n\
             axiom A3 : ∀ x : obj, is_cat x → often_meow x",
        )
        .unwrap()
    }

    fn texts(theory: &Theory, target: &str) -> Vec<String> {
        let g = Goal::new(parse_formula_in(theory, target).unwrap());
        enumerate(theory, &g).iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn hudson_offers_apply_a3() {
        let ts = texts(&hudson(), "often_meow Hudson");
        assert!(ts.contains(&"apply A3 Hudson".to_string()), "{ts:?}");
        assert!(ts.contains(&"exact A3 Hudson A1".to_string()), "{ts:?}");
        assert!(!ts.iter().any(|t| t.contains("sorry")));
    }

    #[test]
    fn disjunction_target_offers_left_and_right() {
        let t = parse_theory("constant A : Prop\nconstant B : Prop").unwrap();
        let ts = texts(&t, "A ∨ B");
        assert!(ts.contains(&"left".to_string()) && ts.contains(&"right".to_string()));
    }

    #[test]
    fn empty_theory_atomic_target_gives_nothing() {
        let t = parse_theory("constant P : Prop").unwrap();
        assert!(texts(&t, "P").is_empty());
    }

    #[test]
    fn output_has_no_duplicates() {
        let ts = texts(&hudson(), "often_meow Hudson");
        let set: HashSet<_> = ts.iter().collect();
        assert_eq!(set.len(), ts.len());
    }

    fn after_intro(theory: &Theory, target: &str) -> std::sync::Arc<Goal> {
        let root = crate::kernel::init_state(theory, &parse_formula_in(theory, target).unwrap()).unwrap();
        let st = crate::kernel::apply_tactic(theory, &root, &Tactic::Intro(Some("h".into()))).unwrap();
        st.goals[0].clone()
    }

    #[test]
    fn refutation_goes_through_a_local_hypothesis() {
        let mut src = String::from("constant obj : Type\nconstant Hudson : obj\n");
        src.push_str("constant is_cat : obj → Prop\nconstant is_animal : obj → Prop\n");
        src.push_str("axiom N : ¬ is_animal Hudson\naxiom M : ∀ x : obj, is_cat x → ¬ is_animal x");
        let t = parse_theory(&src).unwrap();
        let off_topic: Vec<String> = enumerate(&t, &after_intro(&t, "¬ is_cat Hudson")).iter().map(|x| x.to_string()).collect();
        assert!(!off_topic.iter().any(|x| x.starts_with("apply N")), "{off_topic:?}");
        assert!(off_topic.iter().any(|x| x.starts_with("apply M Hudson")), "{off_topic:?}");
        let on_topic: Vec<String> = enumerate(&t, &after_intro(&t, "¬ is_animal Hudson")).iter().map(|x| x.to_string()).collect();
        assert!(on_topic.contains(&"exact N h".to_string()), "{on_topic:?}");
    }

    #[test]
    fn unreachable_atoms_are_dead() {
        let t = parse_theory("constant P : Prop\nconstant Q : Prop\naxiom A : P").unwrap();
        let goal = |f: &str| Goal::new(parse_formula_in(&t, f).unwrap());
        assert!(is_dead(&t, &goal("Q")));
        assert!(!is_dead(&t, &goal("P")));
        assert!(!is_dead(&t, &goal("P ∧ Q")));
        let split = parse_theory("constant P : Prop\nconstant Q : Prop\naxiom B : P ∨ Q").unwrap();
        assert!(!is_dead(&split, &Goal::new(parse_formula_in(&split, "Q").unwrap())));
    }
}
