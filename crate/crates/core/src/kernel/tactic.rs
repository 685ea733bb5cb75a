// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use super::term::{check_term, constant_sort, infer_term};
use super::{Goal, Hypothesis, ProofState, ProofTerm, Tactic, TacticError, TacticErrorKind};
use crate::logic::{
    has_placeholders, match_formula, open_binder, placeholder, substitute, sym, Bindings,
    Formula, Symbol, Term, Theory,
};

/// `base`, or `base_1`, `base_2`, ... avoiding hypothesis and local names
/// (and, when `global` is set, theory symbols).
pub fn fresh_name(theory: &Theory, goal: &Goal, base: &str, global: bool) -> Symbol {
    let taken = |n: &str| {
        goal.hyps.iter().any(|h| &*h.name == n)
            || goal.locals.iter().any(|(l, _)| &**l == n)
            || (global && theory.get(n).is_some())
    };
    if !taken(base) {
        return sym(base);
    }
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| !taken(n))
        .map(|n| sym(&n))
        .unwrap()
}

/// True when the hypotheses contain `⊥` or a complementary pair. A negated
/// target `¬P` contributes `P` as an extra hypothesis, as Lean's
/// `contradiction` does after its implicit `intro`.
pub fn contradiction_holds(goal: &Goal) -> bool {
    let mut facts: Vec<&Formula> = goal.hyps.iter().map(|h| &h.formula).collect();
    if let Formula::Not(p) = &goal.target {
        facts.push(p);
    }
    facts.iter().any(|f| matches!(f, Formula::Falsum))
        || facts.iter().any(|f| match f {
            Formula::Not(p) => facts.contains(&&**p),
            _ => false,
        })
}

struct Step<'a> {
    theory: &'a Theory,
    goal: &'a Goal,
    tactic: &'a Tactic,
}

impl Step<'_> {
    fn err<T>(&self, kind: TacticErrorKind, message: impl Into<String>) -> Result<T, TacticError> {
        Err(TacticError::new(self.tactic, kind, message))
    }

    fn with_target(&self, target: Formula) -> Goal {
        Goal {
            locals: self.goal.locals.clone(),
            hyps: self.goal.hyps.clone(),
            target,
        }
    }

    fn well_formed(&self, g: &Goal, f: &Formula) -> Result<(), TacticError> {
        g.is_well_formed(self.theory, f)
            .or_else(|m| self.err(TacticErrorKind::IllFormed, m))
    }

    fn term_error(&self, message: String) -> TacticError {
        let kind = if message.starts_with("unknown") {
            TacticErrorKind::UnknownHypothesis
        } else {
            TacticErrorKind::TargetMismatch
        };
        TacticError::new(self.tactic, kind, message)
    }

    fn run(&self) -> Result<Vec<Goal>, TacticError> {
        let goal = self.goal;
        let theory = self.theory;
        match self.tactic {
            Tactic::Intro(name) => self.intro(name.as_ref()),
            Tactic::Apply(pt) => self.apply(pt),
            Tactic::Exact(pt) => {
                check_term(theory, goal, pt, &goal.target).map_err(|m| self.term_error(m))?;
                Ok(Vec::new())
            }
            Tactic::Assumption => {
                if goal.has_fact(&goal.target) {
                    Ok(Vec::new())
                } else {
                    self.err(TacticErrorKind::TargetMismatch, "no hypothesis matches the target")
                }
            }
            Tactic::Split => match &goal.target {
                Formula::And(a, b) => Ok(vec![self.with_target((**a).clone()), self.with_target((**b).clone())]),
                Formula::Iff(a, b) => Ok(vec![
                    self.with_target(Formula::implies((**a).clone(), (**b).clone())),
                    self.with_target(Formula::implies((**b).clone(), (**a).clone())),
                ]),
                t => self.err(TacticErrorKind::WrongConnective, format!("target `{t}` is not a conjunction")),
            },
            Tactic::Left | Tactic::Right => match &goal.target {
                Formula::Or(a, b) => {
                    let side = if matches!(self.tactic, Tactic::Left) { a } else { b };
                    Ok(vec![self.with_target((**side).clone())])
                }
                t => self.err(TacticErrorKind::WrongConnective, format!("target `{t}` is not a disjunction")),
            },
            Tactic::Cases { target, names } => self.cases(target, names),
            Tactic::Have { name, formula, proof } => self.have(name.as_ref(), formula.as_ref(), proof.as_ref()),
            Tactic::Contradiction => {
                if contradiction_holds(goal) {
                    Ok(Vec::new())
                } else {
                    self.err(TacticErrorKind::TargetMismatch, "no contradictory hypotheses")
                }
            }
            Tactic::Use(c) => match &goal.target {
                Formula::Exists(b, body) => match constant_sort(theory, goal, c) {
                    Some(s) if s == b.sort => Ok(vec![self.with_target(open_binder(body, &Term::Const(c.clone())))]),
                    Some(s) => self.err(
                        TacticErrorKind::IllFormed,
                        format!("`{c}` has sort `{s}`, expected `{}`", b.sort),
                    ),
                    None => self.err(TacticErrorKind::UnknownHypothesis, format!("unknown constant `{c}`")),
                },
                t => self.err(TacticErrorKind::WrongConnective, format!("target `{t}` is not existential")),
            },
            Tactic::Sorry => Ok(Vec::new()),
            Tactic::Opaque(_) => self.err(TacticErrorKind::Unsupported, "unsupported tactic"),
        }
    }

    fn intro(&self, name: Option<&Symbol>) -> Result<Vec<Goal>, TacticError> {
        let goal = self.goal;
        let hyp_name = || name.cloned().unwrap_or_else(|| fresh_name(self.theory, goal, "h", false));
        let (hyp, target) = match &goal.target {
            Formula::Implies(a, b) => ((**a).clone(), (**b).clone()),
            Formula::Not(a) => ((**a).clone(), Formula::Falsum),
            Formula::Forall(b, body) => {
                let local = match name {
                    Some(n) => {
                        if goal.locals.iter().any(|(l, _)| l == n) || self.theory.get(n).is_some() {
                            return self.err(TacticErrorKind::NameClash, format!("`{n}` is already in scope"));
                        }
                        n.clone()
                    }
                    None => fresh_name(self.theory, goal, &b.name, true),
                };
                let mut g = self.with_target(open_binder(body, &Term::Const(local.clone())));
                g.locals.push((local, b.sort.clone()));
                return Ok(vec![g]);
            }
            t => {
                return self.err(
                    TacticErrorKind::WrongConnective,
                    format!("target `{t}` is not an implication, negation or universal"),
                )
            }
        };
        let mut g = self.with_target(target);
        g.hyps.push(Hypothesis {
            name: hyp_name(),
            formula: hyp,
        });
        Ok(vec![g])
    }

    /// Peels `∀`, `→` and `¬` off the premise until its conclusion matches
    /// the target; the peeled antecedents become subgoals.
    fn apply(&self, pt: &ProofTerm) -> Result<Vec<Goal>, TacticError> {
        let goal = self.goal;
        let ty = infer_term(self.theory, goal, pt).map_err(|m| self.term_error(m))?;
        let mut concl = ty;
        let mut antecedents: Vec<Formula> = Vec::new();
        let mut sorts: Vec<Symbol> = Vec::new();
        loop {
            let mut b = Bindings::new();
            if match_formula(&concl, &goal.target, &mut b) {
                let assigned = |i: usize| b.get(i).cloned().flatten();
                let mut ok = true;
                for (i, s) in sorts.iter().enumerate() {
                    match assigned(i) {
                        Some(Term::Const(c)) => {
                            if constant_sort(self.theory, goal, &c).as_ref() != Some(s) {
                                ok = false;
                            }
                        }
                        _ => {
                            let uninstantiated = antecedents
                                .iter()
                                .any(|a| has_placeholders(&substitute(a, &b)));
                            if uninstantiated {
                                return self.err(
                                    TacticErrorKind::CannotInfer,
                                    format!("cannot infer an instance for the binder of sort `{s}`"),
                                );
                            }
                        }
                    }
                }
                if ok {
                    return Ok(antecedents
                        .iter()
                        .map(|a| self.with_target(substitute(a, &b)))
                        .collect());
                }
            }
            concl = match concl {
                Formula::Forall(bd, body) => {
                    let k = sorts.len();
                    sorts.push(bd.sort.clone());
                    open_binder(&body, &placeholder(k))
                }
                Formula::Implies(a, c) => {
                    antecedents.push(*a);
                    *c
                }
                Formula::Not(a) => {
                    antecedents.push(*a);
                    Formula::Falsum
                }
                _ => {
                    return self.err(
                        TacticErrorKind::TargetMismatch,
                        format!("`{pt}` does not conclude `{}`", goal.target),
                    )
                }
            };
        }
    }

    fn cases(&self, target: &ProofTerm, names: &[Symbol]) -> Result<Vec<Goal>, TacticError> {
        let goal = self.goal;
        let local = match target {
            ProofTerm::Name(n) => goal.hyps.iter().rposition(|h| &h.name == n),
            _ => None,
        };
        let (formula, base) = match local {
            Some(i) => (goal.hyps[i].formula.clone(), Some(goal.hyps[i].name.clone())),
            None => (infer_term(self.theory, goal, target).map_err(|m| self.term_error(m))?, None),
        };
        let mut base_goal = goal.clone();
        if let Some(i) = local {
            base_goal.hyps.remove(i);
        }
        let pick = |k: usize, local_default: String, default: &str, g: &Goal| -> Symbol {
            if let Some(n) = names.get(k) {
                return n.clone();
            }
            match &base {
                Some(_) => fresh_name(self.theory, g, &local_default, false),
                None => fresh_name(self.theory, g, default, false),
            }
        };
        let stem = base.as_deref().unwrap_or("h").to_string();
        let push = |g: &mut Goal, name: Symbol, f: Formula| g.hyps.push(Hypothesis { name, formula: f });
        match formula {
            Formula::Or(a, b) => {
                // A cased hypothesis keeps its name in both branches.
                let default = || match &base {
                    Some(n) => n.clone(),
                    None => fresh_name(self.theory, &base_goal, "h", false),
                };
                let mut left = base_goal.clone();
                push(&mut left, names.first().cloned().unwrap_or_else(default), *a);
                let mut right = base_goal.clone();
                push(&mut right, names.get(1).cloned().unwrap_or_else(default), *b);
                Ok(vec![left, right])
            }
            Formula::And(a, b) => {
                let mut g = base_goal.clone();
                let n1 = pick(0, format!("{stem}_left"), "left", &g);
                push(&mut g, n1, *a);
                let n2 = pick(1, format!("{stem}_right"), "right", &g);
                push(&mut g, n2, *b);
                Ok(vec![g])
            }
            Formula::Iff(a, b) => {
                let mut g = base_goal.clone();
                let n1 = pick(0, format!("{stem}_mp"), "mp", &g);
                push(&mut g, n1, Formula::implies((*a).clone(), (*b).clone()));
                let n2 = pick(1, format!("{stem}_mpr"), "mpr", &g);
                push(&mut g, n2, Formula::implies(*b, *a));
                Ok(vec![g])
            }
            Formula::Exists(bd, body) => {
                let mut g = base_goal.clone();
                let w = match names.first() {
                    Some(n) => {
                        if g.locals.iter().any(|(l, _)| l == n) || self.theory.get(n).is_some() {
                            return self.err(TacticErrorKind::NameClash, format!("`{n}` is already in scope"));
                        }
                        n.clone()
                    }
                    None => {
                        let wanted = if base.is_some() { format!("{stem}_w") } else { "w".to_string() };
                        fresh_name(self.theory, &g, &wanted, true)
                    }
                };
                g.locals.push((w.clone(), bd.sort.clone()));
                let n2 = pick(1, format!("{stem}_h"), "h", &g);
                push(&mut g, n2, open_binder(&body, &Term::Const(w)));
                Ok(vec![g])
            }
            Formula::Falsum => Ok(Vec::new()),
            other => self.err(
                TacticErrorKind::WrongConnective,
                format!("cannot do case analysis on `{other}`"),
            ),
        }
    }

    fn have(
        &self,
        name: Option<&Symbol>,
        formula: Option<&Formula>,
        proof: Option<&ProofTerm>,
    ) -> Result<Vec<Goal>, TacticError> {
        let goal = self.goal;
        let name = name.cloned().unwrap_or_else(|| sym("this"));
        if let Some(f) = formula {
            self.well_formed(goal, f)?;
        }
        let fact = match (formula, proof) {
            (Some(f), Some(p)) => {
                check_term(self.theory, goal, p, f).map_err(|m| self.term_error(m))?;
                f.clone()
            }
            (None, Some(p)) => infer_term(self.theory, goal, p).map_err(|m| self.term_error(m))?,
            (Some(f), None) => {
                let mut rest = goal.clone();
                rest.hyps.push(Hypothesis {
                    name,
                    formula: f.clone(),
                });
                return Ok(vec![self.with_target(f.clone()), rest]);
            }
            (None, None) => return self.err(TacticErrorKind::IllFormed, "`have` needs a statement or a proof"),
        };
        let mut g = goal.clone();
        g.hyps.push(Hypothesis { name, formula: fact });
        Ok(vec![g])
    }
}

/// Applies `tactic` to the first goal. The input state is left untouched.
pub fn apply_tactic(theory: &Theory, state: &ProofState, tactic: &Tactic) -> Result<ProofState, TacticError> {
    let Some(first) = state.goals.first() else {
        return Err(TacticError::new(tactic, TacticErrorKind::NoGoals, "no goals"));
    };
    let step = Step {
        theory,
        goal: first,
        tactic,
    };
    let new_goals = step.run()?;
    let mut goals: Vec<Arc<Goal>> = new_goals.into_iter().map(Arc::new).collect();
    goals.extend(state.goals[1..].iter().cloned());
    Ok(ProofState {
        goals,
        tainted: state.tainted || matches!(tactic, Tactic::Sorry),
    })
}
