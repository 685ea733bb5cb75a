// SPDX-License-Identifier: Apache-2.0

//! Forward-chaining ground truth for theories made of ground literal facts
//! and universally quantified rules `∀ x̄, l₁ ∧ … ∧ lₙ → l`.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use reasoner_core::interpret::Verdict;
use reasoner_core::logic::{
    canonical_text, has_placeholders, open_binder, placeholder, substitute, Bindings, Formula, Symbol, Term, Theory,
};

#[derive(Debug, Error, PartialEq)]
pub enum FragmentError {
    #[error("axiom `{axiom}` is outside the oracle fragment: {reason}")]
    Axiom { axiom: String, reason: String },
    #[error("question `{0}` is not a ground literal")]
    Question(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivedLiteral {
    pub literal: String,
    /// Rule applications on the longest chain needed; facts have depth 0.
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub derived: Vec<DerivedLiteral>,
    pub label: Verdict,
    /// False iff some atom was derived in both polarities.
    pub consistent: bool,
    /// Depth at which the question (or its complement) was derived.
    pub depth: Option<usize>,
}

#[derive(Clone, Debug)]
struct Rule {
    sorts: Vec<Symbol>,
    body: Vec<Formula>,
    head: Formula,
}

fn is_literal(f: &Formula) -> bool {
    matches!(f, Formula::Atom(..)) || matches!(f, Formula::Not(a) if matches!(**a, Formula::Atom(..)))
}

fn split_axiom(name: &str, f: &Formula) -> Result<Result<Formula, Rule>, FragmentError> {
    let err = |reason: &str| FragmentError::Axiom {
        axiom: name.to_string(),
        reason: reason.to_string(),
    };
    let mut sorts = Vec::new();
    let mut body_f = f.clone();
    while let Formula::Forall(b, inner) = body_f {
        body_f = open_binder(&inner, &placeholder(sorts.len()));
        sorts.push(b.sort);
    }
    let (body, head) = match body_f {
        Formula::Implies(b, h) => {
            let lits: Vec<Formula> = b.conjuncts().into_iter().cloned().collect();
            if !lits.iter().all(is_literal) {
                return Err(err("rule body is not a conjunction of literals"));
            }
            (lits, *h)
        }
        other => (Vec::new(), other),
    };
    if !is_literal(&head) {
        return Err(err("conclusion is not a literal"));
    }
    if sorts.is_empty() && body.is_empty() {
        return Ok(Ok(head));
    }
    Ok(Err(Rule { sorts, body, head }))
}

struct Closure {
    facts: HashMap<Formula, usize>,
}

impl Closure {
    fn run(theory: &Theory, depth_cap: Option<usize>) -> Result<Self, FragmentError> {
        let mut facts = HashMap::new();
        let mut rules = Vec::new();
        for (name, f) in theory.axioms() {
            match split_axiom(name, f)? {
                Ok(fact) => {
                    facts.entry(fact).or_insert(0);
                }
                Err(rule) => rules.push(rule),
            }
        }
        let constants: Vec<(Symbol, Symbol)> = theory.constants().map(|(n, s)| (n.clone(), s.clone())).collect();
        let mut round = 0;
        loop {
            if depth_cap.is_some_and(|cap| round >= cap) {
                break;
            }
            round += 1;
            let mut new = Vec::new();
            for rule in &rules {
                for inst in instances(&rule.sorts, &constants) {
                    let head = substitute(&rule.head, &inst);
                    if facts.contains_key(&head) || has_placeholders(&head) {
                        continue;
                    }
                    let body: Vec<Formula> = rule.body.iter().map(|l| substitute(l, &inst)).collect();
                    let depths: Option<Vec<usize>> = body.iter().map(|l| facts.get(l).copied()).collect();
                    if let Some(d) = depths {
                        new.push((head, d.into_iter().max().unwrap_or(0) + 1));
                    }
                }
            }
            if new.is_empty() {
                break;
            }
            for (f, d) in new {
                let e = facts.entry(f).or_insert(d);
                *e = (*e).min(d);
            }
        }
        Ok(Closure { facts })
    }
}

fn instances(sorts: &[Symbol], constants: &[(Symbol, Symbol)]) -> Vec<Bindings> {
    let mut acc: Vec<Bindings> = vec![Vec::new()];
    for s in sorts {
        let opts: Vec<&Symbol> = constants.iter().filter(|(_, cs)| cs == s).map(|(n, _)| n).collect();
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(Some(Term::Const((*c).clone())));
                    p
                })
            })
            .collect();
    }
    acc
}

/// Ground literals derivable from `theory`, with derivation depths.
pub fn closure(theory: &Theory, depth_cap: Option<usize>) -> Result<HashMap<Formula, usize>, FragmentError> {
    Ok(Closure::run(theory, depth_cap)?.facts)
}

/// Labels `question` by forward chaining to a fixpoint (or `depth_cap`
/// rounds).
pub fn oracle(theory: &Theory, question: &Formula, depth_cap: Option<usize>) -> Result<OracleResult, FragmentError> {
    if !is_literal(question) || !question.is_closed() {
        return Err(FragmentError::Question(canonical_text(question)));
    }
    let facts = closure(theory, depth_cap)?;
    let consistent = !facts.keys().any(|f| matches!(f, Formula::Not(a) if facts.contains_key(&**a)));
    let pos = facts.get(question).copied();
    let neg = facts.get(&question.complement()).copied();
    let label = match (pos, neg) {
        (Some(_), None) => Verdict::True,
        (None, Some(_)) => Verdict::False,
        (None, None) => Verdict::Unknown,
        (Some(_), Some(_)) => Verdict::Inconsistent,
    };
    let mut derived: Vec<DerivedLiteral> = facts
        .iter()
        .map(|(f, d)| DerivedLiteral {
            literal: canonical_text(f),
            depth: *d,
        })
        .collect();
    derived.sort_by(|a, b| a.literal.cmp(&b.literal));
    Ok(OracleResult {
        derived,
        label,
        consistent,
        depth: pos.or(neg),
    })
}
