// SPDX-License-Identifier: Apache-2.0

//! Seeded generator of small rule-base problems with oracle labels.
//!
//! Predicates are split into a positive class (only ever asserted) and a
//! negative class (only ever denied), and every rule's head predicate ranks
//! above its body predicates. The first keeps the theories consistent and
//! makes forward chaining agree with classical provability; the second
//! keeps backward chaining finite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use reasoner_core::interpret::{build_duals, Verdict};
use reasoner_core::logic::{sym, Declaration, Formula, Term, Theory};
use reasoner_core::syntax::print_theory;

use crate::corpus::ProblemRecord;
use crate::oracle::closure;

const SORT: &str = "obj";
const NAMES: &[&str] = &["Anne", "Bob", "Charlie", "Dave", "Erin", "Fiona", "Gary", "Harry"];
const ADJECTIVES: &[&str] = &[
    "big", "blue", "cold", "furry", "green", "kind", "nice", "quiet", "red", "rough", "round", "smart", "white",
    "young",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenParams {
    pub positive_predicates: usize,
    pub negative_predicates: usize,
    pub constants: usize,
    pub facts: usize,
    pub rules: usize,
    /// Maximum derivation depth of True/False questions, 1..=5.
    pub max_depth: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            positive_predicates: 6,
            negative_predicates: 3,
            constants: 4,
            facts: 8,
            rules: 12,
            max_depth: 5,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

impl GenParams {
    fn check(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::Infeasible(m.to_string()));
        if !(1..=5).contains(&self.max_depth) {
            return bad("max_depth must be between 1 and 5");
        }
        if self.constants == 0 || self.constants > NAMES.len() {
            return bad("constants must be between 1 and 8");
        }
        let preds = self.positive_predicates + self.negative_predicates;
        if self.positive_predicates < 2 || self.negative_predicates < 1 || preds > ADJECTIVES.len() {
            return bad("need at least 2 positive and 1 negative predicate, 14 in total at most");
        }
        if self.facts == 0 {
            return bad("at least one fact is required");
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub id: String,
    pub theory: Theory,
    pub question: Formula,
    pub label: Verdict,
    /// Derivation depth of the question or its complement.
    pub depth: Option<usize>,
    pub context: Vec<String>,
    pub question_text: String,
}

impl Instance {
    /// Corpus record whose theory is the context plus the question theorem.
    pub fn to_record(&self) -> ProblemRecord {
        let (pos, _) = build_duals(&self.question).expect("questions are closed");
        let mut t = self.theory.clone();
        t.push(Declaration::theorem(&pos.name, self.question.clone()));
        ProblemRecord {
            id: self.id.clone(),
            context: self.context.clone(),
            question: self.question_text.clone(),
            options: vec!["True".into(), "False".into(), "Unknown".into()],
            label: self.label.to_string(),
            theory: Some(print_theory(&t)),
            gold_premises: None,
            proofs: None,
        }
    }
}

#[derive(Clone, Copy)]
struct Pred {
    name: &'static str,
    positive: bool,
    rank: usize,
}

#[derive(Clone)]
struct Lit {
    pred: usize,
    /// `None` for the rule variable.
    subject: Option<usize>,
}

struct Draft {
    preds: Vec<Pred>,
    consts: Vec<&'static str>,
    facts: Vec<(usize, usize)>,
    rules: Vec<(Vec<Lit>, Lit)>,
}

fn literal(pred: &Pred, subject: Term) -> Formula {
    let atom = Formula::Atom(sym(pred.name), vec![subject]);
    if pred.positive {
        atom
    } else {
        Formula::not(atom)
    }
}

impl Draft {
    fn random(rng: &mut ChaCha8Rng, p: &GenParams) -> Self {
        let mut adjs: Vec<&'static str> = ADJECTIVES.to_vec();
        adjs.shuffle(rng);
        let n = p.positive_predicates + p.negative_predicates;
        let mut preds: Vec<Pred> = adjs[..n]
            .iter()
            .enumerate()
            .map(|(i, name)| Pred {
                name,
                positive: i < p.positive_predicates,
                rank: 0,
            })
            .collect();
        let mut ranks: Vec<usize> = (0..n).collect();
        ranks.shuffle(rng);
        for (pr, r) in preds.iter_mut().zip(ranks) {
            pr.rank = r;
        }
        let mut names: Vec<&'static str> = NAMES.to_vec();
        names.shuffle(rng);
        let consts: Vec<&'static str> = names[..p.constants].to_vec();

        let low: Vec<usize> = (0..n).filter(|&i| preds[i].rank < n / 2 + 1).collect();
        let mut facts = Vec::new();
        for _ in 0..p.facts {
            let f = (*low.choose(rng).expect("nonempty"), rng.gen_range(0..consts.len()));
            if !facts.contains(&f) {
                facts.push(f);
            }
        }
        let mut rules = Vec::new();
        for _ in 0..p.rules {
            let head = loop {
                let h = rng.gen_range(0..n);
                if preds[h].rank > 0 {
                    break h;
                }
            };
            let below: Vec<usize> = (0..n).filter(|&i| preds[i].rank < preds[head].rank).collect();
            let size = rng.gen_range(1..=2.min(below.len()));
            let mut body: Vec<Lit> = below
                .choose_multiple(rng, size)
                .map(|&pred| Lit { pred, subject: None })
                .collect();
            // Occasionally tie one body literal to a named individual.
            if body.len() == 2 && rng.gen_bool(0.2) {
                body[1].subject = Some(rng.gen_range(0..consts.len()));
            }
            rules.push((body, Lit { pred: head, subject: None }));
        }
        Draft {
            preds,
            consts,
            facts,
            rules,
        }
    }

    fn theory(&self) -> Theory {
        let mut t = Theory::new();
        t.push(Declaration::sort(SORT));
        for c in &self.consts {
            t.push(Declaration::constant(c, SORT));
        }
        let mut preds: Vec<&Pred> = self.preds.iter().collect();
        preds.sort_by_key(|p| p.name);
        for p in preds {
            t.push(Declaration::predicate(p.name, &[SORT]));
        }
        for (i, &(pred, c)) in self.facts.iter().enumerate() {
            let f = literal(&self.preds[pred], Term::constant(self.consts[c]));
            t.push(Declaration::axiom(&format!("F{}", i + 1), f));
        }
        for (i, (body, head)) in self.rules.iter().enumerate() {
            let lit = |l: &Lit| {
                let subj = match l.subject {
                    // The body sits under one binder.
                    None => Term::Var(0),
                    Some(c) => Term::constant(self.consts[c]),
                };
                literal(&self.preds[l.pred], subj)
            };
            let mut conj = lit(body.last().expect("nonempty body"));
            for l in body.iter().rev().skip(1) {
                conj = Formula::and(lit(l), conj);
            }
            let f = Formula::Forall(
                reasoner_core::logic::Binder::new("x", SORT),
                Box::new(Formula::implies(conj, lit(head))),
            );
            t.push(Declaration::axiom(&format!("R{}", i + 1), f));
        }
        t
    }

    fn sentence_for(&self, pred: usize, subject: &str, they: bool) -> String {
        let p = &self.preds[pred];
        let verb = if they { "are" } else { "is" };
        if p.positive {
            format!("{subject} {verb} {}", p.name)
        } else {
            format!("{subject} {verb} not {}", p.name)
        }
    }

    fn context(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .facts
            .iter()
            .map(|&(pred, c)| format!("{}.", self.sentence_for(pred, self.consts[c], false)))
            .collect();
        for (body, head) in &self.rules {
            let parts: Vec<String> = body
                .iter()
                .map(|l| match l.subject {
                    None => self.sentence_for(l.pred, "they", true),
                    Some(c) => self.sentence_for(l.pred, self.consts[c], false),
                })
                .collect();
            let mut first = parts.join(" and ");
            first = first.replacen("they are", "someone is", 1);
            out.push(format!("If {first} then {}.", self.sentence_for(head.pred, "they", true)));
        }
        out
    }
}

fn question_sentence(q: &Formula) -> String {
    let (neg, atom) = match q {
        Formula::Not(a) => (true, &**a),
        other => (false, other),
    };
    match atom {
        Formula::Atom(p, args) => {
            let subj = args.first().and_then(|t| t.as_const()).map(|s| s.to_string()).unwrap_or_default();
            if neg {
                format!("{subj} is not {p}.")
            } else {
                format!("{subj} is {p}.")
            }
        }
        other => format!("{other}."),
    }
}

/// Picks a question with the wanted label, or `None` if this draft has no
/// suitable literal.
fn pick_question(
    rng: &mut ChaCha8Rng,
    draft: &Draft,
    theory: &Theory,
    want: Verdict,
    max_depth: usize,
) -> Option<(Formula, Option<usize>)> {
    let facts = closure(theory, None).ok()?;
    let mut derived: Vec<(String, Formula, usize)> = facts
        .iter()
        .map(|(f, d)| (reasoner_core::logic::canonical_text(f), f.clone(), *d))
        .filter(|(_, _, d)| *d <= max_depth)
        .collect();
    derived.sort_by(|a, b| a.0.cmp(&b.0));
    match want {
        Verdict::True | Verdict::False => {
            let mut depths: Vec<usize> = derived.iter().map(|(_, _, d)| *d).collect();
            depths.sort();
            depths.dedup();
            if depths.len() > 1 {
                depths.retain(|d| *d > 0);
            }
            let d = *depths.choose(rng)?;
            let pool: Vec<&(String, Formula, usize)> = derived.iter().filter(|x| x.2 == d).collect();
            let (_, lit, d) = pool.choose(rng)?;
            let q = if want == Verdict::True { lit.clone() } else { lit.complement() };
            Some((q, Some(*d)))
        }
        _ => {
            let mut pool = Vec::new();
            for p in &draft.preds {
                for c in &draft.consts {
                    let atom = Formula::Atom(sym(p.name), vec![Term::constant(c)]);
                    let neg = Formula::not(atom.clone());
                    if !facts.contains_key(&atom) && !facts.contains_key(&neg) {
                        pool.push(if rng.gen_bool(0.5) { atom } else { neg });
                    }
                }
            }
            pool.choose(rng).cloned().map(|q| (q, None))
        }
    }
}

/// `count` instances with labels cycling True, False, Unknown.
pub fn generate_instances(seed: u64, count: usize, params: &GenParams) -> Result<Vec<Instance>, GenError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let labels = [Verdict::True, Verdict::False, Verdict::Unknown];
    for i in 0..count {
        let want = labels[i % 3];
        let mut attempts = 0;
        let (draft, theory, question, depth) = loop {
            attempts += 1;
            if attempts > 1000 {
                return Err(GenError::Infeasible(format!("no {want} question found after 1000 drafts")));
            }
            let draft = Draft::random(&mut rng, params);
            let theory = draft.theory();
            if let Some((q, d)) = pick_question(&mut rng, &draft, &theory, want, params.max_depth) {
                break (draft, theory, q, d);
            }
        };
        out.push(Instance {
            id: format!("gen-{seed}-{i:04}"),
            context: draft.context(),
            question_text: question_sentence(&question),
            theory,
            question,
            label: want,
            depth,
        });
    }
    Ok(out)
}
