// SPDX-License-Identifier: Apache-2.0

//! Tactic candidate generation: symbolic enumeration scored by premise
//! similarity and per-kind priors, or an external scorer process.

mod enumerate;
mod external;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{ProofState, Tactic, TacticKind};
use crate::logic::{canonical_text, Theory};
use crate::retrieval::{cosine, PremiseIndex, RetrievalError, DEFAULT_M};

pub use enumerate::{enumerate, is_dead};
pub use external::{ExternalGenerator, ExternalScorer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Builtin,
    External,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub tactic: Tactic,
    /// Natural-log probability, `<= 0`.
    pub logprob: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("scorer process could not be started: {0}")]
    Spawn(#[source] std::io::Error),
    #[error("scorer process crashed: {0}")]
    Crashed(String),
    #[error("scorer did not answer within {0:?}")]
    Timeout(Duration),
    #[error("scorer protocol error: {0}")]
    Protocol(String),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
}

/// Additive log-space bonus per tactic kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Priors {
    pub exact: f64,
    pub assumption: f64,
    pub contradiction: f64,
    pub apply: f64,
    pub split: f64,
    pub left: f64,
    pub right: f64,
    pub intro: f64,
    pub cases: f64,
    pub use_: f64,
    pub have: f64,
}

impl Default for Priors {
    fn default() -> Self {
        Priors {
            exact: 2.0,
            assumption: 2.0,
            contradiction: 1.5,
            apply: 1.0,
            split: 0.5,
            left: 0.5,
            right: 0.5,
            intro: 0.5,
            cases: 0.0,
            use_: 0.0,
            have: -1.0,
        }
    }
}

impl Priors {
    pub fn get(&self, kind: TacticKind) -> f64 {
        match kind {
            TacticKind::Exact => self.exact,
            TacticKind::Assumption => self.assumption,
            TacticKind::Contradiction => self.contradiction,
            TacticKind::Apply => self.apply,
            TacticKind::Split => self.split,
            TacticKind::Left => self.left,
            TacticKind::Right => self.right,
            TacticKind::Intro => self.intro,
            TacticKind::Cases => self.cases,
            TacticKind::Use => self.use_,
            TacticKind::Have => self.have,
            TacticKind::Sorry | TacticKind::Opaque => f64::NEG_INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    /// Candidates kept per call after ranking.
    pub num_candidates: usize,
    /// Weight of premise-goal similarity in the raw score.
    pub alpha: f64,
    pub priors: Priors,
    /// Retrieval size used for the premise list sent to external scorers.
    pub retrieval_m: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            num_candidates: 64,
            alpha: 1.0,
            priors: Priors::default(),
            retrieval_m: DEFAULT_M,
        }
    }
}

/// Produces ranked tactic candidates for the first goal of a state.
pub trait TacticGenerator {
    fn generate(&mut self, theory: &Theory, state: &ProofState) -> Result<Vec<Candidate>, GeneratorError>;
}

impl<G: TacticGenerator + ?Sized> TacticGenerator for Box<G> {
    fn generate(&mut self, theory: &Theory, state: &ProofState) -> Result<Vec<Candidate>, GeneratorError> {
        (**self).generate(theory, state)
    }
}

/// Log-softmax in place.
pub fn log_softmax(scores: &mut [f64]) {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return;
    }
    let lse = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
    for s in scores.iter_mut() {
        *s = (*s - lse).min(0.0);
    }
}

/// Sorts by log-probability descending, ties by tactic text ascending,
/// and keeps the first `k`.
pub fn rank_candidates(mut cands: Vec<Candidate>, k: usize) -> Vec<Candidate> {
    let mut keyed: Vec<(String, Candidate)> = cands.drain(..).map(|c| (c.tactic.to_string(), c)).collect();
    keyed.sort_by(|(ta, a), (tb, b)| b.logprob.total_cmp(&a.logprob).then_with(|| ta.cmp(tb)));
    keyed.truncate(k);
    keyed.into_iter().map(|(_, c)| c).collect()
}

/// Premise index cached per theory.
pub(crate) struct IndexCache {
    key: Option<u64>,
    index: Option<PremiseIndex<f64>>,
    m: usize,
}

impl IndexCache {
    pub(crate) fn new(m: usize) -> Self {
        IndexCache {
            key: None,
            index: None,
            m,
        }
    }

    fn fingerprint(theory: &Theory) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for (n, f) in theory.axioms() {
            n.hash(&mut h);
            f.hash(&mut h);
        }
        h.finish()
    }

    pub(crate) fn get(&mut self, theory: &Theory) -> Result<&PremiseIndex<f64>, RetrievalError> {
        let key = Self::fingerprint(theory);
        if self.key != Some(key) || self.index.is_none() {
            self.index = Some(PremiseIndex::for_theory(theory, self.m)?);
            self.key = Some(key);
        }
        Ok(self.index.as_ref().expect("index built above"))
    }
}

/// Enumerated tactics scored by `alpha * similarity + prior`.
pub struct BuiltinGenerator {
    pub config: GeneratorConfig,
    cache: IndexCache,
}

impl BuiltinGenerator {
    pub fn new(config: GeneratorConfig) -> Self {
        let m = config.retrieval_m;
        BuiltinGenerator {
            config,
            cache: IndexCache::new(m),
        }
    }
}

impl Default for BuiltinGenerator {
    fn default() -> Self {
        Self::new(GeneratorConfig::default())
    }
}

impl TacticGenerator for BuiltinGenerator {
    fn generate(&mut self, theory: &Theory, state: &ProofState) -> Result<Vec<Candidate>, GeneratorError> {
        let Some(goal) = state.goals.first() else {
            return Ok(Vec::new());
        };
        if state.goals.iter().any(|g| is_dead(theory, g)) {
            return Ok(Vec::new());
        }
        let tactics = enumerate(theory, goal);
        if tactics.is_empty() {
            return Ok(Vec::new());
        }
        let index = self.cache.get(theory)?;
        let query = index.embed(&goal.canonical_text());
        let mut scores: Vec<f64> = tactics
            .iter()
            .map(|t| {
                let sim = match t.premise() {
                    Some(p) => match goal.hyp(p) {
                        Some(h) => cosine(&index.embed(&canonical_text(&h.formula)), &query),
                        None => index.similarity(p, &query),
                    },
                    None => 0.0,
                };
                self.config.alpha * sim + self.config.priors.get(t.kind())
            })
            .collect();
        log_softmax(&mut scores);
        let cands = tactics
            .into_iter()
            .zip(scores)
            .map(|(tactic, logprob)| Candidate {
                tactic,
                logprob,
                provenance: Provenance::Builtin,
            })
            .collect();
        Ok(rank_candidates(cands, self.config.num_candidates))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::init_state;
    use crate::syntax::{parse_formula_in, parse_theory};

    #[test]
    fn log_softmax_normalises() {
        let mut s = vec![1.0, 2.0, 3.0];
        log_softmax(&mut s);
        let total: f64 = s.iter().map(|x| x.exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(s.iter().all(|x| *x <= 0.0));
    }

    #[test]
    fn builtin_ranks_exact_first() {
        let t = parse_theory(
            "constant obj : Type\nconstant a : obj\nconstant P : obj → Prop\nconstant Q : obj → Prop\n\
             axiom A1 : P a\naxiom A2 : ∀ x : obj, P x → Q x",
        )
        .unwrap();
        let target = parse_formula_in(&t, "Q a").unwrap();
        let state = init_state(&t, &target).unwrap();
        let cands = BuiltinGenerator::default().generate(&t, &state).unwrap();
        assert_eq!(cands[0].tactic.to_string(), "exact A2 a A1");
        for w in cands.windows(2) {
            assert!(w[0].logprob >= w[1].logprob);
        }
    }

    #[test]
    fn truncates_to_num_candidates() {
        let t = parse_theory("constant A : Prop\nconstant B : Prop").unwrap();
        let target = parse_formula_in(&t, "A ∨ B").unwrap();
        let state = init_state(&t, &target).unwrap();
        let mut g = BuiltinGenerator::new(GeneratorConfig {
            num_candidates: 1,
            ..GeneratorConfig::default()
        });
        let cands = g.generate(&t, &state).unwrap();
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].tactic, Tactic::Left);
    }
}
