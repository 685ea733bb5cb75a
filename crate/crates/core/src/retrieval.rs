// SPDX-License-Identifier: Apache-2.0

//! Premise retrieval: hashed TF-IDF embeddings, cosine ranking, recall@k.
//!
//! Generic over the scalar type; the crate root exposes `f64` aliases.

use std::collections::{HashMap, HashSet};

use num_traits::Float;
use thiserror::Error;

use crate::kernel::Goal;
use crate::logic::{canonical_text, Symbol, Theory};

pub const DEFAULT_DIM: usize = 512;
pub const DEFAULT_M: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum RetrievalError {
    #[error("ground-truth premise set is empty")]
    EmptyGroundTruth,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("retrieval size m must be at least 1")]
    ZeroM,
    #[error("duplicate premise `{0}`")]
    DuplicatePremise(String),
    #[error("embedding has dimension {found}, index uses {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("embedding has a non-finite entry")]
    NonFinite,
}

/// Fixed-dimension vector with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding<S> {
    values: Vec<S>,
}

impl<S: Float> Embedding<S> {
    pub fn zeros(dim: usize) -> Self {
        Embedding {
            values: vec![S::zero(); dim],
        }
    }

    pub fn new(values: Vec<S>) -> Result<Self, RetrievalError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RetrievalError::NonFinite);
        }
        Ok(Embedding { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.values
    }

    pub fn norm(&self) -> S {
        self.values.iter().fold(S::zero(), |acc, &v| acc + v * v).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn scaled(&self, k: S) -> Self {
        Embedding {
            values: self.values.iter().map(|&v| v * k).collect(),
        }
    }

    fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > S::zero() {
            for v in &mut self.values {
                *v = *v / n;
            }
        }
        self
    }
}

/// Cosine similarity; 0 when either side is the zero vector.
pub fn cosine<S: Float>(a: &Embedding<S>, b: &Embedding<S>) -> S {
    let (na, nb) = (a.norm(), b.norm());
    if na.is_zero() || nb.is_zero() {
        return S::zero();
    }
    let dot = a
        .values
        .iter()
        .zip(&b.values)
        .fold(S::zero(), |acc, (&x, &y)| acc + x * y);
    let c = dot / (na * nb);
    // Guard rounding drift outside [-1, 1].
    c.max(-S::one()).min(S::one())
}

/// Identifiers and connectives of a rendered formula or goal. Brackets,
/// commas and colons carry no content and are dropped.
pub fn tokens(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        let word = c.is_alphanumeric() || matches!(c, '_' | '\'' | '.' | '!' | '?');
        if word {
            start.get_or_insert(i);
            continue;
        }
        if let Some(s) = start.take() {
            out.push(&text[s..i]);
        }
        if matches!(c, '∀' | '∃' | '¬' | '∧' | '∨' | '→' | '↔' | '⊥' | '⊢') {
            out.push(&text[i..i + c.len_utf8()]);
        }
    }
    if let Some(s) = start {
        out.push(&text[s..]);
    }
    out
}

/// FNV-1a, so bucket assignment is stable across platforms and releases.
fn bucket(token: &str, dim: usize) -> usize {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in token.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    (h % dim as u64) as usize
}

/// Token-level TF-IDF over hashed buckets. IDF is fitted on a document set
/// (one theory's premises); an unfitted embedder uses unit weights.
#[derive(Clone, Debug)]
pub struct TfIdfEmbedder<S> {
    dim: usize,
    idf: Vec<S>,
}

impl<S: Float> TfIdfEmbedder<S> {
    pub fn unfitted(dim: usize) -> Self {
        TfIdfEmbedder {
            dim,
            idf: vec![S::one(); dim],
        }
    }

    /// Smoothed IDF: `ln((1 + N) / (1 + df)) + 1` per bucket.
    pub fn fit<'a>(dim: usize, docs: impl IntoIterator<Item = &'a str>) -> Self {
        let mut df = vec![0usize; dim];
        let mut n = 0usize;
        for d in docs {
            n += 1;
            let seen: HashSet<usize> = tokens(d).into_iter().map(|t| bucket(t, dim)).collect();
            for b in seen {
                df[b] += 1;
            }
        }
        let f = |x: usize| S::from(x).unwrap();
        let idf = df
            .into_iter()
            .map(|d| ((f(1 + n) / f(1 + d)).ln()) + S::one())
            .collect();
        TfIdfEmbedder { dim, idf }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// L2-normalised TF-IDF vector; empty text gives the zero vector.
    pub fn embed(&self, text: &str) -> Embedding<S> {
        let mut e = Embedding::zeros(self.dim);
        for t in tokens(text) {
            let b = bucket(t, self.dim);
            e.values[b] = e.values[b] + self.idf[b];
        }
        e.normalized()
    }
}

/// Embeds with the unfitted built-in embedder at the default dimension.
pub fn embed<S: Float>(text: &str) -> Embedding<S> {
    TfIdfEmbedder::unfitted(DEFAULT_DIM).embed(text)
}

#[derive(Clone, Debug)]
pub struct Premise<S> {
    pub name: Symbol,
    pub text: String,
    pub embedding: Embedding<S>,
}

#[derive(Clone, Debug)]
pub struct PremiseIndex<S> {
    premises: Vec<Premise<S>>,
    by_name: HashMap<Symbol, usize>,
    embedder: TfIdfEmbedder<S>,
    m: usize,
}

impl<S: Float> PremiseIndex<S> {
    /// Indexes `(name, text)` pairs, fitting IDF on exactly these texts.
    pub fn build(premises: Vec<(Symbol, String)>, m: usize) -> Result<Self, RetrievalError> {
        let embedder = TfIdfEmbedder::fit(DEFAULT_DIM, premises.iter().map(|(_, t)| t.as_str()));
        let entries = premises
            .into_iter()
            .map(|(name, text)| {
                let embedding = embedder.embed(&text);
                Premise { name, text, embedding }
            })
            .collect();
        Self::from_premises(entries, embedder, m)
    }

    /// Index over precomputed embeddings (e.g. from an external embedder).
    pub fn from_premises(
        premises: Vec<Premise<S>>,
        embedder: TfIdfEmbedder<S>,
        m: usize,
    ) -> Result<Self, RetrievalError> {
        if m == 0 {
            return Err(RetrievalError::ZeroM);
        }
        let mut by_name = HashMap::new();
        for (i, p) in premises.iter().enumerate() {
            if p.embedding.dim() != embedder.dim() {
                return Err(RetrievalError::DimensionMismatch {
                    expected: embedder.dim(),
                    found: p.embedding.dim(),
                });
            }
            if by_name.insert(p.name.clone(), i).is_some() {
                return Err(RetrievalError::DuplicatePremise(p.name.to_string()));
            }
        }
        Ok(PremiseIndex {
            premises,
            by_name,
            embedder,
            m,
        })
    }

    /// One premise per axiom, rendered canonically.
    pub fn for_theory(theory: &Theory, m: usize) -> Result<Self, RetrievalError> {
        Self::build(
            theory
                .axioms()
                .map(|(n, f)| (n.clone(), canonical_text(f)))
                .collect(),
            m,
        )
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.premises.len()
    }

    pub fn is_empty(&self) -> bool {
        self.premises.is_empty()
    }

    pub fn premises(&self) -> &[Premise<S>] {
        &self.premises
    }

    pub fn get(&self, name: &str) -> Option<&Premise<S>> {
        self.by_name.get(name).map(|&i| &self.premises[i])
    }

    pub fn embed(&self, text: &str) -> Embedding<S> {
        self.embedder.embed(text)
    }

    /// Similarity of a named premise to a query embedding; 0 if unknown.
    pub fn similarity(&self, name: &str, query: &Embedding<S>) -> S {
        self.get(name)
            .map(|p| cosine(&p.embedding, query))
            .unwrap_or_else(S::zero)
    }

    /// Top `min(m, |P|)` premises by similarity, ties by name.
    pub fn rank_embedding(&self, query: &Embedding<S>) -> Vec<(Symbol, S)> {
        let mut scored: Vec<(Symbol, S)> = self
            .premises
            .iter()
            .map(|p| (p.name.clone(), cosine(&p.embedding, query)))
            .collect();
        scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.0.cmp(&b.0))
        });
        scored.truncate(self.m.min(self.premises.len()));
        scored
    }

    pub fn rank_text(&self, text: &str) -> Vec<(Symbol, S)> {
        self.rank_embedding(&self.embed(text))
    }

    pub fn rank(&self, goal: &Goal) -> Vec<(Symbol, S)> {
        self.rank_text(&goal.canonical_text())
    }
}

/// `|GT ∩ predicted[..k]| / |GT|`.
pub fn recall_at_k<A: AsRef<str>, B: AsRef<str>>(
    ground_truth: &[A],
    predicted: &[B],
    k: usize,
) -> Result<f64, RetrievalError> {
    if k == 0 {
        return Err(RetrievalError::ZeroK);
    }
    let gt: HashSet<&str> = ground_truth.iter().map(|g| g.as_ref()).collect();
    if gt.is_empty() {
        return Err(RetrievalError::EmptyGroundTruth);
    }
    let hits: HashSet<&str> = predicted
        .iter()
        .take(k)
        .map(|p| p.as_ref())
        .filter(|p| gt.contains(p))
        .collect();
    Ok(hits.len() as f64 / gt.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::sym;

    #[test]
    fn tokens_split_identifiers_and_connectives() {
        assert_eq!(
            tokens("(∀ x0 : obj, (is_cat x0 → often_meow x0))"),
            vec!["∀", "x0", "obj", "is_cat", "x0", "→", "often_meow", "x0"]
        );
    }

    #[test]
    fn embed_is_deterministic_and_unit_norm() {
        let a: Embedding<f64> = embed("often_meow Hudson");
        assert_eq!(a, embed("often_meow Hudson"));
        assert!((a.norm() - 1.0).abs() < 1e-12);
        let z: Embedding<f64> = embed("");
        assert!(z.is_zero());
        assert_eq!(cosine(&z, &a), 0.0);
    }

    #[test]
    fn identical_text_ranks_first_with_similarity_one() {
        let idx: PremiseIndex<f64> = PremiseIndex::build(
            vec![(sym("A1"), "is_cat Hudson".into()), (sym("A2"), "Blue Cat".into())],
            4,
        )
        .unwrap();
        let r = idx.rank_text("is_cat Hudson");
        assert_eq!(&*r[0].0, "A1");
        assert!((r[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ties_break_by_name_and_length_is_capped() {
        let ps = (0..6).map(|i| (sym(&format!("P{i}")), "Blue Cat".to_string())).collect();
        let idx: PremiseIndex<f32> = PremiseIndex::build(ps, 4).unwrap();
        let names: Vec<_> = idx.rank_text("Red Dog").into_iter().map(|(n, _)| n.to_string()).collect();
        assert_eq!(names, vec!["P0", "P1", "P2", "P3"]);
    }

    #[test]
    fn duplicate_and_zero_m_rejected() {
        let dup = vec![(sym("A"), "P".to_string()), (sym("A"), "Q".to_string())];
        assert!(matches!(PremiseIndex::<f64>::build(dup, 4), Err(RetrievalError::DuplicatePremise(_))));
        assert_eq!(PremiseIndex::<f64>::build(vec![], 0).unwrap_err(), RetrievalError::ZeroM);
    }

    #[test]
    fn recall_examples() {
        let pred = ["A2", "A3", "A1"];
        assert_eq!(recall_at_k(&["A1", "A2"], &pred, 1).unwrap(), 0.5);
        assert_eq!(recall_at_k(&["A1", "A2"], &pred, 3).unwrap(), 1.0);
        assert_eq!(recall_at_k(&["A1"], &["A2", "A3"], 2).unwrap(), 0.0);
        let empty: [&str; 0] = [];
        assert_eq!(recall_at_k(&empty, &pred, 1), Err(RetrievalError::EmptyGroundTruth));
        assert_eq!(recall_at_k(&["A1"], &pred, 0), Err(RetrievalError::ZeroK));
    }
}
