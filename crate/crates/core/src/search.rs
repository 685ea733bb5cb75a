// SPDX-License-Identifier: Apache-2.0

//! Best-first proof search keyed by cumulative log-probability.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::io::Write;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::json;

use crate::generator::TacticGenerator;
use crate::kernel::{init_state, KernelError, ProofState, Tactic, TacticScript};
use crate::logic::{negate, Formula, LogicError, Theory};

/// How an expanded goal sequence makes a later node redundant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Containment {
    /// The expanded goals, as a multiset, are contained in the node's.
    #[default]
    Multiset,
    /// The expanded goal sequence is a prefix of the node's.
    Prefix,
}

/// Shared line-delimited JSON event sink.
#[derive(Clone)]
pub struct TraceSink(Arc<Mutex<dyn Write + Send>>);

impl TraceSink {
    pub fn new(w: impl Write + Send + 'static) -> Self {
        TraceSink(Arc::new(Mutex::new(w)))
    }

    fn emit(&self, event: serde_json::Value) {
        if let Ok(mut w) = self.0.lock() {
            if let Err(e) = writeln!(w, "{event}") {
                log::warn!("trace write failed: {e}");
            }
        }
    }

    pub fn flush(&self) {
        if let Ok(mut w) = self.0.lock() {
            let _ = w.flush();
        }
    }
}

impl std::fmt::Debug for TraceSink {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("TraceSink")
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub time_budget: Duration,
    pub num_candidates: usize,
    /// Expansion cap; hitting it ends the search with `Timeout`.
    pub max_expansions: Option<usize>,
    pub subsumption: bool,
    pub containment: Containment,
    /// Unused by the built-in generator.
    pub seed: u64,
    /// Run the two dual searches on separate threads.
    pub concurrent: bool,
    pub trace: Option<TraceSink>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            time_budget: Duration::from_secs(180),
            num_candidates: 64,
            max_expansions: None,
            subsumption: true,
            containment: Containment::Multiset,
            seed: 0,
            concurrent: false,
            trace: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SearchStatus {
    Proved { path: Vec<Tactic> },
    Timeout,
    Exhausted,
    GeneratorFailure { error: String },
}

impl SearchStatus {
    pub fn is_proved(&self) -> bool {
        matches!(self, SearchStatus::Proved { .. })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub expanded: usize,
    pub pruned: usize,
    pub deduplicated: usize,
    pub generated: usize,
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    #[serde(flatten)]
    pub status: SearchStatus,
    pub stats: SearchStats,
}

impl SearchOutcome {
    pub fn is_proved(&self) -> bool {
        self.status.is_proved()
    }

    /// The proof as a replayable script, if one was found.
    pub fn script(&self) -> Option<TacticScript> {
        match &self.status {
            SearchStatus::Proved { path } => Some(TacticScript::from_tactics(path.iter().cloned())),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchNode {
    pub state: ProofState,
    pub path: Vec<Tactic>,
    /// Sum of candidate log-probabilities along `path`.
    pub value: f64,
    pub text: String,
    seq: u64,
}

impl SearchNode {
    fn new(state: ProofState, path: Vec<Tactic>, value: f64, seq: u64) -> Self {
        let text = state.canonical_text();
        SearchNode {
            state,
            path,
            value,
            text,
            seq,
        }
    }

    pub fn goal_texts(&self) -> Vec<String> {
        self.state.goals.iter().map(|g| g.canonical_text()).collect()
    }
}

impl PartialEq for SearchNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SearchNode {}

impl PartialOrd for SearchNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greater = popped first: higher value, then smaller text, then older.
impl Ord for SearchNode {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.text.cmp(&self.text))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Goal sequences of expanded nodes.
#[derive(Debug, Default)]
pub struct ExpandedGoals {
    mode: Containment,
    /// Sorted (multiset mode) or as-is (prefix mode).
    keys: HashSet<Vec<String>>,
}

impl ExpandedGoals {
    pub fn new(mode: Containment) -> Self {
        ExpandedGoals {
            mode,
            keys: HashSet::new(),
        }
    }

    pub fn insert(&mut self, goals: &[String]) {
        let mut key = goals.to_vec();
        if self.mode == Containment::Multiset {
            key.sort();
        }
        self.keys.insert(key);
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Above this many goals, multiset containment is checked by scanning the
/// expanded set instead of enumerating sub-multisets.
const SUBSET_ENUM_LIMIT: usize = 10;

fn is_sub_multiset(small: &[String], big_sorted: &[String]) -> bool {
    let mut j = 0;
    for s in small {
        while j < big_sorted.len() && big_sorted[j] < *s {
            j += 1;
        }
        if j == big_sorted.len() || big_sorted[j] != *s {
            return false;
        }
        j += 1;
    }
    true
}

/// True iff some expanded goal sequence is contained in `goals` under the
/// configured containment mode.
pub fn is_subsumed(goals: &[String], expanded: &ExpandedGoals) -> bool {
    if expanded.is_empty() || goals.is_empty() {
        return false;
    }
    match expanded.mode {
        Containment::Prefix => (1..=goals.len()).any(|n| expanded.keys.contains(&goals[..n])),
        Containment::Multiset => {
            let mut sorted = goals.to_vec();
            sorted.sort();
            if sorted.len() > SUBSET_ENUM_LIMIT {
                return expanded.keys.iter().any(|k| is_sub_multiset(k, &sorted));
            }
            let n = sorted.len();
            let mut seen = HashSet::new();
            for mask in 1u32..(1 << n) {
                let sub: Vec<String> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| sorted[i].clone()).collect();
                if seen.insert(sub.clone()) && expanded.keys.contains(&sub) {
                    return true;
                }
            }
            false
        }
    }
}

/// Searches for a proof of `target`. Fails only if the target is not a
/// closed well-formed formula of `theory`.
pub fn search(
    theory: &Theory,
    target: &Formula,
    generator: &mut dyn TacticGenerator,
    config: &SearchConfig,
) -> Result<SearchOutcome, KernelError> {
    let start = Instant::now();
    let root = init_state(theory, target)?;
    let trace = config.trace.as_ref();
    if let Some(t) = trace {
        t.emit(json!({"event": "start", "target": crate::logic::canonical_text(target)}));
    }
    let mut stats = SearchStats::default();
    let mut frontier = BinaryHeap::new();
    let mut seq = 0u64;
    frontier.push(SearchNode::new(root, Vec::new(), 0.0, seq));
    let mut expanded_states: HashSet<String> = HashSet::new();
    let mut expanded_goals = ExpandedGoals::new(config.containment);

    let finish = |status: SearchStatus, mut stats: SearchStats| {
        stats.wall_time_ms = start.elapsed().as_millis() as u64;
        if let Some(t) = trace {
            t.emit(json!({"event": "end", "status": &status, "expanded": stats.expanded}));
        }
        Ok(SearchOutcome { status, stats })
    };

    loop {
        if start.elapsed() >= config.time_budget || config.max_expansions.is_some_and(|m| stats.expanded >= m) {
            return finish(SearchStatus::Timeout, stats);
        }
        let Some(node) = frontier.pop() else {
            return finish(SearchStatus::Exhausted, stats);
        };
        if let Some(t) = trace {
            t.emit(json!({"event": "pop", "value": node.value, "state": &node.text}));
        }
        if expanded_states.contains(&node.text) {
            stats.deduplicated += 1;
            if let Some(t) = trace {
                t.emit(json!({"event": "dedup", "state": &node.text}));
            }
            continue;
        }
        let goals = node.goal_texts();
        if config.subsumption && is_subsumed(&goals, &expanded_goals) {
            stats.pruned += 1;
            if let Some(t) = trace {
                t.emit(json!({"event": "prune", "state": &node.text}));
            }
            continue;
        }
        expanded_states.insert(node.text.clone());
        expanded_goals.insert(&goals);
        stats.expanded += 1;

        let candidates = match generator.generate(theory, &node.state) {
            Ok(c) => c,
            Err(e) => {
                return finish(
                    SearchStatus::GeneratorFailure {
                        error: e.to_string(),
                    },
                    stats,
                )
            }
        };
        if let Some(t) = trace {
            t.emit(json!({"event": "expand", "state": &node.text, "candidates": candidates.len()}));
        }
        for cand in candidates.into_iter().take(config.num_candidates) {
            if start.elapsed() >= config.time_budget {
                break;
            }
            if matches!(cand.tactic, Tactic::Sorry) {
                continue;
            }
            let Ok(child) = crate::kernel::apply_tactic(theory, &node.state, &cand.tactic) else {
                continue;
            };
            if child.tainted {
                continue;
            }
            stats.generated += 1;
            let mut path = node.path.clone();
            path.push(cand.tactic);
            if child.is_complete() {
                if let Some(t) = trace {
                    t.emit(json!({"event": "proved", "length": path.len()}));
                }
                return finish(SearchStatus::Proved { path }, stats);
            }
            seq += 1;
            frontier.push(SearchNode::new(child, path, node.value + cand.logprob.min(0.0), seq));
        }
    }
}

/// Searches for proofs of `question` and of its negation, each with the
/// full budget and a fresh generator from `make_generator`.
pub fn prove_both<G, F>(
    theory: &Theory,
    question: &Formula,
    make_generator: F,
    config: &SearchConfig,
) -> Result<(SearchOutcome, SearchOutcome), ProveBothError>
where
    G: TacticGenerator + Send,
    F: Fn() -> Result<G, crate::generator::GeneratorError> + Sync,
{
    let negated = negate(question)?;
    let run = |target: &Formula| -> Result<SearchOutcome, KernelError> {
        match make_generator() {
            Ok(mut g) => search(theory, target, &mut g, config),
            Err(e) => Ok(SearchOutcome {
                status: SearchStatus::GeneratorFailure {
                    error: e.to_string(),
                },
                stats: SearchStats::default(),
            }),
        }
    };
    let (pos, neg) = if config.concurrent {
        std::thread::scope(|s| {
            let h = s.spawn(|| run(&negated));
            let pos = run(question);
            let neg = h.join().expect("dual search thread panicked");
            (pos, neg)
        })
    } else {
        (run(question), run(&negated))
    };
    Ok((pos?, neg?))
}

#[derive(Debug, thiserror::Error)]
pub enum ProveBothError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn subsumption_examples() {
        let mut e = ExpandedGoals::new(Containment::Multiset);
        assert!(!is_subsumed(&g(&["G1"]), &e));
        e.insert(&g(&["G1"]));
        assert!(is_subsumed(&g(&["G1", "G2"]), &e));
        assert!(is_subsumed(&g(&["G2", "G1"]), &e));
        let mut e2 = ExpandedGoals::new(Containment::Multiset);
        e2.insert(&g(&["G1", "G2"]));
        assert!(!is_subsumed(&g(&["G1"]), &e2));
    }

    #[test]
    fn prefix_mode_respects_order() {
        let mut e = ExpandedGoals::new(Containment::Prefix);
        e.insert(&g(&["G1"]));
        assert!(is_subsumed(&g(&["G1", "G2"]), &e));
        assert!(!is_subsumed(&g(&["G2", "G1"]), &e));
    }

    #[test]
    fn large_goal_lists_use_scan() {
        let mut e = ExpandedGoals::new(Containment::Multiset);
        e.insert(&g(&["b", "b"]));
        let many: Vec<String> = (0..12).map(|i| format!("g{i}")).chain(g(&["b", "b"])).collect();
        assert!(is_subsumed(&many, &e));
        let one_b: Vec<String> = (0..12).map(|i| format!("g{i}")).chain(g(&["b"])).collect();
        assert!(!is_subsumed(&one_b, &e));
    }

    #[test]
    fn node_order_prefers_value_then_text() {
        let st = ProofState {
            goals: Vec::new(),
            tainted: false,
        };
        let a = SearchNode::new(st.clone(), Vec::new(), -0.1, 0);
        let b = SearchNode::new(st, Vec::new(), -0.5, 1);
        let mut h = BinaryHeap::from(vec![b, a]);
        assert_eq!(h.pop().unwrap().value, -0.1);
    }
}
