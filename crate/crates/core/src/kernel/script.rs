// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use serde::Serialize;

use super::{apply_tactic, init_state, KernelError, ProofState, ScriptItem, TacticError, TacticErrorKind, TacticScript};
use crate::logic::{DeclKind, Formula, Theory};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ProofStatus {
    Complete,
    Incomplete { remaining_goals: usize },
    /// `step` is the 1-based index of the failing tactic, blocks flattened.
    FailedAt { step: usize, error: TacticError },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProofReport {
    #[serde(flatten)]
    pub status: ProofStatus,
    /// True iff some `sorry` was executed.
    pub tainted: bool,
}

impl ProofReport {
    /// Complete and free of `sorry`.
    pub fn is_valid(&self) -> bool {
        self.status == ProofStatus::Complete && !self.tainted
    }
}

struct Replay<'a> {
    theory: &'a Theory,
    step: usize,
}

impl Replay<'_> {
    fn run(&mut self, items: &[ScriptItem], mut state: ProofState) -> Result<ProofState, (usize, TacticError)> {
        for item in items {
            match item {
                ScriptItem::Tactic(t, _) => {
                    self.step += 1;
                    state = apply_tactic(self.theory, &state, t).map_err(|e| (self.step, e))?;
                }
                ScriptItem::Block(inner, _) => {
                    let Some(first) = state.goals.first().cloned() else {
                        return Err((
                            self.step + 1,
                            TacticError {
                                tactic: "{ ... }".into(),
                                kind: TacticErrorKind::NoGoals,
                                message: "no goals".into(),
                            },
                        ));
                    };
                    let focused = ProofState {
                        goals: vec![first],
                        tainted: state.tainted,
                    };
                    let done = self.run(inner, focused)?;
                    if !done.is_complete() {
                        return Err((
                            self.step,
                            TacticError {
                                tactic: "{ ... }".into(),
                                kind: TacticErrorKind::UnsolvedBlock,
                                message: format!("block leaves {} goal(s) unsolved", done.goals.len()),
                            },
                        ));
                    }
                    let rest: Vec<Arc<_>> = state.goals[1..].to_vec();
                    state = ProofState {
                        goals: rest,
                        tainted: done.tainted,
                    };
                }
            }
        }
        Ok(state)
    }
}

/// Replays `script` against `target` from the initial state.
pub fn check_proof(theory: &Theory, target: &Formula, script: &TacticScript) -> Result<ProofReport, KernelError> {
    let init = init_state(theory, target)?;
    let mut replay = Replay { theory, step: 0 };
    let (status, tainted) = match replay.run(&script.items, init) {
        Ok(end) if end.is_complete() => (ProofStatus::Complete, end.tainted),
        Ok(end) => (
            ProofStatus::Incomplete {
                remaining_goals: end.goals.len(),
            },
            end.tainted,
        ),
        // Tainting only counts for tactics that actually ran.
        Err((step, error)) => (
            ProofStatus::FailedAt { step, error },
            script_prefix_has_sorry(&script.items, step - 1),
        ),
    };
    Ok(ProofReport { status, tainted })
}

fn script_prefix_has_sorry(items: &[ScriptItem], n: usize) -> bool {
    fn walk(items: &[ScriptItem], left: &mut usize) -> bool {
        for item in items {
            match item {
                ScriptItem::Tactic(t, _) => {
                    if *left == 0 {
                        return false;
                    }
                    *left -= 1;
                    if matches!(t, super::Tactic::Sorry) {
                        return true;
                    }
                }
                ScriptItem::Block(inner, _) => {
                    if walk(inner, left) {
                        return true;
                    }
                }
            }
        }
        false
    }
    let mut left = n;
    walk(items, &mut left)
}

/// Replays `script` as a proof of the theorem `theorem_name`.
pub fn check_script(theory: &Theory, theorem_name: &str, script: &TacticScript) -> Result<ProofReport, KernelError> {
    match theory.get(theorem_name).map(|d| &d.kind) {
        Some(DeclKind::Theorem { statement, .. }) => check_proof(theory, statement, script),
        _ => Err(KernelError::UnknownTheorem(theorem_name.to_string())),
    }
}

/// Checks the script attached to a theorem declaration.
pub fn check_theorem(theory: &Theory, theorem_name: &str) -> Result<ProofReport, KernelError> {
    match theory.get(theorem_name).map(|d| &d.kind) {
        Some(DeclKind::Theorem {
            script: Some(script), ..
        }) => check_script(theory, theorem_name, script),
        Some(DeclKind::Theorem { script: None, .. }) => Err(KernelError::NoScript(theorem_name.to_string())),
        _ => Err(KernelError::UnknownTheorem(theorem_name.to_string())),
    }
}
