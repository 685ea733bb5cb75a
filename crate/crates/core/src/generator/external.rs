// SPDX-License-Identifier: Apache-2.0

//! Line-delimited JSON scorer subprocess.
//!
//! Requests are single-line objects with a `kind` field:
//! `{"kind":"generate","state":..,"premises":[..],"k":n}` is answered by
//! `{"candidates":[{"tactic":..,"logprob":..}]}` and
//! `{"kind":"embed","texts":[..]}` by `{"embeddings":[[..]]}`.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{rank_candidates, Candidate, GeneratorConfig, GeneratorError, IndexCache, Provenance, TacticGenerator};
use crate::kernel::{ProofState, Tactic};
use crate::logic::Theory;
use crate::syntax::parse_tactic;

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Request<'a> {
    Generate {
        state: &'a str,
        premises: &'a [String],
        k: usize,
    },
    Embed {
        texts: &'a [String],
    },
}

#[derive(Deserialize)]
struct RawCandidate {
    tactic: String,
    logprob: f64,
}

#[derive(Deserialize)]
struct GenerateReply {
    candidates: Vec<RawCandidate>,
}

#[derive(Deserialize)]
struct EmbedReply {
    embeddings: Vec<Vec<f64>>,
}

/// A running scorer process. Requests are strictly sequential.
pub struct ExternalScorer {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
    warnings: usize,
}

impl ExternalScorer {
    /// Starts `command` through `sh -c`.
    pub fn spawn(command: &str, timeout: Duration) -> Result<Self, GeneratorError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(GeneratorError::Spawn)?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(ExternalScorer {
            child,
            stdin,
            lines: rx,
            timeout,
            warnings: 0,
        })
    }

    /// Number of reply entries dropped as invalid so far.
    pub fn warnings(&self) -> usize {
        self.warnings
    }

    fn exit_note(&mut self) -> String {
        match self.child.try_wait() {
            Ok(Some(status)) => format!("process exited with {status}"),
            _ => "output closed".to_string(),
        }
    }

    fn roundtrip<T: for<'de> Deserialize<'de>>(&mut self, req: &Request) -> Result<T, GeneratorError> {
        let mut line = serde_json::to_string(req).map_err(|e| GeneratorError::Protocol(e.to_string()))?;
        line.push('\n');
        let sent = match self.stdin.as_mut() {
            Some(stdin) => stdin.write_all(line.as_bytes()).and_then(|_| stdin.flush()),
            None => Err(std::io::Error::from(std::io::ErrorKind::BrokenPipe)),
        };
        if let Err(e) = sent {
            self.stdin = None;
            return Err(GeneratorError::Crashed(format!("{e}; {}", self.exit_note())));
        }
        let reply = match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(reply)) => reply,
            Ok(Err(e)) => return Err(GeneratorError::Crashed(e.to_string())),
            Err(RecvTimeoutError::Timeout) => return Err(GeneratorError::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => return Err(GeneratorError::Crashed(self.exit_note())),
        };
        serde_json::from_str(&reply).map_err(|e| GeneratorError::Protocol(format!("{e}: {reply}")))
    }

    /// Asks for up to `k` candidates. Entries whose tactic does not parse,
    /// is `sorry`, or whose log-probability is not a finite value `<= 0`
    /// are dropped and counted.
    pub fn generate(&mut self, state: &str, premises: &[String], k: usize) -> Result<Vec<Candidate>, GeneratorError> {
        let reply: GenerateReply = self.roundtrip(&Request::Generate { state, premises, k })?;
        let mut out = Vec::new();
        for raw in reply.candidates {
            let tactic = match parse_tactic(&raw.tactic) {
                Ok(Tactic::Sorry) | Ok(Tactic::Opaque(_)) | Err(_) => None,
                Ok(t) => Some(t),
            };
            match tactic {
                Some(tactic) if raw.logprob.is_finite() && raw.logprob <= 0.0 => out.push(Candidate {
                    tactic,
                    logprob: raw.logprob,
                    provenance: Provenance::External,
                }),
                _ => {
                    self.warnings += 1;
                    log::warn!("dropping scorer candidate `{}` ({})", raw.tactic, raw.logprob);
                }
            }
        }
        Ok(out)
    }

    pub fn embed(&mut self, texts: &[String]) -> Result<Vec<Vec<f64>>, GeneratorError> {
        let reply: EmbedReply = self.roundtrip(&Request::Embed { texts })?;
        if reply.embeddings.len() != texts.len() {
            return Err(GeneratorError::Protocol(format!(
                "expected {} embeddings, got {}",
                texts.len(),
                reply.embeddings.len()
            )));
        }
        Ok(reply.embeddings)
    }
}

impl Drop for ExternalScorer {
    fn drop(&mut self) {
        self.stdin = None;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Sends the first goal plus its top retrieved premises (`name : text`)
/// to a scorer process.
pub struct ExternalGenerator {
    pub config: GeneratorConfig,
    scorer: ExternalScorer,
    cache: IndexCache,
}

impl ExternalGenerator {
    pub fn new(scorer: ExternalScorer, config: GeneratorConfig) -> Self {
        let m = config.retrieval_m;
        ExternalGenerator {
            config,
            scorer,
            cache: IndexCache::new(m),
        }
    }

    pub fn scorer(&self) -> &ExternalScorer {
        &self.scorer
    }
}

impl TacticGenerator for ExternalGenerator {
    fn generate(&mut self, theory: &Theory, state: &ProofState) -> Result<Vec<Candidate>, GeneratorError> {
        let Some(goal) = state.goals.first() else {
            return Ok(Vec::new());
        };
        let index = self.cache.get(theory)?;
        let premises: Vec<String> = index
            .rank(goal)
            .into_iter()
            .filter_map(|(n, _)| index.get(&n).map(|p| format!("{} : {}", p.name, p.text)))
            .collect();
        let k = self.config.num_candidates;
        let cands = self.scorer.generate(&goal.canonical_text(), &premises, k)?;
        Ok(rank_candidates(cands, k))
    }
}
