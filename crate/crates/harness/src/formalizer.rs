// SPDX-License-Identifier: Apache-2.0

//! Prompt rendering, chat-completion clients, code extraction and the
//! single-retry formalization loop.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use reasoner_core::interpret::{OptionMapping, Verdict};
use reasoner_core::logic::Theory;
use reasoner_core::syntax::parse_theory;

use crate::corpus::{question_of, ProblemRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        Message {
            role,
            content: content.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FewShot {
    pub context: Vec<String>,
    pub questions: Vec<String>,
    pub options: Vec<String>,
    pub completion: String,
}

/// Plain-text templates with `{slot}` placeholders.
#[derive(Clone, Debug, PartialEq)]
pub struct PromptTemplate {
    pub system: String,
    /// Slots: `{context}`, `{questions}`.
    pub user: String,
    /// Slots: `{number}`, `{options}`, `{question}`.
    pub question: String,
    /// Slots: `{diagnostics}`, `{source}`.
    pub retry: String,
    pub examples: Vec<FewShot>,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        PromptTemplate {
            system: include_str!("../templates/system.txt").trim_end().to_string(),
            user: include_str!("../templates/user.txt").trim_end().to_string(),
            question: include_str!("../templates/question.txt").trim_end().to_string(),
            retry: include_str!("../templates/retry.txt").trim_end().to_string(),
            examples: Vec::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum FormalizerError {
    #[error("template slot `{0}` is missing or empty")]
    MissingSlot(&'static str),
    #[error("template file {path}: {source}")]
    Template {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("questions in one prompt must share their context")]
    MixedContext,
    #[error("no declarations found in completion")]
    NothingToExtract,
    #[error(transparent)]
    Transport(#[from] ClientError),
}

fn fill(template: &str, slots: &[(&'static str, &str)]) -> Result<String, FormalizerError> {
    let mut out = template.to_string();
    for (name, value) in slots {
        let key = format!("{{{name}}}");
        if !out.contains(&key) || value.trim().is_empty() {
            return Err(FormalizerError::MissingSlot(name));
        }
        out = out.replace(&key, value);
    }
    Ok(out)
}

/// `true, false, or unknown` from the option labels.
fn options_phrase(options: &[String]) -> String {
    let lower: Vec<String> = options.iter().map(|o| o.to_lowercase()).collect();
    match lower.len() {
        0 => String::new(),
        1 => lower[0].clone(),
        n => format!("{}, or {}", lower[..n - 1].join(", "), lower[n - 1]),
    }
}

impl PromptTemplate {
    /// Reads `system.txt`, `user.txt`, `question.txt`, `retry.txt` and an
    /// optional `examples.jsonl` from `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self, FormalizerError> {
        let read = |name: &str| {
            let p = dir.join(name);
            std::fs::read_to_string(&p)
                .map(|s| s.trim_end().to_string())
                .map_err(|source| FormalizerError::Template {
                    path: p.display().to_string(),
                    source,
                })
        };
        let mut examples = Vec::new();
        if let Ok(text) = std::fs::read_to_string(dir.join("examples.jsonl")) {
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                let ex: FewShot = serde_json::from_str(line).map_err(|e| FormalizerError::Template {
                    path: dir.join("examples.jsonl").display().to_string(),
                    source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
                })?;
                examples.push(ex);
            }
        }
        Ok(PromptTemplate {
            system: read("system.txt")?,
            user: read("user.txt")?,
            question: read("question.txt")?,
            retry: read("retry.txt")?,
            examples,
        })
    }

    fn user_message(&self, context: &[String], questions: &[String], options: &[String]) -> Result<String, FormalizerError> {
        let opts = options_phrase(options);
        let lines: Vec<String> = questions
            .iter()
            .enumerate()
            .map(|(i, q)| {
                let number = if questions.len() == 1 { String::new() } else { format!(" {}", i + 1) };
                self.question
                    .replace("{number}", &number)
                    .replace("{options}", &opts)
                    .replace("{question}", q)
            })
            .collect();
        if lines.is_empty() || questions.iter().any(|q| q.trim().is_empty()) {
            return Err(FormalizerError::MissingSlot("question"));
        }
        fill(&self.user, &[("context", &context.join(" ")), ("questions", &lines.join("\n"))])
    }

    fn messages(&self, context: &[String], questions: &[String], options: &[String]) -> Result<Vec<Message>, FormalizerError> {
        if self.system.trim().is_empty() {
            return Err(FormalizerError::MissingSlot("system"));
        }
        let mut out = vec![Message::new(Role::System, self.system.clone())];
        for ex in &self.examples {
            out.push(Message::new(Role::User, self.user_message(&ex.context, &ex.questions, &ex.options)?));
            out.push(Message::new(Role::Assistant, ex.completion.clone()));
        }
        out.push(Message::new(Role::User, self.user_message(context, questions, options)?));
        Ok(out)
    }
}

/// System message plus one user message for a single record.
pub fn render_prompt(template: &PromptTemplate, problem: &ProblemRecord) -> Result<Vec<Message>, FormalizerError> {
    template.messages(&problem.context, std::slice::from_ref(&problem.question), &problem.options)
}

/// One prompt for several questions over the same context, numbered.
pub fn render_group(template: &PromptTemplate, problems: &[&ProblemRecord]) -> Result<Vec<Message>, FormalizerError> {
    let first = problems.first().ok_or(FormalizerError::MissingSlot("question"))?;
    if problems.iter().any(|p| p.context != first.context) {
        return Err(FormalizerError::MixedContext);
    }
    let questions: Vec<String> = problems.iter().map(|p| p.question.clone()).collect();
    template.messages(&first.context, &questions, &first.options)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extraction {
    pub source: String,
    /// Verdict named by the last `The answer is X` in the completion.
    pub answer: Option<Verdict>,
}

const DECL_KEYWORDS: &[&str] = &[
    "universe", "universes", "constant", "constants", "axiom", "axioms", "theorem", "lemma",
];

fn starts_decl(line: &str) -> bool {
    let t = line.trim_start();
    DECL_KEYWORDS
        .iter()
        .any(|k| t.strip_prefix(k).is_some_and(|rest| rest.starts_with(char::is_whitespace)))
}

fn answer_in(text: &str) -> Option<Verdict> {
    let lower = text.to_lowercase();
    let mut found = None;
    let mut rest = lower.as_str();
    while let Some(i) = rest.find("the answer is") {
        let after = rest[i + "the answer is".len()..].trim_start();
        let word: String = after.chars().take_while(|c| c.is_alphabetic()).collect();
        if let Some(v) = OptionMapping::parse_label(&word) {
            found = Some(v);
        }
        rest = &rest[i + 1..];
    }
    found
}

fn strip_fences(completion: &str) -> Option<String> {
    let mut blocks = Vec::new();
    let mut inside = false;
    let mut cur = Vec::new();
    for line in completion.lines() {
        if line.trim_start().starts_with("```") {
            if inside {
                blocks.push(cur.join("\n"));
                cur.clear();
            }
            inside = !inside;
            continue;
        }
        if inside {
            cur.push(line);
        }
    }
    let code: Vec<String> = blocks.into_iter().filter(|b| b.lines().any(starts_decl)).collect();
    (!code.is_empty()).then(|| code.join("\n\n"))
}

/// Keeps declarations, their continuation lines, proof blocks and `--`
/// comments; drops surrounding prose.
pub fn extract_code(completion: &str) -> Result<Extraction, FormalizerError> {
    let answer = answer_in(completion);
    if let Some(source) = strip_fences(completion) {
        return Ok(Extraction { source, answer });
    }
    let mut kept: Vec<&str> = Vec::new();
    let mut in_decl = false;
    let mut depth: i32 = 0;
    let mut any = false;
    for line in completion.lines() {
        let t = line.trim();
        let comment = t.starts_with("--") || t.starts_with("/-");
        if starts_decl(line) {
            in_decl = true;
            any = true;
            kept.push(line);
        } else if comment {
            kept.push(line);
        } else if t.is_empty() {
            if depth == 0 {
                in_decl = false;
            }
            kept.push(line);
        } else if in_decl || depth > 0 {
            kept.push(line);
        } else {
            continue;
        }
        if !comment {
            for word in t.split(|c: char| !c.is_alphanumeric() && c != '_') {
                match word {
                    "begin" => depth += 1,
                    "end" if depth > 0 => {
                        depth -= 1;
                        if depth == 0 {
                            in_decl = false;
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    if !any {
        return Err(FormalizerError::NothingToExtract);
    }
    let source = kept.join("\n").trim().to_string();
    Ok(Extraction { source, answer })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            temperature: 0.0,
            max_tokens: 2048,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChatRequest<'a> {
    pub problem_id: &'a str,
    /// 1 for the first call, 2 for the retry.
    pub attempt: usize,
    pub messages: &'a [Message],
    pub params: &'a GenerationParams,
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("missing environment variable {0}")]
    Config(&'static str),
    #[error("http: {0}")]
    Http(String),
    #[error("malformed response: {0}")]
    Response(String),
    #[error("no canned completion for `{id}` attempt {attempt}")]
    MissingFixture { id: String, attempt: usize },
    #[error("fixture {path}: {reason}")]
    Fixture { path: String, reason: String },
}

pub trait ChatClient: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, ClientError>;
}

/// Chat-completions over HTTP. Configured by `REASONER_LLM_URL`,
/// `REASONER_LLM_API_KEY` (optional) and `REASONER_LLM_MODEL`.
pub struct HttpClient {
    url: String,
    api_key: Option<String>,
    model: String,
    agent: ureq::Agent,
}

impl HttpClient {
    pub fn new(url: String, api_key: Option<String>, model: String) -> Self {
        HttpClient {
            url,
            api_key,
            model,
            agent: ureq::AgentBuilder::new().timeout(std::time::Duration::from_secs(300)).build(),
        }
    }

    pub fn from_env() -> Result<Self, ClientError> {
        let url = std::env::var("REASONER_LLM_URL").map_err(|_| ClientError::Config("REASONER_LLM_URL"))?;
        let model = std::env::var("REASONER_LLM_MODEL").map_err(|_| ClientError::Config("REASONER_LLM_MODEL"))?;
        Ok(Self::new(url, std::env::var("REASONER_LLM_API_KEY").ok(), model))
    }
}

impl ChatClient for HttpClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, ClientError> {
        let body = serde_json::json!({
            "model": self.model,
            "messages": request.messages,
            "temperature": request.params.temperature,
            "max_tokens": request.params.max_tokens,
        });
        let mut req = self.agent.post(&self.url).set("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.set("Authorization", &format!("Bearer {key}"));
        }
        let reply: serde_json::Value = req
            .send_json(body)
            .map_err(|e| ClientError::Http(e.to_string()))?
            .into_json()
            .map_err(|e| ClientError::Response(e.to_string()))?;
        reply["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| ClientError::Response(reply.to_string()))
    }
}

#[derive(Deserialize)]
struct Fixture {
    id: String,
    attempt: usize,
    completion: String,
}

/// Serves canned completions keyed by record id and attempt number.
#[derive(Clone, Debug, Default)]
pub struct ReplayClient {
    completions: HashMap<(String, usize), String>,
}

impl ReplayClient {
    pub fn parse(text: &str) -> Result<Self, ClientError> {
        let mut completions = HashMap::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let f: Fixture = serde_json::from_str(line).map_err(|e| ClientError::Fixture {
                path: format!("line {}", i + 1),
                reason: e.to_string(),
            })?;
            completions.insert((f.id, f.attempt), f.completion);
        }
        Ok(ReplayClient { completions })
    }

    pub fn load(path: &Path) -> Result<Self, ClientError> {
        let text = std::fs::read_to_string(path).map_err(|e| ClientError::Fixture {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn insert(&mut self, id: &str, attempt: usize, completion: &str) {
        self.completions.insert((id.to_string(), attempt), completion.to_string());
    }
}

impl ChatClient for ReplayClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, ClientError> {
        self.completions
            .get(&(request.problem_id.to_string(), request.attempt))
            .cloned()
            .ok_or_else(|| ClientError::MissingFixture {
                id: request.problem_id.to_string(),
                attempt: request.attempt,
            })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FormalizationResult {
    pub source: String,
    /// Empty iff the final source parsed, checked and states a question.
    pub diagnostics: Vec<String>,
    pub attempts: usize,
    pub completions: Vec<String>,
    pub answer: Option<Verdict>,
    #[serde(skip)]
    pub theory: Option<Theory>,
}

impl FormalizationResult {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty() && self.theory.is_some()
    }
}

fn check_source(completion: &str) -> (String, Option<Verdict>, Result<Theory, Vec<String>>) {
    match extract_code(completion) {
        Err(e) => (completion.to_string(), None, Err(vec![e.to_string()])),
        Ok(ex) => {
            let checked = match parse_theory(&ex.source) {
                Err(e) => Err(e.render().lines().map(str::to_string).collect()),
                Ok(t) if question_of(&t).is_none() => Err(vec!["no theorem states the question".to_string()]),
                Ok(t) => Ok(t),
            };
            (ex.source, ex.answer, checked)
        }
    }
}

/// At most two model calls: the prompt, then, on any diagnostic, a retry
/// carrying the diagnostics and the faulty source.
pub fn formalize_with_retry(
    client: &dyn ChatClient,
    template: &PromptTemplate,
    problem: &ProblemRecord,
    params: &GenerationParams,
) -> Result<FormalizationResult, FormalizerError> {
    let mut messages = render_prompt(template, problem)?;
    let mut completions = Vec::new();
    for attempt in 1..=2 {
        let completion = client.complete(&ChatRequest {
            problem_id: &problem.id,
            attempt,
            messages: &messages,
            params,
        })?;
        completions.push(completion.clone());
        let (source, answer, checked) = check_source(&completion);
        match checked {
            Ok(theory) => {
                return Ok(FormalizationResult {
                    source,
                    diagnostics: Vec::new(),
                    attempts: attempt,
                    completions,
                    answer,
                    theory: Some(theory),
                })
            }
            Err(diagnostics) if attempt == 2 => {
                return Ok(FormalizationResult {
                    source,
                    diagnostics,
                    attempts: attempt,
                    completions,
                    answer,
                    theory: None,
                })
            }
            Err(diagnostics) => {
                log::info!("{}: formalization rejected, retrying", problem.id);
                messages.push(Message::new(Role::Assistant, completion));
                messages.push(Message::new(
                    Role::User,
                    fill(&template.retry, &[("diagnostics", &diagnostics.join("\n")), ("source", &source)])?,
                ));
            }
        }
    }
    unreachable!("loop returns on the second attempt")
}
