// SPDX-License-Identifier: Apache-2.0

//! `reasoner`: parse, check, prove and evaluate theories from the shell.
//!
//! Exit status: 0 on success, 1 on usage errors (bad flags, unreadable
//! files, malformed formulas), 2 when the problem itself fails.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use reasoner_core::generator::GeneratorConfig;
use reasoner_core::interpret::interpret;
use reasoner_core::kernel::{check_theorem, ProofStatus};
use reasoner_core::logic::{canonical_text, check_formula, DeclKind, Formula, Theory};
use reasoner_core::search::{prove_both, search, SearchConfig, SearchOutcome, SearchStatus, TraceSink};
use reasoner_core::syntax::{parse_formula_in, parse_theory, print_theory};
use reasoner_core::PremiseIndex;
use reasoner_harness::corpus::{load_corpus, write_corpus};
use reasoner_harness::evaluate::{evaluate, PipelineConfig, ScorerSpec, TheorySource};
use reasoner_harness::formalizer::{GenerationParams, HttpClient, PromptTemplate, ReplayClient};
use reasoner_harness::instances::{generate_instances, GenParams};
use reasoner_harness::oracle::oracle;
use reasoner_harness::report::{render_table, to_json};

#[derive(Parser, Debug)]
#[command(name = "reasoner", version, about = "Dual-theorem prover for a small first-order theory language")]
struct Cli {
    /// Search budget per theorem, in seconds.
    #[arg(long, global = true, default_value_t = 180)]
    timeout_secs: u64,
    /// Candidate tactics per expansion.
    #[arg(long, global = true, default_value_t = 64)]
    num_tactics: usize,
    /// `builtin` or `subprocess:<command>`.
    #[arg(long, global = true, default_value = "builtin")]
    scorer: ScorerSpec,
    /// Disable subsumption pruning.
    #[arg(long, global = true)]
    no_subsumption: bool,
    /// Write search events as JSON lines to this file.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and well-formedness check a theory, then print it back.
    Parse { file: PathBuf },
    /// Replay every theorem's proof script.
    Check { file: PathBuf },
    /// Search for a proof of one theorem, ignoring its script.
    Prove {
        file: PathBuf,
        #[arg(long)]
        theorem: String,
    },
    /// Search for the question and its negation and report the verdict.
    Solve {
        file: PathBuf,
        #[arg(long)]
        question: String,
    },
    /// Forward-chaining label for a question over a Horn-style theory.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        question: String,
        /// Stop after this many rounds.
        #[arg(long)]
        depth_cap: Option<usize>,
    },
    /// Generate a labelled synthetic corpus.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        count: usize,
        /// Maximum derivation depth of True/False questions.
        #[arg(long, default_value_t = 5)]
        depth: usize,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a corpus end to end.
    Eval {
        corpus: PathBuf,
        /// Formalize contexts with canned completions from this file.
        #[arg(long, conflicts_with = "formalize")]
        replay: Option<PathBuf>,
        /// Formalize contexts with a live chat endpoint (REASONER_LLM_URL,
        /// REASONER_LLM_MODEL, optional REASONER_LLM_API_KEY).
        #[arg(long)]
        formalize: bool,
        /// Directory overriding the bundled prompt templates.
        #[arg(long)]
        templates: Option<PathBuf>,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Rank axioms by similarity to a goal.
    Retrieve {
        file: PathBuf,
        #[arg(long)]
        goal: String,
        #[arg(short, default_value_t = 4)]
        k: usize,
    },
}

enum Failure {
    Usage(String),
    Problem(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn problem(e: impl std::fmt::Display) -> Failure {
    Failure::Problem(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_theory(path: &Path) -> Result<Theory, Failure> {
    parse_theory(&read(path)?).map_err(|e| problem(format!("{}:\n{e}", path.display())))
}

fn formula(theory: &Theory, src: &str) -> Result<Formula, Failure> {
    let f = parse_formula_in(theory, src).map_err(|e| usage(format!("formula `{src}`: {e}")))?;
    let diags = check_formula(theory, &(), &f);
    if !diags.is_empty() {
        let msgs: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Err(usage(format!("formula `{src}`: {}", msgs.join("; "))));
    }
    Ok(f)
}

impl Cli {
    fn search_config(&self) -> Result<SearchConfig, Failure> {
        let trace = match &self.trace {
            Some(p) => Some(TraceSink::new(
                File::create(p).map_err(|e| usage(format!("{}: {e}", p.display())))?,
            )),
            None => None,
        };
        Ok(SearchConfig {
            time_budget: Duration::from_secs(self.timeout_secs),
            num_candidates: self.num_tactics,
            subsumption: !self.no_subsumption,
            trace,
            ..SearchConfig::default()
        })
    }

    fn generator_config(&self) -> GeneratorConfig {
        GeneratorConfig {
            num_candidates: self.num_tactics,
            ..GeneratorConfig::default()
        }
    }

    fn pipeline(&self, workers: usize) -> Result<PipelineConfig, Failure> {
        Ok(PipelineConfig {
            search: self.search_config()?,
            generator: self.generator_config(),
            scorer: self.scorer.clone(),
            workers,
            ..PipelineConfig::default()
        })
    }
}

fn status_line(s: &SearchStatus) -> String {
    match s {
        SearchStatus::Proved { path } => format!("proved ({} steps)", path.len()),
        SearchStatus::Timeout => "timeout".into(),
        SearchStatus::Exhausted => "exhausted".into(),
        SearchStatus::GeneratorFailure { error } => format!("generator failure: {error}"),
    }
}

fn print_outcome(label: &str, out: &SearchOutcome) {
    println!(
        "{label}: {} [expanded {}, pruned {}, deduplicated {}, {} ms]",
        status_line(&out.status),
        out.stats.expanded,
        out.stats.pruned,
        out.stats.deduplicated,
        out.stats.wall_time_ms
    );
    if let Some(script) = out.script() {
        for line in script.to_string().lines() {
            println!("  {line}");
        }
    }
}

fn check(file: &Path) -> Outcome {
    let theory = load_theory(file)?;
    let mut bad = 0;
    let mut seen = 0;
    for d in theory.theorems() {
        seen += 1;
        let name = &*d.name;
        let line = match check_theorem(&theory, name) {
            Ok(r) if r.is_valid() => "valid".to_string(),
            Ok(r) => {
                bad += 1;
                let taint = if r.tainted { " (uses sorry)" } else { "" };
                match r.status {
                    ProofStatus::Complete => format!("complete but invalid{taint}"),
                    ProofStatus::Incomplete { remaining_goals } => {
                        format!("incomplete, {remaining_goals} goal(s) left{taint}")
                    }
                    ProofStatus::FailedAt { step, error } => format!("failed at step {step}: {error}"),
                }
            }
            Err(e) => {
                bad += 1;
                e.to_string()
            }
        };
        println!("{name}: {line}");
    }
    if seen == 0 {
        println!("no theorems");
    }
    if bad > 0 {
        return Err(problem(format!("{bad} of {seen} theorem(s) not valid")));
    }
    Ok(())
}

fn prove(cli: &Cli, file: &Path, theorem: &str) -> Outcome {
    let theory = load_theory(file)?;
    let statement = match theory.get(theorem).map(|d| &d.kind) {
        Some(DeclKind::Theorem { statement, .. }) => statement.clone(),
        _ => return Err(usage(format!("no theorem named `{theorem}`"))),
    };
    let config = cli.search_config()?;
    let mut gen = cli
        .scorer
        .make(&cli.generator_config(), Duration::from_secs(30))
        .map_err(problem)?;
    let out = search(&theory, &statement, &mut gen, &config).map_err(problem)?;
    if let Some(t) = &config.trace {
        t.flush();
    }
    print_outcome(theorem, &out);
    if out.is_proved() {
        Ok(())
    } else {
        Err(problem(format!("no proof: {}", status_line(&out.status))))
    }
}

fn solve(cli: &Cli, file: &Path, question: &str) -> Outcome {
    let theory = load_theory(file)?;
    let q = formula(&theory, question)?;
    let config = cli.search_config()?;
    let gen_config = cli.generator_config();
    let (pos, neg) = prove_both(&theory, &q, || cli.scorer.make(&gen_config, Duration::from_secs(30)), &config)
        .map_err(problem)?;
    if let Some(t) = &config.trace {
        t.flush();
    }
    let interp = interpret(&pos, &neg);
    println!("verdict: {}", interp.verdict);
    print_outcome("positive", &pos);
    print_outcome("negative", &neg);
    for s in [&pos.status, &neg.status] {
        if let SearchStatus::GeneratorFailure { error } = s {
            return Err(problem(error));
        }
    }
    Ok(())
}

fn run_oracle(file: &Path, question: &str, depth_cap: Option<usize>) -> Outcome {
    let theory = load_theory(file)?;
    let q = formula(&theory, question)?;
    let r = oracle(&theory, &q, depth_cap).map_err(problem)?;
    println!("label: {}", r.label);
    match r.depth {
        Some(d) => println!("depth: {d}"),
        None => println!("depth: -"),
    }
    println!("consistent: {}", r.consistent);
    println!("derived: {}", r.derived.len());
    Ok(())
}

fn gen(seed: u64, count: usize, depth: usize, out: Option<&Path>) -> Outcome {
    let params = GenParams {
        max_depth: depth,
        ..GenParams::default()
    };
    let instances = generate_instances(seed, count, &params).map_err(usage)?;
    let records: Vec<_> = instances.iter().map(|i| i.to_record()).collect();
    let text = write_corpus(&records);
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn eval(
    cli: &Cli,
    corpus: &Path,
    replay: Option<&Path>,
    formalize: bool,
    templates: Option<&Path>,
    json: Option<&Path>,
    workers: usize,
) -> Outcome {
    let records = load_corpus(corpus).map_err(usage)?;
    if records.is_empty() {
        return Err(usage(format!("{}: empty corpus", corpus.display())));
    }
    let config = cli.pipeline(workers)?;
    let template = match templates {
        Some(dir) => PromptTemplate::from_dir(dir).map_err(usage)?,
        None => PromptTemplate::default(),
    };
    let replay_client;
    let http_client;
    let source = if let Some(p) = replay {
        replay_client = ReplayClient::load(p).map_err(usage)?;
        TheorySource::Formalizer {
            client: &replay_client,
            template: &template,
            params: GenerationParams::default(),
        }
    } else if formalize {
        http_client = HttpClient::from_env().map_err(usage)?;
        TheorySource::Formalizer {
            client: &http_client,
            template: &template,
            params: GenerationParams::default(),
        }
    } else {
        TheorySource::Attached
    };
    let report = evaluate(&records, &config, &source);
    if let Some(t) = &config.search.trace {
        t.flush();
    }
    print!("{}", render_table(&report));
    if let Some(p) = json {
        std::fs::write(p, to_json(&report)).map_err(|e| usage(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn retrieve(file: &Path, goal: &str, k: usize) -> Outcome {
    let theory = load_theory(file)?;
    let g = formula(&theory, goal)?;
    let index = PremiseIndex::for_theory(&theory, k).map_err(problem)?;
    for (name, score) in index.rank_text(&canonical_text(&g)).into_iter().take(k) {
        println!("{name}\t{score:.4}");
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Parse { file } => {
            print!("{}", print_theory(&load_theory(file)?));
            Ok(())
        }
        Command::Check { file } => check(file),
        Command::Prove { file, theorem } => prove(cli, file, theorem),
        Command::Solve { file, question } => solve(cli, file, question),
        Command::Oracle {
            file,
            question,
            depth_cap,
        } => run_oracle(file, question, *depth_cap),
        Command::Gen {
            seed,
            count,
            depth,
            out,
        } => gen(*seed, *count, *depth, out.as_deref()),
        Command::Eval {
            corpus,
            replay,
            formalize,
            templates,
            json,
            workers,
        } => eval(
            cli,
            corpus,
            replay.as_deref(),
            *formalize,
            templates.as_deref(),
            json.as_deref(),
            *workers,
        ),
        Command::Retrieve { file, goal, k } => retrieve(file, goal, *k),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Problem(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
