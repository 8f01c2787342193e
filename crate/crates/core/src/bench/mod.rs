//! Benchmark corpus, evaluation schemes, pass@k computation, the resumable
//! task-sweep runner, and report emission.
//!
//! A corpus row fixes a task id, its description, and the expected
//! algorithm set; a run draws `n_t` samples per task through one of four
//! schemes (static few-shot, dynamic coder, tools coder, or the full
//! pipeline with decomposition) and appends one record per sample to a
//! JSONL file that later runs skip over and reports recompute from.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{mpsc, Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::agents::{
    extract_program, prompts, write_artifacts, Attempt, Budget, CoderKind, CoderUsed,
    Orchestrator, Outcome, RunStatus, Task, TaskExpectation, TRANSCRIPT_FILE,
};
use crate::gateway::{ChatBackend, ChatMessage, Gateway, GenerationParams, HttpBackend, ScriptedBackend};
use crate::retrieval::{build_index, example_corpus, goal_phrase, task_description, ExampleRecord, Index};
use crate::toolset::Algorithm;
use crate::verify::{check, oracle_artifacts, random_task, reference_program, TaskSpec};

/// File holding one serialized record per completed (task, sample) pair.
pub const RECORDS_FILE: &str = "records.jsonl";
/// File echoing the run configuration and corpus hash next to the records.
pub const META_FILE: &str = "run_meta.json";
/// File a corpus build writes its rows to.
pub const CORPUS_FILE: &str = "corpus.json";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("corpus error: {0}")]
    Corpus(String),
    #[error("backend error: {0}")]
    Backend(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

/// The four evaluation schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Static,
    Dynamic,
    Tools,
    Qagent,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Scheme::Static => "static",
            Scheme::Dynamic => "dynamic",
            Scheme::Tools => "tools",
            Scheme::Qagent => "qagent",
        };
        f.write_str(name)
    }
}

/// Chat backend selection for a run, embeddable in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendConfig {
    Http {
        endpoint: String,
        model: String,
        #[serde(default)]
        auth_env: Option<String>,
        #[serde(default)]
        timeout_secs: Option<u64>,
    },
    /// Fixed response sequence; only usable with parallelism 1.
    ScriptedSequence { responses: Vec<String> },
    /// Stateless substring-triggered responses; safe under concurrency.
    ScriptedRules { rules: Vec<(String, String)> },
}

impl BackendConfig {
    /// Short name used in the report's backend column.
    pub fn label(&self) -> String {
        match self {
            BackendConfig::Http { model, .. } => model.clone(),
            BackendConfig::ScriptedSequence { .. } | BackendConfig::ScriptedRules { .. } => {
                "scripted".to_string()
            }
        }
    }

    pub fn build(&self) -> Result<Arc<dyn ChatBackend>, BenchError> {
        match self {
            BackendConfig::Http { endpoint, model, auth_env, timeout_secs } => {
                let mut backend = HttpBackend::new(endpoint, model);
                if let Some(secs) = timeout_secs {
                    backend = backend.with_timeout(Duration::from_secs(*secs));
                }
                if let Some(var) = auth_env {
                    backend = backend.with_token_env(var);
                }
                Ok(Arc::new(backend))
            }
            BackendConfig::ScriptedSequence { responses } => {
                Ok(Arc::new(ScriptedBackend::sequence(responses.clone())))
            }
            BackendConfig::ScriptedRules { rules } => {
                Ok(Arc::new(ScriptedBackend::rules(rules.clone())))
            }
        }
    }
}

fn default_n_t() -> u32 {
    5
}

fn default_k() -> Vec<u32> {
    vec![1, 3]
}

fn default_shots() -> u32 {
    3
}

fn default_parallelism() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    /// Path to the corpus file produced by a corpus build.
    pub corpus: PathBuf,
    /// Directory receiving records, artifacts, and the config echo.
    pub output_dir: PathBuf,
    /// Task ids to run; empty means every task in the corpus.
    #[serde(default)]
    pub tasks: Vec<String>,
    pub scheme: Scheme,
    /// Samples per task.
    #[serde(default = "default_n_t")]
    pub n_t: u32,
    /// k values reported for pass@k.
    #[serde(default = "default_k")]
    pub k: Vec<u32>,
    /// Sample seeds are `base_seed + sample_index`, shared across schemes.
    #[serde(default)]
    pub base_seed: u64,
    /// Overrides the (3, 5) default for the dynamic coder; its candidate
    /// count also sets how many programs the static scheme generates.
    #[serde(default)]
    pub dynamic_budget: Option<Budget>,
    /// Overrides the (3, 5) default for the tools coder.
    #[serde(default)]
    pub tools_budget: Option<Budget>,
    /// Examples per static prompt, between 1 and 5.
    #[serde(default = "default_shots")]
    pub shots: u32,
    #[serde(default = "default_parallelism")]
    pub parallelism: u32,
    pub backend: BackendConfig,
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.n_t < 1 {
            return Err(BenchError::Config("n_t must be at least 1".to_string()));
        }
        if self.k.is_empty() {
            return Err(BenchError::Config("at least one k value is required".to_string()));
        }
        for &k in &self.k {
            if k < 1 || k > self.n_t {
                return Err(BenchError::Config(format!(
                    "k = {k} must lie in [1, n_t = {}]",
                    self.n_t
                )));
            }
        }
        if !(1..=5).contains(&self.shots) {
            return Err(BenchError::Config(format!(
                "shots = {} must lie in [1, 5]",
                self.shots
            )));
        }
        if self.parallelism < 1 {
            return Err(BenchError::Config("parallelism must be at least 1".to_string()));
        }
        Ok(())
    }

    pub fn resolved_dynamic_budget(&self) -> Budget {
        self.dynamic_budget.unwrap_or_else(Budget::benchmark_default)
    }

    pub fn resolved_tools_budget(&self) -> Budget {
        self.tools_budget.unwrap_or_else(Budget::benchmark_default)
    }
}

/// One benchmark task: id, level, prose description, and the expected
/// algorithm set and size used for verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRow {
    pub id: String,
    pub level: u32,
    pub description: String,
    pub expected: TaskExpectation,
}

impl TaskRow {
    pub fn to_task(&self) -> Task {
        Task {
            description: self.description.clone(),
            expected: Some(self.expected.clone()),
            level: self.level,
        }
    }
}

/// Composite ids with their constituent letters (b, d, g, p, w).
const COMPOSITE_IDS: &[&str] = &[
    "bg", "pg", "bw", "pw", "dw", "bpg", "dgw", "bdg", "pgw", "bpw", "bdgw", "bpgw", "dpgw",
    "bdpw", "bdpg",
];

/// Register size shared by every composite task.
const COMPOSITE_N: u32 = 3;

fn letter_algorithm(letter: char) -> Option<Algorithm> {
    match letter {
        'b' => Some(Algorithm::Bv),
        'd' => Some(Algorithm::Dj),
        'g' => Some(Algorithm::Grover),
        'p' => Some(Algorithm::Pe),
        'w' => Some(Algorithm::Wstate),
        _ => None,
    }
}

/// Recovers (level, algorithms) from a task id: level-1 ids look like
/// `bv-04`; composite ids are their constituent letters in order.
pub fn parse_task_id(id: &str) -> Result<(u32, Vec<Algorithm>), BenchError> {
    if let Some((prefix, _)) = id.split_once('-') {
        let algorithm = prefix
            .parse::<Algorithm>()
            .map_err(|_| BenchError::Corpus(format!("unrecognized task id {id:?}")))?;
        return Ok((1, vec![algorithm]));
    }
    let mut algorithms = Vec::new();
    for letter in id.chars() {
        let algorithm = letter_algorithm(letter)
            .ok_or_else(|| BenchError::Corpus(format!("unrecognized task id {id:?}")))?;
        algorithms.push(algorithm);
    }
    if algorithms.is_empty() {
        return Err(BenchError::Corpus("empty task id".to_string()));
    }
    Ok((algorithms.len() as u32, algorithms))
}

fn composite_description(algorithms: &[Algorithm], n: u32) -> String {
    let count = match algorithms.len() {
        2 => "two",
        3 => "three",
        _ => "four",
    };
    let mut stages = String::new();
    for (i, algorithm) in algorithms.iter().enumerate() {
        let connective = if i == 0 {
            "first"
        } else if i == algorithms.len() - 1 {
            "finally"
        } else {
            "then"
        };
        if i > 0 {
            stages.push_str("; ");
        }
        stages.push_str(connective);
        stages.push_str(", ");
        stages.push_str(goal_phrase(*algorithm));
    }
    format!("On {n} qubits, complete {count} stages in one session: {stages}.")
}

/// The full 70-row benchmark corpus: 55 level-1 tasks (5 algorithms, sizes
/// 2 through 12) plus the 15 composite tasks.
pub fn build_rows() -> Vec<TaskRow> {
    let mut rows = Vec::new();
    for algorithm in Algorithm::ALL {
        let (lo, hi) = algorithm.n_range();
        for n in lo..=hi {
            rows.push(TaskRow {
                id: format!("{}-{n:02}", algorithm.name()),
                level: 1,
                description: task_description(algorithm, n),
                expected: TaskExpectation { algorithms: vec![algorithm], n },
            });
        }
    }
    for id in COMPOSITE_IDS {
        let algorithms: Vec<Algorithm> =
            id.chars().map(|c| letter_algorithm(c).expect("composite letters")).collect();
        rows.push(TaskRow {
            id: id.to_string(),
            level: algorithms.len() as u32,
            description: composite_description(&algorithms, COMPOSITE_N),
            expected: TaskExpectation { algorithms, n: COMPOSITE_N },
        });
    }
    rows
}

/// Confirms every row is solvable: for each constituent algorithm, the
/// deterministic generator's program must pass the row's own oracle check.
pub fn verify_rows(rows: &[TaskRow]) -> Result<(), BenchError> {
    for row in rows {
        for &algorithm in &row.expected.algorithms {
            let (lo, hi) = algorithm.n_range();
            if !(lo..=hi).contains(&row.expected.n) {
                return Err(BenchError::Corpus(format!(
                    "task {:?}: size {} is outside [{lo}, {hi}] for {algorithm}",
                    row.id, row.expected.n
                )));
            }
            let spec = random_task(algorithm, row.expected.n, 0);
            let generated = reference_program(&spec)
                .map_err(|e| BenchError::Corpus(format!("task {:?}: {e}", row.id)))?;
            let verdict = check(&spec, &generated.main_qasm);
            if !verdict.functional_pass {
                return Err(BenchError::Corpus(format!(
                    "task {:?} is not solvable by its own generator: {}",
                    row.id,
                    verdict.failure_reason.unwrap_or_default()
                )));
            }
        }
    }
    Ok(())
}

/// Hex SHA-256 over the serialized rows, echoed into reports so a corpus
/// edit is visible in every downstream artifact.
pub fn corpus_hash(rows: &[TaskRow]) -> String {
    let bytes = serde_json::to_vec(rows).expect("rows serialize");
    let digest = Sha256::digest(&bytes);
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Builds, verifies, and writes the corpus file into `dir`.
pub fn build_corpus(dir: &Path) -> Result<Vec<TaskRow>, BenchError> {
    let rows = build_rows();
    verify_rows(&rows)?;
    fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(&rows)?;
    text.push('\n');
    fs::write(dir.join(CORPUS_FILE), text)?;
    Ok(rows)
}

pub fn load_corpus_file(path: &Path) -> Result<Vec<TaskRow>, BenchError> {
    let text = fs::read_to_string(path)
        .map_err(|e| BenchError::Corpus(format!("cannot read {}: {e}", path.display())))?;
    let rows: Vec<TaskRow> = serde_json::from_str(&text)?;
    Ok(rows)
}

/// pass@k: the probability that at least one of k samples drawn without
/// replacement from n_t trials with n successes is a success, computed in
/// the overflow-free product form.
pub fn pass_at_k(n_t: u32, n: u32, k: u32) -> Result<f64, BenchError> {
    if n > n_t {
        return Err(BenchError::DomainError(format!(
            "successes n = {n} exceed trials n_t = {n_t}"
        )));
    }
    if k < 1 || k > n_t {
        return Err(BenchError::DomainError(format!(
            "k = {k} must lie in [1, n_t = {n_t}]"
        )));
    }
    if n_t - n < k {
        return Ok(1.0);
    }
    let mut all_fail = 1.0f64;
    for i in 0..k {
        all_fail *= (n_t - n - i) as f64 / (n_t - i) as f64;
    }
    Ok(1.0 - all_fail)
}

/// The static few-shot prompt: the task text, the retrieved examples, and
/// a one-line request. No analysis, no section structure, no reflection.
pub fn static_prompt(description: &str, examples: &[&ExampleRecord]) -> String {
    let mut out = String::new();
    out.push_str(description);
    out.push('\n');
    for (i, example) in examples.iter().enumerate() {
        out.push_str(&format!(
            "\nExample {} ({}):\n```qasm\n{}```\n",
            i + 1,
            example.description,
            example.qasm
        ));
    }
    out.push_str("\nRespond with a single fenced code block containing only the program.\n");
    out
}

/// Runs the static scheme for one sample: `candidates` independent
/// generations from one fixed prompt, no feedback of any kind. The sample
/// passes if any candidate passes.
pub fn run_static(
    gateway: &Gateway,
    index: &Index,
    task: &Task,
    spec: &TaskSpec,
    shots: usize,
    candidates: u32,
) -> Outcome {
    let examples = index.retrieve(&task.description, shots);
    let prompt = static_prompt(&task.description, &examples);
    let params = GenerationParams::default();
    let mut attempts = Vec::new();
    let mut final_program: Option<String> = None;
    for candidate in 0..candidates.max(1) {
        let messages = [prompts::system_message(), ChatMessage::user(prompt.clone())];
        let response = match gateway.complete("coder", &messages, &params) {
            Ok(message) => message.content,
            Err(e) => {
                return static_failure(attempts, format!("coding call failed: {e}"));
            }
        };
        let program = extract_program(&response);
        let verdict = check(spec, &program);
        if verdict.functional_pass && final_program.is_none() {
            final_program = Some(program.clone());
        }
        attempts.push(Attempt {
            coder: CoderKind::Static,
            candidate_index: candidate,
            reflection_index: 0,
            prompt: prompt.clone(),
            plan: None,
            plan_error: None,
            program,
            verdict,
            guidance: None,
        });
    }
    match final_program {
        Some(program) => Outcome {
            status: RunStatus::Success,
            final_program: Some(program),
            coder_used: CoderUsed::Static,
            attempts,
            failure_note: None,
            subtasks: vec![],
            transcript_ref: TRANSCRIPT_FILE.to_string(),
        },
        None => static_failure(attempts, "no candidate passed the functional check".to_string()),
    }
}

fn static_failure(attempts: Vec<Attempt>, note: String) -> Outcome {
    Outcome {
        status: RunStatus::Failure,
        final_program: None,
        coder_used: CoderUsed::Static,
        attempts,
        failure_note: Some(note),
        subtasks: vec![],
        transcript_ref: TRANSCRIPT_FILE.to_string(),
    }
}

/// One completed (task, sample) evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub task_id: String,
    pub sample_index: u32,
    pub seed: u64,
    /// Artifact directory for this sample, relative to the output dir.
    pub outcome_ref: String,
    pub syntax_pass: bool,
    pub functional_pass: bool,
    pub wall_ms: u64,
    pub gateway_calls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub config: BenchmarkConfig,
    pub corpus_hash: String,
}

fn load_records(path: &Path) -> Result<Vec<RunRecord>, BenchError> {
    if !path.exists() {
        return Ok(vec![]);
    }
    let text = fs::read_to_string(path)?;
    let mut records = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(line)?);
    }
    Ok(records)
}

fn select_rows(rows: Vec<TaskRow>, ids: &[String]) -> Result<Vec<TaskRow>, BenchError> {
    if ids.is_empty() {
        return Ok(rows);
    }
    let known: HashSet<&str> = rows.iter().map(|r| r.id.as_str()).collect();
    for id in ids {
        if !known.contains(id.as_str()) {
            return Err(BenchError::Config(format!("unknown task id {id:?}")));
        }
    }
    let wanted: HashSet<&str> = ids.iter().map(|s| s.as_str()).collect();
    Ok(rows.into_iter().filter(|r| wanted.contains(r.id.as_str())).collect())
}

fn run_sample(
    backend: &Arc<dyn ChatBackend>,
    index: &Index,
    config: &BenchmarkConfig,
    row: &TaskRow,
    sample: u32,
) -> RunRecord {
    let seed = config.base_seed + sample as u64;
    let gateway = Gateway::new(Arc::clone(backend));
    let orchestrator = Orchestrator::new(&gateway, index);
    let task = row.to_task();
    let dynamic_budget = config.resolved_dynamic_budget();
    let tools_budget = config.resolved_tools_budget();
    let spec = orchestrator.test_agent(&task, seed);
    let start = Instant::now();
    let outcome = match config.scheme {
        Scheme::Static => match &spec {
            Ok(spec) => run_static(
                &gateway,
                index,
                &task,
                spec,
                config.shots as usize,
                dynamic_budget.candidates,
            ),
            Err(note) => static_failure(vec![], note.clone()),
        },
        Scheme::Dynamic => orchestrator.dynamic_run(&task, &dynamic_budget, seed),
        Scheme::Tools => orchestrator.tools_run(&task, &tools_budget, seed),
        Scheme::Qagent => orchestrator.solve(&task, &dynamic_budget, &tools_budget, seed),
    };
    let wall_ms = start.elapsed().as_millis() as u64;
    let outcome_ref = format!("artifacts/{}/s{sample}", row.id);
    let oracle_include = spec
        .ok()
        .and_then(|s| oracle_artifacts(s.n, &s.oracle).ok())
        .and_then(|(include, _)| include);
    let artifact_dir = config.output_dir.join(&outcome_ref);
    if let Err(e) =
        write_artifacts(&artifact_dir, &outcome, &gateway.transcript(), oracle_include.as_deref())
    {
        eprintln!("warning: artifacts for {} sample {sample} not written: {e}", row.id);
    }
    RunRecord {
        task_id: row.id.clone(),
        sample_index: sample,
        seed,
        outcome_ref,
        syntax_pass: outcome.syntax_credit(),
        functional_pass: outcome.succeeded(),
        wall_ms,
        gateway_calls: gateway.calls(),
    }
}

/// Runs every missing (task, sample) pair of the configured sweep,
/// appending records as they complete. Existing records are honored
/// (resume); per-sample failures are recorded, never fatal. Returns the
/// complete record set sorted by (task, sample).
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<Vec<RunRecord>, BenchError> {
    config.validate()?;
    let rows = load_corpus_file(&config.corpus)?;
    let hash = corpus_hash(&rows);
    let selected = select_rows(rows, &config.tasks)?;
    fs::create_dir_all(&config.output_dir)?;
    let meta = RunMeta { config: config.clone(), corpus_hash: hash };
    let mut meta_text = serde_json::to_string_pretty(&meta)?;
    meta_text.push('\n');
    fs::write(config.output_dir.join(META_FILE), meta_text)?;

    let backend = config.backend.build()?;
    let index = build_index(example_corpus()).expect("the built-in example corpus is valid");
    let records_path = config.output_dir.join(RECORDS_FILE);
    let existing = load_records(&records_path)?;
    let done: HashSet<(String, u32)> =
        existing.iter().map(|r| (r.task_id.clone(), r.sample_index)).collect();

    let mut pending = VecDeque::new();
    for row in &selected {
        for sample in 0..config.n_t {
            if !done.contains(&(row.id.clone(), sample)) {
                pending.push_back((row.clone(), sample));
            }
        }
    }

    let queue = Mutex::new(pending);
    let (tx, rx) = mpsc::channel::<RunRecord>();
    let mut file = fs::OpenOptions::new().create(true).append(true).open(&records_path)?;
    let mut new_records = Vec::new();

    thread::scope(|scope| -> Result<(), BenchError> {
        let queue = &queue;
        let backend = &backend;
        let index = &index;
        for _ in 0..config.parallelism {
            let tx = tx.clone();
            scope.spawn(move || loop {
                let item = queue.lock().expect("work queue").pop_front();
                let Some((row, sample)) = item else { break };
                let record = run_sample(backend, index, config, &row, sample);
                if tx.send(record).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for record in rx {
            let mut line = serde_json::to_string(&record)?;
            line.push('\n');
            file.write_all(line.as_bytes())?;
            file.flush()?;
            new_records.push(record);
        }
        Ok(())
    })?;

    let mut all = existing;
    all.extend(new_records);
    all.sort_by(|a, b| (&a.task_id, a.sample_index).cmp(&(&b.task_id, b.sample_index)));
    Ok(all)
}

/// Loads what a report needs from a run directory.
pub fn load_run_dir(dir: &Path) -> Result<(Vec<RunRecord>, RunMeta), BenchError> {
    let meta_text = fs::read_to_string(dir.join(META_FILE))
        .map_err(|e| BenchError::Config(format!("cannot read {META_FILE}: {e}")))?;
    let meta: RunMeta = serde_json::from_str(&meta_text)?;
    let records = load_records(&dir.join(RECORDS_FILE))?;
    Ok((records, meta))
}

/// One reported (task, k) line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub task_id: String,
    pub level: u32,
    /// Constituent algorithm names joined with `+`.
    pub algorithms: String,
    pub k: u32,
    pub pass_syntax: f64,
    pub pass_functional: f64,
    /// Records actually available for the task.
    pub n_t: u32,
}

/// Mean of per-task pass rates over a group of tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub group: String,
    pub k: u32,
    pub tasks: u32,
    pub pass_syntax: f64,
    pub pass_functional: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scheme: Scheme,
    pub backend: String,
    pub n_t: u32,
    pub k: Vec<u32>,
    pub corpus_hash: String,
    pub rows: Vec<ReportRow>,
    pub per_algorithm: Vec<AggregateRow>,
    pub overall: Vec<AggregateRow>,
    pub warnings: Vec<String>,
}

/// Recomputes all pass rates from the records; task identity and grouping
/// come from the task ids, run metadata only decorates the output.
pub fn build_report(records: &[RunRecord], meta: &RunMeta) -> Result<Report, BenchError> {
    let mut ks = meta.config.k.clone();
    ks.sort_unstable();
    ks.dedup();

    let mut warnings = Vec::new();
    let mut by_task: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    let mut seen: HashSet<(&str, u32)> = HashSet::new();
    for record in records {
        if !seen.insert((record.task_id.as_str(), record.sample_index)) {
            warnings.push(format!(
                "duplicate record for task {:?} sample {} ignored",
                record.task_id, record.sample_index
            ));
            continue;
        }
        by_task.entry(record.task_id.as_str()).or_default().push(record);
    }
    if by_task.is_empty() {
        warnings.push("incomplete records: no records found".to_string());
    }

    let mut rows = Vec::new();
    for (task_id, task_records) in &by_task {
        let (level, algorithms) = match parse_task_id(task_id) {
            Ok(parsed) => parsed,
            Err(e) => {
                warnings.push(format!("skipping {task_id:?}: {e}"));
                continue;
            }
        };
        let count = task_records.len() as u32;
        if count < meta.config.n_t {
            warnings.push(format!(
                "incomplete records for task {task_id:?}: {count} of {}",
                meta.config.n_t
            ));
        }
        let syntax_n = task_records.iter().filter(|r| r.syntax_pass).count() as u32;
        let functional_n = task_records.iter().filter(|r| r.functional_pass).count() as u32;
        let names: Vec<&str> = algorithms.iter().map(|a| a.name()).collect();
        for &k in &ks {
            if k > count {
                warnings.push(format!(
                    "task {task_id:?}: k = {k} exceeds the {count} available records"
                ));
                continue;
            }
            rows.push(ReportRow {
                task_id: task_id.to_string(),
                level,
                algorithms: names.join("+"),
                k,
                pass_syntax: pass_at_k(count, syntax_n, k)?,
                pass_functional: pass_at_k(count, functional_n, k)?,
                n_t: count,
            });
        }
    }

    let mut grouped: BTreeMap<(String, u32), Vec<(f64, f64)>> = BTreeMap::new();
    let mut overall_grouped: BTreeMap<u32, Vec<(f64, f64)>> = BTreeMap::new();
    for row in &rows {
        grouped
            .entry((row.algorithms.clone(), row.k))
            .or_default()
            .push((row.pass_syntax, row.pass_functional));
        overall_grouped.entry(row.k).or_default().push((row.pass_syntax, row.pass_functional));
    }
    let mean = |values: &[(f64, f64)]| {
        let count = values.len() as f64;
        let syntax = values.iter().map(|v| v.0).sum::<f64>() / count;
        let functional = values.iter().map(|v| v.1).sum::<f64>() / count;
        (syntax, functional)
    };
    let per_algorithm = grouped
        .iter()
        .map(|((group, k), values)| {
            let (pass_syntax, pass_functional) = mean(values);
            AggregateRow {
                group: group.clone(),
                k: *k,
                tasks: values.len() as u32,
                pass_syntax,
                pass_functional,
            }
        })
        .collect();
    let overall = overall_grouped
        .iter()
        .map(|(k, values)| {
            let (pass_syntax, pass_functional) = mean(values);
            AggregateRow {
                group: "all".to_string(),
                k: *k,
                tasks: values.len() as u32,
                pass_syntax,
                pass_functional,
            }
        })
        .collect();

    Ok(Report {
        scheme: meta.config.scheme,
        backend: meta.config.backend.label(),
        n_t: meta.config.n_t,
        k: ks,
        corpus_hash: meta.corpus_hash.clone(),
        rows,
        per_algorithm,
        overall,
        warnings,
    })
}

/// Fixed-schema CSV, one line per (task, k).
pub fn render_csv(report: &Report) -> String {
    let mut out =
        String::from("task_id,level,algorithms,k,pass_syntax,pass_functional,n_t,scheme,backend\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.6},{},{},{}\n",
            row.task_id,
            row.level,
            row.algorithms,
            row.k,
            row.pass_syntax,
            row.pass_functional,
            row.n_t,
            report.scheme,
            report.backend
        ));
    }
    out
}

/// Writes `report.csv` and `report.json` into `dir`.
pub fn write_report(dir: &Path, report: &Report) -> Result<(), BenchError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.csv"), render_csv(report))?;
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(dir.join("report.json"), json)?;
    Ok(())
}

fn fence_qasm(text: &str) -> String {
    format!("```qasm\n{text}```")
}

fn fence_json(value: &serde_json::Value) -> String {
    format!("```json\n{}\n```", serde_json::to_string(value).expect("plan serializes"))
}

/// Scripted rules that answer every prompt of the given corpus rows
/// correctly: analysis notes, per-task reference programs, and subtask
/// decompositions for composite rows. Drives offline end-to-end runs of
/// the static, dynamic, and qagent schemes.
pub fn always_correct_rules(rows: &[TaskRow]) -> Vec<(String, String)> {
    let mut rules: Vec<(String, String)> = vec![
        (
            "revised strategy for the next attempt".to_string(),
            "Correct the reported failure and regenerate.".to_string(),
        ),
        (
            "revised strategy for the next plan".to_string(),
            "Pick the generator matching the task.".to_string(),
        ),
        (
            "Summarize the approach".to_string(),
            "Construct the circuit directly from the standard recipe.".to_string(),
        ),
    ];
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut coding_rule = |rules: &mut Vec<(String, String)>, algorithm: Algorithm, n: u32| {
        let description = task_description(algorithm, n);
        if seen.insert(description.clone()) {
            let program = reference_program(&random_task(algorithm, n, 0))
                .expect("corpus sizes are generable")
                .main_qasm;
            rules.push((description, fence_qasm(&program)));
        }
    };
    for row in rows {
        if row.level == 1 {
            coding_rule(&mut rules, row.expected.algorithms[0], row.expected.n);
        } else {
            let subtasks: Vec<serde_json::Value> = row
                .expected
                .algorithms
                .iter()
                .map(|a| {
                    serde_json::json!({
                        "description": task_description(*a, row.expected.n),
                        "algorithm": a.name(),
                    })
                })
                .collect();
            rules.push((
                row.description.clone(),
                fence_json(&serde_json::Value::Array(subtasks)),
            ));
            for &algorithm in &row.expected.algorithms {
                coding_rule(&mut rules, algorithm, row.expected.n);
            }
        }
    }
    rules
}

/// Scripted rules answering planning prompts with a correct single-call
/// generator plan per level-1 row. Drives offline runs of the tools scheme.
pub fn always_correct_plan_rules(rows: &[TaskRow]) -> Vec<(String, String)> {
    let mut rules: Vec<(String, String)> = vec![(
        "revised strategy for the next plan".to_string(),
        "Pick the generator matching the task.".to_string(),
    )];
    for row in rows.iter().filter(|r| r.level == 1) {
        let algorithm = row.expected.algorithms[0];
        let n = row.expected.n;
        let ones = "1".repeat(n as usize);
        let args = match algorithm {
            Algorithm::Bv => serde_json::json!({"n": n, "secret": ones}),
            Algorithm::Dj => serde_json::json!({"n": n, "kind": "constant", "value": 1}),
            Algorithm::Grover => serde_json::json!({"n": n, "marked": [ones]}),
            Algorithm::Pe => serde_json::json!({"t": n, "k": 1}),
            Algorithm::Wstate => serde_json::json!({"n": n}),
        };
        let plan = serde_json::json!({
            "rationale": "one generator call covers the task",
            "calls": [{"name": format!("gen_{}", algorithm.name()), "args": args}],
            "assembly": "single-result",
        });
        rules.push((row.description.clone(), fence_json(&plan)));
    }
    rules
}
