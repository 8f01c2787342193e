//! The synthesis pipelines: a few-shot coder driven by retrieved examples,
//! a plan-and-execute coder driven by the tool catalog, hybrid escalation
//! from the first to the second, and decomposition of multi-algorithm
//! requests into single-algorithm subtasks.
//!
//! Every pipeline scores candidates with the task's own oracle checker and
//! feeds failures back through a reflection call; the first functional pass
//! ends the run with no further model calls.

pub mod extract;
pub mod prompts;

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::{ChatMessage, Gateway, GatewayError, GenerationParams};
use crate::retrieval::{classify, Classification, ExampleRecord, Index};
use crate::sim::OracleBinding;
use crate::toolset::{catalog, invoke, Algorithm, ToolError, ToolOutput};
use crate::verify::{check, random_task, TaskSpec, Verdict};

pub use extract::{extract_program, parse_qubit_count};

/// Reflection prompts include at most this many prior attempts verbatim.
pub const MAX_HISTORY_ATTEMPTS: usize = 3;
/// Programs quoted inside reflection prompts are capped at this many lines.
pub const MAX_PROGRAM_LINES: usize = 200;
/// Default number of examples retrieved for the few-shot prompt.
pub const RETRIEVAL_K: usize = 3;
/// File name recorded in outcomes for the per-task transcript artifact.
pub const TRANSCRIPT_FILE: &str = "transcript.jsonl";

/// What a benchmark row knows about a task before any model runs: the
/// algorithm families involved and the register size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskExpectation {
    pub algorithms: Vec<Algorithm>,
    pub n: u32,
}

/// One problem statement handed to the orchestrator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub description: String,
    /// Present for benchmark tasks; free-form user input leaves it empty
    /// and the pipeline identifies the algorithm and size from the text.
    pub expected: Option<TaskExpectation>,
    /// Number of constituent algorithms (1 for plain tasks).
    pub level: u32,
}

impl Task {
    pub fn free_form(description: impl Into<String>) -> Self {
        Task { description: description.into(), expected: None, level: 1 }
    }
}

/// Generation effort limits for one coder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub candidates: u32,
    pub reflection_rounds: u32,
}

impl Budget {
    /// Default for library use: one candidate, up to three reflections.
    pub fn library_default() -> Self {
        Budget { candidates: 1, reflection_rounds: 3 }
    }

    /// Default for benchmark scheme evaluation.
    pub fn benchmark_default() -> Self {
        Budget { candidates: 3, reflection_rounds: 5 }
    }
}

/// Which pipeline produced an attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoderKind {
    Static,
    Dynamic,
    Tools,
}

/// How the tool outputs of a plan combine into one program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Assembly {
    /// The last call's output is the program.
    SingleResult,
    /// All outputs joined top to bottom.
    ConcatenateInOrder,
}

fn default_args() -> serde_json::Value {
    serde_json::Value::Object(serde_json::Map::new())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolCall {
    pub name: String,
    #[serde(default = "default_args")]
    pub args: serde_json::Value,
}

/// A schema-validated tool-call plan parsed from a model response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    #[serde(default)]
    pub rationale: String,
    pub calls: Vec<ToolCall>,
    pub assembly: Assembly,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("plan parse error: {0}")]
    PlanParseError(String),
    #[error("unknown tool: {0}")]
    UnknownTool(String),
    #[error("call {call} violates an argument constraint: {message}")]
    ArgConstraintViolation { call: usize, message: String },
    #[error("call {call} failed during execution: {message}")]
    ExecutionError { call: usize, message: String },
}

/// One generate-and-check step, fully serializable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub coder: CoderKind,
    pub candidate_index: u32,
    pub reflection_index: u32,
    /// The coding prompt (dynamic) or planning prompt (tools) that drove
    /// this attempt.
    pub prompt: String,
    pub plan: Option<Plan>,
    pub plan_error: Option<String>,
    pub program: String,
    pub verdict: Verdict,
    /// Reflection guidance produced after this attempt, if any.
    pub guidance: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Success,
    Failure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoderUsed {
    Static,
    Dynamic,
    Tools,
    HybridEscalated,
}

/// Verified result for one decomposed subtask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubtaskReport {
    pub description: String,
    pub algorithm: Algorithm,
    pub outcome: Outcome,
}

/// The full result of one task run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub status: RunStatus,
    pub final_program: Option<String>,
    pub coder_used: CoderUsed,
    pub attempts: Vec<Attempt>,
    /// Explicit reason when the run failed outside the generate-and-check
    /// loop (unidentifiable task, gateway breakdown, bad decomposition).
    pub failure_note: Option<String>,
    /// Per-subtask results when the task was decomposed; empty otherwise.
    pub subtasks: Vec<SubtaskReport>,
    /// File name of the transcript artifact accompanying this outcome.
    pub transcript_ref: String,
}

impl Outcome {
    pub fn succeeded(&self) -> bool {
        self.status == RunStatus::Success
    }

    /// Whether the run produced at least one syntactically valid program
    /// (composites: every subtask did). Implied by a functional success,
    /// so per-sample syntax credit never falls below functional credit.
    pub fn syntax_credit(&self) -> bool {
        if !self.subtasks.is_empty() {
            return self.subtasks.iter().all(|s| s.outcome.syntax_credit());
        }
        self.attempts.iter().any(|a| a.verdict.syntax_pass)
    }
}

fn failure_outcome(coder: CoderUsed, attempts: Vec<Attempt>, note: impl Into<String>) -> Outcome {
    Outcome {
        status: RunStatus::Failure,
        final_program: None,
        coder_used: coder,
        attempts,
        failure_note: Some(note.into()),
        subtasks: vec![],
        transcript_ref: TRANSCRIPT_FILE.to_string(),
    }
}

/// Prompt-shape variations for ablation studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AblationMode {
    Full,
    /// No examples section; the analysis call summarizes the task alone.
    ZeroShot,
    /// No analysis section and no analysis call.
    NoAnalysis,
    /// Full prompt, but the reflection loop is disabled.
    NoReflection,
}

/// Parses and name-validates a plan from a model response. Argument
/// constraints are enforced at execution time by the tool dispatcher.
pub fn parse_plan(response: &str) -> Result<Plan, PlanError> {
    let payload = extract::extract_json_payload(response);
    let plan: Plan = serde_json::from_str(&payload)
        .map_err(|e| PlanError::PlanParseError(e.to_string()))?;
    if plan.calls.is_empty() {
        return Err(PlanError::PlanParseError("the plan contains no calls".to_string()));
    }
    let known: Vec<String> = catalog().into_iter().map(|t| t.name).collect();
    for call in &plan.calls {
        if !known.iter().any(|n| n == &call.name) {
            return Err(PlanError::UnknownTool(call.name.clone()));
        }
    }
    Ok(plan)
}

/// Runs a plan's calls in order and assembles the program text; bindings
/// from generator calls are merged by gate name, first definition winning.
pub fn execution_agent(plan: &Plan) -> Result<(String, Vec<OracleBinding>), PlanError> {
    let mut texts = Vec::new();
    let mut bindings: Vec<OracleBinding> = Vec::new();
    for (index, call) in plan.calls.iter().enumerate() {
        let output = invoke(&call.name, &call.args).map_err(|e| match e {
            ToolError::UnknownTool(name) => PlanError::UnknownTool(name),
            ToolError::BadArg { param, reason } => PlanError::ArgConstraintViolation {
                call: index,
                message: format!("argument `{param}` {reason}"),
            },
            ToolError::Gen(e) => {
                PlanError::ExecutionError { call: index, message: e.to_string() }
            }
        })?;
        if let ToolOutput::Generation(generation) = &output {
            for binding in &generation.bindings {
                if !bindings.iter().any(|b| b.gate_name == binding.gate_name) {
                    bindings.push(binding.clone());
                }
            }
        }
        texts.push(output.qasm_text().to_string());
    }
    let text = match plan.assembly {
        Assembly::SingleResult => texts.last().cloned().unwrap_or_default(),
        Assembly::ConcatenateInOrder => texts.join("\n"),
    };
    Ok((text, bindings))
}

/// Shared services for one task run: the model gateway, the example index,
/// sampling parameters, and the ablation mode.
pub struct Orchestrator<'a> {
    gateway: &'a Gateway,
    index: &'a Index,
    params: GenerationParams,
    ablation: AblationMode,
    retrieval_k: usize,
}

impl<'a> Orchestrator<'a> {
    pub fn new(gateway: &'a Gateway, index: &'a Index) -> Self {
        Orchestrator {
            gateway,
            index,
            params: GenerationParams::default(),
            ablation: AblationMode::Full,
            retrieval_k: RETRIEVAL_K,
        }
    }

    pub fn with_ablation(mut self, ablation: AblationMode) -> Self {
        self.ablation = ablation;
        self
    }

    pub fn with_params(mut self, params: GenerationParams) -> Self {
        self.params = params;
        self
    }

    fn call(&self, agent: &str, prompt: String) -> Result<String, GatewayError> {
        let messages = [prompts::system_message(), ChatMessage::user(prompt)];
        Ok(self.gateway.complete(agent, &messages, &self.params)?.content)
    }

    /// Resolves which algorithm and size a task is about: the expected spec
    /// when present, else the keyword classifier, else one model call.
    fn identify(&self, task: &Task) -> Result<(Algorithm, u32), String> {
        if let Some(expected) = &task.expected {
            match expected.algorithms.as_slice() {
                [algorithm] => return Ok((*algorithm, expected.n)),
                _ => {
                    return Err(
                        "the task spans multiple algorithms and must be decomposed first"
                            .to_string(),
                    )
                }
            }
        }
        let algorithm = match classify(&task.description) {
            Classification::Ranked(scores) => scores[0].0,
            Classification::Unknown => {
                let reply = self
                    .call("classifier", prompts::classification_prompt(&task.description))
                    .map_err(|e| format!("classification call failed: {e}"))?;
                let token = reply
                    .to_lowercase()
                    .split(|c: char| !c.is_alphanumeric())
                    .find(|s| !s.is_empty())
                    .unwrap_or_default()
                    .to_string();
                token.parse::<Algorithm>().map_err(|_| {
                    format!("could not identify the algorithm family (model said: {})", reply.trim())
                })?
            }
        };
        let n = parse_qubit_count(&task.description)
            .ok_or_else(|| "could not determine the qubit count from the task text".to_string())?;
        Ok((algorithm, n))
    }

    /// Fixes the oracle instance every attempt of this run is scored
    /// against. Deterministic in (task, seed).
    pub fn test_agent(&self, task: &Task, seed: u64) -> Result<TaskSpec, String> {
        let (algorithm, n) = self.identify(task)?;
        let (lo, hi) = algorithm.n_range();
        if !(lo..=hi).contains(&n) {
            return Err(format!(
                "{n} qubits is outside the supported range [{lo}, {hi}] for {algorithm}"
            ));
        }
        Ok(random_task(algorithm, n, seed))
    }

    fn prompt_parts(
        &self,
        task: &Task,
    ) -> Result<(Vec<&'a ExampleRecord>, Option<String>), GatewayError> {
        let examples = if self.ablation == AblationMode::ZeroShot {
            vec![]
        } else {
            self.index.retrieve(&task.description, self.retrieval_k)
        };
        let analysis = if self.ablation == AblationMode::NoAnalysis {
            None
        } else {
            Some(self.call("analysis", prompts::analysis_request(&task.description, &examples))?)
        };
        Ok((examples, analysis))
    }

    /// The composite coding prompt for a task, as the first attempt sees
    /// it. Performs the analysis model call unless ablated away.
    pub fn prompt_agent(&self, task: &Task, spec: &TaskSpec) -> Result<String, GatewayError> {
        let (examples, analysis) = self.prompt_parts(task)?;
        Ok(prompts::coding_prompt(&task.description, spec, &examples, analysis.as_deref(), &[]))
    }

    /// Few-shot pipeline: retrieve, prompt, generate, check, reflect.
    pub fn dynamic_run(&self, task: &Task, budget: &Budget, seed: u64) -> Outcome {
        match self.test_agent(task, seed) {
            Ok(spec) => self.dynamic_with_spec(task, budget, &spec),
            Err(note) => failure_outcome(CoderUsed::Dynamic, vec![], note),
        }
    }

    fn dynamic_with_spec(&self, task: &Task, budget: &Budget, spec: &TaskSpec) -> Outcome {
        let mut attempts = Vec::new();
        let (examples, analysis) = match self.prompt_parts(task) {
            Ok(parts) => parts,
            Err(e) => {
                return failure_outcome(
                    CoderUsed::Dynamic,
                    attempts,
                    format!("prompt construction failed: {e}"),
                )
            }
        };
        let rounds = if self.ablation == AblationMode::NoReflection {
            0
        } else {
            budget.reflection_rounds
        };
        for candidate in 0..budget.candidates.max(1) {
            let mut guidance_chain: Vec<String> = Vec::new();
            for reflection in 0..=rounds {
                let prompt = prompts::coding_prompt(
                    &task.description,
                    spec,
                    &examples,
                    analysis.as_deref(),
                    &guidance_chain,
                );
                let response = match self.call("coder", prompt.clone()) {
                    Ok(r) => r,
                    Err(e) => {
                        return failure_outcome(
                            CoderUsed::Dynamic,
                            attempts,
                            format!("coding call failed: {e}"),
                        )
                    }
                };
                let program = extract_program(&response);
                let verdict = check(spec, &program);
                let passed = verdict.functional_pass;
                attempts.push(Attempt {
                    coder: CoderKind::Dynamic,
                    candidate_index: candidate,
                    reflection_index: reflection,
                    prompt,
                    plan: None,
                    plan_error: None,
                    program: program.clone(),
                    verdict,
                    guidance: None,
                });
                if passed {
                    return Outcome {
                        status: RunStatus::Success,
                        final_program: Some(program),
                        coder_used: CoderUsed::Dynamic,
                        attempts,
                        failure_note: None,
                        subtasks: vec![],
                        transcript_ref: TRANSCRIPT_FILE.to_string(),
                    };
                }
                if reflection < rounds {
                    let reflection_prompt =
                        prompts::dynamic_reflection_prompt(&task.description, &attempts);
                    let guidance = match self.call("reflection", reflection_prompt) {
                        Ok(g) => g,
                        Err(e) => {
                            return failure_outcome(
                                CoderUsed::Dynamic,
                                attempts,
                                format!("reflection call failed: {e}"),
                            )
                        }
                    };
                    attempts.last_mut().expect("attempt just pushed").guidance =
                        Some(guidance.clone());
                    guidance_chain.push(guidance);
                }
            }
        }
        failure_outcome(
            CoderUsed::Dynamic,
            attempts,
            "budget exhausted without a functional pass",
        )
    }

    /// Plan-and-execute pipeline over the tool catalog.
    pub fn tools_run(&self, task: &Task, budget: &Budget, seed: u64) -> Outcome {
        match self.test_agent(task, seed) {
            Ok(spec) => self.tools_with_spec(task, budget, &spec),
            Err(note) => failure_outcome(CoderUsed::Tools, vec![], note),
        }
    }

    fn tools_with_spec(&self, task: &Task, budget: &Budget, spec: &TaskSpec) -> Outcome {
        let mut attempts = Vec::new();
        let descriptors = catalog();
        let rounds = if self.ablation == AblationMode::NoReflection {
            0
        } else {
            budget.reflection_rounds
        };
        for candidate in 0..budget.candidates.max(1) {
            let mut guidance_chain: Vec<String> = Vec::new();
            for reflection in 0..=rounds {
                let prompt =
                    prompts::planning_prompt(&task.description, &descriptors, &guidance_chain);
                let response = match self.call("planner", prompt.clone()) {
                    Ok(r) => r,
                    Err(e) => {
                        return failure_outcome(
                            CoderUsed::Tools,
                            attempts,
                            format!("planning call failed: {e}"),
                        )
                    }
                };
                let (plan, plan_error, program) = match parse_plan(&response) {
                    Ok(plan) => match execution_agent(&plan) {
                        Ok((text, _bindings)) => (Some(plan), None, text),
                        Err(e) => (Some(plan), Some(e.to_string()), String::new()),
                    },
                    Err(e) => (None, Some(e.to_string()), String::new()),
                };
                let verdict = check(spec, &program);
                let passed = verdict.functional_pass;
                attempts.push(Attempt {
                    coder: CoderKind::Tools,
                    candidate_index: candidate,
                    reflection_index: reflection,
                    prompt,
                    plan,
                    plan_error,
                    program: program.clone(),
                    verdict,
                    guidance: None,
                });
                if passed {
                    return Outcome {
                        status: RunStatus::Success,
                        final_program: Some(program),
                        coder_used: CoderUsed::Tools,
                        attempts,
                        failure_note: None,
                        subtasks: vec![],
                        transcript_ref: TRANSCRIPT_FILE.to_string(),
                    };
                }
                if reflection < rounds {
                    let reflection_prompt =
                        prompts::tools_reflection_prompt(&task.description, &attempts);
                    let guidance = match self.call("reflection", reflection_prompt) {
                        Ok(g) => g,
                        Err(e) => {
                            return failure_outcome(
                                CoderUsed::Tools,
                                attempts,
                                format!("reflection call failed: {e}"),
                            )
                        }
                    };
                    attempts.last_mut().expect("attempt just pushed").guidance =
                        Some(guidance.clone());
                    guidance_chain.push(guidance);
                }
            }
        }
        failure_outcome(CoderUsed::Tools, attempts, "budget exhausted without a functional pass")
    }

    /// Few-shot pipeline first; on failure, fall back to the tools
    /// pipeline. Both halves score against the same oracle.
    pub fn hybrid_run(
        &self,
        task: &Task,
        dynamic_budget: &Budget,
        tools_budget: &Budget,
        seed: u64,
    ) -> Outcome {
        let spec = match self.test_agent(task, seed) {
            Ok(spec) => spec,
            Err(note) => return failure_outcome(CoderUsed::Dynamic, vec![], note),
        };
        let dynamic = self.dynamic_with_spec(task, dynamic_budget, &spec);
        if dynamic.succeeded() {
            return dynamic;
        }
        let tools = self.tools_with_spec(task, tools_budget, &spec);
        let mut attempts = dynamic.attempts;
        attempts.extend(tools.attempts);
        Outcome {
            status: tools.status,
            final_program: tools.final_program,
            coder_used: CoderUsed::HybridEscalated,
            attempts,
            failure_note: tools.failure_note.map(|note| format!("after escalation: {note}")),
            subtasks: vec![],
            transcript_ref: TRANSCRIPT_FILE.to_string(),
        }
    }

    /// One model call splitting a task into labeled subtasks.
    pub fn decompose(&self, task: &Task) -> Result<Vec<(String, Algorithm)>, String> {
        #[derive(Deserialize)]
        struct SubtaskJson {
            description: String,
            algorithm: String,
        }
        let response = self
            .call("decomposer", prompts::decomposition_prompt(&task.description))
            .map_err(|e| format!("decomposition call failed: {e}"))?;
        let payload = extract::extract_json_payload(&response);
        let raw: Vec<SubtaskJson> = serde_json::from_str(&payload)
            .map_err(|e| format!("decomposition parse error: {e}"))?;
        if raw.is_empty() {
            return Err("decomposition parse error: the subtask list is empty".to_string());
        }
        let mut subtasks = Vec::new();
        for entry in raw {
            let algorithm = entry
                .algorithm
                .parse::<Algorithm>()
                .map_err(|_| format!("invalid algorithm label: {}", entry.algorithm))?;
            subtasks.push((entry.description, algorithm));
        }
        Ok(subtasks)
    }

    /// Entry point used by the benchmark's full pipeline: decomposes when
    /// the task spans multiple algorithms (by level or by keyword
    /// classification), otherwise runs the hybrid pipeline directly.
    pub fn solve(
        &self,
        task: &Task,
        dynamic_budget: &Budget,
        tools_budget: &Budget,
        seed: u64,
    ) -> Outcome {
        let multi =
            task.level >= 2 || classify(&task.description).labels().len() >= 2;
        if !multi {
            return self.hybrid_run(task, dynamic_budget, tools_budget, seed);
        }

        let subtasks = match self.decompose(task) {
            Ok(s) => s,
            Err(note) => return failure_outcome(CoderUsed::Dynamic, vec![], note),
        };
        if let Some(expected) = &task.expected {
            let want: BTreeSet<Algorithm> = expected.algorithms.iter().copied().collect();
            let got: BTreeSet<Algorithm> = subtasks.iter().map(|(_, a)| *a).collect();
            if want != got {
                return failure_outcome(
                    CoderUsed::Dynamic,
                    vec![],
                    format!(
                        "the decomposition covers {:?} but the task expects {:?}",
                        got.iter().map(|a| a.name()).collect::<Vec<_>>(),
                        want.iter().map(|a| a.name()).collect::<Vec<_>>()
                    ),
                );
            }
        }

        let mut reports = Vec::new();
        let mut attempts = Vec::new();
        let mut escalated = false;
        let mut first_failure: Option<String> = None;
        for (description, algorithm) in subtasks {
            let n = task
                .expected
                .as_ref()
                .map(|e| e.n)
                .or_else(|| parse_qubit_count(&description))
                .or_else(|| parse_qubit_count(&task.description));
            let outcome = match n {
                Some(n) => {
                    let sub_task = Task {
                        description: description.clone(),
                        expected: Some(TaskExpectation { algorithms: vec![algorithm], n }),
                        level: 1,
                    };
                    self.hybrid_run(&sub_task, dynamic_budget, tools_budget, seed)
                }
                None => failure_outcome(
                    CoderUsed::Dynamic,
                    vec![],
                    "could not determine the qubit count for this subtask",
                ),
            };
            if outcome.coder_used != CoderUsed::Dynamic {
                escalated = true;
            }
            if !outcome.succeeded() && first_failure.is_none() {
                first_failure = Some(format!(
                    "subtask `{}` ({}) failed",
                    description,
                    algorithm.name()
                ));
            }
            attempts.extend(outcome.attempts.clone());
            reports.push(SubtaskReport { description, algorithm, outcome });
        }

        let success = first_failure.is_none();
        let final_program = success.then(|| {
            reports
                .iter()
                .filter_map(|r| r.outcome.final_program.clone())
                .collect::<Vec<_>>()
                .join("\n\n")
        });
        Outcome {
            status: if success { RunStatus::Success } else { RunStatus::Failure },
            final_program,
            coder_used: if escalated { CoderUsed::HybridEscalated } else { CoderUsed::Dynamic },
            attempts,
            failure_note: first_failure,
            subtasks: reports,
            transcript_ref: TRANSCRIPT_FILE.to_string(),
        }
    }
}

/// Writes the per-task artifact set: `outcome.json`, `transcript.jsonl`,
/// and, when available, `final.qasm` and `oracle.inc`.
pub fn write_artifacts(
    dir: &Path,
    outcome: &Outcome,
    transcript: &crate::gateway::Transcript,
    oracle_include: Option<&str>,
) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut outcome_json =
        serde_json::to_string_pretty(outcome).map_err(io::Error::other)?;
    outcome_json.push('\n');
    fs::write(dir.join("outcome.json"), outcome_json)?;
    transcript.save(&dir.join(TRANSCRIPT_FILE))?;
    if let Some(program) = &outcome.final_program {
        fs::write(dir.join("final.qasm"), program)?;
    }
    if let Some(include) = oracle_include {
        fs::write(dir.join("oracle.inc"), include)?;
    }
    Ok(())
}
