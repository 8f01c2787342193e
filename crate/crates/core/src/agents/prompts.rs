//! Prompt construction for every agent role. All text templates live here
//! so the structural assertions in tests have one place to point at.

use crate::gateway::ChatMessage;
use crate::retrieval::ExampleRecord;
use crate::toolset::{Algorithm, ParamKind, ToolDescriptor};
use crate::verify::{MeasurementSummary, TaskSpec, Verdict};

use super::{Attempt, MAX_HISTORY_ATTEMPTS, MAX_PROGRAM_LINES};

pub const SYSTEM_PROMPT: &str = "You are an expert OpenQASM 3.0 programmer. \
    Follow the instructions exactly and answer in the requested format.";

pub fn system_message() -> ChatMessage {
    ChatMessage::system(SYSTEM_PROMPT)
}

fn fenced(text: &str) -> String {
    let mut out = String::from("```qasm\n");
    out.push_str(text);
    if !text.ends_with('\n') {
        out.push('\n');
    }
    out.push_str("```\n");
    out
}

fn examples_section(examples: &[&ExampleRecord]) -> String {
    let mut out = String::from("## Examples\n");
    for (i, example) in examples.iter().enumerate() {
        out.push_str(&format!("Example {} ({}):\n", i + 1, example.description));
        out.push_str(&fenced(&example.qasm));
    }
    out
}

/// The request sent to produce the analysis section: one call summarizing
/// the examples (or, zero-shot, the task alone).
pub fn analysis_request(description: &str, examples: &[&ExampleRecord]) -> String {
    let mut out = String::from(
        "Summarize the approach for the task below in a short paragraph: \
         which gates and structure the program needs and why.\n\n## Task\n",
    );
    out.push_str(description);
    out.push('\n');
    if !examples.is_empty() {
        out.push('\n');
        out.push_str(&examples_section(examples));
    }
    out
}

fn oracle_interface(spec: &TaskSpec) -> Option<String> {
    let n = spec.n;
    match spec.algorithm {
        Algorithm::Bv => Some(format!(
            "An include file \"oracle.inc\" provides gate Uf over {n} input qubits followed by \
             one ancilla qubit; it flips the ancilla conditioned on the hidden bit string."
        )),
        Algorithm::Dj => Some(format!(
            "An include file \"oracle.inc\" provides gate Uf over {n} input qubits followed by \
             one ancilla qubit; the function it computes is either constant or balanced."
        )),
        Algorithm::Grover => Some(format!(
            "An include file \"oracle.inc\" provides gate Oracle over the {n} search qubits; it \
             flips the sign of the marked basis states."
        )),
        Algorithm::Pe => Some(
            "An include file \"oracle.inc\" provides gate CU_0 (control qubit, then target \
             qubit) applying the unknown phase, and gate Psi preparing the target eigenstate \
             on one qubit."
                .to_string(),
        ),
        Algorithm::Wstate => None,
    }
}

fn instructions_section(description: &str, spec: &TaskSpec) -> String {
    let mut out = String::from("## Instructions\n");
    out.push_str(description);
    out.push('\n');
    if let Some(interface) = oracle_interface(spec) {
        out.push_str(&interface);
        out.push('\n');
    }
    out.push_str(&format!(
        "Write one OpenQASM 3.0 program solving this task; the main register holds {} qubits.\n\
         Respond with a single fenced code block containing only the program.\n",
        spec.n
    ));
    out
}

/// The composite coding prompt: examples, analysis, instructions, in that
/// order, with ablations dropping their section. Guidance from reflection
/// rounds is appended at the end.
pub fn coding_prompt(
    description: &str,
    spec: &TaskSpec,
    examples: &[&ExampleRecord],
    analysis: Option<&str>,
    guidance: &[String],
) -> String {
    let mut out = String::new();
    if !examples.is_empty() {
        out.push_str(&examples_section(examples));
        out.push('\n');
    }
    if let Some(analysis) = analysis {
        out.push_str("## Analysis\n");
        out.push_str(analysis);
        out.push('\n');
        out.push('\n');
    }
    out.push_str(&instructions_section(description, spec));
    if !guidance.is_empty() {
        out.push_str("\n## Guidance\n");
        for g in guidance {
            out.push_str(g);
            out.push('\n');
        }
    }
    out
}

fn cap_lines(text: &str, max: usize) -> String {
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() <= max {
        return text.to_string();
    }
    let mut out = lines[..max].join("\n");
    out.push_str(&format!("\n... ({} more lines elided)\n", lines.len() - max));
    out
}

/// Human-readable verdict for reflection prompts: diagnostics on syntax
/// failures, failure reason plus a distribution digest on functional ones.
pub fn verdict_report(verdict: &Verdict) -> String {
    if verdict.functional_pass {
        return "passed".to_string();
    }
    let mut out = String::new();
    if !verdict.syntax_pass {
        out.push_str("syntax check failed:\n");
        for diagnostic in &verdict.diagnostics {
            out.push_str(&format!("  {diagnostic}\n"));
        }
    } else {
        out.push_str("functional check failed");
        if let Some(reason) = &verdict.failure_reason {
            out.push_str(&format!(": {reason}"));
        }
        out.push('\n');
    }
    match &verdict.summary {
        MeasurementSummary::Distribution(dist) => {
            let mut entries: Vec<(&String, &f64)> = dist.iter().collect();
            entries.sort_by(|a, b| b.1.partial_cmp(a.1).expect("finite probabilities"));
            let shown: Vec<String> = entries
                .iter()
                .take(8)
                .map(|(k, p)| format!("{k}: {p:.4}"))
                .collect();
            if !shown.is_empty() {
                out.push_str(&format!("measured distribution: {}\n", shown.join(", ")));
            }
        }
        MeasurementSummary::Fidelity(f) => {
            out.push_str(&format!("state fidelity with the target: {f:.6}\n"));
        }
        MeasurementSummary::None => {}
    }
    out
}

fn attempt_history(attempts: &[Attempt]) -> String {
    let start = attempts.len().saturating_sub(MAX_HISTORY_ATTEMPTS);
    let mut out = String::new();
    for (offset, attempt) in attempts[start..].iter().enumerate() {
        out.push_str(&format!(
            "### Attempt {} (candidate {}, reflection {})\n",
            start + offset + 1,
            attempt.candidate_index,
            attempt.reflection_index
        ));
        if attempt.program.is_empty() {
            out.push_str("(no program was extracted)\n");
        } else {
            out.push_str(&fenced(&cap_lines(&attempt.program, MAX_PROGRAM_LINES)));
        }
        out.push_str(&format!("Verification: {}", verdict_report(&attempt.verdict)));
        if !out.ends_with('\n') {
            out.push('\n');
        }
        if let Some(guidance) = &attempt.guidance {
            out.push_str(&format!("Guidance given afterwards: {guidance}\n"));
        }
    }
    out
}

/// Reflection request for the dynamic coder: task, capped recent attempts
/// with verdicts and prior guidance.
pub fn dynamic_reflection_prompt(description: &str, attempts: &[Attempt]) -> String {
    let mut out = String::from(
        "The previous attempt failed verification. Review the history and produce a revised \
         strategy for the next attempt.\n\n## Task\n",
    );
    out.push_str(description);
    out.push_str("\n\n## Attempt history (most recent last)\n");
    out.push_str(&attempt_history(attempts));
    out.push_str("\nProvide revised guidance as plain text.\n");
    out
}

fn param_kind_name(kind: ParamKind) -> &'static str {
    match kind {
        ParamKind::Int => "int",
        ParamKind::Bitstring => "bitstring",
        ParamKind::BitstringSet => "bitstring-set",
        ParamKind::Real => "real",
        ParamKind::Enum => "enum",
        ParamKind::Text => "text",
        ParamKind::TextList => "text-list",
    }
}

/// Planning request: the tool catalog rendered as prose plus the JSON shape
/// the plan must take.
pub fn planning_prompt(description: &str, catalog: &[ToolDescriptor], guidance: &[String]) -> String {
    let mut out = String::from(
        "Plan tool calls that synthesize the requested OpenQASM 3.0 program.\n\n## Task\n",
    );
    out.push_str(description);
    out.push_str("\n\n## Available tools\n");
    for tool in catalog {
        out.push_str(&format!("- {}: {}\n", tool.name, tool.description));
        for param in &tool.params {
            out.push_str(&format!(
                "    {} ({}, {}; {})\n",
                param.name,
                param_kind_name(param.kind),
                param.constraints,
                if param.required { "required" } else { "optional" }
            ));
        }
    }
    out.push_str(
        "\nRespond with a fenced JSON plan of the form\n\
         {\"rationale\": \"...\", \"calls\": [{\"name\": \"...\", \"args\": {...}}], \
         \"assembly\": \"single-result\" or \"concatenate-in-order\"}\n",
    );
    if !guidance.is_empty() {
        out.push_str("\n## Guidance\n");
        for g in guidance {
            out.push_str(g);
            out.push('\n');
        }
    }
    out
}

/// Reflection request for the tools coder; carries the original
/// instruction, the tools used, the generated code, the test logs, and the
/// revision history.
pub fn tools_reflection_prompt(description: &str, attempts: &[Attempt]) -> String {
    let start = attempts.len().saturating_sub(MAX_HISTORY_ATTEMPTS);
    let recent = &attempts[start..];
    let mut out = String::from(
        "The plan-based attempt failed. Review the full history and produce a revised strategy \
         for the next plan.\n\n## Original instruction\n",
    );
    out.push_str(description);

    out.push_str("\n\n## Tools used\n");
    for (offset, attempt) in recent.iter().enumerate() {
        let description = match (&attempt.plan, &attempt.plan_error) {
            (Some(plan), _) => plan
                .calls
                .iter()
                .map(|c| c.name.as_str())
                .collect::<Vec<_>>()
                .join(", "),
            (None, Some(error)) => format!("(no tools ran: {error})"),
            (None, None) => "(none)".to_string(),
        };
        out.push_str(&format!("attempt {}: {}\n", start + offset + 1, description));
    }

    out.push_str("\n## Generated code\n");
    match recent.last() {
        Some(last) if !last.program.is_empty() => {
            out.push_str(&fenced(&cap_lines(&last.program, MAX_PROGRAM_LINES)));
        }
        _ => out.push_str("(no program was produced)\n"),
    }

    out.push_str("\n## Test logs\n");
    for (offset, attempt) in recent.iter().enumerate() {
        out.push_str(&format!("attempt {}: ", start + offset + 1));
        if let Some(error) = &attempt.plan_error {
            out.push_str(&format!("{error}\n"));
        } else {
            let report = verdict_report(&attempt.verdict);
            out.push_str(report.trim_end());
            out.push('\n');
        }
    }

    out.push_str("\n## Revision history\n");
    let mut any = false;
    for (offset, attempt) in recent.iter().enumerate() {
        if let Some(guidance) = &attempt.guidance {
            out.push_str(&format!("attempt {} guidance: {guidance}\n", start + offset + 1));
            any = true;
        }
    }
    if !any {
        out.push_str("(none yet)\n");
    }

    out.push_str("\nProvide revised guidance as plain text.\n");
    out
}

/// Fallback classification request when the keyword table finds nothing.
pub fn classification_prompt(description: &str) -> String {
    format!(
        "Name the algorithm family this task requires. Answer with exactly one of: \
         bv, dj, grover, pe, wstate.\n\n## Task\n{description}\n"
    )
}

/// Decomposition request for multi-algorithm tasks.
pub fn decomposition_prompt(description: &str) -> String {
    format!(
        "Split the task into single-algorithm subtasks, in execution order.\n\n## Task\n\
         {description}\n\nRespond with a fenced JSON list, each entry \
         {{\"description\": \"...\", \"algorithm\": one of \"bv\", \"dj\", \"grover\", \"pe\", \
         \"wstate\"}}. Each subtask description must restate the qubit count.\n"
    )
}
