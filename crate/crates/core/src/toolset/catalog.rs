//! The tool catalog: machine-readable descriptors for every generator and
//! helper, plus the `invoke` dispatcher that validates JSON arguments
//! against the advertised constraints before running anything.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::frontend::{emit_fragment, standard_gate, Program};

use super::build::{bitflip_oracle_def, iqft_def, phase_oracle_def, BitFlipBody};
use super::generators::{gen_bv, gen_dj, gen_grover, gen_pe, gen_wstate, DjFunction};
use super::{parse_bitstring, GenError, GenerationResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamKind {
    Int,
    Bitstring,
    BitstringSet,
    Real,
    Enum,
    Text,
    TextList,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamDescriptor {
    pub name: String,
    pub kind: ParamKind,
    pub constraints: String,
    pub required: bool,
}

impl ParamDescriptor {
    fn new(name: &str, kind: ParamKind, constraints: &str, required: bool) -> Self {
        ParamDescriptor {
            name: name.to_string(),
            kind,
            constraints: constraints.to_string(),
            required,
        }
    }
}

/// One entry of the tool catalog. The description is the exact prose shown
/// to the planning model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolDescriptor {
    pub name: String,
    pub description: String,
    pub params: Vec<ParamDescriptor>,
}

impl ToolDescriptor {
    fn new(name: &str, description: &str, params: Vec<ParamDescriptor>) -> Self {
        ToolDescriptor {
            name: name.to_string(),
            description: description.to_string(),
            params,
        }
    }
}

/// What a tool call produced: a complete generated circuit, or a QASM text
/// fragment meant to be assembled into one.
#[derive(Debug, Clone, PartialEq)]
pub enum ToolOutput {
    Generation(GenerationResult),
    Fragment(String),
}

impl ToolOutput {
    /// The QASM text of the output, whichever shape it took.
    pub fn qasm_text(&self) -> &str {
        match self {
            ToolOutput::Generation(g) => &g.main_qasm,
            ToolOutput::Fragment(text) => text,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ToolError {
    #[error("unknown tool: {0}")]
    UnknownTool(String),
    #[error("argument `{param}` {reason}")]
    BadArg { param: String, reason: String },
    #[error(transparent)]
    Gen(#[from] GenError),
}

fn bad(param: &str, reason: impl Into<String>) -> ToolError {
    ToolError::BadArg { param: param.to_string(), reason: reason.into() }
}

/// Stable list of every available tool.
pub fn catalog() -> Vec<ToolDescriptor> {
    vec![
        ToolDescriptor::new(
            "gen_bv",
            "Generate a complete hidden-string recovery circuit: n input qubits plus one \
             ancilla identify the secret bitstring of a linear Boolean oracle in a single \
             query. Produces the main program, an oracle.inc defining gate Uf, and the \
             oracle's semantic binding.",
            vec![
                ParamDescriptor::new("n", ParamKind::Int, "integer in [2, 12]", true),
                ParamDescriptor::new("secret", ParamKind::Bitstring, "length n, characters 0/1", true),
            ],
        ),
        ToolDescriptor::new(
            "gen_dj",
            "Generate a complete constant-vs-balanced decision circuit over n input qubits \
             plus one ancilla. The oracle function is selected by kind: constant (give \
             value 0 or 1), balanced_linear (give a nonzero mask), or balanced_subset \
             (give the exact set of accepted strings, n <= 6).",
            vec![
                ParamDescriptor::new("n", ParamKind::Int, "integer in [2, 12]", true),
                ParamDescriptor::new(
                    "kind",
                    ParamKind::Enum,
                    "one of constant, balanced_linear, balanced_subset",
                    true,
                ),
                ParamDescriptor::new("value", ParamKind::Int, "0 or 1; required when kind = constant", false),
                ParamDescriptor::new(
                    "mask",
                    ParamKind::Bitstring,
                    "nonzero, length n; required when kind = balanced_linear",
                    false,
                ),
                ParamDescriptor::new(
                    "members",
                    ParamKind::BitstringSet,
                    "exactly 2^(n-1) distinct strings of length n; required when kind = balanced_subset",
                    false,
                ),
            ],
        ),
        ToolDescriptor::new(
            "gen_grover",
            "Generate a complete amplitude-amplification search circuit over n qubits that \
             boosts the probability of the marked bitstrings. Produces an oracle.inc \
             defining gate Oracle plus its semantic binding; the diffuser is inlined.",
            vec![
                ParamDescriptor::new("n", ParamKind::Int, "integer in [2, 12]", true),
                ParamDescriptor::new(
                    "marked",
                    ParamKind::BitstringSet,
                    "non-empty, strings of length n, fewer than 2^(n-1) of them",
                    true,
                ),
                ParamDescriptor::new(
                    "iterations",
                    ParamKind::Int,
                    "integer in [0, 1000]; defaults to floor(pi/4 * sqrt(2^n / m))",
                    false,
                ),
            ],
        ),
        ToolDescriptor::new(
            "gen_pe",
            "Generate a complete phase-estimation circuit with t counting qubits and one \
             eigenstate qubit reading out the dyadic phase k/2^t exactly. Includes the \
             inverse-QFT definition and an oracle.inc defining CU_0 and Psi.",
            vec![
                ParamDescriptor::new("t", ParamKind::Int, "integer in [2, 12]", true),
                ParamDescriptor::new("k", ParamKind::Int, "integer in [0, 2^t - 1]", true),
            ],
        ),
        ToolDescriptor::new(
            "gen_wstate",
            "Generate a circuit preparing the n-qubit W state (equal superposition of all \
             weight-one basis states) using the exact rotation schedule acos(sqrt(1/(n-i))) \
             followed by a CNOT cascade. No oracle and no measurements.",
            vec![ParamDescriptor::new("n", ParamKind::Int, "integer in [2, 12]", true)],
        ),
        ToolDescriptor::new(
            "iqft_def",
            "Return only the inverse quantum Fourier transform gate definition (gate IQFT \
             over t qubits) as a QASM fragment for use inside a larger program.",
            vec![ParamDescriptor::new("t", ParamKind::Int, "integer in [1, 12]", true)],
        ),
        ToolDescriptor::new(
            "oracle_bitflip_def",
            "Return a bit-flip oracle gate definition fragment over n inputs plus one \
             ancilla: the ancilla is XOR-ed with the parity of the inputs selected by mask.",
            vec![
                ParamDescriptor::new("n", ParamKind::Int, "integer in [1, 12]", true),
                ParamDescriptor::new("mask", ParamKind::Bitstring, "length n, characters 0/1", true),
                ParamDescriptor::new(
                    "name",
                    ParamKind::Text,
                    "gate identifier; defaults to Uf; must not shadow a built-in gate",
                    false,
                ),
            ],
        ),
        ToolDescriptor::new(
            "oracle_phase_def",
            "Return a phase oracle gate definition fragment over n qubits that flips the \
             sign of each marked bitstring.",
            vec![
                ParamDescriptor::new("n", ParamKind::Int, "integer in [2, 12]", true),
                ParamDescriptor::new(
                    "marked",
                    ParamKind::BitstringSet,
                    "non-empty, strings of length n",
                    true,
                ),
                ParamDescriptor::new(
                    "name",
                    ParamKind::Text,
                    "gate identifier; defaults to Oracle; must not shadow a built-in gate",
                    false,
                ),
            ],
        ),
        ToolDescriptor::new(
            "concat_qasm",
            "Concatenate QASM text parts in order, separated by newlines, for assembling \
             fragments into one program.",
            vec![ParamDescriptor::new(
                "parts",
                ParamKind::TextList,
                "non-empty list of QASM text fragments",
                true,
            )],
        ),
    ]
}

struct Args<'a> {
    map: &'a serde_json::Map<String, Value>,
}

impl<'a> Args<'a> {
    fn new(args: &'a Value, allowed: &[&str]) -> Result<Self, ToolError> {
        let map = args
            .as_object()
            .ok_or_else(|| bad("args", "must be a JSON object"))?;
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(bad(key, "is not a parameter of this tool"));
            }
        }
        Ok(Args { map })
    }

    fn get(&self, name: &str) -> Option<&'a Value> {
        match self.map.get(name) {
            None | Some(Value::Null) => None,
            Some(v) => Some(v),
        }
    }

    fn int(&self, name: &str, min: u64, max: u64) -> Result<u64, ToolError> {
        let v = self
            .get(name)
            .ok_or_else(|| bad(name, "is required"))?;
        let value = v
            .as_u64()
            .ok_or_else(|| bad(name, format!("must be an integer, got {v}")))?;
        if value < min || value > max {
            return Err(bad(name, format!("must lie in [{min}, {max}], got {value}")));
        }
        Ok(value)
    }

    fn optional_int(&self, name: &str, min: u64, max: u64) -> Result<Option<u64>, ToolError> {
        match self.get(name) {
            None => Ok(None),
            Some(_) => self.int(name, min, max).map(Some),
        }
    }

    fn string(&self, name: &str) -> Result<&'a str, ToolError> {
        self.get(name)
            .ok_or_else(|| bad(name, "is required"))?
            .as_str()
            .ok_or_else(|| bad(name, "must be a string"))
    }

    fn optional_string(&self, name: &str) -> Result<Option<&'a str>, ToolError> {
        match self.get(name) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(Some)
                .ok_or_else(|| bad(name, "must be a string")),
        }
    }

    fn string_set(&self, name: &str) -> Result<BTreeSet<String>, ToolError> {
        let v = self
            .get(name)
            .ok_or_else(|| bad(name, "is required"))?;
        let list = v
            .as_array()
            .ok_or_else(|| bad(name, "must be an array of strings"))?;
        let mut set = BTreeSet::new();
        for item in list {
            let s = item
                .as_str()
                .ok_or_else(|| bad(name, "must contain only strings"))?;
            set.insert(s.to_string());
        }
        Ok(set)
    }
}

fn gate_identifier(name: &str, value: &str) -> Result<String, ToolError> {
    let mut chars = value.chars();
    let head_ok = chars
        .next()
        .map(|c| c.is_ascii_alphabetic() || c == '_')
        .unwrap_or(false);
    if !head_ok || !value.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(bad(name, format!("must be a plain identifier, got {value:?}")));
    }
    if standard_gate(value).is_some() {
        return Err(bad(name, format!("{value:?} shadows a built-in gate")));
    }
    Ok(value.to_string())
}

fn fragment_of(def: crate::frontend::GateDef) -> String {
    let mut p = Program::empty();
    p.gate_defs.push(def);
    emit_fragment(&p)
}

/// Validates `args` against the named tool's constraints and runs it.
pub fn invoke(name: &str, args: &Value) -> Result<ToolOutput, ToolError> {
    match name {
        "gen_bv" => {
            let a = Args::new(args, &["n", "secret"])?;
            let n = a.int("n", 2, 12)?;
            let secret = a.string("secret")?;
            Ok(ToolOutput::Generation(gen_bv(n as u32, secret)?))
        }
        "gen_dj" => {
            let a = Args::new(args, &["n", "kind", "value", "mask", "members"])?;
            let n = a.int("n", 2, 12)?;
            let function = match a.string("kind")? {
                "constant" => DjFunction::Constant { value: a.int("value", 0, 1)? == 1 },
                "balanced_linear" => DjFunction::BalancedLinear { mask: a.string("mask")?.to_string() },
                "balanced_subset" => DjFunction::BalancedSubset { members: a.string_set("members")? },
                other => {
                    return Err(bad(
                        "kind",
                        format!("must be constant, balanced_linear or balanced_subset, got {other:?}"),
                    ))
                }
            };
            Ok(ToolOutput::Generation(gen_dj(n as u32, &function)?))
        }
        "gen_grover" => {
            let a = Args::new(args, &["n", "marked", "iterations"])?;
            let n = a.int("n", 2, 12)?;
            let marked = a.string_set("marked")?;
            let iterations = a.optional_int("iterations", 0, 1000)?.map(|k| k as u32);
            Ok(ToolOutput::Generation(gen_grover(n as u32, &marked, iterations)?))
        }
        "gen_pe" => {
            let a = Args::new(args, &["t", "k"])?;
            let t = a.int("t", 2, 12)?;
            let k = a.int("k", 0, (1u64 << t) - 1)?;
            Ok(ToolOutput::Generation(gen_pe(t as u32, k)?))
        }
        "gen_wstate" => {
            let a = Args::new(args, &["n"])?;
            let n = a.int("n", 2, 12)?;
            Ok(ToolOutput::Generation(gen_wstate(n as u32)?))
        }
        "iqft_def" => {
            let a = Args::new(args, &["t"])?;
            let t = a.int("t", 1, 12)?;
            Ok(ToolOutput::Fragment(fragment_of(iqft_def(t as u32))))
        }
        "oracle_bitflip_def" => {
            let a = Args::new(args, &["n", "mask", "name"])?;
            let n = a.int("n", 1, 12)? as u32;
            let mask = parse_bitstring(a.string("mask")?, n)?;
            let gate = match a.optional_string("name")? {
                Some(value) => gate_identifier("name", value)?,
                None => "Uf".to_string(),
            };
            Ok(ToolOutput::Fragment(fragment_of(bitflip_oracle_def(
                &gate,
                n,
                &BitFlipBody::DotMask(mask),
            ))))
        }
        "oracle_phase_def" => {
            let a = Args::new(args, &["n", "marked", "name"])?;
            let n = a.int("n", 2, 12)? as u32;
            let marked = a.string_set("marked")?;
            if marked.is_empty() {
                return Err(bad("marked", "must not be empty"));
            }
            let values = super::parse_bitstring_set(&marked, n)?;
            let gate = match a.optional_string("name")? {
                Some(value) => gate_identifier("name", value)?,
                None => "Oracle".to_string(),
            };
            Ok(ToolOutput::Fragment(fragment_of(phase_oracle_def(&gate, n, &values))))
        }
        "concat_qasm" => {
            let a = Args::new(args, &["parts"])?;
            let v = a
                .get("parts")
                .ok_or_else(|| bad("parts", "is required"))?;
            let list = v
                .as_array()
                .ok_or_else(|| bad("parts", "must be an array of strings"))?;
            if list.is_empty() {
                return Err(bad("parts", "must not be empty"));
            }
            let mut parts = Vec::new();
            for item in list {
                parts.push(
                    item.as_str()
                        .ok_or_else(|| bad("parts", "must contain only strings"))?
                        .trim_end(),
                );
            }
            Ok(ToolOutput::Fragment(parts.join("\n") + "\n"))
        }
        other => Err(ToolError::UnknownTool(other.to_string())),
    }
}
