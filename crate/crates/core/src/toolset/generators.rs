//! The five circuit generators.
//!
//! Every generator builds an AST, emits it through the canonical printer,
//! and pairs the text with the semantic bindings the simulator needs. The
//! produced programs follow the shared layout: `bit` then `qubit`
//! declarations, oracle preparation, the algorithm body, then measurement
//! of the input register (state preparation circuits skip measurement).

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde_json::json;

use crate::frontend::{emit, emit_fragment, Program};
use crate::sim::{BitFn, OracleBinding, OracleSemantics, MAX_QUBITS};

use super::build::{
    apply, apply_ctrl, bitflip_oracle_def, controlled_phase_def, gate_stmt, iqft_def, lit,
    measure_stmt, neg_pi_over, phase_oracle_def, pi_over, program, qref, reg, state_prep_def,
    BitFlipBody,
};
use super::{parse_bitstring, parse_bitstring_set, Algorithm, GenError, GenMeta, GenerationResult};

fn check_n(algorithm: Algorithm, n: u32) -> Result<(), GenError> {
    let (min, max) = algorithm.n_range();
    if n < min || n > max {
        return Err(GenError::BadN { n, min, max });
    }
    Ok(())
}

fn oracle_fragment(defs: Vec<crate::frontend::GateDef>) -> String {
    let mut p = Program::empty();
    p.gate_defs = defs;
    emit_fragment(&p)
}

/// The shared interference skeleton of the bit-flip-oracle algorithms:
/// ancilla to |−⟩, Hadamard the inputs, query once, Hadamard the inputs
/// again, measure the inputs.
fn query_circuit(n: u32) -> Program {
    let mut stmts = Vec::new();
    stmts.push(gate_stmt(apply("x", vec![], vec![qref("q", n)])));
    for j in 0..=n {
        stmts.push(gate_stmt(apply("h", vec![], vec![qref("q", j)])));
    }
    stmts.push(gate_stmt(apply(
        "Uf",
        vec![],
        (0..=n).map(|j| qref("q", j)).collect(),
    )));
    for j in 0..n {
        stmts.push(gate_stmt(apply("h", vec![], vec![qref("q", j)])));
    }
    for j in 0..n {
        stmts.push(measure_stmt("c", j, "q", j));
    }
    program(
        vec!["stdgates.inc", "oracle.inc"],
        vec![],
        vec![reg("c", n)],
        vec![reg("q", n + 1)],
        stmts,
    )
}

/// Hidden-string recovery: one oracle query determines the mask of the
/// linear function f(x) = s·x.
pub fn gen_bv(n: u32, secret: &str) -> Result<GenerationResult, GenError> {
    check_n(Algorithm::Bv, n)?;
    let mask = parse_bitstring(secret, n)?;
    let oracle = oracle_fragment(vec![bitflip_oracle_def("Uf", n, &BitFlipBody::DotMask(mask))]);
    let binding = OracleBinding::new(
        "Uf",
        OracleSemantics::BitFlip {
            f: BitFn::DotMask { mask },
            input_arity: n as usize,
            ancilla_arity: 1,
        },
    );
    Ok(GenerationResult {
        main_qasm: emit(&query_circuit(n)),
        oracle_include: Some(oracle),
        bindings: vec![binding],
        meta: GenMeta {
            algorithm: Algorithm::Bv,
            n,
            params: json!({ "secret": secret }),
        },
    })
}

/// The function family a constant-vs-balanced decision circuit can be
/// built against.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DjFunction {
    /// f(x) = value for every x.
    Constant { value: bool },
    /// f(x) = parity of x & mask, mask nonzero; balanced by construction.
    BalancedLinear { mask: String },
    /// f(x) = 1 exactly on the listed strings; exactly half the basis.
    BalancedSubset { members: BTreeSet<String> },
}

impl DjFunction {
    pub fn is_balanced(&self) -> bool {
        !matches!(self, DjFunction::Constant { .. })
    }
}

/// Constant-vs-balanced decision: all-zeros measurement means constant.
pub fn gen_dj(n: u32, function: &DjFunction) -> Result<GenerationResult, GenError> {
    check_n(Algorithm::Dj, n)?;
    let (body, bitfn) = match function {
        DjFunction::Constant { value } => {
            (BitFlipBody::Constant(*value), BitFn::Const { value: *value })
        }
        DjFunction::BalancedLinear { mask } => {
            let mask = parse_bitstring(mask, n)?;
            if mask == 0 {
                return Err(GenError::BadLength(
                    "a balanced linear mask must be nonzero".to_string(),
                ));
            }
            (BitFlipBody::DotMask(mask), BitFn::DotMask { mask })
        }
        DjFunction::BalancedSubset { members } => {
            if n > 6 {
                return Err(GenError::SubsetTooLarge(n));
            }
            let expected = 1usize << (n - 1);
            if members.len() != expected {
                return Err(GenError::BadSubsetSize { n, expected, got: members.len() });
            }
            let ones = parse_bitstring_set(members, n)?;
            (BitFlipBody::Membership(ones.clone()), BitFn::Membership { ones })
        }
    };
    let oracle = oracle_fragment(vec![bitflip_oracle_def("Uf", n, &body)]);
    let binding = OracleBinding::new(
        "Uf",
        OracleSemantics::BitFlip {
            f: bitfn,
            input_arity: n as usize,
            ancilla_arity: 1,
        },
    );
    Ok(GenerationResult {
        main_qasm: emit(&query_circuit(n)),
        oracle_include: Some(oracle),
        bindings: vec![binding],
        meta: GenMeta {
            algorithm: Algorithm::Dj,
            n,
            params: json!({ "function": function }),
        },
    })
}

/// Default amplitude-amplification iteration count for `m` marked states
/// out of `2^n`.
pub fn grover_default_iterations(n: u32, m: usize) -> u32 {
    let ratio = ((1u64 << n) as f64 / m as f64).sqrt();
    (PI / 4.0 * ratio).floor() as u32
}

/// Success probability after `k` amplification rounds.
pub fn grover_success_probability(n: u32, m: usize, k: u32) -> f64 {
    let theta = (m as f64 / (1u64 << n) as f64).sqrt().asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

/// Amplitude amplification of the marked strings: Hadamard layer, then `k`
/// rounds of phase oracle plus diffuser, then measurement.
pub fn gen_grover(
    n: u32,
    marked: &BTreeSet<String>,
    iterations: Option<u32>,
) -> Result<GenerationResult, GenError> {
    check_n(Algorithm::Grover, n)?;
    if marked.is_empty() {
        return Err(GenError::EmptyMarked);
    }
    let max = (1u64 << (n - 1)) - 1;
    if marked.len() as u64 > max {
        return Err(GenError::TooManyMarked { n, max });
    }
    let marked_values = parse_bitstring_set(marked, n)?;
    let k = iterations.unwrap_or_else(|| grover_default_iterations(n, marked.len()));
    let expected = grover_success_probability(n, marked.len(), k);

    let oracle = oracle_fragment(vec![phase_oracle_def("Oracle", n, &marked_values)]);
    let all: Vec<_> = (0..n).map(|j| qref("q", j)).collect();
    let mut stmts = Vec::new();
    for j in 0..n {
        stmts.push(gate_stmt(apply("h", vec![], vec![qref("q", j)])));
    }
    for _ in 0..k {
        stmts.push(gate_stmt(apply("Oracle", vec![], all.clone())));
        for j in 0..n {
            stmts.push(gate_stmt(apply("h", vec![], vec![qref("q", j)])));
        }
        for j in 0..n {
            stmts.push(gate_stmt(apply("x", vec![], vec![qref("q", j)])));
        }
        stmts.push(gate_stmt(apply_ctrl(n - 1, "z", all.clone())));
        for j in 0..n {
            stmts.push(gate_stmt(apply("x", vec![], vec![qref("q", j)])));
        }
        for j in 0..n {
            stmts.push(gate_stmt(apply("h", vec![], vec![qref("q", j)])));
        }
    }
    for j in 0..n {
        stmts.push(measure_stmt("c", j, "q", j));
    }
    let main = program(
        vec!["stdgates.inc", "oracle.inc"],
        vec![],
        vec![reg("c", n)],
        vec![reg("q", n)],
        stmts,
    );
    let binding = OracleBinding::new(
        "Oracle",
        OracleSemantics::Phase { marked: marked_values, input_arity: n as usize },
    );
    Ok(GenerationResult {
        main_qasm: emit(&main),
        oracle_include: Some(oracle),
        bindings: vec![binding],
        meta: GenMeta {
            algorithm: Algorithm::Grover,
            n,
            params: json!({
                "marked": marked.iter().collect::<Vec<_>>(),
                "iterations": k,
                "expected_success": expected,
            }),
        },
    })
}

fn pe_result(t: u32, phi: f64, angle_numerator: f64, angle_denominator: f64, params: serde_json::Value) -> GenerationResult {
    let oracle = oracle_fragment(vec![
        controlled_phase_def("CU_0", angle_numerator, angle_denominator),
        state_prep_def("Psi", true),
    ]);
    let mut stmts = Vec::new();
    stmts.push(gate_stmt(apply("Psi", vec![], vec![qref("q", t)])));
    for j in 0..t {
        stmts.push(gate_stmt(apply("h", vec![], vec![qref("q", j)])));
    }
    for j in 0..t {
        for _ in 0..1u64 << j {
            stmts.push(gate_stmt(apply("CU_0", vec![], vec![qref("q", j), qref("q", t)])));
        }
    }
    stmts.push(gate_stmt(apply(
        "IQFT",
        vec![],
        (0..t).map(|j| qref("q", j)).collect(),
    )));
    for j in 0..t {
        stmts.push(measure_stmt("c", j, "q", j));
    }
    let main = program(
        vec!["stdgates.inc", "oracle.inc"],
        vec![iqft_def(t)],
        vec![reg("c", t)],
        vec![reg("q", t + 1)],
        stmts,
    );
    let bindings = vec![
        OracleBinding::new("CU_0", OracleSemantics::ControlledPhase { phi }),
        OracleBinding::new("Psi", OracleSemantics::StatePrep { one: true }),
    ];
    GenerationResult {
        main_qasm: emit(&main),
        oracle_include: Some(oracle),
        bindings,
        meta: GenMeta { algorithm: Algorithm::Pe, n: t, params },
    }
}

fn check_t(t: u32) -> Result<(), GenError> {
    if t < 2 {
        return Err(GenError::BadN { n: t, min: 2, max: 12 });
    }
    if t + 1 > MAX_QUBITS as u32 {
        return Err(GenError::QubitLimitExceeded { requested: t + 1, max: MAX_QUBITS as u32 });
    }
    Ok(())
}

/// Phase estimation of the dyadic phase `k/2^t` with `t` counting qubits
/// and one eigenstate qubit. Counting qubit `j` applies the controlled
/// unitary `2^j` times, so classical bit `j` lands on bit `j` of `k`.
/// `k` is taken modulo `2^t` (a phase is defined modulo one turn).
pub fn gen_pe(t: u32, k: u64) -> Result<GenerationResult, GenError> {
    check_t(t)?;
    let modulus = 1u64 << t;
    let k = k % modulus;
    let phi = k as f64 / modulus as f64;
    Ok(pe_result(
        t,
        phi,
        k as f64,
        modulus as f64,
        json!({ "t": t, "k": k, "phase": phi, "dyadic": true }),
    ))
}

/// Phase estimation of an arbitrary real phase (taken modulo one turn).
/// Dyadic values route through the exact path; everything else is rejected
/// unless `allow_non_dyadic` is set, since only dyadic phases give a
/// deterministic readout.
pub fn gen_pe_real(t: u32, phase: f64, allow_non_dyadic: bool) -> Result<GenerationResult, GenError> {
    check_t(t)?;
    if !phase.is_finite() {
        return Err(GenError::NonDyadicPhase { phase, t });
    }
    let phi = phase.rem_euclid(1.0);
    let modulus = (1u64 << t) as f64;
    let scaled = phi * modulus;
    if (scaled - scaled.round()).abs() < 1e-12 {
        return gen_pe(t, scaled.round() as u64);
    }
    if !allow_non_dyadic {
        return Err(GenError::NonDyadicPhase { phase, t });
    }
    Ok(pe_result(
        t,
        phi,
        phi,
        1.0,
        json!({ "t": t, "phase": phi, "dyadic": false }),
    ))
}

/// Exact rotation schedule for the W state: qubit weights are peeled off
/// one at a time, acos(sqrt(1/d)) for d remaining candidates.
pub fn wstate_angles(n: u32) -> Vec<f64> {
    (0..n - 1)
        .map(|i| (1.0 / (n - i) as f64).sqrt().acos())
        .collect()
}

/// W-state preparation: seed |1⟩ on the last qubit, distribute amplitude
/// down the register with rotation blocks, then convert with a CNOT
/// cascade. No measurements; the checker scores the final state directly.
pub fn gen_wstate(n: u32) -> Result<GenerationResult, GenError> {
    check_n(Algorithm::Wstate, n)?;
    let angles = wstate_angles(n);
    let mut stmts = Vec::new();
    stmts.push(gate_stmt(apply("x", vec![], vec![qref("q", n - 1)])));
    for i in 0..n - 1 {
        let d = n - i;
        let (neg_angle, pos_angle) = match d {
            2 => (neg_pi_over(4.0), pi_over(4.0)),
            4 => (neg_pi_over(3.0), pi_over(3.0)),
            _ => {
                let theta = angles[i as usize];
                (crate::frontend::Expr::Neg(Box::new(lit(theta))), lit(theta))
            }
        };
        let target = n - 2 - i;
        let source = n - 1 - i;
        stmts.push(gate_stmt(apply("ry", vec![neg_angle], vec![qref("q", target)])));
        stmts.push(gate_stmt(apply("cz", vec![], vec![qref("q", source), qref("q", target)])));
        stmts.push(gate_stmt(apply("ry", vec![pos_angle], vec![qref("q", target)])));
    }
    for i in 0..n - 1 {
        stmts.push(gate_stmt(apply(
            "cx",
            vec![],
            vec![qref("q", n - 2 - i), qref("q", n - 1 - i)],
        )));
    }
    let main = program(
        vec!["stdgates.inc"],
        vec![],
        vec![reg("c", n)],
        vec![reg("q", n)],
        stmts,
    );
    Ok(GenerationResult {
        main_qasm: emit(&main),
        oracle_include: None,
        bindings: vec![],
        meta: GenMeta {
            algorithm: Algorithm::Wstate,
            n,
            params: json!({ "angles": angles }),
        },
    })
}
