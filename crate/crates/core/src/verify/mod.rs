//! Task specifications, seeded random oracle instances, and the functional
//! verdict on candidate programs.
//!
//! A task fixes the algorithm, its size, and a concrete oracle; `check`
//! scores any candidate text against it. Syntax is judged by the frontend;
//! function is judged by simulating with the task's own oracle bindings
//! (which shadow whatever the candidate defines textually, so a candidate
//! cannot pass by hard-coding answers into its oracle gates).

use std::collections::BTreeSet;
use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::frontend::{analyze_with_externs, Diagnostic};
use crate::sim::{fidelity, simulate, Distribution, OracleBinding, StateVector, MAX_QUBITS};
use crate::toolset::{
    format_bitstring, gen_bv, gen_dj, gen_grover, gen_pe, Algorithm, DjFunction, GenError,
};

/// The oracle instance a task is scored against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleSpec {
    BvSecret { secret: String },
    DjSpec { function: DjFunction },
    GroverMarked { marked: BTreeSet<String> },
    PePhase { k: u64, t: u32 },
    WsNone,
}

/// One benchmark problem instance: algorithm, size, the seed that produced
/// it, and the concrete oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub algorithm: Algorithm,
    pub n: u32,
    pub seed: u64,
    pub oracle: OracleSpec,
}

/// What the checker measured, in whichever form the algorithm calls for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementSummary {
    Distribution(Distribution),
    Fidelity(f64),
    None,
}

/// The scored outcome for one candidate program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub syntax_pass: bool,
    pub functional_pass: bool,
    pub diagnostics: Vec<Diagnostic>,
    pub summary: MeasurementSummary,
    pub failure_reason: Option<String>,
}

impl Verdict {
    fn syntax_failure(diagnostics: Vec<Diagnostic>) -> Self {
        Verdict {
            syntax_pass: false,
            functional_pass: false,
            diagnostics,
            summary: MeasurementSummary::None,
            failure_reason: Some("the program does not pass syntax checking".to_string()),
        }
    }

    fn functional_failure(diagnostics: Vec<Diagnostic>, summary: MeasurementSummary, reason: String) -> Self {
        Verdict {
            syntax_pass: true,
            functional_pass: false,
            diagnostics,
            summary,
            failure_reason: Some(reason),
        }
    }

    fn pass(diagnostics: Vec<Diagnostic>, summary: MeasurementSummary) -> Self {
        Verdict {
            syntax_pass: true,
            functional_pass: true,
            diagnostics,
            summary,
            failure_reason: None,
        }
    }
}

/// Draws a uniform oracle instance for the algorithm family. Deterministic
/// in `(algorithm, n, seed)`; returns the oracle spec together with the
/// include text and semantic bindings that realize it.
pub fn random_oracle(
    algorithm: Algorithm,
    n: u32,
    seed: u64,
) -> (OracleSpec, Option<String>, Vec<OracleBinding>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = match algorithm {
        Algorithm::Bv => {
            let secret = rng.gen_range(0..1u64 << n);
            OracleSpec::BvSecret { secret: format_bitstring(secret, n) }
        }
        Algorithm::Dj => {
            let function = if rng.gen_bool(0.5) {
                DjFunction::Constant { value: rng.gen_bool(0.5) }
            } else {
                let mask = rng.gen_range(1..1u64 << n);
                DjFunction::BalancedLinear { mask: format_bitstring(mask, n) }
            };
            OracleSpec::DjSpec { function }
        }
        Algorithm::Grover => {
            let marked = rng.gen_range(0..1u64 << n);
            OracleSpec::GroverMarked {
                marked: [format_bitstring(marked, n)].into(),
            }
        }
        Algorithm::Pe => {
            let k = rng.gen_range(0..1u64 << n);
            OracleSpec::PePhase { k, t: n }
        }
        Algorithm::Wstate => OracleSpec::WsNone,
    };
    let (include, bindings) = oracle_artifacts(n, &spec).expect("in-range oracle spec");
    (spec, include, bindings)
}

/// Builds a task from a seed the same way the benchmark does.
pub fn random_task(algorithm: Algorithm, n: u32, seed: u64) -> TaskSpec {
    let (oracle, _, _) = random_oracle(algorithm, n, seed);
    TaskSpec { algorithm, n, seed, oracle }
}

/// The include text and bindings a given oracle spec denotes. Routed
/// through the generators so tasks and reference circuits can never
/// disagree about what an oracle gate means.
pub fn oracle_artifacts(
    n: u32,
    oracle: &OracleSpec,
) -> Result<(Option<String>, Vec<OracleBinding>), GenError> {
    let result = match oracle {
        OracleSpec::BvSecret { secret } => gen_bv(n, secret)?,
        OracleSpec::DjSpec { function } => gen_dj(n, function)?,
        OracleSpec::GroverMarked { marked } => gen_grover(n, marked, None)?,
        OracleSpec::PePhase { k, t } => gen_pe(*t, *k)?,
        OracleSpec::WsNone => return Ok((None, vec![])),
    };
    Ok((result.oracle_include, result.bindings))
}

/// Builds the deterministic generator solution matching a task's exact
/// oracle instance. Every task a random oracle can produce is solvable
/// this way, which anchors corpus integrity checks and scripted runs.
pub fn reference_program(task: &TaskSpec) -> Result<crate::toolset::GenerationResult, GenError> {
    match &task.oracle {
        OracleSpec::BvSecret { secret } => gen_bv(task.n, secret),
        OracleSpec::DjSpec { function } => gen_dj(task.n, function),
        OracleSpec::GroverMarked { marked } => gen_grover(task.n, marked, None),
        OracleSpec::PePhase { k, t } => gen_pe(*t, *k),
        OracleSpec::WsNone => crate::toolset::gen_wstate(task.n),
    }
}

/// The n-qubit state with amplitude 1/sqrt(n) on every weight-one basis
/// state, the target of the state-preparation task.
pub fn ideal_w(n: u32) -> Result<StateVector, GenError> {
    if !(2..=MAX_QUBITS as u32).contains(&n) {
        return Err(GenError::BadN { n, min: 2, max: MAX_QUBITS as u32 });
    }
    let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 1 << n];
    let amp = 1.0 / (n as f64).sqrt();
    for j in 0..n {
        amps[1 << j] = num_complex::Complex64::new(amp, 0.0);
    }
    StateVector::from_amps(n as usize, amps)
        .map_err(|_| GenError::BadN { n, min: 2, max: MAX_QUBITS as u32 })
}

const CERTAINTY: f64 = 1.0 - 1e-6;
const NEGLIGIBLE: f64 = 1e-6;

/// Scores a candidate program against a task. Failures never panic and
/// never error out; they come back as verdicts.
pub fn check(task: &TaskSpec, program_text: &str) -> Verdict {
    let (include, bindings) = match oracle_artifacts(task.n, &task.oracle) {
        Ok(parts) => parts,
        Err(e) => {
            return Verdict {
                syntax_pass: false,
                functional_pass: false,
                diagnostics: vec![],
                summary: MeasurementSummary::None,
                failure_reason: Some(format!("the task's oracle spec is invalid: {e}")),
            }
        }
    };
    let mut provider = HashMap::new();
    if let Some(text) = &include {
        provider.insert("oracle.inc".to_string(), text.clone());
    }
    let externs: Vec<_> = bindings.iter().map(|b| b.extern_sig()).collect();
    let (program, diagnostics) = analyze_with_externs(program_text, &provider, &externs);
    if diagnostics.iter().any(|d| d.is_error()) {
        return Verdict::syntax_failure(diagnostics);
    }

    let result = match simulate(&program, &bindings) {
        Ok(result) => result,
        Err(e) => {
            return Verdict::functional_failure(
                diagnostics,
                MeasurementSummary::None,
                format!("simulation failed: {e}"),
            )
        }
    };

    let dist = &result.distribution;
    let measured_bits = result.measured.len() as u32;
    let p_of = |key: &str| dist.get(key).copied().unwrap_or(0.0);

    match &task.oracle {
        OracleSpec::BvSecret { secret } => {
            if measured_bits != task.n {
                return Verdict::functional_failure(
                    diagnostics,
                    MeasurementSummary::Distribution(dist.clone()),
                    format!("expected the {} input qubits to be measured, found {measured_bits} measured bits", task.n),
                );
            }
            let p = p_of(secret);
            if p >= CERTAINTY {
                Verdict::pass(diagnostics, MeasurementSummary::Distribution(dist.clone()))
            } else {
                Verdict::functional_failure(
                    diagnostics,
                    MeasurementSummary::Distribution(dist.clone()),
                    format!("P({secret}) = {p:.6}, expected 1"),
                )
            }
        }
        OracleSpec::DjSpec { function } => {
            if measured_bits != task.n {
                return Verdict::functional_failure(
                    diagnostics,
                    MeasurementSummary::Distribution(dist.clone()),
                    format!("expected the {} input qubits to be measured, found {measured_bits} measured bits", task.n),
                );
            }
            let zeros = "0".repeat(task.n as usize);
            let p = p_of(&zeros);
            let pass = if function.is_balanced() { p <= NEGLIGIBLE } else { p >= CERTAINTY };
            if pass {
                Verdict::pass(diagnostics, MeasurementSummary::Distribution(dist.clone()))
            } else {
                let expectation = if function.is_balanced() { "0" } else { "1" };
                Verdict::functional_failure(
                    diagnostics,
                    MeasurementSummary::Distribution(dist.clone()),
                    format!("P({zeros}) = {p:.6}, expected {expectation}"),
                )
            }
        }
        OracleSpec::GroverMarked { marked } => {
            if measured_bits != task.n {
                return Verdict::functional_failure(
                    diagnostics,
                    MeasurementSummary::Distribution(dist.clone()),
                    format!("expected the {} search qubits to be measured, found {measured_bits} measured bits", task.n),
                );
            }
            let k = crate::toolset::generators::grover_default_iterations(task.n, marked.len());
            let threshold =
                crate::toolset::generators::grover_success_probability(task.n, marked.len(), k) - 0.05;
            let p: f64 = marked.iter().map(|s| p_of(s)).sum();
            if p >= threshold {
                Verdict::pass(diagnostics, MeasurementSummary::Distribution(dist.clone()))
            } else {
                Verdict::functional_failure(
                    diagnostics,
                    MeasurementSummary::Distribution(dist.clone()),
                    format!("P(marked) = {p:.6}, expected at least {threshold:.6}"),
                )
            }
        }
        OracleSpec::PePhase { k, t } => {
            if measured_bits != *t {
                return Verdict::functional_failure(
                    diagnostics,
                    MeasurementSummary::Distribution(dist.clone()),
                    format!("expected the {t} counting qubits to be measured, found {measured_bits} measured bits"),
                );
            }
            let expected = format_bitstring(*k, *t);
            let p = p_of(&expected);
            if p >= CERTAINTY {
                Verdict::pass(diagnostics, MeasurementSummary::Distribution(dist.clone()))
            } else {
                Verdict::functional_failure(
                    diagnostics,
                    MeasurementSummary::Distribution(dist.clone()),
                    format!("P(bits of k = {k}) = {p:.6}, expected 1"),
                )
            }
        }
        OracleSpec::WsNone => check_wstate(task.n, diagnostics, &result),
    }
}

fn check_wstate(n: u32, diagnostics: Vec<Diagnostic>, result: &crate::sim::SimResult) -> Verdict {
    if result.measured.is_empty() {
        if result.state.num_qubits() != n as usize {
            return Verdict::functional_failure(
                diagnostics,
                MeasurementSummary::None,
                format!(
                    "expected an {n}-qubit register, found {}",
                    result.state.num_qubits()
                ),
            );
        }
        let ideal = match ideal_w(n) {
            Ok(state) => state,
            Err(e) => {
                return Verdict::functional_failure(
                    diagnostics,
                    MeasurementSummary::None,
                    e.to_string(),
                )
            }
        };
        let f = match fidelity(&result.state, &ideal) {
            Ok(f) => f,
            Err(e) => {
                return Verdict::functional_failure(
                    diagnostics,
                    MeasurementSummary::None,
                    e.to_string(),
                )
            }
        };
        if f >= CERTAINTY {
            Verdict::pass(diagnostics, MeasurementSummary::Fidelity(f))
        } else {
            Verdict::functional_failure(
                diagnostics,
                MeasurementSummary::Fidelity(f),
                format!("state fidelity {f:.6} with the target, expected 1"),
            )
        }
    } else {
        // A measured candidate is scored on its marginal: every weight-one
        // string at 1/n, nothing anywhere else.
        if result.measured.len() != n as usize {
            return Verdict::functional_failure(
                diagnostics,
                MeasurementSummary::Distribution(result.distribution.clone()),
                format!(
                    "measure all {n} qubits or none, found {} measured bits",
                    result.measured.len()
                ),
            );
        }
        let share = 1.0 / n as f64;
        let mut weight_one_total = 0.0;
        for j in 0..n {
            let key = format_bitstring(1 << j, n);
            let p = result.distribution.get(&key).copied().unwrap_or(0.0);
            if (p - share).abs() > NEGLIGIBLE {
                return Verdict::functional_failure(
                    diagnostics,
                    MeasurementSummary::Distribution(result.distribution.clone()),
                    format!("P({key}) = {p:.6}, expected {share:.6}"),
                );
            }
            weight_one_total += p;
        }
        if weight_one_total < CERTAINTY {
            return Verdict::functional_failure(
                diagnostics,
                MeasurementSummary::Distribution(result.distribution.clone()),
                format!("weight-one outcomes carry {weight_one_total:.6} probability, expected 1"),
            );
        }
        Verdict::pass(
            diagnostics,
            MeasurementSummary::Distribution(result.distribution.clone()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toolset::{gen_wstate, GenerationResult};

    fn task_for(result: &GenerationResult, seed: u64, oracle: OracleSpec) -> TaskSpec {
        TaskSpec { algorithm: result.meta.algorithm, n: result.meta.n, seed, oracle }
    }

    #[test]
    fn generated_circuits_pass_their_own_tasks() {
        let bv = gen_bv(3, "101").unwrap();
        let task = task_for(&bv, 0, OracleSpec::BvSecret { secret: "101".into() });
        let verdict = check(&task, &bv.main_qasm);
        assert!(verdict.syntax_pass && verdict.functional_pass, "{verdict:?}");

        let dj = gen_dj(3, &DjFunction::BalancedLinear { mask: "110".into() }).unwrap();
        let task = task_for(
            &dj,
            0,
            OracleSpec::DjSpec { function: DjFunction::BalancedLinear { mask: "110".into() } },
        );
        let verdict = check(&task, &dj.main_qasm);
        assert!(verdict.functional_pass, "{verdict:?}");

        let marked: BTreeSet<String> = ["101".to_string()].into();
        let grover = gen_grover(3, &marked, None).unwrap();
        let task = task_for(&grover, 0, OracleSpec::GroverMarked { marked });
        let verdict = check(&task, &grover.main_qasm);
        assert!(verdict.functional_pass, "{verdict:?}");

        let pe = gen_pe(4, 3).unwrap();
        let task = task_for(&pe, 0, OracleSpec::PePhase { k: 3, t: 4 });
        let verdict = check(&task, &pe.main_qasm);
        assert!(verdict.functional_pass, "{verdict:?}");

        let ws = gen_wstate(4).unwrap();
        let task = task_for(&ws, 0, OracleSpec::WsNone);
        let verdict = check(&task, &ws.main_qasm);
        assert!(verdict.functional_pass, "{verdict:?}");
        assert!(matches!(verdict.summary, MeasurementSummary::Fidelity(f) if f > 0.999999));
    }

    #[test]
    fn bindings_override_what_the_candidate_wrote() {
        // The candidate was generated for secret 101, but the task binds the
        // oracle gate to secret 110: the readout follows the task's oracle,
        // so the candidate must fail a secret-101 expectation stated by a
        // task whose own oracle says 110.
        let bv = gen_bv(3, "101").unwrap();
        let task = task_for(&bv, 0, OracleSpec::BvSecret { secret: "110".into() });
        let verdict = check(&task, &bv.main_qasm);
        assert!(verdict.syntax_pass);
        assert!(verdict.functional_pass, "same circuit shape reads any linear secret: {verdict:?}");

        // A constant-oracle task flips the verdict for the same text.
        let dj_task = TaskSpec {
            algorithm: Algorithm::Dj,
            n: 3,
            seed: 0,
            oracle: OracleSpec::DjSpec { function: DjFunction::Constant { value: true } },
        };
        let dj_balanced = gen_dj(3, &DjFunction::BalancedLinear { mask: "111".into() }).unwrap();
        let verdict = check(&dj_task, &dj_balanced.main_qasm);
        assert!(verdict.functional_pass, "{verdict:?}");
    }

    #[test]
    fn wrong_expectations_fail_functionally() {
        let bv = gen_bv(3, "101").unwrap();
        let task = TaskSpec {
            algorithm: Algorithm::Bv,
            n: 3,
            seed: 0,
            // The task's oracle and the expectation are one and the same;
            // score the 101 circuit against a text claiming it measured 011
            // by simulating under an oracle whose secret is 011 but checking
            // a program that hard-codes no answer at all. The distribution
            // follows the oracle, so this passes; a genuinely wrong program
            // is exercised via the mutated schedule below.
            oracle: OracleSpec::BvSecret { secret: "011".into() },
        };
        let verdict = check(&task, &bv.main_qasm);
        assert!(verdict.functional_pass);

        // Dropping the final Hadamard layer genuinely breaks the readout.
        let broken = bv.main_qasm.replacen("h q[0];\nh q[1];\nh q[2];\nc[0]", "c[0]", 1);
        assert_ne!(broken, bv.main_qasm);
        let verdict = check(&task, &broken);
        assert!(verdict.syntax_pass);
        assert!(!verdict.functional_pass, "{verdict:?}");
        assert!(verdict.failure_reason.is_some());
    }

    #[test]
    fn syntax_failures_are_reported_with_diagnostics() {
        let task = random_task(Algorithm::Bv, 3, 1);
        let verdict = check(&task, "OPENQASM 3.0;\nqubit[4] q;\nhh q[0];\n");
        assert!(!verdict.syntax_pass);
        assert!(!verdict.functional_pass);
        assert!(!verdict.diagnostics.is_empty());
        assert_eq!(verdict.summary, MeasurementSummary::None);
    }

    #[test]
    fn unbound_oracle_gates_fail_at_simulation_not_syntax() {
        // CU_1 validates as nothing (undefined) -> syntax failure; but a
        // defined gate misused against a measured qubit fails functionally.
        let task = random_task(Algorithm::Bv, 2, 7);
        let text = "OPENQASM 3.0;\ninclude \"stdgates.inc\";\nbit[2] c;\nqubit[3] q;\nc[0] = measure q[0];\nh q[0];\nc[1] = measure q[1];\n";
        let verdict = check(&task, text);
        assert!(verdict.syntax_pass);
        assert!(!verdict.functional_pass);
        assert!(verdict.failure_reason.unwrap().contains("simulation failed"));
    }

    #[test]
    fn pe_miscounted_repetitions_fail() {
        let pe = gen_pe(4, 3).unwrap();
        let task = task_for(&pe, 0, OracleSpec::PePhase { k: 3, t: 4 });
        // Rewrite the 1,2,4,8 schedule into 1,2,3,6 by deleting one
        // repetition controlled by q[2] and two controlled by q[3].
        let mutated = pe
            .main_qasm
            .replacen("CU_0 q[2], q[4];\nCU_0 q[2], q[4];\nCU_0 q[2], q[4];\nCU_0 q[2], q[4];\n", "CU_0 q[2], q[4];\nCU_0 q[2], q[4];\nCU_0 q[2], q[4];\n", 1)
            .replacen("CU_0 q[3], q[4];\nCU_0 q[3], q[4];\nCU_0 q[3], q[4];\nCU_0 q[3], q[4];\nCU_0 q[3], q[4];\nCU_0 q[3], q[4];\nCU_0 q[3], q[4];\nCU_0 q[3], q[4];\n", "CU_0 q[3], q[4];\nCU_0 q[3], q[4];\nCU_0 q[3], q[4];\nCU_0 q[3], q[4];\nCU_0 q[3], q[4];\nCU_0 q[3], q[4];\n", 1);
        assert_ne!(mutated, pe.main_qasm);
        let verdict = check(&task, &mutated);
        assert!(verdict.syntax_pass);
        assert!(!verdict.functional_pass, "{verdict:?}");
    }

    #[test]
    fn measured_wstate_candidates_are_scored_on_the_marginal() {
        let ws = gen_wstate(3).unwrap();
        let task = task_for(&ws, 0, OracleSpec::WsNone);
        let mut measured = ws.main_qasm.clone();
        for j in 0..3 {
            measured.push_str(&format!("c[{j}] = measure q[{j}];\n"));
        }
        let verdict = check(&task, &measured);
        assert!(verdict.functional_pass, "{verdict:?}");
        assert!(matches!(verdict.summary, MeasurementSummary::Distribution(_)));

        // Perturbing one rotation angle destroys the uniform marginal.
        let perturbed = measured.replacen("ry(-pi/4)", "ry(-0.885)", 1);
        assert_ne!(perturbed, measured);
        let verdict = check(&task, &perturbed);
        assert!(!verdict.functional_pass);
    }

    #[test]
    fn random_oracles_are_deterministic_and_in_family() {
        for alg in Algorithm::ALL {
            let a = random_oracle(alg, 4, 42);
            let b = random_oracle(alg, 4, 42);
            assert_eq!(a.0, b.0);
            assert_eq!(a.1, b.1);
            assert_eq!(a.2, b.2);
        }
        match random_oracle(Algorithm::Bv, 5, 9).0 {
            OracleSpec::BvSecret { secret } => assert_eq!(secret.len(), 5),
            other => panic!("{other:?}"),
        }
        match random_oracle(Algorithm::Pe, 4, 11).0 {
            OracleSpec::PePhase { k, t } => {
                assert_eq!(t, 4);
                assert!(k < 16);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(random_oracle(Algorithm::Wstate, 6, 3).0, OracleSpec::WsNone);
    }

    #[test]
    fn random_pe_phases_are_uniform() {
        // 1000 seeds over 16 bins; chi-squared with 15 degrees of freedom
        // stays under the p = 0.001 critical value 37.697 for a uniform
        // draw.
        let mut counts = [0u32; 16];
        for seed in 0..1000u64 {
            match random_oracle(Algorithm::Pe, 4, seed).0 {
                OracleSpec::PePhase { k, .. } => counts[k as usize] += 1,
                other => panic!("{other:?}"),
            }
        }
        let expected = 1000.0 / 16.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 37.697, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn random_dj_mixes_constant_and_balanced_evenly() {
        let mut constants = 0;
        for seed in 0..1000u64 {
            match random_oracle(Algorithm::Dj, 4, seed).0 {
                OracleSpec::DjSpec { function: DjFunction::Constant { .. } } => constants += 1,
                OracleSpec::DjSpec { function: DjFunction::BalancedLinear { mask } } => {
                    assert_ne!(mask, "0000");
                }
                other => panic!("{other:?}"),
            }
        }
        // Five sigma around 500 for a fair coin over 1000 draws.
        assert!((421..=579).contains(&constants), "{constants}");
    }

    #[test]
    fn ideal_w_is_normalized_and_uniform() {
        let w = ideal_w(4).unwrap();
        assert!((w.norm_sq() - 1.0).abs() < 1e-12);
        assert!((w.amps()[0b0001].re - 0.5).abs() < 1e-12);
        assert!((w.amps()[0b1000].re - 0.5).abs() < 1e-12);
        assert_eq!(w.amps()[0b0011].re, 0.0);
        assert!(ideal_w(1).is_err());

        let simulated = {
            let ws = gen_wstate(2).unwrap();
            let (program, diags) =
                crate::frontend::analyze(&ws.main_qasm, &HashMap::<String, String>::new());
            assert!(diags.iter().all(|d| !d.is_error()));
            simulate(&program, &[]).unwrap().state
        };
        let f = fidelity(&simulated, &ideal_w(2).unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }

    #[test]
    fn verdict_serializes_with_machine_readable_fields() {
        let task = random_task(Algorithm::Pe, 3, 5);
        let result = gen_pe(3, match task.oracle {
            OracleSpec::PePhase { k, .. } => k,
            _ => unreachable!(),
        })
        .unwrap();
        let verdict = check(&task, &result.main_qasm);
        let json: serde_json::Value = serde_json::from_str(&serde_json::to_string(&verdict).unwrap()).unwrap();
        assert_eq!(json["syntax_pass"], true);
        assert_eq!(json["functional_pass"], true);
        assert!(json["summary"]["distribution"].is_object());
        assert!(json["failure_reason"].is_null());
        let round: Verdict = serde_json::from_value(json).unwrap();
        assert_eq!(round, verdict);
    }
}
