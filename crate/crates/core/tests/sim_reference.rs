//! Cross-checks between the production statevector simulator and the dense
//! matrix reference interpreter in `common`.

mod common;

use std::collections::BTreeSet;

use common::*;
use qsynth::frontend::{analyze, NoIncludes};
use qsynth::sim::{simulate, standard_gate_unitary, BitFn, OracleSemantics};

fn unitary_vs_mat(name: &str, params: &[f64]) -> f64 {
    let production = standard_gate_unitary(name, params).unwrap();
    let reference = std_gate_matrix(name, params).unwrap();
    assert_eq!(production.dim, reference.dim(), "{name} dimensions differ");
    let mut worst = 0.0f64;
    for r in 0..production.dim {
        for c in 0..production.dim {
            worst = worst.max((production.get(r, c) - reference.rows[r][c]).norm());
        }
    }
    worst
}

#[test]
fn standard_gate_tables_agree_and_are_unitary() {
    let angles = [0.0, 0.3, -1.2, std::f64::consts::PI, 2.0 * std::f64::consts::PI - 0.1];
    for &(name, nparams) in STD_GATES.iter() {
        let trials: Vec<Vec<f64>> = match nparams {
            0 => vec![vec![]],
            1 => angles.iter().map(|&a| vec![a]).collect(),
            3 => vec![vec![0.4, 1.1, -2.2], vec![std::f64::consts::PI, 0.0, 0.5]],
            _ => unreachable!("no standard gate takes {nparams} parameters"),
        };
        for params in trials {
            assert!(
                unitary_vs_mat(name, &params) < 1e-12,
                "{name}({params:?}) differs between the two gate tables"
            );
            let defect = std_gate_matrix(name, &params).unwrap().unitarity_defect();
            assert!(defect < 1e-12, "{name}({params:?}) is not unitary: {defect}");
        }
    }
}

#[test]
fn small_toolset_circuits_match_the_dense_reference() {
    let circuits = small_circuits();
    assert!(circuits.len() >= 60, "only {} circuits enumerated", circuits.len());
    for (label, gen) in &circuits {
        let program = analyzed(gen);
        assert!(program.total_qubits() <= 4, "{label} exceeds the small sweep");
        let fast = simulate(&program, &gen.bindings).unwrap();
        let dense = dense_simulate(&program, &gen.bindings).unwrap();

        let diff = max_amp_diff(fast.state.amps(), &dense.state);
        assert!(diff < 1e-10, "{label}: statevectors differ by {diff}");

        let norm: f64 = dense.state.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12, "{label}: norm drifted to {norm}");

        assert_eq!(
            fast.distribution.keys().collect::<Vec<_>>(),
            dense.distribution.keys().collect::<Vec<_>>(),
            "{label}: distribution supports differ"
        );
        for (key, p) in &fast.distribution {
            let q = dense.distribution[key];
            assert!((p - q).abs() < 1e-10, "{label}: P({key}) {p} vs {q}");
        }
        assert_eq!(fast.measured, dense.measured, "{label}: measurement maps differ");
    }
}

#[test]
fn textual_oracles_agree_with_semantic_bindings() {
    for (label, gen) in small_circuits() {
        if gen.oracle_include.is_none() {
            continue;
        }
        let program = analyzed(&gen);
        let semantic = simulate(&program, &gen.bindings).unwrap();
        let textual = simulate(&program, &[]).unwrap();
        let diff = max_amp_diff(semantic.state.amps(), textual.state.amps());
        assert!(diff < 1e-10, "{label}: textual oracle deviates by {diff}");
    }
}

#[test]
fn every_standard_gate_in_one_circuit_matches_the_dense_reference() {
    let source = "OPENQASM 3.0;\n\
                  include \"stdgates.inc\";\n\
                  qubit[3] q;\n\
                  h q[0];\n\
                  sx q[1];\n\
                  y q[2];\n\
                  s q[0];\n\
                  t q[1];\n\
                  sdg q[2];\n\
                  tdg q[0];\n\
                  x q[1];\n\
                  z q[2];\n\
                  u(0.3, -0.9, 2.2) q[1];\n\
                  p(1.1) q[2];\n\
                  rx(0.4) q[0];\n\
                  ry(-0.8) q[1];\n\
                  rz(2.5) q[2];\n\
                  cx q[0], q[1];\n\
                  cz q[1], q[2];\n\
                  cp(0.7) q[2], q[0];\n\
                  ch q[0], q[2];\n\
                  crx(1.3) q[1], q[0];\n\
                  cry(-0.6) q[2], q[1];\n\
                  crz(0.9) q[0], q[2];\n\
                  ccx q[0], q[1], q[2];\n\
                  swap q[0], q[2];\n";
    let (program, diags) = analyze(source, &NoIncludes);
    assert!(qsynth::frontend::passes(&diags), "{diags:?}");
    let fast = simulate(&program, &[]).unwrap();
    let dense = dense_simulate(&program, &[]).unwrap();
    let diff = max_amp_diff(fast.state.amps(), &dense.state);
    assert!(diff < 1e-12, "statevectors differ by {diff}");
}

#[test]
fn modifier_nests_match_the_dense_reference() {
    let source = "OPENQASM 3.0;\n\
                  include \"stdgates.inc\";\n\
                  gate mix a, b { cx a, b; rz(pi / 3) b; h a; }\n\
                  gate spin(theta) a { ry(theta) a; t a; }\n\
                  qubit[4] q;\n\
                  h q[0];\n\
                  h q[1];\n\
                  h q[2];\n\
                  sx q[3];\n\
                  ctrl(2) @ mix q[0], q[1], q[2], q[3];\n\
                  negctrl @ inv @ mix q[3], q[1], q[0];\n\
                  inv @ ctrl @ spin(0.7) q[2], q[0];\n\
                  negctrl(2) @ spin(-1.1) q[1], q[3], q[2];\n\
                  ctrl @ negctrl @ x q[0], q[2], q[3];\n\
                  inv @ inv @ spin(0.25) q[1];\n";
    let (program, diags) = analyze(source, &NoIncludes);
    assert!(qsynth::frontend::passes(&diags), "{diags:?}");
    let fast = simulate(&program, &[]).unwrap();
    let dense = dense_simulate(&program, &[]).unwrap();
    let diff = max_amp_diff(fast.state.amps(), &dense.state);
    assert!(diff < 1e-12, "statevectors differ by {diff}");
    let norm: f64 = dense.state.iter().map(|a| a.norm_sqr()).sum();
    assert!((norm - 1.0).abs() < 1e-12);
}

#[test]
fn binding_matrices_are_unitary_and_involutive_where_expected() {
    let n = 3usize;
    let semantics = [
        OracleSemantics::BitFlip {
            f: BitFn::Const { value: true },
            input_arity: n,
            ancilla_arity: 1,
        },
        OracleSemantics::BitFlip {
            f: BitFn::DotMask { mask: 0b101 },
            input_arity: n,
            ancilla_arity: 1,
        },
        OracleSemantics::BitFlip {
            f: BitFn::Membership { ones: BTreeSet::from([1u64, 4, 6]) },
            input_arity: n,
            ancilla_arity: 1,
        },
        OracleSemantics::Phase { marked: BTreeSet::from([5u64]), input_arity: n },
        OracleSemantics::ControlledPhase { phi: 3.0 / 16.0 },
        OracleSemantics::StatePrep { one: true },
        OracleSemantics::StatePrep { one: false },
    ];
    for sem in &semantics {
        let m = binding_matrix(sem);
        assert_eq!(m.dim(), 1 << sem.arity());
        assert!(m.unitarity_defect() < 1e-12, "{sem:?} is not unitary");
        if matches!(sem, OracleSemantics::BitFlip { .. } | OracleSemantics::Phase { .. }) {
            let twice = m.matmul(&m);
            let defect = twice.max_abs_diff(&Mat::identity(m.dim()));
            assert!(defect < 1e-12, "{sem:?} should be an involution");
        }
    }
}

#[test]
fn reset_before_gates_and_barriers_are_inert_in_both_interpreters() {
    let source = "OPENQASM 3.0;\n\
                  include \"stdgates.inc\";\n\
                  bit[2] c;\n\
                  qubit[2] q;\n\
                  reset q[0];\n\
                  reset q[1];\n\
                  barrier q[0], q[1];\n\
                  h q[0];\n\
                  cx q[0], q[1];\n\
                  barrier q[0], q[1];\n\
                  c[0] = measure q[0];\n\
                  c[1] = measure q[1];\n";
    let (program, diags) = analyze(source, &NoIncludes);
    assert!(qsynth::frontend::passes(&diags), "{diags:?}");
    let fast = simulate(&program, &[]).unwrap();
    let dense = dense_simulate(&program, &[]).unwrap();
    assert!(max_amp_diff(fast.state.amps(), &dense.state) < 1e-12);
    assert_eq!(fast.distribution.len(), 2);
    for (key, p) in &fast.distribution {
        assert!((p - 0.5).abs() < 1e-12, "Bell pair marginal P({key}) = {p}");
        assert!((p - dense.distribution[key]).abs() < 1e-12);
    }
}
