//! Shared AST construction helpers for the generators: gate-application
//! shorthands, the inverse-QFT definition, and the oracle gate bodies that
//! back each include file.

use std::collections::BTreeSet;

use crate::frontend::{
    Expr, GateApply, GateDef, GateOrigin, Modifier, Program, Ref, RegDecl, Span, Statement,
};

/// Formal qubit name used inside generated gate definitions.
pub fn formal(j: usize) -> String {
    format!("_gate_q_{j}")
}

/// Reference to one element of a register.
pub fn qref(reg: &str, index: u32) -> Ref {
    Ref { reg: reg.to_string(), index: Some(index), span: Span::none() }
}

/// Reference to a bare (non-indexed) name, used for gate formals.
pub fn bare(name: &str) -> Ref {
    Ref { reg: name.to_string(), index: None, span: Span::none() }
}

pub fn apply(name: &str, params: Vec<Expr>, targets: Vec<Ref>) -> GateApply {
    GateApply {
        modifiers: Vec::new(),
        name: name.to_string(),
        params,
        targets,
        span: Span::none(),
    }
}

pub fn apply_ctrl(controls: u32, name: &str, targets: Vec<Ref>) -> GateApply {
    GateApply {
        modifiers: vec![Modifier::Ctrl(controls)],
        name: name.to_string(),
        params: Vec::new(),
        targets,
        span: Span::none(),
    }
}

pub fn gate_stmt(apply: GateApply) -> Statement {
    Statement::Gate(apply)
}

pub fn measure_stmt(creg: &str, bit: u32, qreg: &str, qubit: u32) -> Statement {
    Statement::Measure {
        qubit: qref(qreg, qubit),
        bit: qref(creg, bit),
        span: Span::none(),
    }
}

pub fn reg(name: &str, size: u32) -> RegDecl {
    RegDecl { name: name.to_string(), size, span: Span::none() }
}

pub fn lit(v: f64) -> Expr {
    Expr::Lit(v)
}

/// `pi/d`
pub fn pi_over(d: f64) -> Expr {
    Expr::Div(Box::new(Expr::Pi), Box::new(Expr::Lit(d)))
}

/// `-pi/d`, built the way the parser reads that text (negated numerator).
pub fn neg_pi_over(d: f64) -> Expr {
    Expr::Div(
        Box::new(Expr::Neg(Box::new(Expr::Pi))),
        Box::new(Expr::Lit(d)),
    )
}

/// `2*pi*k/d`, the angle of a controlled-phase rotation by the fraction k/d
/// of a full turn.
pub fn two_pi_times_over(k: f64, d: f64) -> Expr {
    Expr::Div(
        Box::new(Expr::Mul(
            Box::new(Expr::Mul(Box::new(Expr::Lit(2.0)), Box::new(Expr::Pi))),
            Box::new(Expr::Lit(k)),
        )),
        Box::new(Expr::Lit(d)),
    )
}

fn user_def(name: &str, qubits: Vec<String>, body: Vec<GateApply>) -> GateDef {
    GateDef {
        name: name.to_string(),
        params: Vec::new(),
        qubits,
        body,
        origin: GateOrigin::User,
        span: Span::none(),
    }
}

/// Inverse quantum Fourier transform over `t` qubits: reverse the register
/// with swaps, then run the descending-angle controlled-phase ladder.
pub fn iqft_def(t: u32) -> GateDef {
    let t = t as usize;
    let formals: Vec<String> = (0..t).map(formal).collect();
    let mut body = Vec::new();
    for i in 0..t / 2 {
        body.push(apply("swap", vec![], vec![bare(&formals[i]), bare(&formals[t - 1 - i])]));
    }
    for m in 0..t {
        for j in 0..m {
            let denom = (1u64 << (m - j)) as f64;
            body.push(apply(
                "cp",
                vec![neg_pi_over(denom)],
                vec![bare(&formals[j]), bare(&formals[m])],
            ));
        }
        body.push(apply("h", vec![], vec![bare(&formals[m])]));
    }
    user_def("IQFT", formals, body)
}

/// What a bit-flip oracle gate body computes into its ancilla.
pub enum BitFlipBody {
    /// f(x) = value everywhere.
    Constant(bool),
    /// f(x) = parity of x AND mask, one CNOT per set mask bit.
    DotMask(u64),
    /// f(x) = 1 exactly on the given basis values, one multi-controlled X
    /// per member with X conjugation selecting the pattern.
    Membership(BTreeSet<u64>),
}

/// Bit-flip oracle over `n` inputs plus one ancilla (the last formal).
pub fn bitflip_oracle_def(name: &str, n: u32, body_kind: &BitFlipBody) -> GateDef {
    let n = n as usize;
    let formals: Vec<String> = (0..=n).map(formal).collect();
    let ancilla = bare(&formals[n]);
    let mut body = Vec::new();
    match body_kind {
        BitFlipBody::Constant(value) => {
            if *value {
                body.push(apply("x", vec![], vec![ancilla]));
            }
        }
        BitFlipBody::DotMask(mask) => {
            for (j, f) in formals.iter().take(n).enumerate() {
                if mask >> j & 1 == 1 {
                    body.push(apply("cx", vec![], vec![bare(f), ancilla.clone()]));
                }
            }
        }
        BitFlipBody::Membership(members) => {
            for &member in members {
                let conjugation: Vec<GateApply> = (0..n)
                    .filter(|j| member >> j & 1 == 0)
                    .map(|j| apply("x", vec![], vec![bare(&formals[j])]))
                    .collect();
                body.extend(conjugation.iter().cloned());
                let mut operands: Vec<Ref> = formals.iter().take(n).map(|f| bare(f)).collect();
                operands.push(ancilla.clone());
                body.push(apply_ctrl(n as u32, "x", operands));
                body.extend(conjugation);
            }
        }
    }
    user_def(name, formals, body)
}

/// Phase oracle over `n` qubits: flips the sign of each marked basis state
/// via an X-conjugated multi-controlled Z.
pub fn phase_oracle_def(name: &str, n: u32, marked: &BTreeSet<u64>) -> GateDef {
    let n = n as usize;
    let formals: Vec<String> = (0..n).map(formal).collect();
    let mut body = Vec::new();
    for &member in marked {
        let conjugation: Vec<GateApply> = (0..n)
            .filter(|j| member >> j & 1 == 0)
            .map(|j| apply("x", vec![], vec![bare(&formals[j])]))
            .collect();
        body.extend(conjugation.iter().cloned());
        body.push(apply_ctrl(
            n as u32 - 1,
            "z",
            formals.iter().map(|f| bare(f)).collect(),
        ));
        body.extend(conjugation);
    }
    user_def(name, formals, body)
}

/// Controlled application of a phase `e^{2*pi*i*k/2^t}` to the target when
/// both qubits are set; the textual body mirrors the semantic binding.
pub fn controlled_phase_def(name: &str, turns_numerator: f64, turns_denominator: f64) -> GateDef {
    let body = vec![apply(
        "cp",
        vec![two_pi_times_over(turns_numerator, turns_denominator)],
        vec![bare(&formal(0)), bare(&formal(1))],
    )];
    user_def(name, vec![formal(0), formal(1)], body)
}

/// Eigenstate preparation: X when the eigenstate is |1>.
pub fn state_prep_def(name: &str, one: bool) -> GateDef {
    let body = if one {
        vec![apply("x", vec![], vec![bare(&formal(0))])]
    } else {
        vec![]
    };
    user_def(name, vec![formal(0)], body)
}

/// Assembles a full program from its parts.
pub fn program(
    includes: Vec<&str>,
    gate_defs: Vec<GateDef>,
    classical: Vec<RegDecl>,
    quantum: Vec<RegDecl>,
    statements: Vec<Statement>,
) -> Program {
    let mut p = Program::empty();
    p.includes = includes
        .into_iter()
        .map(|name| crate::frontend::Include { name: name.to_string(), span: Span::none() })
        .collect();
    p.gate_defs = gate_defs;
    p.classical_decls = classical;
    p.quantum_decls = quantum;
    p.statements = statements;
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{emit_fragment, parse_fragment};

    fn fragment_of(def: &GateDef) -> String {
        let mut p = Program::empty();
        p.gate_defs.push(def.clone());
        emit_fragment(&p)
    }

    #[test]
    fn iqft_matches_the_descending_ladder_shape() {
        let def = iqft_def(4);
        let text = fragment_of(&def);
        let expected = "gate IQFT _gate_q_0, _gate_q_1, _gate_q_2, _gate_q_3 {\n  \
             swap _gate_q_0, _gate_q_3;\n  \
             swap _gate_q_1, _gate_q_2;\n  \
             h _gate_q_0;\n  \
             cp(-pi/2) _gate_q_0, _gate_q_1;\n  \
             h _gate_q_1;\n  \
             cp(-pi/4) _gate_q_0, _gate_q_2;\n  \
             cp(-pi/2) _gate_q_1, _gate_q_2;\n  \
             h _gate_q_2;\n  \
             cp(-pi/8) _gate_q_0, _gate_q_3;\n  \
             cp(-pi/4) _gate_q_1, _gate_q_3;\n  \
             cp(-pi/2) _gate_q_2, _gate_q_3;\n  \
             h _gate_q_3;\n}\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn oracle_defs_parse_as_fragments() {
        for def in [
            bitflip_oracle_def("Uf", 3, &BitFlipBody::DotMask(0b101)),
            bitflip_oracle_def("Uf", 3, &BitFlipBody::Constant(true)),
            bitflip_oracle_def("Uf", 2, &BitFlipBody::Membership([1u64, 2u64].into())),
            phase_oracle_def("Oracle", 3, &[0b101u64].into()),
            controlled_phase_def("CU_0", 3.0, 16.0),
            state_prep_def("Psi", true),
        ] {
            let text = fragment_of(&def);
            let (frag, diags) = parse_fragment(&text);
            assert!(diags.iter().all(|d| !d.is_error()), "{text}\n{diags:?}");
            assert_eq!(frag.gate_defs.len(), 1, "{text}");
            assert_eq!(frag.gate_defs[0].qubits, def.qubits);
        }
    }

    #[test]
    fn dot_mask_oracle_emits_one_cnot_per_set_bit() {
        let def = bitflip_oracle_def("Uf", 4, &BitFlipBody::DotMask(0b1011));
        assert_eq!(def.body.len(), 3);
        let text = fragment_of(&def);
        assert!(text.contains("cx _gate_q_0, _gate_q_4;"));
        assert!(text.contains("cx _gate_q_1, _gate_q_4;"));
        assert!(text.contains("cx _gate_q_3, _gate_q_4;"));
        assert!(!text.contains("cx _gate_q_2"));
    }
}
