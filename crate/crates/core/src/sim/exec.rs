//! Program interpreter: expands user gate definitions, peels modifiers,
//! applies bound oracles semantically, and produces the exact measurement
//! marginal.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::frontend::ast::*;

use super::binding::{OracleBinding, OracleSemantics};
use super::gates::standard_gate_unitary;
use super::state::StateVector;
use super::{Distribution, SimError, MAX_QUBITS};

const MAX_EXPANSION_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub state: StateVector,
    pub distribution: Distribution,
    /// Global classical bit index → global qubit index it was measured
    /// from. Later measurements into the same bit overwrite earlier ones.
    pub measured: BTreeMap<usize, usize>,
}

/// Run a validated program. `bindings` give semantics to oracle gate names
/// and shadow any textual definition of the same name.
pub fn simulate(program: &Program, bindings: &[OracleBinding]) -> Result<SimResult, SimError> {
    let mut qregs: HashMap<&str, (usize, usize)> = HashMap::new();
    let mut offset = 0usize;
    for d in &program.quantum_decls {
        qregs.insert(&d.name, (offset, d.size as usize));
        offset += d.size as usize;
    }
    let num_qubits = offset;
    if num_qubits > MAX_QUBITS {
        return Err(SimError::QubitLimitExceeded(num_qubits));
    }
    let mut cregs: HashMap<&str, (usize, usize)> = HashMap::new();
    let mut coffset = 0usize;
    for d in &program.classical_decls {
        cregs.insert(&d.name, (coffset, d.size as usize));
        coffset += d.size as usize;
    }

    let defs: HashMap<&str, &GateDef> =
        program.gate_defs.iter().map(|d| (d.name.as_str(), d)).collect();
    let bound: HashMap<&str, &OracleBinding> =
        bindings.iter().map(|b| (b.gate_name.as_str(), b)).collect();

    let mut exec = Exec {
        state: StateVector::new(num_qubits)?,
        touched: vec![false; num_qubits],
        measured_q: vec![false; num_qubits],
        measured: BTreeMap::new(),
        defs,
        bound,
    };

    for stmt in &program.statements {
        match stmt {
            Statement::Gate(apply) => {
                exec.run_apply(apply, &Scope::Top(&qregs), &[], false, 0)?
            }
            Statement::Measure { qubit, bit, .. } => {
                let qs = expand_ref(qubit, &qregs)?;
                let cs = expand_ref(bit, &cregs)?;
                if qs.len() != cs.len() {
                    return Err(SimError::BadProgram(
                        "measurement register widths differ".to_string(),
                    ));
                }
                for (q, c) in qs.into_iter().zip(cs) {
                    exec.measured_q[q] = true;
                    exec.measured.insert(c, q);
                }
            }
            Statement::Reset { qubit, .. } => {
                for q in expand_ref(qubit, &qregs)? {
                    if exec.measured_q[q] {
                        return Err(SimError::MeasuredQubitReused(q));
                    }
                    if exec.touched[q] {
                        return Err(SimError::ResetAfterGate(q));
                    }
                    // Untouched qubits are still |0⟩; reset is a no-op.
                }
            }
            Statement::Barrier { .. } => {}
        }
    }

    let distribution = exec.distribution();
    Ok(SimResult { state: exec.state, distribution, measured: exec.measured })
}

/// Resolve a register reference to the global qubit/bit indices it denotes.
fn expand_ref(r: &Ref, regs: &HashMap<&str, (usize, usize)>) -> Result<Vec<usize>, SimError> {
    let &(offset, size) = regs
        .get(r.reg.as_str())
        .ok_or_else(|| SimError::BadProgram(format!("register '{}' is not declared", r.reg)))?;
    match r.index {
        Some(i) if (i as usize) < size => Ok(vec![offset + i as usize]),
        Some(i) => Err(SimError::BadProgram(format!("index {} out of range for '{}'", i, r.reg))),
        None => Ok((offset..offset + size).collect()),
    }
}

enum Scope<'a> {
    Top(&'a HashMap<&'a str, (usize, usize)>),
    Body { formals: HashMap<&'a str, usize>, params: HashMap<&'a str, f64> },
}

impl<'a> Scope<'a> {
    fn resolve(&self, r: &Ref) -> Result<usize, SimError> {
        match self {
            Scope::Top(qregs) => {
                let &(offset, size) = qregs.get(r.reg.as_str()).ok_or_else(|| {
                    SimError::BadProgram(format!("register '{}' is not declared", r.reg))
                })?;
                match r.index {
                    Some(i) if (i as usize) < size => Ok(offset + i as usize),
                    Some(i) => Err(SimError::BadProgram(format!(
                        "index {} out of range for '{}'",
                        i, r.reg
                    ))),
                    None if size == 1 => Ok(offset),
                    None => Err(SimError::BadProgram(format!(
                        "register '{}' used without an index",
                        r.reg
                    ))),
                }
            }
            Scope::Body { formals, .. } => {
                if r.index.is_some() {
                    return Err(SimError::BadProgram(
                        "gate body operands cannot be indexed".to_string(),
                    ));
                }
                formals.get(r.reg.as_str()).copied().ok_or_else(|| {
                    SimError::BadProgram(format!("'{}' is not an operand in scope", r.reg))
                })
            }
        }
    }

    fn fold(&self, expr: &Expr) -> Result<f64, SimError> {
        let lookup = |name: &str| match self {
            Scope::Top(_) => None,
            Scope::Body { params, .. } => params.get(name).copied(),
        };
        expr.fold(&lookup).map_err(|e| match e {
            FoldError::UnknownName(n) => {
                SimError::BadProgram(format!("unknown identifier '{n}' in expression"))
            }
            FoldError::DivisionByZero => {
                SimError::BadProgram("division by zero in expression".to_string())
            }
        })
    }
}

struct Exec<'a> {
    state: StateVector,
    touched: Vec<bool>,
    measured_q: Vec<bool>,
    measured: BTreeMap<usize, usize>,
    defs: HashMap<&'a str, &'a GateDef>,
    bound: HashMap<&'a str, &'a OracleBinding>,
}

impl<'a> Exec<'a> {
    fn run_apply(
        &mut self,
        apply: &GateApply,
        scope: &Scope,
        outer_controls: &[(usize, bool)],
        outer_inverted: bool,
        depth: usize,
    ) -> Result<(), SimError> {
        if depth > MAX_EXPANSION_DEPTH {
            return Err(SimError::BadProgram(format!(
                "gate '{}' expands too deeply",
                apply.name
            )));
        }

        // Peel modifiers left to right; each ctrl/negctrl consumes operands
        // from the front of the target list.
        let mut controls: Vec<(usize, bool)> = outer_controls.to_vec();
        let mut inverted = outer_inverted;
        let mut cursor = 0usize;
        for m in &apply.modifiers {
            match m {
                Modifier::Ctrl(k) | Modifier::NegCtrl(k) => {
                    let polarity = matches!(m, Modifier::Ctrl(_));
                    for _ in 0..*k {
                        let r = apply.targets.get(cursor).ok_or_else(|| {
                            SimError::BadProgram(format!(
                                "gate '{}' has fewer operands than its modifiers require",
                                apply.name
                            ))
                        })?;
                        controls.push((scope.resolve(r)?, polarity));
                        cursor += 1;
                    }
                }
                Modifier::Inv => inverted = !inverted,
            }
        }
        let mut targets = Vec::with_capacity(apply.targets.len() - cursor);
        for r in &apply.targets[cursor..] {
            targets.push(scope.resolve(r)?);
        }
        let mut params = Vec::with_capacity(apply.params.len());
        for e in &apply.params {
            params.push(scope.fold(e)?);
        }

        for &(q, _) in &controls {
            if self.measured_q[q] {
                return Err(SimError::MeasuredQubitReused(q));
            }
            self.touched[q] = true;
        }
        for &q in &targets {
            if self.measured_q[q] {
                return Err(SimError::MeasuredQubitReused(q));
            }
            self.touched[q] = true;
        }

        if let Some(binding) = self.bound.get(apply.name.as_str()).copied() {
            if !params.is_empty() {
                return Err(SimError::BadProgram(format!(
                    "bound gate '{}' takes no parameters",
                    apply.name
                )));
            }
            return self.apply_binding(binding, &targets, &controls, inverted);
        }

        if let Some(def) = self.defs.get(apply.name.as_str()).copied() {
            if def.qubits.len() != targets.len() || def.params.len() != params.len() {
                return Err(SimError::BadProgram(format!(
                    "application of '{}' does not match its definition",
                    apply.name
                )));
            }
            let formals: HashMap<&str, usize> = def
                .qubits
                .iter()
                .map(String::as_str)
                .zip(targets.iter().copied())
                .collect();
            let penv: HashMap<&str, f64> = def
                .params
                .iter()
                .map(String::as_str)
                .zip(params.iter().copied())
                .collect();
            let body_scope = Scope::Body { formals, params: penv };
            if inverted {
                for inner in def.body.iter().rev() {
                    self.run_apply(inner, &body_scope, &controls, true, depth + 1)?;
                }
            } else {
                for inner in def.body.iter() {
                    self.run_apply(inner, &body_scope, &controls, false, depth + 1)?;
                }
            }
            return Ok(());
        }

        match standard_gate_unitary(&apply.name, &params) {
            Ok(u) => {
                let u = if inverted { u.adjoint() } else { u };
                self.state.apply(&u, &targets, &controls)
            }
            Err(SimError::UnknownGate(_)) => Err(SimError::UnboundGate(apply.name.clone())),
            Err(e) => Err(e),
        }
    }

    fn apply_binding(
        &mut self,
        binding: &OracleBinding,
        targets: &[usize],
        controls: &[(usize, bool)],
        inverted: bool,
    ) -> Result<(), SimError> {
        if targets.len() != binding.semantics.arity() {
            return Err(SimError::BadProgram(format!(
                "bound gate '{}' takes {} operand(s) but {} given",
                binding.gate_name,
                binding.semantics.arity(),
                targets.len()
            )));
        }
        let mut seen = 0u64;
        for &q in targets.iter().chain(controls.iter().map(|(q, _)| q)) {
            if seen >> q & 1 == 1 {
                return Err(SimError::IndexOverlap);
            }
            seen |= 1 << q;
        }
        let mut pos = 0usize;
        let mut neg = 0usize;
        for &(q, polarity) in controls {
            if polarity {
                pos |= 1 << q;
            } else {
                neg |= 1 << q;
            }
        }
        let ctrl_ok = move |i: usize| i & pos == pos && i & neg == 0;

        match &binding.semantics {
            OracleSemantics::BitFlip { f, input_arity, ancilla_arity } => {
                if *ancilla_arity != 1 {
                    return Err(SimError::BadProgram(
                        "bit-flip oracles use exactly one ancilla".to_string(),
                    ));
                }
                let inputs = &targets[..*input_arity];
                let ancilla = targets[*input_arity];
                // Self-inverse, so `inverted` needs no handling.
                let gather = input_gather(inputs);
                self.state
                    .swap_pairs_where(ancilla, |i| ctrl_ok(i) && f.eval(gather(i)));
            }
            OracleSemantics::Phase { marked, input_arity } => {
                let inputs = &targets[..*input_arity];
                let gather = input_gather(inputs);
                self.state.scale_where(Complex64::new(-1.0, 0.0), |i| {
                    ctrl_ok(i) && marked.contains(&gather(i))
                });
            }
            OracleSemantics::ControlledPhase { phi } => {
                let angle = 2.0 * std::f64::consts::PI * phi * if inverted { -1.0 } else { 1.0 };
                let factor = Complex64::from_polar(1.0, angle);
                let both = (1usize << targets[0]) | (1usize << targets[1]);
                self.state
                    .scale_where(factor, |i| ctrl_ok(i) && i & both == both);
            }
            OracleSemantics::StatePrep { one } => {
                if *one {
                    let x = standard_gate_unitary("x", &[])?;
                    self.state.apply(&x, &[targets[0]], controls)?;
                }
            }
        }
        Ok(())
    }

    fn distribution(&self) -> Distribution {
        let mut dist = Distribution::new();
        if self.measured.is_empty() {
            return dist;
        }
        let qubits: Vec<usize> = self.measured.values().copied().collect();
        let m = qubits.len();
        let mut probs = vec![0.0f64; 1 << m];
        for (i, amp) in self.state.amps().iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut pattern = 0usize;
            for (j, &q) in qubits.iter().enumerate() {
                if i >> q & 1 == 1 {
                    pattern |= 1 << j;
                }
            }
            probs[pattern] += p;
        }
        for (pattern, &p) in probs.iter().enumerate() {
            if p < 1e-14 {
                continue;
            }
            let key: String = (0..m)
                .map(|j| if pattern >> j & 1 == 1 { '1' } else { '0' })
                .collect();
            dist.insert(key, p);
        }
        dist
    }
}

/// Builds a closure that reads the oracle input value x out of a global
/// basis index: bit j of x is the state of `inputs[j]`.
fn input_gather(inputs: &[usize]) -> impl Fn(usize) -> u64 {
    let inputs = inputs.to_vec();
    move |i: usize| {
        let mut x = 0u64;
        for (j, &q) in inputs.iter().enumerate() {
            if i >> q & 1 == 1 {
                x |= 1 << j;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{analyze, NoIncludes};
    use crate::sim::binding::BitFn;

    fn run(src: &str, bindings: &[OracleBinding]) -> SimResult {
        let externs: Vec<_> = bindings.iter().map(|b| b.extern_sig()).collect();
        let (prog, diags) =
            crate::frontend::analyze_with_externs(src, &NoIncludes, &externs);
        assert!(crate::frontend::passes(&diags), "{diags:?}");
        simulate(&prog, bindings).unwrap()
    }

    #[test]
    fn hadamard_measure_is_fifty_fifty() {
        let r = run("OPENQASM 3.0;\nqubit q;\nbit c;\nh q;\nc = measure q;\n", &[]);
        assert!((r.distribution["0"] - 0.5).abs() < 1e-12);
        assert!((r.distribution["1"] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bell_state_distribution() {
        let r = run(
            "OPENQASM 3.0;\nqubit[2] q;\nbit[2] c;\nh q[0];\ncx q[0], q[1];\nc = measure q;\n",
            &[],
        );
        assert_eq!(r.distribution.len(), 2);
        assert!((r.distribution["00"] - 0.5).abs() < 1e-12);
        assert!((r.distribution["11"] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn user_gate_expansion_with_params() {
        let r = run(
            "OPENQASM 3.0;\ngate flip(a) x0 { ry(a) x0; ry(a) x0; }\nqubit q;\nbit c;\nflip(pi/2) q;\nc = measure q;\n",
            &[],
        );
        // Two ry(pi/2) make a full ry(pi) = flip up to phase.
        assert!((r.distribution["1"] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn inv_modifier_on_user_gate() {
        let r = run(
            "OPENQASM 3.0;\ngate twist x0 { t x0; h x0; }\nqubit q;\nbit c;\ntwist q;\ninv @ twist q;\nc = measure q;\n",
            &[],
        );
        assert!((r.distribution["0"] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ctrl_modifier_on_user_gate_distributes() {
        // Controlled-(X) via a 1-qubit user gate must equal cx.
        let a = run(
            "OPENQASM 3.0;\ngate mx x0 { x x0; }\nqubit[2] q;\nbit[2] c;\nh q[0];\nctrl @ mx q[0], q[1];\nc = measure q;\n",
            &[],
        );
        let b = run(
            "OPENQASM 3.0;\nqubit[2] q;\nbit[2] c;\nh q[0];\ncx q[0], q[1];\nc = measure q;\n",
            &[],
        );
        assert_eq!(a.distribution, b.distribution);
    }

    #[test]
    fn gate_after_measure_is_rejected() {
        let (prog, diags) = crate::frontend::analyze(
            "OPENQASM 3.0;\nqubit q;\nbit c;\nh q;\nc = measure q;\nx q;\n",
            &NoIncludes,
        );
        assert!(crate::frontend::passes(&diags));
        assert_eq!(simulate(&prog, &[]), Err(SimError::MeasuredQubitReused(0)));
    }

    #[test]
    fn reset_before_any_gate_is_noop_but_after_is_rejected() {
        let ok = run("OPENQASM 3.0;\nqubit[2] q;\nbit c;\nreset q[1];\nh q[0];\nc = measure q[0];\n", &[]);
        assert_eq!(ok.distribution.len(), 2);
        let (prog, _) = analyze(
            "OPENQASM 3.0;\nqubit q;\nbit c;\nh q;\nreset q;\nc = measure q;\n",
            &NoIncludes,
        );
        assert_eq!(simulate(&prog, &[]), Err(SimError::ResetAfterGate(0)));
    }

    #[test]
    fn qubit_cap() {
        let (prog, diags) = analyze("OPENQASM 3.0;\nqubit[14] q;\n", &NoIncludes);
        assert!(crate::frontend::passes(&diags));
        assert_eq!(simulate(&prog, &[]), Err(SimError::QubitLimitExceeded(14)));
    }

    #[test]
    fn unbound_gate_errors() {
        let (prog, _) = crate::frontend::parser::parse("OPENQASM 3.0;\nqubit q;\nUf q;\n");
        assert_eq!(simulate(&prog, &[]), Err(SimError::UnboundGate("Uf".to_string())));
    }

    #[test]
    fn bitflip_oracle_xors_ancilla() {
        let binding = OracleBinding::new(
            "Uf",
            OracleSemantics::BitFlip {
                f: BitFn::DotMask { mask: 0b10 },
                input_arity: 2,
                ancilla_arity: 1,
            },
        );
        // Inputs |x1 x0⟩ = |10⟩ (qubit1 = 1): f = 1, ancilla flips.
        let r = run(
            "OPENQASM 3.0;\nqubit[3] q;\nbit[3] c;\nx q[1];\nUf q[0], q[1], q[2];\nc = measure q;\n",
            std::slice::from_ref(&binding),
        );
        assert!((r.distribution["011"] - 1.0).abs() < 1e-12, "{:?}", r.distribution);
        // Inputs |01⟩: f = 0, ancilla stays.
        let r = run(
            "OPENQASM 3.0;\nqubit[3] q;\nbit[3] c;\nx q[0];\nUf q[0], q[1], q[2];\nc = measure q;\n",
            std::slice::from_ref(&binding),
        );
        assert!((r.distribution["100"] - 1.0).abs() < 1e-12, "{:?}", r.distribution);
    }

    #[test]
    fn binding_shadows_textual_definition() {
        // The program defines Uf as identity-ish, but the binding flips the
        // ancilla unconditionally; the binding must win.
        let binding = OracleBinding::new(
            "Uf",
            OracleSemantics::BitFlip {
                f: BitFn::Const { value: true },
                input_arity: 1,
                ancilla_arity: 1,
            },
        );
        let r = run(
            "OPENQASM 3.0;\ngate Uf x0, y0 { x x0; x x0; }\nqubit[2] q;\nbit[2] c;\nUf q[0], q[1];\nc = measure q;\n",
            std::slice::from_ref(&binding),
        );
        assert!((r.distribution["01"] - 1.0).abs() < 1e-12, "{:?}", r.distribution);
    }

    #[test]
    fn phase_oracle_flips_sign_of_marked_state() {
        let binding = OracleBinding::new(
            "Uf",
            OracleSemantics::Phase { marked: [0b11u64].into_iter().collect(), input_arity: 2 },
        );
        let r = run(
            "OPENQASM 3.0;\nqubit[2] q;\nh q[0];\nh q[1];\nUf q[0], q[1];\n",
            std::slice::from_ref(&binding),
        );
        let amps = r.state.amps();
        assert!((amps[3].re + 0.5).abs() < 1e-12);
        assert!((amps[0].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn controlled_phase_binding_and_its_inverse() {
        let binding =
            OracleBinding::new("CU_0", OracleSemantics::ControlledPhase { phi: 0.125 });
        let r = run(
            "OPENQASM 3.0;\nqubit[2] q;\nh q[0];\nx q[1];\nCU_0 q[0], q[1];\ninv @ CU_0 q[0], q[1];\n",
            std::slice::from_ref(&binding),
        );
        // Forward then inverse cancels: back to (|0⟩+|1⟩)/√2 ⊗ |1⟩.
        let amps = r.state.amps();
        let r2 = 1.0 / 2.0f64.sqrt();
        assert!((amps[2].re - r2).abs() < 1e-12);
        assert!((amps[3].re - r2).abs() < 1e-12);
    }

    #[test]
    fn state_prep_binding() {
        let binding = OracleBinding::new("Psi", OracleSemantics::StatePrep { one: true });
        let r = run(
            "OPENQASM 3.0;\nqubit q;\nbit c;\nPsi q;\nc = measure q;\n",
            std::slice::from_ref(&binding),
        );
        assert!((r.distribution["1"] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn whole_register_measure_maps_bits_in_order() {
        let r = run(
            "OPENQASM 3.0;\nqubit[3] q;\nbit[3] c;\nx q[2];\nc = measure q;\n",
            &[],
        );
        assert!((r.distribution["001"] - 1.0).abs() < 1e-12, "{:?}", r.distribution);
    }

    #[test]
    fn remeasuring_into_another_bit_is_allowed() {
        let r = run(
            "OPENQASM 3.0;\nqubit q;\nbit[2] c;\nx q;\nc[0] = measure q;\nc[1] = measure q;\n",
            &[],
        );
        assert!((r.distribution["11"] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measureless_program_has_empty_distribution() {
        let r = run("OPENQASM 3.0;\nqubit[2] q;\nh q[0];\n", &[]);
        assert!(r.distribution.is_empty());
        assert!((r.state.norm_sq() - 1.0).abs() < 1e-12);
    }
}
