//! Semantic validation of include-resolved programs.
//!
//! Checks that every applied gate resolves to a standard gate, a user
//! definition, or an externally bound gate; that parameter counts and qubit
//! arities match (including modifier bookkeeping); and that all register
//! references are declared and in range. Diagnostics come back sorted by
//! source position.

use std::collections::HashMap;

use super::ast::*;
use super::diag::{DiagCode, Diagnostic, Span};
use super::stdgates::standard_gate;

/// Signature of a gate supplied from outside the program text, e.g. an
/// oracle bound semantically by the simulator. Extern signatures shadow
/// textual definitions of the same name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternGate {
    pub name: String,
    pub params: usize,
    pub arity: usize,
}

impl ExternGate {
    pub fn new(name: impl Into<String>, params: usize, arity: usize) -> Self {
        ExternGate { name: name.into(), params, arity }
    }
}

pub fn validate(program: &Program) -> Vec<Diagnostic> {
    validate_with_externs(program, &[])
}

pub fn validate_with_externs(program: &Program, externs: &[ExternGate]) -> Vec<Diagnostic> {
    let mut v = Validator {
        diags: Vec::new(),
        regs: HashMap::new(),
        gates: HashMap::new(),
        externs: externs.iter().map(|e| (e.name.clone(), (e.params, e.arity))).collect(),
    };
    v.registers(program);
    v.gate_defs(program);
    v.statements(program);
    super::diag::sort_diagnostics(&mut v.diags);
    v.diags
}

#[derive(Clone, Copy, PartialEq)]
enum RegKind {
    Quantum,
    Classical,
}

struct Validator {
    diags: Vec<Diagnostic>,
    regs: HashMap<String, (RegKind, u32)>,
    /// name -> (param count, arity); user and include definitions, filled in
    /// definition order so bodies can only reference earlier gates.
    gates: HashMap<String, (usize, usize)>,
    externs: HashMap<String, (usize, usize)>,
}

impl Validator {
    fn error(&mut self, code: DiagCode, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, span, msg));
    }

    fn registers(&mut self, program: &Program) {
        let quantum = program.quantum_decls.iter().map(|d| (d, RegKind::Quantum));
        let classical = program.classical_decls.iter().map(|d| (d, RegKind::Classical));
        for (decl, kind) in quantum.chain(classical) {
            if self.regs.insert(decl.name.clone(), (kind, decl.size)).is_some() {
                self.error(
                    DiagCode::DuplicateDeclaration,
                    decl.span,
                    format!("register '{}' is declared more than once", decl.name),
                );
            }
        }
    }

    fn lookup_gate(&self, name: &str) -> Option<(usize, usize)> {
        self.externs
            .get(name)
            .copied()
            .or_else(|| self.gates.get(name).copied())
            .or_else(|| standard_gate(name))
    }

    fn gate_defs(&mut self, program: &Program) {
        for def in &program.gate_defs {
            // Duplicate formal names within one definition.
            let mut formals: HashMap<&str, ()> = HashMap::new();
            for q in &def.qubits {
                if formals.insert(q.as_str(), ()).is_some() {
                    self.error(
                        DiagCode::DuplicateDeclaration,
                        def.span,
                        format!("gate '{}' repeats qubit operand '{}'", def.name, q),
                    );
                }
            }
            for apply in &def.body {
                self.check_apply(apply, Some(def));
            }
            if standard_gate(&def.name).is_some() {
                self.error(
                    DiagCode::DuplicateDeclaration,
                    def.span,
                    format!("gate '{}' redefines a standard gate", def.name),
                );
            } else if self.gates.contains_key(&def.name) {
                self.error(
                    DiagCode::DuplicateDeclaration,
                    def.span,
                    format!("gate '{}' is defined more than once", def.name),
                );
            } else if !self.externs.contains_key(&def.name) {
                self.gates
                    .insert(def.name.clone(), (def.params.len(), def.qubits.len()));
            }
        }
    }

    fn statements(&mut self, program: &Program) {
        for stmt in &program.statements {
            match stmt {
                Statement::Gate(apply) => self.check_apply(apply, None),
                Statement::Measure { qubit, bit, span } => self.check_measure(qubit, bit, *span),
                Statement::Reset { qubit, .. } => {
                    self.check_ref(qubit, RegKind::Quantum, true);
                }
                Statement::Barrier { qubits, .. } => {
                    for q in qubits {
                        self.check_ref(q, RegKind::Quantum, true);
                    }
                }
            }
        }
    }

    /// Validate one gate application, either at top level (`def` = None,
    /// operands are register refs) or inside a gate body (`def` = Some,
    /// operands are the definition's formal qubits).
    fn check_apply(&mut self, apply: &GateApply, def: Option<&GateDef>) {
        let sig = match self.lookup_gate(&apply.name) {
            Some(sig) => sig,
            None => {
                self.error(
                    DiagCode::UndefinedGate,
                    apply.span,
                    format!("gate '{}' is not defined", apply.name),
                );
                return;
            }
        };
        let (want_params, base_arity) = sig;
        if apply.params.len() != want_params {
            self.error(
                DiagCode::ParamCountMismatch,
                apply.span,
                format!(
                    "gate '{}' takes {} parameter{} but {} given",
                    apply.name,
                    want_params,
                    if want_params == 1 { "" } else { "s" },
                    apply.params.len()
                ),
            );
        }
        let param_names: &[String] = def.map(|d| d.params.as_slice()).unwrap_or(&[]);
        for expr in &apply.params {
            let env = |name: &str| {
                if param_names.iter().any(|p| p == name) {
                    Some(0.0)
                } else {
                    None
                }
            };
            match expr.fold(&env) {
                Ok(_) => {}
                Err(FoldError::UnknownName(n)) => self.error(
                    DiagCode::UndeclaredRegister,
                    apply.span,
                    format!("unknown identifier '{n}' in expression"),
                ),
                Err(FoldError::DivisionByZero) => self.error(
                    DiagCode::ParseError,
                    apply.span,
                    "division by zero in constant expression",
                ),
            }
        }
        let controls: u32 = apply.modifiers.iter().map(Modifier::control_count).sum();
        let expected = controls as usize + base_arity;
        if apply.targets.len() != expected {
            self.error(
                DiagCode::ArityMismatch,
                apply.span,
                format!(
                    "gate '{}' with modifiers expects {} qubit operand{} but {} given",
                    apply.name,
                    expected,
                    if expected == 1 { "" } else { "s" },
                    apply.targets.len()
                ),
            );
        }
        match def {
            Some(d) => {
                for r in &apply.targets {
                    if r.index.is_some() {
                        self.error(
                            DiagCode::UnsupportedConstruct,
                            r.span,
                            "gate body operands cannot be indexed",
                        );
                    } else if !d.qubits.iter().any(|q| q == &r.reg) {
                        self.error(
                            DiagCode::UndeclaredRegister,
                            r.span,
                            format!("'{}' is not an operand of gate '{}'", r.reg, d.name),
                        );
                    }
                }
                let mut seen: Vec<&str> = Vec::new();
                for r in &apply.targets {
                    if seen.contains(&r.reg.as_str()) {
                        self.error(
                            DiagCode::ArityMismatch,
                            r.span,
                            format!("qubit operand '{}' used twice in one application", r.reg),
                        );
                    }
                    seen.push(&r.reg);
                }
            }
            None => {
                let mut seen: Vec<(String, u32)> = Vec::new();
                for r in &apply.targets {
                    if let Some(pos) = self.check_ref(r, RegKind::Quantum, false) {
                        if seen.contains(&pos) {
                            self.error(
                                DiagCode::ArityMismatch,
                                r.span,
                                format!("qubit '{}[{}]' used twice in one application", pos.0, pos.1),
                            );
                        }
                        seen.push(pos);
                    }
                }
            }
        }
    }

    /// Check a top-level register reference. With `allow_whole`, a reference
    /// without an index may name a register of any size (measure/reset/
    /// barrier); otherwise only size-1 registers may be referenced bare.
    /// Returns the resolved (register, index) when it denotes a single
    /// element.
    fn check_ref(
        &mut self,
        r: &Ref,
        want: RegKind,
        allow_whole: bool,
    ) -> Option<(String, u32)> {
        let (kind, size) = match self.regs.get(&r.reg) {
            Some(&(kind, size)) => (kind, size),
            None => {
                self.error(
                    DiagCode::UndeclaredRegister,
                    r.span,
                    format!("register '{}' is not declared", r.reg),
                );
                return None;
            }
        };
        if kind != want {
            let expected = match want {
                RegKind::Quantum => "a quantum",
                RegKind::Classical => "a classical",
            };
            self.error(
                DiagCode::UndeclaredRegister,
                r.span,
                format!("'{}' is not {} register", r.reg, expected),
            );
            return None;
        }
        match r.index {
            Some(i) if i >= size => {
                self.error(
                    DiagCode::IndexOutOfRange,
                    r.span,
                    format!("index {} out of range for '{}' of size {}", i, r.reg, size),
                );
                None
            }
            Some(i) => Some((r.reg.clone(), i)),
            None if size == 1 => Some((r.reg.clone(), 0)),
            None if allow_whole => None,
            None => {
                self.error(
                    DiagCode::UnsupportedConstruct,
                    r.span,
                    format!("broadcast over register '{}' is not supported", r.reg),
                );
                None
            }
        }
    }

    fn check_measure(&mut self, qubit: &Ref, bit: &Ref, span: Span) {
        let q = self.measure_width(qubit, RegKind::Quantum);
        let b = self.measure_width(bit, RegKind::Classical);
        if let (Some(qw), Some(bw)) = (q, b) {
            if qw != bw {
                self.error(
                    DiagCode::ArityMismatch,
                    span,
                    format!("measurement widths differ: {qw} qubit(s) into {bw} bit(s)"),
                );
            }
        }
    }

    /// Width of a measurement operand: 1 when indexed, register size when
    /// whole. None if the reference itself is invalid.
    fn measure_width(&mut self, r: &Ref, want: RegKind) -> Option<u32> {
        let size = match self.regs.get(&r.reg) {
            Some(&(kind, size)) if kind == want => size,
            Some(_) => {
                let expected = match want {
                    RegKind::Quantum => "a quantum",
                    RegKind::Classical => "a classical",
                };
                self.error(
                    DiagCode::UndeclaredRegister,
                    r.span,
                    format!("'{}' is not {} register", r.reg, expected),
                );
                return None;
            }
            None => {
                self.error(
                    DiagCode::UndeclaredRegister,
                    r.span,
                    format!("register '{}' is not declared", r.reg),
                );
                return None;
            }
        };
        match r.index {
            Some(i) if i >= size => {
                self.error(
                    DiagCode::IndexOutOfRange,
                    r.span,
                    format!("index {} out of range for '{}' of size {}", i, r.reg, size),
                );
                None
            }
            Some(_) => Some(1),
            None => Some(size),
        }
    }
}
