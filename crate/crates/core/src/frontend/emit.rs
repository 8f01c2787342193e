//! Canonical text emitter. `parse(emit(p))` yields a Program structurally
//! equal to `p` (spans aside). Gate definitions that came from an include
//! are not printed; the `include` line is re-emitted instead.

use std::fmt::Write;

use super::ast::*;

pub fn emit(program: &Program) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "OPENQASM {}.{};", program.version.0, program.version.1);
    emit_body(program, &mut out);
    out
}

/// Emits a program without the version header, the form used for include
/// files and for gate-definition fragments handed around by tools.
pub fn emit_fragment(program: &Program) -> String {
    let mut out = String::new();
    emit_body(program, &mut out);
    out
}

fn emit_body(program: &Program, out: &mut String) {
    for inc in &program.includes {
        let _ = writeln!(out, "include \"{}\";", inc.name);
    }
    for def in &program.gate_defs {
        if def.origin != GateOrigin::User {
            continue;
        }
        let mut header = format!("gate {}", def.name);
        if !def.params.is_empty() {
            header.push('(');
            header.push_str(&def.params.join(", "));
            header.push(')');
        }
        header.push(' ');
        header.push_str(&def.qubits.join(", "));
        let _ = writeln!(out, "{header} {{");
        for apply in &def.body {
            let _ = writeln!(out, "  {}", format_apply(apply));
        }
        out.push_str("}\n");
    }
    for d in &program.classical_decls {
        let _ = writeln!(out, "bit[{}] {};", d.size, d.name);
    }
    for d in &program.quantum_decls {
        let _ = writeln!(out, "qubit[{}] {};", d.size, d.name);
    }
    for stmt in &program.statements {
        let line = match stmt {
            Statement::Gate(apply) => format_apply(apply),
            Statement::Measure { qubit, bit, .. } => {
                format!("{} = measure {};", format_ref(bit), format_ref(qubit))
            }
            Statement::Reset { qubit, .. } => format!("reset {};", format_ref(qubit)),
            Statement::Barrier { qubits, .. } => {
                if qubits.is_empty() {
                    "barrier;".to_string()
                } else {
                    let list: Vec<String> = qubits.iter().map(format_ref).collect();
                    format!("barrier {};", list.join(", "))
                }
            }
        };
        let _ = writeln!(out, "{line}");
    }
}

fn format_apply(apply: &GateApply) -> String {
    let mut s = String::new();
    for m in &apply.modifiers {
        match m {
            Modifier::Ctrl(1) => s.push_str("ctrl @ "),
            Modifier::Ctrl(k) => {
                let _ = write!(s, "ctrl({k}) @ ");
            }
            Modifier::NegCtrl(1) => s.push_str("negctrl @ "),
            Modifier::NegCtrl(k) => {
                let _ = write!(s, "negctrl({k}) @ ");
            }
            Modifier::Inv => s.push_str("inv @ "),
        }
    }
    s.push_str(&apply.name);
    if !apply.params.is_empty() {
        let list: Vec<String> = apply.params.iter().map(format_expr).collect();
        let _ = write!(s, "({})", list.join(", "));
    }
    s.push(' ');
    let list: Vec<String> = apply.targets.iter().map(format_ref).collect();
    s.push_str(&list.join(", "));
    s.push(';');
    s
}

fn format_ref(r: &Ref) -> String {
    match r.index {
        Some(i) => format!("{}[{}]", r.reg, i),
        None => r.reg.clone(),
    }
}

/// Precedence-aware expression printer; parenthesizes exactly where the
/// grammar would otherwise regroup on reparse.
pub fn format_expr(e: &Expr) -> String {
    fn prec(e: &Expr) -> u8 {
        match e {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Lit(..) | Expr::Pi | Expr::Param(..) => 4,
        }
    }
    fn wrap(child: &Expr, min: u8) -> String {
        let s = format_expr(child);
        if prec(child) < min {
            format!("({s})")
        } else {
            s
        }
    }
    match e {
        Expr::Lit(v) => format!("{v}"),
        Expr::Pi => "pi".to_string(),
        Expr::Param(name) => name.clone(),
        Expr::Neg(inner) => format!("-{}", wrap(inner, 3)),
        Expr::Add(a, b) => format!("{} + {}", wrap(a, 1), wrap(b, 2)),
        Expr::Sub(a, b) => format!("{} - {}", wrap(a, 1), wrap(b, 2)),
        Expr::Mul(a, b) => format!("{}*{}", wrap(a, 2), wrap(b, 3)),
        Expr::Div(a, b) => format!("{}/{}", wrap(a, 2), wrap(b, 3)),
    }
}
