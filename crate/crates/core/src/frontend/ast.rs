//! AST for the supported OpenQASM 3 subset.
//!
//! Equality deliberately ignores source spans: two programs are equal when
//! they have the same structure, which is what the parse/emit round-trip
//! guarantees. Spans only feed diagnostics.

use super::diag::Span;

/// A parsed program. Declarations are hoisted into their own lists; the
/// original statement order of gate applications, measurements, resets and
/// barriers is preserved in `statements`.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub version: (u32, u32),
    pub includes: Vec<Include>,
    pub gate_defs: Vec<GateDef>,
    pub quantum_decls: Vec<RegDecl>,
    pub classical_decls: Vec<RegDecl>,
    pub statements: Vec<Statement>,
}

impl Program {
    pub fn empty() -> Self {
        Program {
            version: (3, 0),
            includes: Vec::new(),
            gate_defs: Vec::new(),
            quantum_decls: Vec::new(),
            classical_decls: Vec::new(),
            statements: Vec::new(),
        }
    }

    /// Total number of declared qubits, in declaration order.
    pub fn total_qubits(&self) -> u32 {
        self.quantum_decls.iter().map(|d| d.size).sum()
    }

    pub fn find_gate_def(&self, name: &str) -> Option<&GateDef> {
        self.gate_defs.iter().find(|g| g.name == name)
    }
}

#[derive(Debug, Clone)]
pub struct Include {
    pub name: String,
    pub span: Span,
}

impl PartialEq for Include {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

/// Where a gate definition came from. Definitions pulled in by
/// `resolve_includes` keep the include name so the emitter can skip them and
/// re-emit the `include` line instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateOrigin {
    User,
    Include(String),
}

#[derive(Debug, Clone)]
pub struct GateDef {
    pub name: String,
    pub params: Vec<String>,
    pub qubits: Vec<String>,
    pub body: Vec<GateApply>,
    pub origin: GateOrigin,
    pub span: Span,
}

impl PartialEq for GateDef {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.params == other.params
            && self.qubits == other.qubits
            && self.body == other.body
            && self.origin == other.origin
    }
}

#[derive(Debug, Clone)]
pub struct RegDecl {
    pub name: String,
    pub size: u32,
    pub span: Span,
}

impl PartialEq for RegDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.size == other.size
    }
}

/// Reference to a register element (`q[3]`) or a whole register (`q`).
#[derive(Debug, Clone)]
pub struct Ref {
    pub reg: String,
    pub index: Option<u32>,
    pub span: Span,
}

impl Ref {
    pub fn indexed(reg: impl Into<String>, index: u32) -> Self {
        Ref { reg: reg.into(), index: Some(index), span: Span::none() }
    }

    pub fn whole(reg: impl Into<String>) -> Self {
        Ref { reg: reg.into(), index: None, span: Span::none() }
    }
}

impl PartialEq for Ref {
    fn eq(&self, other: &Self) -> bool {
        self.reg == other.reg && self.index == other.index
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Modifier {
    /// `ctrl(k) @` - k positive controls.
    Ctrl(u32),
    /// `negctrl(k) @` - k negative controls.
    NegCtrl(u32),
    /// `inv @`
    Inv,
}

impl Modifier {
    /// Number of operand qubits this modifier consumes from the front of the
    /// operand list.
    pub fn control_count(&self) -> u32 {
        match self {
            Modifier::Ctrl(k) | Modifier::NegCtrl(k) => *k,
            Modifier::Inv => 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GateApply {
    pub modifiers: Vec<Modifier>,
    pub name: String,
    pub params: Vec<Expr>,
    pub targets: Vec<Ref>,
    pub span: Span,
}

impl PartialEq for GateApply {
    fn eq(&self, other: &Self) -> bool {
        self.modifiers == other.modifiers
            && self.name == other.name
            && self.params == other.params
            && self.targets == other.targets
    }
}

#[derive(Debug, Clone)]
pub enum Statement {
    Gate(GateApply),
    Measure { qubit: Ref, bit: Ref, span: Span },
    Reset { qubit: Ref, span: Span },
    Barrier { qubits: Vec<Ref>, span: Span },
}

impl Statement {
    pub fn span(&self) -> Span {
        match self {
            Statement::Gate(g) => g.span,
            Statement::Measure { span, .. } => *span,
            Statement::Reset { span, .. } => *span,
            Statement::Barrier { span, .. } => *span,
        }
    }
}

impl PartialEq for Statement {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Statement::Gate(a), Statement::Gate(b)) => a == b,
            (
                Statement::Measure { qubit: qa, bit: ba, .. },
                Statement::Measure { qubit: qb, bit: bb, .. },
            ) => qa == qb && ba == bb,
            (Statement::Reset { qubit: a, .. }, Statement::Reset { qubit: b, .. }) => a == b,
            (Statement::Barrier { qubits: a, .. }, Statement::Barrier { qubits: b, .. }) => a == b,
            _ => false,
        }
    }
}

/// Constant angle expression: literals, `pi`, gate parameters, and `+ - * /`
/// with unary minus. Folded to `f64` during validation and expansion.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(f64),
    Pi,
    Param(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FoldError {
    UnknownName(String),
    DivisionByZero,
}

impl Expr {
    /// Evaluate with gate formal parameters bound in `env`.
    pub fn fold(&self, env: &dyn Fn(&str) -> Option<f64>) -> Result<f64, FoldError> {
        match self {
            Expr::Lit(v) => Ok(*v),
            Expr::Pi => Ok(std::f64::consts::PI),
            Expr::Param(name) => env(name).ok_or_else(|| FoldError::UnknownName(name.clone())),
            Expr::Neg(e) => Ok(-e.fold(env)?),
            Expr::Add(a, b) => Ok(a.fold(env)? + b.fold(env)?),
            Expr::Sub(a, b) => Ok(a.fold(env)? - b.fold(env)?),
            Expr::Mul(a, b) => Ok(a.fold(env)? * b.fold(env)?),
            Expr::Div(a, b) => {
                let d = b.fold(env)?;
                if d == 0.0 {
                    return Err(FoldError::DivisionByZero);
                }
                Ok(a.fold(env)? / d)
            }
        }
    }

    /// Fold with no parameters in scope (top-level statements).
    pub fn fold_const(&self) -> Result<f64, FoldError> {
        self.fold(&|_| None)
    }
}
