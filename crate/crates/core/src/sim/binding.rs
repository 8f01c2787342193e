//! Semantic oracle bindings.
//!
//! A binding attaches meaning to a gate name without expanding it into
//! primitive gates: the simulator applies the action directly on the state.
//! Bindings take precedence over textual definitions of the same name, so a
//! candidate program's own `gate Uf ...` body cannot spoof the checker.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::frontend::ExternGate;

/// A boolean function over `n`-bit inputs, in closed form so bindings stay
/// serializable and comparable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BitFn {
    /// f(x) = b for all x.
    Const { value: bool },
    /// f(x) = parity of x & mask (inner product with a secret string).
    DotMask { mask: u64 },
    /// f(x) = 1 iff x is in the set.
    Membership { ones: BTreeSet<u64> },
}

impl BitFn {
    pub fn eval(&self, x: u64) -> bool {
        match self {
            BitFn::Const { value } => *value,
            BitFn::DotMask { mask } => (x & mask).count_ones() % 2 == 1,
            BitFn::Membership { ones } => ones.contains(&x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OracleSemantics {
    /// |x⟩|a⟩ → |x⟩|a ⊕ f(x)⟩. Operands: `input_arity` input qubits, then
    /// `ancilla_arity` (always 1) ancilla.
    BitFlip { f: BitFn, input_arity: usize, ancilla_arity: usize },
    /// Flips the sign of every marked basis state of its operands.
    Phase { marked: BTreeSet<u64>, input_arity: usize },
    /// Two operands (control, eigenstate qubit); multiplies |11⟩ by
    /// e^{2πi·phi}. The eigenstate against which it phases is |1⟩, so the
    /// matching state preparation is an X gate.
    ControlledPhase { phi: f64 },
    /// One operand; prepares the 1-qubit basis state from |0⟩ (X when
    /// `one`, identity otherwise).
    StatePrep { one: bool },
}

impl OracleSemantics {
    pub fn arity(&self) -> usize {
        match self {
            OracleSemantics::BitFlip { input_arity, ancilla_arity, .. } => {
                input_arity + ancilla_arity
            }
            OracleSemantics::Phase { input_arity, .. } => *input_arity,
            OracleSemantics::ControlledPhase { .. } => 2,
            OracleSemantics::StatePrep { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleBinding {
    pub gate_name: String,
    pub semantics: OracleSemantics,
}

impl OracleBinding {
    pub fn new(gate_name: impl Into<String>, semantics: OracleSemantics) -> Self {
        OracleBinding { gate_name: gate_name.into(), semantics }
    }

    /// Signature for the validator: bound gates take no angle parameters.
    pub fn extern_sig(&self) -> ExternGate {
        ExternGate::new(self.gate_name.clone(), 0, self.semantics.arity())
    }
}
