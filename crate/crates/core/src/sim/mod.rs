//! Dense statevector simulation of validated programs.
//!
//! Basis convention: bit j of a state index is the value of qubit j, so
//! qubit 0 is the least-significant bit. Measurement produces an exact
//! marginal distribution over the measured classical bits - no sampling,
//! and no collapse: programs that apply gates to an already measured qubit
//! are rejected.

mod binding;
mod exec;
pub mod gates;
mod state;

use std::collections::BTreeMap;

pub use binding::{BitFn, OracleBinding, OracleSemantics};
pub use exec::{simulate, SimResult};
pub use gates::{standard_gate_unitary, Unitary};
pub use state::{fidelity, StateVector};

/// Largest register the simulator accepts (algorithm qubits plus one
/// ancilla/eigenstate qubit).
pub const MAX_QUBITS: usize = 13;

/// Exact marginal over measured classical bits. Key character `i` is the
/// value of the i-th measured classical bit in ascending declaration order
/// (for the usual `c[i] = measure ...` layout, character `i` is `c[i]`).
pub type Distribution = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("gate '{0}' is not a standard gate")]
    UnknownGate(String),
    #[error("gate '{gate}' takes {expected} parameter(s) but {got} given")]
    ParamCountMismatch { gate: String, expected: usize, got: usize },
    #[error("gate '{0}' has neither a definition nor a binding")]
    UnboundGate(String),
    #[error("program declares {0} qubits; the simulator supports at most {MAX_QUBITS}")]
    QubitLimitExceeded(usize),
    #[error("qubit {0} is used after being measured; mid-circuit measurement is not supported")]
    MeasuredQubitReused(usize),
    #[error("qubit {0} is reset after a gate touched it; mid-circuit reset is not supported")]
    ResetAfterGate(usize),
    #[error("qubit operands overlap")]
    IndexOverlap,
    #[error("matrix dimension does not match the number of target qubits")]
    DimensionMismatch,
    #[error("malformed program reached the simulator: {0}")]
    BadProgram(String),
}
