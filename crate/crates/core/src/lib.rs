//! Synthesis, verification and benchmarking of small quantum programs.
//!
//! The crate is organized as a pipeline:
//!
//! * [`frontend`] - OpenQASM 3 subset parser, validator and emitter.
//! * [`sim`] - dense statevector simulator with semantic oracle bindings.
//! * [`toolset`] - deterministic circuit generators for the five supported
//!   algorithm families.
//! * [`verify`] - task specifications, randomized oracle instances and the
//!   functional checker.
//! * [`retrieval`] - BM25 example store for few-shot prompting.
//! * [`gateway`] - chat-completion backends (scripted and HTTP) with
//!   transcript capture.
//! * [`agents`] - the synthesis pipelines: dynamic few-shot coding,
//!   tool-augmented planning, the hybrid fallback and task decomposition.
//! * [`bench`] - benchmark corpus, runner and reporting.

pub mod agents;
pub mod bench;
pub mod frontend;
pub mod sim;
pub mod gateway;
pub mod retrieval;
pub mod toolset;
pub mod verify;
