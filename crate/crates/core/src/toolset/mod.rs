//! Deterministic circuit generators for the five benchmark algorithms,
//! plus the tool catalog the planning pipeline selects from.
//!
//! Each generator returns a [`GenerationResult`]: the main program text, an
//! optional `oracle.inc` include, the semantic oracle bindings the simulator
//! should honor, and a metadata record. Generators are pure functions of
//! their parameters; all randomness lives with the callers that pick those
//! parameters.

pub mod build;
pub mod catalog;
pub mod generators;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::sim::OracleBinding;

pub use catalog::{catalog, invoke, ParamDescriptor, ParamKind, ToolDescriptor, ToolError, ToolOutput};
pub use generators::{gen_bv, gen_dj, gen_grover, gen_pe, gen_pe_real, gen_wstate, DjFunction};

/// The five algorithm families the generators and checkers know about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Bv,
    Dj,
    Grover,
    Pe,
    Wstate,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Bv,
        Algorithm::Dj,
        Algorithm::Grover,
        Algorithm::Pe,
        Algorithm::Wstate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Bv => "bv",
            Algorithm::Dj => "dj",
            Algorithm::Grover => "grover",
            Algorithm::Pe => "pe",
            Algorithm::Wstate => "wstate",
        }
    }

    /// Inclusive bounds on the size parameter (`n` for most algorithms, the
    /// number of counting qubits `t` for phase estimation).
    pub fn n_range(self) -> (u32, u32) {
        (2, 12)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bv" => Ok(Algorithm::Bv),
            "dj" => Ok(Algorithm::Dj),
            "grover" | "gr" => Ok(Algorithm::Grover),
            "pe" => Ok(Algorithm::Pe),
            "wstate" | "ws" => Ok(Algorithm::Wstate),
            other => Err(format!(
                "unknown algorithm {other:?}; expected one of bv, dj, grover, pe, wstate"
            )),
        }
    }
}

/// Why a generator refused its parameters.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("bad bitstring parameter: {0}")]
    BadLength(String),
    #[error("a balanced subset for n = {n} must contain exactly {expected} strings, got {got}")]
    BadSubsetSize { n: u32, expected: usize, got: usize },
    #[error("explicit balanced subsets are limited to n <= 6, got n = {0}")]
    SubsetTooLarge(u32),
    #[error("the marked set must not be empty")]
    EmptyMarked,
    #[error("at most {max} strings may be marked for n = {n} (fewer than half the basis)")]
    TooManyMarked { n: u32, max: u64 },
    #[error("{requested} qubits exceed the simulator limit of {max}")]
    QubitLimitExceeded { requested: u32, max: u32 },
    #[error("phase {phase} is not a multiple of 1/2^{t}; pass allow_non_dyadic to accept it")]
    NonDyadicPhase { phase: f64, t: u32 },
    #[error("n = {n} is outside the supported range [{min}, {max}]")]
    BadN { n: u32, min: u32, max: u32 },
}

/// Metadata describing one generated circuit: which algorithm, its size, and
/// the derived parameters (iteration counts, angle schedules, phases).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenMeta {
    pub algorithm: Algorithm,
    pub n: u32,
    pub params: serde_json::Value,
}

/// A complete generated circuit: program text, optional oracle include text,
/// the semantic bindings for simulation, and metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationResult {
    pub main_qasm: String,
    pub oracle_include: Option<String>,
    pub bindings: Vec<OracleBinding>,
    pub meta: GenMeta,
}

/// On-disk shape of `meta.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct MetaFile {
    algorithm: Algorithm,
    n: u32,
    params: serde_json::Value,
    bindings: Vec<OracleBinding>,
}

impl GenerationResult {
    /// Writes `main.qasm`, `oracle.inc` (when present) and `meta.json` into
    /// `dir`, creating it if needed.
    pub fn write_dir(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("main.qasm"), &self.main_qasm)?;
        if let Some(inc) = &self.oracle_include {
            fs::write(dir.join("oracle.inc"), inc)?;
        }
        let meta = MetaFile {
            algorithm: self.meta.algorithm,
            n: self.meta.n,
            params: self.meta.params.clone(),
            bindings: self.bindings.clone(),
        };
        let text = serde_json::to_string_pretty(&meta)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        fs::write(dir.join("meta.json"), text + "\n")
    }

    /// Reads back a directory written by [`write_dir`](Self::write_dir).
    pub fn read_dir(dir: &Path) -> io::Result<Self> {
        let main_qasm = fs::read_to_string(dir.join("main.qasm"))?;
        let oracle_path = dir.join("oracle.inc");
        let oracle_include = if oracle_path.exists() {
            Some(fs::read_to_string(oracle_path)?)
        } else {
            None
        };
        let meta_text = fs::read_to_string(dir.join("meta.json"))?;
        let meta: MetaFile = serde_json::from_str(&meta_text)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        Ok(GenerationResult {
            main_qasm,
            oracle_include,
            bindings: meta.bindings,
            meta: GenMeta {
                algorithm: meta.algorithm,
                n: meta.n,
                params: meta.params,
            },
        })
    }
}

/// Parses a bitstring whose character `j` gives the value of bit `j`, so
/// `"101"` means bits 0 and 2 are set. Enforces an exact length.
pub fn parse_bitstring(s: &str, expected_len: u32) -> Result<u64, GenError> {
    if s.len() != expected_len as usize {
        return Err(GenError::BadLength(format!(
            "expected {expected_len} characters, got {} in {s:?}",
            s.len()
        )));
    }
    let mut value = 0u64;
    for (j, ch) in s.chars().enumerate() {
        match ch {
            '1' => value |= 1 << j,
            '0' => {}
            other => {
                return Err(GenError::BadLength(format!(
                    "character {other:?} in {s:?} is not 0 or 1"
                )))
            }
        }
    }
    Ok(value)
}

/// Inverse of [`parse_bitstring`]: renders the low `len` bits of `value`
/// with character `j` holding bit `j`.
pub fn format_bitstring(value: u64, len: u32) -> String {
    (0..len)
        .map(|j| if value >> j & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a set of equal-length bitstrings.
pub fn parse_bitstring_set(set: &BTreeSet<String>, expected_len: u32) -> Result<BTreeSet<u64>, GenError> {
    set.iter().map(|s| parse_bitstring(s, expected_len)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_is_little_endian_by_character() {
        assert_eq!(parse_bitstring("101", 3), Ok(0b101));
        assert_eq!(parse_bitstring("110", 3), Ok(0b011));
        assert_eq!(format_bitstring(0b011, 3), "110");
        assert_eq!(format_bitstring(0, 4), "0000");
    }

    #[test]
    fn bitstring_length_and_alphabet_are_enforced() {
        assert!(matches!(parse_bitstring("10", 3), Err(GenError::BadLength(_))));
        assert!(matches!(parse_bitstring("1a1", 3), Err(GenError::BadLength(_))));
    }

    #[test]
    fn algorithm_names_round_trip() {
        for alg in Algorithm::ALL {
            assert_eq!(alg.name().parse::<Algorithm>(), Ok(alg));
            let json = serde_json::to_string(&alg).unwrap();
            assert_eq!(json, format!("\"{}\"", alg.name()));
            assert_eq!(serde_json::from_str::<Algorithm>(&json).unwrap(), alg);
        }
        assert_eq!("gr".parse::<Algorithm>(), Ok(Algorithm::Grover));
        assert_eq!("ws".parse::<Algorithm>(), Ok(Algorithm::Wstate));
        assert!("qft".parse::<Algorithm>().is_err());
    }
}
