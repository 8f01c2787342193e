//! Example-circuit store with lexical retrieval and keyword classification.
//!
//! The prompt pipeline pulls few-shot examples from here, and the
//! orchestrator uses [`classify`] to decide which algorithm families a
//! free-form request mentions. Ranking is plain Okapi BM25 over tokenized
//! descriptions and tags; deterministic, no model calls.
//!
//! All canonical prose lives in this file next to the keyword table, so the
//! descriptions we author for tasks and examples stay classifiable: each
//! algorithm's phrasing uses its own keywords and nobody else's.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::frontend::analyze;
use crate::toolset::{
    format_bitstring, gen_bv, gen_dj, gen_grover, gen_pe, gen_wstate, Algorithm, DjFunction,
    GenerationResult,
};

/// One retrievable example circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleRecord {
    pub id: String,
    pub algorithm: Algorithm,
    pub n: u32,
    pub qasm: String,
    pub description: String,
    pub tags: Vec<String>,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("record {id} is invalid: {reason}")]
    InvalidRecord { id: String, reason: String },
    #[error("corpus directory is malformed: {0}")]
    MalformedCorpus(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Multi-word names that must survive tokenization as single terms, mapped
/// to their canonical token.
const PHRASES: &[(&str, &str)] = &[
    ("bernstein-vazirani", "bernstein-vazirani"),
    ("bernstein vazirani", "bernstein-vazirani"),
    ("deutsch-jozsa", "deutsch-jozsa"),
    ("deutsch jozsa", "deutsch-jozsa"),
    ("phase-estimation", "phase-estimation"),
    ("phase estimation", "phase-estimation"),
    ("w-state", "w-state"),
    ("w state", "w-state"),
    ("weight-one", "weight-one"),
    ("weight one", "weight-one"),
];

/// Lowercases, lifts the known algorithm phrases out as single tokens, then
/// splits the rest on non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    for (phrase, canonical) in PHRASES {
        while let Some(pos) = lowered.find(phrase) {
            tokens.push((*canonical).to_string());
            lowered.replace_range(pos..pos + phrase.len(), &" ".repeat(phrase.len()));
        }
    }
    tokens.extend(
        lowered
            .split(|c: char| !c.is_alphanumeric())
            .filter(|s| !s.is_empty())
            .map(str::to_string),
    );
    tokens
}

/// The fixed keyword table behind [`classify`]. Every keyword is a single
/// canonical token as produced by [`tokenize`].
const KEYWORDS: &[(Algorithm, &[&str])] = &[
    (Algorithm::Bv, &["bernstein-vazirani", "bv", "hidden", "secret"]),
    (Algorithm::Dj, &["deutsch-jozsa", "dj", "constant", "balanced"]),
    (Algorithm::Grover, &["grover", "search", "marked", "amplitude"]),
    (Algorithm::Pe, &["phase-estimation", "qpe", "phase", "eigenvalue", "eigenphase"]),
    (Algorithm::Wstate, &["w-state", "wstate", "weight-one"]),
];

/// Outcome of keyword classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Classification {
    /// Labels with nonzero keyword hits, highest score first; ties keep the
    /// fixed algorithm order.
    Ranked(Vec<(Algorithm, u32)>),
    /// No keyword matched; the caller should fall back to asking the model.
    Unknown,
}

impl Classification {
    pub fn labels(&self) -> Vec<Algorithm> {
        match self {
            Classification::Ranked(scores) => scores.iter().map(|(a, _)| *a).collect(),
            Classification::Unknown => vec![],
        }
    }

    pub fn top(&self) -> Option<Algorithm> {
        self.labels().first().copied()
    }
}

/// Scores a text against the fixed keyword table. Counts token occurrences,
/// so repeated keywords weigh more.
pub fn classify(text: &str) -> Classification {
    let tokens = tokenize(text);
    let mut scores = Vec::new();
    for (algorithm, keywords) in KEYWORDS {
        let score = tokens
            .iter()
            .filter(|t| keywords.contains(&t.as_str()))
            .count() as u32;
        if score > 0 {
            scores.push((*algorithm, score));
        }
    }
    if scores.is_empty() {
        return Classification::Unknown;
    }
    scores.sort_by(|a, b| b.1.cmp(&a.1));
    Classification::Ranked(scores)
}

/// Benchmark task prose for a level-1 instance. Names the algorithm
/// explicitly and uses only that algorithm's keywords.
pub fn task_description(algorithm: Algorithm, n: u32) -> String {
    match algorithm {
        Algorithm::Bv => format!(
            "Write an OpenQASM 3 program implementing the Bernstein-Vazirani algorithm on {n} qubits. \
             Recover the hidden secret bit string encoded by the oracle gate Uf in a single query, \
             measuring the {n} input qubits."
        ),
        Algorithm::Dj => format!(
            "Write an OpenQASM 3 program implementing the Deutsch-Jozsa algorithm on {n} qubits. \
             Decide whether the oracle gate Uf computes a constant function or a balanced one, \
             measuring the {n} input qubits."
        ),
        Algorithm::Grover => format!(
            "Write an OpenQASM 3 program implementing Grover search on {n} qubits. \
             The oracle gate named Oracle flips the sign of the marked basis states; \
             amplify their amplitude with the standard diffusion operator for the standard \
             iteration count and measure all {n} qubits."
        ),
        Algorithm::Pe => format!(
            "Write an OpenQASM 3 program implementing quantum phase estimation with a counting \
             register of {n} qubits plus one target qubit. Prepare the target with the gate Psi, \
             apply controlled powers of the unitary gate CU_0, and read the binary eigenphase into \
             {n} classical bits."
        ),
        Algorithm::Wstate => format!(
            "Write an OpenQASM 3 program preparing the W state on {n} qubits: the uniform \
             superposition of all weight-one basis states."
        ),
    }
}

/// One-clause goal phrasing that deliberately avoids the algorithm's name
/// while keeping its keywords, for composite tasks that must be decomposed.
pub fn goal_phrase(algorithm: Algorithm) -> &'static str {
    match algorithm {
        Algorithm::Bv => "recover the hidden secret bit string encoded by its oracle in a single query",
        Algorithm::Dj => "decide whether its oracle computes a constant or a balanced function",
        Algorithm::Grover => "search for the marked basis states and amplify their amplitude before measuring",
        Algorithm::Pe => "estimate the binary eigenphase of the given unitary using a counting register",
        Algorithm::Wstate => "prepare the uniform superposition of all weight-one basis states",
    }
}

fn example_description(algorithm: Algorithm, n: u32) -> String {
    match algorithm {
        Algorithm::Bv => format!(
            "Bernstein-Vazirani circuit on {n} qubits: recovers the hidden binary secret string \
             with a single oracle query."
        ),
        Algorithm::Dj => format!(
            "Deutsch-Jozsa circuit on {n} qubits: one oracle query decides constant versus balanced."
        ),
        Algorithm::Grover => format!(
            "Grover search circuit on {n} qubits: amplitude amplification of the marked states."
        ),
        Algorithm::Pe => format!(
            "Quantum phase estimation circuit with {n} counting qubits: reads the eigenphase of a \
             controlled unitary into classical bits."
        ),
        Algorithm::Wstate => format!(
            "W state preparation circuit on {n} qubits: entangled uniform superposition of all \
             weight-one basis states."
        ),
    }
}

fn example_tags(algorithm: Algorithm) -> Vec<String> {
    let tags: &[&str] = match algorithm {
        Algorithm::Bv => &["oracle", "hidden", "secret"],
        Algorithm::Dj => &["oracle", "constant", "balanced"],
        Algorithm::Grover => &["search", "marked", "amplitude"],
        Algorithm::Pe => &["eigenphase", "counting", "controlled-unitary"],
        Algorithm::Wstate => &["preparation", "entangled", "superposition"],
    };
    tags.iter().map(|t| t.to_string()).collect()
}

/// Replaces the `include "oracle.inc";` line with the oracle definitions
/// themselves, yielding a self-contained program (modulo stdgates) suitable
/// for prompting and for validation without bindings.
pub fn inline_oracle(result: &GenerationResult) -> String {
    match &result.oracle_include {
        Some(text) => result
            .main_qasm
            .replacen("include \"oracle.inc\";\n", text, 1),
        None => result.main_qasm.clone(),
    }
}

/// The standard example corpus: every algorithm at every supported size,
/// with a fixed representative oracle, all checker-valid by construction.
pub fn example_corpus() -> Vec<ExampleRecord> {
    let mut records = Vec::new();
    for algorithm in Algorithm::ALL {
        let (lo, hi) = algorithm.n_range();
        for n in lo..=hi {
            let result = match algorithm {
                Algorithm::Bv => gen_bv(n, &format_bitstring((1 << n) - 1, n)),
                Algorithm::Dj => gen_dj(
                    n,
                    &DjFunction::BalancedLinear { mask: format_bitstring((1 << n) - 1, n) },
                ),
                Algorithm::Grover => {
                    gen_grover(n, &[format_bitstring((1 << n) - 1, n)].into(), None)
                }
                Algorithm::Pe => gen_pe(n, 1),
                Algorithm::Wstate => gen_wstate(n),
            }
            .expect("in-range corpus parameters");
            records.push(ExampleRecord {
                id: format!("{algorithm}-{n:02}"),
                algorithm,
                n,
                qasm: inline_oracle(&result),
                description: example_description(algorithm, n),
                tags: example_tags(algorithm),
            });
        }
    }
    records
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Posting {
    doc: usize,
    term_freq: u32,
}

/// An immutable BM25 index over a fixed set of records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Index {
    records: Vec<ExampleRecord>,
    postings: BTreeMap<String, Vec<Posting>>,
    doc_lengths: Vec<u32>,
    avg_doc_length: f64,
    snapshot_hash: String,
}

const BM25_K1: f64 = 1.2;
const BM25_B: f64 = 0.75;

fn searchable_text(record: &ExampleRecord) -> String {
    let mut text = record.description.clone();
    for tag in &record.tags {
        text.push(' ');
        text.push_str(tag);
    }
    text.push(' ');
    text.push_str(record.algorithm.name());
    text
}

/// Hex digest over the serialized records; two corpora hash equal exactly
/// when their record lists are equal.
pub fn snapshot_hash(records: &[ExampleRecord]) -> String {
    let bytes = serde_json::to_vec(records).expect("records serialize");
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Validates every record's program text and builds the index. Records are
/// held in id order, which is also the tie-break order for retrieval.
pub fn build_index(records: Vec<ExampleRecord>) -> Result<Index, StoreError> {
    let mut records = records;
    records.sort_by(|a, b| a.id.cmp(&b.id));
    for pair in records.windows(2) {
        if pair[0].id == pair[1].id {
            return Err(StoreError::InvalidRecord {
                id: pair[0].id.clone(),
                reason: "duplicate record id".to_string(),
            });
        }
    }
    for record in &records {
        let (_, diagnostics) = analyze(&record.qasm, &HashMap::<String, String>::new());
        if let Some(error) = diagnostics.iter().find(|d| d.is_error()) {
            return Err(StoreError::InvalidRecord {
                id: record.id.clone(),
                reason: error.to_string(),
            });
        }
    }

    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut doc_lengths = Vec::with_capacity(records.len());
    for (doc, record) in records.iter().enumerate() {
        let tokens = tokenize(&searchable_text(record));
        doc_lengths.push(tokens.len() as u32);
        let mut freqs: BTreeMap<String, u32> = BTreeMap::new();
        for token in tokens {
            *freqs.entry(token).or_insert(0) += 1;
        }
        for (term, term_freq) in freqs {
            postings.entry(term).or_default().push(Posting { doc, term_freq });
        }
    }
    let avg_doc_length = if records.is_empty() {
        0.0
    } else {
        doc_lengths.iter().map(|&l| l as f64).sum::<f64>() / records.len() as f64
    };
    let snapshot_hash = snapshot_hash(&records);
    Ok(Index { records, postings, doc_lengths, avg_doc_length, snapshot_hash })
}

impl Index {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn snapshot(&self) -> &str {
        &self.snapshot_hash
    }

    pub fn records(&self) -> &[ExampleRecord] {
        &self.records
    }

    /// BM25 scores for a query against every document. Zero-score documents
    /// are included, so rank order is total: score descending, then id
    /// ascending.
    pub fn retrieve_scored(&self, query: &str, k: usize) -> Vec<(f64, &ExampleRecord)> {
        if self.records.is_empty() || k == 0 {
            return vec![];
        }
        let n_docs = self.records.len() as f64;
        let mut scores = vec![0.0f64; self.records.len()];
        for term in tokenize(query) {
            let Some(postings) = self.postings.get(&term) else { continue };
            let df = postings.len() as f64;
            // Nonnegative idf variant: the raw Okapi form can go negative
            // for terms in more than half the corpus.
            let idf = ((n_docs - df + 0.5) / (df + 0.5) + 1.0).ln();
            for posting in postings {
                let tf = posting.term_freq as f64;
                let norm = 1.0 - BM25_B
                    + BM25_B * self.doc_lengths[posting.doc] as f64 / self.avg_doc_length;
                scores[posting.doc] += idf * tf * (BM25_K1 + 1.0) / (tf + BM25_K1 * norm);
            }
        }
        let mut ranked: Vec<(f64, &ExampleRecord)> = scores
            .iter()
            .zip(&self.records)
            .map(|(&s, r)| (s, r))
            .collect();
        ranked.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .expect("finite scores")
                .then_with(|| a.1.id.cmp(&b.1.id))
        });
        ranked.truncate(k);
        ranked
    }

    /// Top-k records for a query; fewer than k only when the corpus itself
    /// is smaller.
    pub fn retrieve(&self, query: &str, k: usize) -> Vec<&ExampleRecord> {
        self.retrieve_scored(query, k).into_iter().map(|(_, r)| r).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("index serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, StoreError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), StoreError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, StoreError> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// On-disk form of a record's metadata; the program text lives next to it.
#[derive(Serialize, Deserialize)]
struct RecordMeta {
    id: String,
    algorithm: Algorithm,
    n: u32,
    description: String,
    tags: Vec<String>,
}

/// Writes one subdirectory per record, each holding `main.qasm` and
/// `meta.json`.
pub fn write_corpus(dir: &Path, records: &[ExampleRecord]) -> Result<(), StoreError> {
    fs::create_dir_all(dir)?;
    for record in records {
        let sub = dir.join(&record.id);
        fs::create_dir_all(&sub)?;
        fs::write(sub.join("main.qasm"), &record.qasm)?;
        let meta = RecordMeta {
            id: record.id.clone(),
            algorithm: record.algorithm,
            n: record.n,
            description: record.description.clone(),
            tags: record.tags.clone(),
        };
        let mut text = serde_json::to_string_pretty(&meta)?;
        text.push('\n');
        fs::write(sub.join("meta.json"), text)?;
    }
    Ok(())
}

/// Reads a corpus directory written by [`write_corpus`]; records come back
/// in id order regardless of filesystem enumeration order.
pub fn load_corpus(dir: &Path) -> Result<Vec<ExampleRecord>, StoreError> {
    let mut records = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        if !entry.file_type()?.is_dir() {
            continue;
        }
        let sub = entry.path();
        let qasm = fs::read_to_string(sub.join("main.qasm"))?;
        let meta: RecordMeta = serde_json::from_str(&fs::read_to_string(sub.join("meta.json"))?)?;
        let dir_name = entry.file_name().to_string_lossy().to_string();
        if meta.id != dir_name {
            return Err(StoreError::MalformedCorpus(format!(
                "directory {dir_name} holds a record with id {}",
                meta.id
            )));
        }
        records.push(ExampleRecord {
            id: meta.id,
            algorithm: meta.algorithm,
            n: meta.n,
            qasm,
            description: meta.description,
            tags: meta.tags,
        });
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(records)
}
