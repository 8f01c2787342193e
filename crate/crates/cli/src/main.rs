//! The `qsynth` command line: deterministic circuit generation, program
//! verification against task specs, exact simulation, corpus builds, and
//! benchmark runs with reports.
//!
//! Exit codes: 0 success, 1 failed verdict, 2 usage or input error,
//! 3 backend failure.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qsynth::bench::{self, BenchError, BenchmarkConfig};
use qsynth::frontend::analyze_with_externs;
use qsynth::sim::{simulate, OracleBinding};
use qsynth::toolset::{format_bitstring, Algorithm};
use qsynth::verify::{check, random_task, reference_program, TaskSpec};

const EXIT_VERDICT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BACKEND: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qsynth",
    version,
    about = "OpenQASM 3 circuit generators, exact simulator, oracle checkers, and benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the reference circuit for a seeded algorithm instance.
    Gen {
        /// Algorithm family: bv, dj, grover, pe, or wstate.
        algo: String,
        /// Register size (counting qubits for pe).
        #[arg(long)]
        n: u32,
        /// Seed fixing the oracle instance.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write main.qasm, task.json, bindings.json, and oracle.inc here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a program against a task specification; exits 1 on failure.
    Verify {
        /// Task specification JSON (as written by `gen --out`).
        task: PathBuf,
        /// OpenQASM 3 program file.
        program: PathBuf,
    },
    /// Parse and simulate a program, printing exact results as JSON.
    Simulate {
        /// OpenQASM 3 program file.
        file: PathBuf,
        /// Text provided when the program includes "oracle.inc".
        #[arg(long)]
        oracle: Option<PathBuf>,
        /// JSON list of oracle gate bindings (as written by `gen --out`).
        #[arg(long)]
        bind: Option<PathBuf>,
    },
    /// Benchmark corpus operations.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
    /// Benchmark runs and reports.
    Bench {
        #[command(subcommand)]
        command: BenchCommand,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Build, verify, and write the task corpus into a directory.
    Build { dir: PathBuf },
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Run (or resume) the benchmark sweep described by a config file.
    Run { config: PathBuf },
    /// Recompute and print the report for an existing run directory.
    Report { records_dir: PathBuf },
}

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Gen { algo, n, seed, out } => gen(&algo, n, seed, out.as_deref()),
        Command::Verify { task, program } => verify(&task, &program),
        Command::Simulate { file, oracle, bind } => {
            simulate_file(&file, oracle.as_deref(), bind.as_deref())
        }
        Command::Corpus { command: CorpusCommand::Build { dir } } => corpus_build(&dir),
        Command::Bench { command: BenchCommand::Run { config } } => bench_run(&config),
        Command::Bench { command: BenchCommand::Report { records_dir } } => {
            bench_report(&records_dir)
        }
    }
}

fn usage(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

/// Writes to stdout, exiting quietly when the reading end of a pipe has
/// closed (for example `qsynth simulate ... | head`).
fn write_stdout(text: impl std::fmt::Display) {
    use std::io::Write;
    if let Err(e) = write!(std::io::stdout(), "{text}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(1);
    }
}

fn writeln_stdout(text: impl std::fmt::Display) {
    write_stdout(format_args!("{text}\n"));
}

fn read(path: &Path) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|e| usage(format_args!("cannot read {}: {e}", path.display())))
}

fn gen(algo: &str, n: u32, seed: u64, out: Option<&Path>) -> u8 {
    let algorithm: Algorithm = match algo.parse() {
        Ok(a) => a,
        Err(e) => return usage(e),
    };
    let (lo, hi) = algorithm.n_range();
    if !(lo..=hi).contains(&n) {
        return usage(format_args!("n = {n} is outside [{lo}, {hi}] for {algorithm}"));
    }
    let task = random_task(algorithm, n, seed);
    let generated = match reference_program(&task) {
        Ok(g) => g,
        Err(e) => return usage(e),
    };
    write_stdout(&generated.main_qasm);
    if let Some(dir) = out {
        if let Err(e) = write_generation(dir, &task, &generated) {
            return usage(format_args!("cannot write to {}: {e}", dir.display()));
        }
    }
    0
}

fn write_generation(
    dir: &Path,
    task: &TaskSpec,
    generated: &qsynth::toolset::GenerationResult,
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("main.qasm"), &generated.main_qasm)?;
    let mut task_json = serde_json::to_string_pretty(task).map_err(std::io::Error::other)?;
    task_json.push('\n');
    fs::write(dir.join("task.json"), task_json)?;
    let mut bindings_json =
        serde_json::to_string_pretty(&generated.bindings).map_err(std::io::Error::other)?;
    bindings_json.push('\n');
    fs::write(dir.join("bindings.json"), bindings_json)?;
    if let Some(include) = &generated.oracle_include {
        fs::write(dir.join("oracle.inc"), include)?;
    }
    Ok(())
}

fn verify(task_path: &Path, program_path: &Path) -> u8 {
    let task_text = match read(task_path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let task: TaskSpec = match serde_json::from_str(&task_text) {
        Ok(t) => t,
        Err(e) => return usage(format_args!("invalid task spec: {e}")),
    };
    let program = match read(program_path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let verdict = check(&task, &program);
    match serde_json::to_string_pretty(&verdict) {
        Ok(json) => writeln_stdout(json),
        Err(e) => return usage(e),
    }
    if verdict.functional_pass {
        0
    } else {
        EXIT_VERDICT
    }
}

fn simulate_file(file: &Path, oracle: Option<&Path>, bind: Option<&Path>) -> u8 {
    let source = match read(file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let mut provider = HashMap::new();
    if let Some(path) = oracle {
        match read(path) {
            Ok(text) => provider.insert("oracle.inc".to_string(), text),
            Err(code) => return code,
        };
    }
    let bindings: Vec<OracleBinding> = match bind {
        None => vec![],
        Some(path) => {
            let text = match read(path) {
                Ok(t) => t,
                Err(code) => return code,
            };
            match serde_json::from_str(&text) {
                Ok(b) => b,
                Err(e) => return usage(format_args!("invalid bindings: {e}")),
            }
        }
    };
    let externs: Vec<_> = bindings.iter().map(|b| b.extern_sig()).collect();
    let (program, diagnostics) = analyze_with_externs(&source, &provider, &externs);
    for diagnostic in &diagnostics {
        eprintln!("{diagnostic}");
    }
    if diagnostics.iter().any(|d| d.is_error()) {
        return EXIT_VERDICT;
    }
    let result = match simulate(&program, &bindings) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("simulation failed: {e}");
            return EXIT_VERDICT;
        }
    };
    let qubits = result.state.num_qubits();
    let mut output = serde_json::json!({
        "qubits": qubits,
        "measured_bits": result.measured.len(),
        "distribution": result.distribution,
    });
    if result.measured.is_empty() {
        let mut amplitudes = serde_json::Map::new();
        for (i, amp) in result.state.amps().iter().enumerate() {
            if amp.norm_sqr() > 1e-14 {
                amplitudes.insert(
                    format_bitstring(i as u64, qubits as u32),
                    serde_json::json!([amp.re, amp.im]),
                );
            }
        }
        output["amplitudes"] = serde_json::Value::Object(amplitudes);
    }
    match serde_json::to_string_pretty(&output) {
        Ok(json) => writeln_stdout(json),
        Err(e) => return usage(e),
    }
    0
}

fn corpus_build(dir: &Path) -> u8 {
    match bench::build_corpus(dir) {
        Ok(rows) => {
            writeln_stdout(format_args!(
                "wrote {} tasks to {}",
                rows.len(),
                dir.join(bench::CORPUS_FILE).display()
            ));
            0
        }
        Err(e) => usage(e),
    }
}

fn bench_exit(e: BenchError) -> u8 {
    match e {
        BenchError::Backend(message) => {
            eprintln!("error: backend failure: {message}");
            EXIT_BACKEND
        }
        other => usage(other),
    }
}

fn bench_run(config_path: &Path) -> u8 {
    let text = match read(config_path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let config: BenchmarkConfig = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => return usage(format_args!("invalid config: {e}")),
    };
    let records = match bench::run_benchmark(&config) {
        Ok(r) => r,
        Err(e) => return bench_exit(e),
    };
    match emit_report(&config.output_dir) {
        Ok(report) => {
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            writeln_stdout(format_args!(
                "{} records in {}; report.csv and report.json written",
                records.len(),
                config.output_dir.display()
            ));
            0
        }
        Err(code) => code,
    }
}

fn emit_report(dir: &Path) -> Result<bench::Report, u8> {
    let (records, meta) = bench::load_run_dir(dir).map_err(bench_exit)?;
    let report = bench::build_report(&records, &meta).map_err(bench_exit)?;
    bench::write_report(dir, &report).map_err(bench_exit)?;
    Ok(report)
}

fn bench_report(dir: &Path) -> u8 {
    match emit_report(dir) {
        Ok(report) => {
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            write_stdout(bench::render_csv(&report));
            0
        }
        Err(code) => code,
    }
}
