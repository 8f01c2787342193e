//! Reference machinery shared by the integration tests: a dense matrix
//! interpreter that evolves programs through explicit full-system matrices
//! built from Kronecker products and basis permutations. It shares no gate
//! tables or state-update code with the production simulator, so the two
//! implementations check each other.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;

use qsynth::frontend::ast::{Expr, GateApply, GateDef, Modifier, Program, Ref, Statement};
use qsynth::frontend::{analyze_with_externs, emit, parse, passes, Diagnostic};
use qsynth::sim::{OracleBinding, OracleSemantics};
use qsynth::toolset::{
    format_bitstring, gen_bv, gen_dj, gen_grover, gen_pe, gen_wstate, Algorithm, DjFunction,
    GenerationResult,
};
use qsynth::verify::{reference_program, OracleSpec, TaskSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square matrix over row vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: Vec<Vec<Complex64>>,
}

impl Mat {
    pub fn zeros(dim: usize) -> Mat {
        Mat { rows: vec![vec![ZERO; dim]; dim] }
    }

    pub fn identity(dim: usize) -> Mat {
        let mut m = Mat::zeros(dim);
        for i in 0..dim {
            m.rows[i][i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Mat {
        let dim = rows.len();
        for row in &rows {
            assert_eq!(row.len(), dim, "matrix must be square");
        }
        Mat { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Kronecker product; `other` occupies the low-order index bits.
    pub fn kron(&self, other: &Mat) -> Mat {
        let (da, db) = (self.dim(), other.dim());
        let mut out = Mat::zeros(da * db);
        for ra in 0..da {
            for ca in 0..da {
                let a = self.rows[ra][ca];
                if a == ZERO {
                    continue;
                }
                for rb in 0..db {
                    for cb in 0..db {
                        out.rows[ra * db + rb][ca * db + cb] = a * other.rows[rb][cb];
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        let dim = self.dim();
        assert_eq!(dim, other.dim());
        let mut out = Mat::zeros(dim);
        for r in 0..dim {
            for k in 0..dim {
                let a = self.rows[r][k];
                if a == ZERO {
                    continue;
                }
                for col in 0..dim {
                    out.rows[r][col] += a * other.rows[k][col];
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let dim = self.dim();
        assert_eq!(dim, v.len());
        let mut out = vec![ZERO; dim];
        for r in 0..dim {
            let mut acc = ZERO;
            for k in 0..dim {
                acc += self.rows[r][k] * v[k];
            }
            out[r] = acc;
        }
        out
    }

    pub fn dagger(&self) -> Mat {
        let dim = self.dim();
        let mut out = Mat::zeros(dim);
        for r in 0..dim {
            for col in 0..dim {
                out.rows[r][col] = self.rows[col][r].conj();
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let mut worst = 0.0f64;
        for r in 0..self.dim() {
            for col in 0..self.dim() {
                worst = worst.max((self.rows[r][col] - other.rows[r][col]).norm());
            }
        }
        worst
    }

    /// How far U†U is from the identity; 0 for an exact unitary.
    pub fn unitarity_defect(&self) -> f64 {
        self.dagger().matmul(self).max_abs_diff(&Mat::identity(self.dim()))
    }
}

fn diag(entries: Vec<Complex64>) -> Mat {
    let mut m = Mat::zeros(entries.len());
    for (i, e) in entries.into_iter().enumerate() {
        m.rows[i][i] = e;
    }
    m
}

fn phase_entry(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// Control-wrap a gate matrix. Control j becomes index bit j (so controls
/// are the leading operands); `triggers[j]` gives the activating value.
pub fn controlled(base: &Mat, triggers: &[bool]) -> Mat {
    let cbits = triggers.len();
    let cdim = 1usize << cbits;
    let want: usize = triggers
        .iter()
        .enumerate()
        .filter_map(|(i, &t)| t.then_some(1usize << i))
        .sum();
    let dim = base.dim() * cdim;
    let mut out = Mat::zeros(dim);
    for row in 0..dim {
        let pattern = row & (cdim - 1);
        if pattern == want {
            for bcol in 0..base.dim() {
                out.rows[row][(bcol << cbits) | pattern] = base.rows[row >> cbits][bcol];
            }
        } else {
            out.rows[row][row] = ONE;
        }
    }
    out
}

/// Conventional matrices for the ambient gate set, written out directly
/// rather than borrowed from the simulator's tables.
pub fn std_gate_matrix(name: &str, p: &[f64]) -> Option<Mat> {
    let single = |rows: [[Complex64; 2]; 2]| {
        Mat::from_rows(vec![rows[0].to_vec(), rows[1].to_vec()])
    };
    let x = || single([[ZERO, ONE], [ONE, ZERO]]);
    let h = {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        move || single([[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]])
    };
    let z = || diag(vec![ONE, c(-1.0, 0.0)]);
    let p1 = |lambda: f64| diag(vec![ONE, phase_entry(lambda)]);
    let rx = |theta: f64| {
        let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        single([[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]])
    };
    let ry = |theta: f64| {
        let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        single([[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
    };
    let rz = |theta: f64| diag(vec![phase_entry(-theta / 2.0), phase_entry(theta / 2.0)]);
    let m = match name {
        "x" => x(),
        "y" => single([[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]]),
        "z" => z(),
        "h" => h(),
        "s" => p1(PI / 2.0),
        "sdg" => p1(-PI / 2.0),
        "t" => p1(PI / 4.0),
        "tdg" => p1(-PI / 4.0),
        "sx" => single([[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]]),
        "rx" => rx(p[0]),
        "ry" => ry(p[0]),
        "rz" => rz(p[0]),
        "p" => p1(p[0]),
        "u" => {
            let (theta, phi, lambda) = (p[0], p[1], p[2]);
            let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
            single([
                [c(co, 0.0), -phase_entry(lambda) * s],
                [phase_entry(phi) * s, phase_entry(phi + lambda) * co],
            ])
        }
        "cx" => controlled(&x(), &[true]),
        "cz" => controlled(&z(), &[true]),
        "cp" => controlled(&p1(p[0]), &[true]),
        "ch" => controlled(&h(), &[true]),
        "crx" => controlled(&rx(p[0]), &[true]),
        "cry" => controlled(&ry(p[0]), &[true]),
        "crz" => controlled(&rz(p[0]), &[true]),
        "ccx" => controlled(&x(), &[true, true]),
        "swap" => {
            let mut m = Mat::zeros(4);
            m.rows[0][0] = ONE;
            m.rows[1][2] = ONE;
            m.rows[2][1] = ONE;
            m.rows[3][3] = ONE;
            m
        }
        _ => return None,
    };
    Some(m)
}

/// Names and parameter counts of the ambient gate set, for exhaustive
/// matrix-level sweeps.
pub const STD_GATES: [(&str, usize); 23] = [
    ("x", 0),
    ("y", 0),
    ("z", 0),
    ("h", 0),
    ("s", 0),
    ("sdg", 0),
    ("t", 0),
    ("tdg", 0),
    ("sx", 0),
    ("rx", 1),
    ("ry", 1),
    ("rz", 1),
    ("p", 1),
    ("u", 3),
    ("cx", 0),
    ("cz", 0),
    ("cp", 1),
    ("ch", 0),
    ("crx", 1),
    ("cry", 1),
    ("crz", 1),
    ("ccx", 0),
    ("swap", 0),
];

/// Dense matrix for an oracle binding, indexed operand j = bit j.
pub fn binding_matrix(sem: &OracleSemantics) -> Mat {
    match sem {
        OracleSemantics::BitFlip { f, input_arity, ancilla_arity } => {
            assert_eq!(*ancilla_arity, 1, "bit-flip oracles use one ancilla");
            let dim = 1usize << (input_arity + 1);
            let input_mask = (1usize << input_arity) - 1;
            let mut m = Mat::zeros(dim);
            for col in 0..dim {
                let x = (col & input_mask) as u64;
                let row = if f.eval(x) { col ^ (1 << input_arity) } else { col };
                m.rows[row][col] = ONE;
            }
            m
        }
        OracleSemantics::Phase { marked, input_arity } => {
            let dim = 1usize << input_arity;
            diag(
                (0..dim)
                    .map(|i| if marked.contains(&(i as u64)) { c(-1.0, 0.0) } else { ONE })
                    .collect(),
            )
        }
        OracleSemantics::ControlledPhase { phi } => {
            diag(vec![ONE, ONE, ONE, phase_entry(2.0 * PI * phi)])
        }
        OracleSemantics::StatePrep { one } => {
            if *one {
                std_gate_matrix("x", &[]).unwrap()
            } else {
                Mat::identity(2)
            }
        }
    }
}

/// Full-system matrix for `gate` acting on `operands` (operand j is bit j
/// of the gate's own index space): the gate is kron-extended over the low
/// bits, then conjugated by the basis permutation that routes each global
/// qubit onto its operand position.
pub fn embed(gate: &Mat, operands: &[usize], n: usize) -> Mat {
    let k = operands.len();
    assert!(k <= n);
    assert_eq!(gate.dim(), 1 << k, "gate dimension matches operand count");
    let expanded = Mat::identity(1 << (n - k)).kron(gate);
    let mut order: Vec<usize> = operands.to_vec();
    for q in 0..n {
        if !operands.contains(&q) {
            order.push(q);
        }
    }
    assert_eq!(order.len(), n, "operands must be distinct");
    let dim = 1usize << n;
    let mut perm = Mat::zeros(dim);
    for global in 0..dim {
        let mut local = 0usize;
        for (j, &src) in order.iter().enumerate() {
            if global >> src & 1 == 1 {
                local |= 1 << j;
            }
        }
        perm.rows[local][global] = ONE;
    }
    perm.dagger().matmul(&expanded).matmul(&perm)
}

/// What the dense interpreter produces: the uncollapsed final state and the
/// exact marginal over measured classical bits.
#[derive(Debug, Clone)]
pub struct DenseOutcome {
    pub state: Vec<Complex64>,
    pub distribution: BTreeMap<String, f64>,
    pub measured: BTreeMap<usize, usize>,
}

const MAX_DEPTH: usize = 64;

fn fold_expr(expr: &Expr, env: &dyn Fn(&str) -> Option<f64>) -> Result<f64, String> {
    expr.fold(env).map_err(|e| format!("{e:?}"))
}

/// Matrix and global operand list for one gate application, with modifiers
/// folded into the matrix itself.
fn apply_operator(
    apply: &GateApply,
    resolve: &dyn Fn(&Ref) -> Result<usize, String>,
    env: &dyn Fn(&str) -> Option<f64>,
    program: &Program,
    bound: &BTreeMap<&str, &OracleSemantics>,
    depth: usize,
) -> Result<(Mat, Vec<usize>), String> {
    if depth > MAX_DEPTH {
        return Err(format!("gate '{}' expands too deeply", apply.name));
    }
    let mut triggers = Vec::new();
    let mut inverted = false;
    for m in &apply.modifiers {
        match m {
            Modifier::Ctrl(k) => triggers.extend(std::iter::repeat(true).take(*k as usize)),
            Modifier::NegCtrl(k) => triggers.extend(std::iter::repeat(false).take(*k as usize)),
            Modifier::Inv => inverted = !inverted,
        }
    }
    if apply.targets.len() < triggers.len() {
        return Err(format!("gate '{}' lacks operands for its modifiers", apply.name));
    }
    let (ctrl_refs, target_refs) = apply.targets.split_at(triggers.len());
    let controls: Vec<usize> = ctrl_refs.iter().map(resolve).collect::<Result<_, _>>()?;
    let targets: Vec<usize> = target_refs.iter().map(resolve).collect::<Result<_, _>>()?;
    let params: Vec<f64> =
        apply.params.iter().map(|e| fold_expr(e, env)).collect::<Result<_, _>>()?;

    let base = if let Some(sem) = bound.get(apply.name.as_str()) {
        if !params.is_empty() {
            return Err(format!("bound gate '{}' takes no parameters", apply.name));
        }
        binding_matrix(sem)
    } else if let Some(def) = program.find_gate_def(&apply.name) {
        def_matrix(def, &params, program, bound, depth)?
    } else if let Some(m) = std_gate_matrix(&apply.name, &params) {
        m
    } else {
        return Err(format!("gate '{}' has no definition or binding", apply.name));
    };
    if base.dim() != 1usize << targets.len() {
        return Err(format!("gate '{}' applied to the wrong operand count", apply.name));
    }
    let base = if inverted { base.dagger() } else { base };
    let wrapped = controlled(&base, &triggers);
    let mut operands = controls;
    operands.extend(targets);
    let distinct: BTreeSet<usize> = operands.iter().copied().collect();
    if distinct.len() != operands.len() {
        return Err(format!("gate '{}' repeats an operand", apply.name));
    }
    Ok((wrapped, operands))
}

/// Whole-definition unitary over the definition's formal qubits (formal j =
/// bit j), composed as a product of embedded body matrices. Control
/// modifiers applied to a call then wrap this product as one block, which
/// is algebraically the same as controlling each body gate.
fn def_matrix(
    def: &GateDef,
    params: &[f64],
    program: &Program,
    bound: &BTreeMap<&str, &OracleSemantics>,
    depth: usize,
) -> Result<Mat, String> {
    if def.params.len() != params.len() {
        return Err(format!("definition '{}' takes {} parameter(s)", def.name, def.params.len()));
    }
    let k = def.qubits.len();
    let formal_index: BTreeMap<&str, usize> =
        def.qubits.iter().enumerate().map(|(i, q)| (q.as_str(), i)).collect();
    let penv: BTreeMap<&str, f64> =
        def.params.iter().map(String::as_str).zip(params.iter().copied()).collect();
    let resolve = |r: &Ref| -> Result<usize, String> {
        if r.index.is_some() {
            return Err("gate body operands cannot be indexed".to_string());
        }
        formal_index
            .get(r.reg.as_str())
            .copied()
            .ok_or_else(|| format!("'{}' is not an operand of '{}'", r.reg, def.name))
    };
    let env = |name: &str| penv.get(name).copied();
    let mut u = Mat::identity(1usize << k);
    for inner in &def.body {
        let (m, ops) = apply_operator(inner, &resolve, &env, program, bound, depth + 1)?;
        u = embed(&m, &ops, k).matmul(&u);
    }
    Ok(u)
}

fn global_indices(
    r: &Ref,
    regs: &BTreeMap<&str, (usize, usize)>,
) -> Result<Vec<usize>, String> {
    let &(offset, size) =
        regs.get(r.reg.as_str()).ok_or_else(|| format!("register '{}' not declared", r.reg))?;
    match r.index {
        Some(i) if (i as usize) < size => Ok(vec![offset + i as usize]),
        Some(i) => Err(format!("index {i} out of range for '{}'", r.reg)),
        None => Ok((offset..offset + size).collect()),
    }
}

/// Evolve a validated program by explicit full-system matrix products.
pub fn dense_simulate(
    program: &Program,
    bindings: &[OracleBinding],
) -> Result<DenseOutcome, String> {
    let mut qregs: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut offset = 0usize;
    for d in &program.quantum_decls {
        qregs.insert(&d.name, (offset, d.size as usize));
        offset += d.size as usize;
    }
    let n = offset;
    if n > 13 {
        return Err(format!("{n} qubits exceed the reference interpreter's range"));
    }
    let mut cregs: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut coffset = 0usize;
    for d in &program.classical_decls {
        cregs.insert(&d.name, (coffset, d.size as usize));
        coffset += d.size as usize;
    }
    let bound: BTreeMap<&str, &OracleSemantics> =
        bindings.iter().map(|b| (b.gate_name.as_str(), &b.semantics)).collect();

    let dim = 1usize << n;
    let mut state = vec![ZERO; dim];
    state[0] = ONE;
    let mut measured: BTreeMap<usize, usize> = BTreeMap::new();

    let resolve = |r: &Ref| -> Result<usize, String> {
        let indices = global_indices(r, &qregs)?;
        if r.index.is_none() && indices.len() != 1 {
            return Err(format!("register '{}' used without an index", r.reg));
        }
        Ok(indices[0])
    };
    for stmt in &program.statements {
        match stmt {
            Statement::Gate(apply) => {
                let (m, ops) = apply_operator(apply, &resolve, &|_| None, program, &bound, 0)?;
                state = embed(&m, &ops, n).mat_vec(&state);
            }
            Statement::Measure { qubit, bit, .. } => {
                let qs = global_indices(qubit, &qregs)?;
                let cs = global_indices(bit, &cregs)?;
                if qs.len() != cs.len() {
                    return Err("measurement register widths differ".to_string());
                }
                for (q, cb) in qs.into_iter().zip(cs) {
                    measured.insert(cb, q);
                }
            }
            Statement::Reset { .. } | Statement::Barrier { .. } => {}
        }
    }

    let mut distribution = BTreeMap::new();
    if !measured.is_empty() {
        let pairs: Vec<(usize, usize)> = measured.iter().map(|(&cb, &q)| (cb, q)).collect();
        let mut acc: BTreeMap<String, f64> = BTreeMap::new();
        for (idx, amp) in state.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let key: String = pairs
                .iter()
                .map(|&(_, q)| if idx >> q & 1 == 1 { '1' } else { '0' })
                .collect();
            *acc.entry(key).or_insert(0.0) += p;
        }
        for (key, p) in acc {
            if p >= 1e-14 {
                distribution.insert(key, p);
            }
        }
    }
    Ok(DenseOutcome { state, distribution, measured })
}

pub fn max_amp_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Analyze a generated program with its oracle include and extern bindings;
/// panics if any error-severity diagnostic appears.
pub fn analyzed(gen: &GenerationResult) -> Program {
    let (program, diags) = analyzed_lenient(gen);
    assert!(passes(&diags), "generated program must validate: {diags:?}");
    program
}

pub fn analyzed_lenient(gen: &GenerationResult) -> (Program, Vec<Diagnostic>) {
    let mut includes: HashMap<String, String> = HashMap::new();
    if let Some(inc) = &gen.oracle_include {
        includes.insert("oracle.inc".to_string(), inc.clone());
    }
    let externs: Vec<_> = gen.bindings.iter().map(|b| b.extern_sig()).collect();
    analyze_with_externs(&gen.main_qasm, &includes, &externs)
}

/// Every toolset circuit with at most 4 total qubits: full secret/function/
/// marked-state/eigenphase sweeps at the sizes where they fit.
pub fn small_circuits() -> Vec<(String, GenerationResult)> {
    let mut out = Vec::new();
    for n in [2u32, 3] {
        for value in 0..1u64 << n {
            let secret = format_bitstring(value, n);
            out.push((format!("bv n={n} secret={secret}"), gen_bv(n, &secret).unwrap()));
        }
    }
    for n in [2u32, 3] {
        for value in [false, true] {
            out.push((
                format!("dj n={n} constant value={value}"),
                gen_dj(n, &DjFunction::Constant { value }).unwrap(),
            ));
        }
        for mask in 1..1u64 << n {
            let mask = format_bitstring(mask, n);
            out.push((
                format!("dj n={n} linear mask={mask}"),
                gen_dj(n, &DjFunction::BalancedLinear { mask: mask.clone() }).unwrap(),
            ));
        }
        let (evens, odds): (BTreeSet<String>, BTreeSet<String>) = {
            let mut evens = BTreeSet::new();
            let mut odds = BTreeSet::new();
            for x in 0..1u64 << n {
                let s = format_bitstring(x, n);
                if x.count_ones() % 2 == 0 {
                    evens.insert(s);
                } else {
                    odds.insert(s);
                }
            }
            (evens, odds)
        };
        for (label, members) in [("even", evens), ("odd", odds)] {
            out.push((
                format!("dj n={n} subset parity={label}"),
                gen_dj(n, &DjFunction::BalancedSubset { members }).unwrap(),
            ));
        }
    }
    for n in [2u32, 3, 4] {
        for value in 0..1u64 << n {
            let marked: BTreeSet<String> = [format_bitstring(value, n)].into();
            out.push((
                format!("grover n={n} marked={value:0width$b}", width = n as usize),
                gen_grover(n, &marked, None).unwrap(),
            ));
        }
    }
    for t in [2u32, 3] {
        for k in 0..1u64 << t {
            out.push((format!("pe t={t} k={k}"), gen_pe(t, k).unwrap()));
        }
    }
    for n in [2u32, 3, 4] {
        out.push((format!("wstate n={n}"), gen_wstate(n).unwrap()));
    }
    out
}

/// One way to corrupt a single gate statement of a program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateEdit {
    /// Replace the base gate name at this statement index.
    Rename(usize, &'static str),
    /// Add a constant to the single angle parameter at this index.
    Nudge(usize, f64),
    /// Delete the statement at this index.
    Drop(usize),
}

/// A corrupted copy of a reference program together with the task it is
/// scored against and a label describing the corruption.
#[derive(Debug, Clone)]
pub struct Mutant {
    pub label: String,
    pub spec: TaskSpec,
    pub text: String,
}

fn apply_edit(program: &mut Program, edit: GateEdit) {
    match edit {
        GateEdit::Rename(idx, to) => {
            if let Statement::Gate(g) = &mut program.statements[idx] {
                g.name = to.to_string();
            } else {
                panic!("edit target {idx} is not a gate statement");
            }
        }
        GateEdit::Nudge(idx, delta) => {
            if let Statement::Gate(g) = &mut program.statements[idx] {
                let old = g.params[0].fold_const().expect("angle folds to a constant");
                g.params[0] = Expr::Lit(old + delta);
            } else {
                panic!("edit target {idx} is not a gate statement");
            }
        }
        GateEdit::Drop(idx) => {
            program.statements.remove(idx);
        }
    }
}

/// The single-gate corruptions of this reference program that must flip its
/// verdict, given the task it solves. Sites are chosen so the corruption is
/// observable for the oracles `mutation_task` draws: every listed edit
/// changes the measured distribution (or prepared state) by more than the
/// checker's tolerance.
fn eligible_edits(spec: &TaskSpec, program: &Program) -> Vec<GateEdit> {
    let mut edits = Vec::new();
    for (idx, statement) in program.statements.iter().enumerate() {
        let g = match statement {
            Statement::Gate(g) => g,
            _ => continue,
        };
        match spec.algorithm {
            Algorithm::Bv => match g.name.as_str() {
                "h" | "x" => edits.push(GateEdit::Rename(idx, "z")),
                _ => {}
            },
            Algorithm::Dj => {
                let on_input =
                    g.targets.first().and_then(|t| t.index).map_or(false, |j| j < spec.n);
                if g.name == "h" && on_input {
                    edits.push(GateEdit::Rename(idx, "z"));
                }
            }
            Algorithm::Grover => match g.name.as_str() {
                "h" | "x" => edits.push(GateEdit::Rename(idx, "z")),
                "z" => edits.push(GateEdit::Rename(idx, "x")),
                _ => {}
            },
            Algorithm::Pe => match g.name.as_str() {
                "CU_0" => edits.push(GateEdit::Drop(idx)),
                "h" => edits.push(GateEdit::Rename(idx, "z")),
                _ => {}
            },
            Algorithm::Wstate => match g.name.as_str() {
                "ry" => {
                    edits.push(GateEdit::Nudge(idx, 0.1));
                    edits.push(GateEdit::Nudge(idx, -0.1));
                }
                "x" => edits.push(GateEdit::Rename(idx, "z")),
                "cx" => edits.push(GateEdit::Rename(idx, "cz")),
                "cz" => edits.push(GateEdit::Rename(idx, "cx")),
                _ => {}
            },
        }
    }
    edits
}

/// Draws a task whose reference program every eligible edit observably
/// breaks. Secrets, masks, and eigenphases are drawn nonzero: the all-zero
/// instances make some oracle-adjacent corruptions invisible (their
/// circuits act trivially), which would test nothing.
fn mutation_task(algorithm: Algorithm, rng: &mut ChaCha8Rng, seed: u64) -> TaskSpec {
    match algorithm {
        Algorithm::Bv => {
            let n = rng.gen_range(2..=6);
            let secret = rng.gen_range(1..1u64 << n);
            TaskSpec {
                algorithm,
                n,
                seed,
                oracle: OracleSpec::BvSecret { secret: format_bitstring(secret, n) },
            }
        }
        Algorithm::Dj => {
            let n = rng.gen_range(2..=6);
            let value = rng.gen_bool(0.5);
            TaskSpec {
                algorithm,
                n,
                seed,
                oracle: OracleSpec::DjSpec { function: DjFunction::Constant { value } },
            }
        }
        Algorithm::Grover => {
            let n = rng.gen_range(2..=5);
            let marked = rng.gen_range(0..1u64 << n);
            TaskSpec {
                algorithm,
                n,
                seed,
                oracle: OracleSpec::GroverMarked {
                    marked: [format_bitstring(marked, n)].into(),
                },
            }
        }
        Algorithm::Pe => {
            let t = rng.gen_range(2..=5);
            let k = rng.gen_range(1..1u64 << t);
            TaskSpec { algorithm, n: t, seed, oracle: OracleSpec::PePhase { k, t } }
        }
        Algorithm::Wstate => {
            let n = rng.gen_range(2..=8);
            TaskSpec { algorithm, n, seed, oracle: OracleSpec::WsNone }
        }
    }
}

/// The `index`-th seeded single-gate mutant for an algorithm family:
/// deterministic in `(algorithm, index)`.
pub fn seeded_mutant(algorithm: Algorithm, index: u64) -> Mutant {
    let algo_pos = Algorithm::ALL.iter().position(|a| *a == algorithm).unwrap() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(algo_pos << 32 | index);
    let spec = mutation_task(algorithm, &mut rng, index);
    let reference = reference_program(&spec).expect("mutation tasks are generable");
    let (mut program, diagnostics) = parse(&reference.main_qasm);
    assert!(diagnostics.is_empty(), "reference programs parse cleanly: {diagnostics:?}");
    let edits = eligible_edits(&spec, &program);
    assert!(!edits.is_empty(), "no eligible edits for {spec:?}");
    let edit = edits[rng.gen_range(0..edits.len())];
    apply_edit(&mut program, edit);
    Mutant {
        label: format!("{} index={index} {edit:?} n={}", algorithm.name(), spec.n),
        spec,
        text: emit(&program),
    }
}
