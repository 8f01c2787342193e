//! Unitaries for the built-in gate set.
//!
//! Matrix index convention matches the simulator's state indexing: bit j of
//! a row/column index is the state of the j-th operand, so the first
//! operand of a controlled gate (its control) is the least-significant bit.

use num_complex::Complex64;

use super::SimError;

#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    pub dim: usize,
    elems: Vec<Complex64>,
}

impl Unitary {
    pub fn new(dim: usize, elems: Vec<Complex64>) -> Self {
        assert_eq!(elems.len(), dim * dim);
        Unitary { dim, elems }
    }

    pub fn identity(dim: usize) -> Self {
        let mut u = Unitary { dim, elems: vec![Complex64::new(0.0, 0.0); dim * dim] };
        for i in 0..dim {
            *u.get_mut(i, i) = Complex64::new(1.0, 0.0);
        }
        u
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elems[row * self.dim + col]
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut Complex64 {
        &mut self.elems[row * self.dim + col]
    }

    /// Conjugate transpose; the inverse for any unitary.
    pub fn adjoint(&self) -> Unitary {
        let mut out = Unitary { dim: self.dim, elems: vec![Complex64::new(0.0, 0.0); self.elems.len()] };
        for r in 0..self.dim {
            for c in 0..self.dim {
                *out.get_mut(r, c) = self.get(c, r).conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Unitary) -> Unitary {
        assert_eq!(self.dim, other.dim);
        let mut out = Unitary { dim: self.dim, elems: vec![Complex64::new(0.0, 0.0); self.elems.len()] };
        for r in 0..self.dim {
            for c in 0..self.dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..self.dim {
                    acc += self.get(r, k) * other.get(k, c);
                }
                *out.get_mut(r, c) = acc;
            }
        }
        out
    }

    pub fn max_deviation_from_identity(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let want = if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((self.get(r, c) - want).norm());
            }
        }
        worst
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn single(rows: [[Complex64; 2]; 2]) -> Unitary {
    Unitary::new(2, vec![rows[0][0], rows[0][1], rows[1][0], rows[1][1]])
}

/// Add control qubits as the lowest-index operands of `u`: the resulting
/// matrix applies `u` on the remaining operands iff all controls are 1.
pub fn controlled(u: &Unitary, num_controls: usize) -> Unitary {
    let cdim = 1usize << num_controls;
    let cmask = cdim - 1;
    let dim = u.dim * cdim;
    let mut out = Unitary { dim, elems: vec![Complex64::new(0.0, 0.0); dim * dim] };
    for row in 0..dim {
        if row & cmask == cmask {
            let base_row = row >> num_controls;
            for base_col in 0..u.dim {
                let col = (base_col << num_controls) | cmask;
                *out.get_mut(row, col) = u.get(base_row, base_col);
            }
        } else {
            *out.get_mut(row, row) = Complex64::new(1.0, 0.0);
        }
    }
    out
}

fn rx(theta: f64) -> Unitary {
    let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    single([[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]])
}

fn ry(theta: f64) -> Unitary {
    let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    single([[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
}

fn rz(theta: f64) -> Unitary {
    let e = Complex64::from_polar(1.0, theta / 2.0);
    single([[e.conj(), c(0.0, 0.0)], [c(0.0, 0.0), e]])
}

fn phase(lambda: f64) -> Unitary {
    single([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, lambda)]])
}

fn u_gate(theta: f64, phi: f64, lambda: f64) -> Unitary {
    let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    single([
        [c(co, 0.0), -Complex64::from_polar(s, lambda)],
        [Complex64::from_polar(s, phi), Complex64::from_polar(co, phi + lambda)],
    ])
}

fn x_gate() -> Unitary {
    single([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
}

fn h_gate() -> Unitary {
    let r = 1.0 / 2.0f64.sqrt();
    single([[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]])
}

fn z_gate() -> Unitary {
    single([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
}

/// The conventional matrix for a built-in gate.
pub fn standard_gate_unitary(name: &str, params: &[f64]) -> Result<Unitary, SimError> {
    let expected = match crate::frontend::stdgates::standard_gate(name) {
        Some((p, _)) => p,
        None => return Err(SimError::UnknownGate(name.to_string())),
    };
    if params.len() != expected {
        return Err(SimError::ParamCountMismatch {
            gate: name.to_string(),
            expected,
            got: params.len(),
        });
    }
    let u = match name {
        "x" => x_gate(),
        "y" => single([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]),
        "z" => z_gate(),
        "h" => h_gate(),
        "s" => phase(std::f64::consts::FRAC_PI_2),
        "sdg" => phase(-std::f64::consts::FRAC_PI_2),
        "t" => phase(std::f64::consts::FRAC_PI_4),
        "tdg" => phase(-std::f64::consts::FRAC_PI_4),
        "sx" => single([
            [c(0.5, 0.5), c(0.5, -0.5)],
            [c(0.5, -0.5), c(0.5, 0.5)],
        ]),
        "rx" => rx(params[0]),
        "ry" => ry(params[0]),
        "rz" => rz(params[0]),
        "p" => phase(params[0]),
        "u" => u_gate(params[0], params[1], params[2]),
        "cx" => controlled(&x_gate(), 1),
        "cz" => controlled(&z_gate(), 1),
        "cp" => controlled(&phase(params[0]), 1),
        "swap" => {
            let mut m = Unitary { dim: 4, elems: vec![Complex64::new(0.0, 0.0); 16] };
            *m.get_mut(0, 0) = c(1.0, 0.0);
            *m.get_mut(1, 2) = c(1.0, 0.0);
            *m.get_mut(2, 1) = c(1.0, 0.0);
            *m.get_mut(3, 3) = c(1.0, 0.0);
            m
        }
        "ccx" => controlled(&x_gate(), 2),
        "crx" => controlled(&rx(params[0]), 1),
        "cry" => controlled(&ry(params[0]), 1),
        "crz" => controlled(&rz(params[0]), 1),
        "ch" => controlled(&h_gate(), 1),
        _ => return Err(SimError::UnknownGate(name.to_string())),
    };
    Ok(u)
}
