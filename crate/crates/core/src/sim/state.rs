//! Statevector storage and in-place gate application.

use num_complex::Complex64;

use super::gates::Unitary;
use super::{SimError, MAX_QUBITS};

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0⟩ on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Result<Self, SimError> {
        if num_qubits > MAX_QUBITS {
            return Err(SimError::QubitLimitExceeded(num_qubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    pub fn from_amps(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self, SimError> {
        if num_qubits > MAX_QUBITS {
            return Err(SimError::QubitLimitExceeded(num_qubits));
        }
        if amps.len() != 1 << num_qubits {
            return Err(SimError::DimensionMismatch);
        }
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply `gate` to `targets` under the given (index, polarity) controls,
    /// in place. Matrix index bit j corresponds to `targets[j]`.
    pub fn apply(
        &mut self,
        gate: &Unitary,
        targets: &[usize],
        controls: &[(usize, bool)],
    ) -> Result<(), SimError> {
        let k = targets.len();
        if gate.dim != 1 << k {
            return Err(SimError::DimensionMismatch);
        }
        let mut seen = 0u64;
        for &t in targets {
            if t >= self.num_qubits {
                return Err(SimError::BadProgram(format!("qubit index {t} out of range")));
            }
            if seen >> t & 1 == 1 {
                return Err(SimError::IndexOverlap);
            }
            seen |= 1 << t;
        }
        let mut pos_mask = 0usize;
        let mut neg_mask = 0usize;
        for &(cq, polarity) in controls {
            if cq >= self.num_qubits {
                return Err(SimError::BadProgram(format!("qubit index {cq} out of range")));
            }
            if seen >> cq & 1 == 1 {
                return Err(SimError::IndexOverlap);
            }
            seen |= 1 << cq;
            if polarity {
                pos_mask |= 1 << cq;
            } else {
                neg_mask |= 1 << cq;
            }
        }

        // Index offsets for each matrix row/column pattern.
        let dim = 1usize << k;
        let mut offsets = vec![0usize; dim];
        for (pat, off) in offsets.iter_mut().enumerate() {
            for (j, &t) in targets.iter().enumerate() {
                if pat >> j & 1 == 1 {
                    *off |= 1 << t;
                }
            }
        }

        let free_bits: Vec<usize> =
            (0..self.num_qubits).filter(|b| !targets.contains(b)).collect();
        let mut buf = vec![Complex64::new(0.0, 0.0); dim];
        for g in 0..(1usize << free_bits.len()) {
            let mut base = 0usize;
            for (j, &b) in free_bits.iter().enumerate() {
                if g >> j & 1 == 1 {
                    base |= 1 << b;
                }
            }
            if base & pos_mask != pos_mask || base & neg_mask != 0 {
                continue;
            }
            for (pat, &off) in offsets.iter().enumerate() {
                buf[pat] = self.amps[base | off];
            }
            for (row, &off) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, &b) in buf.iter().enumerate() {
                    acc += gate.get(row, col) * b;
                }
                self.amps[base | off] = acc;
            }
        }
        Ok(())
    }

    /// Multiply the amplitude of every basis state selected by `predicate`
    /// (over the full index) by `factor`. Used for semantically bound
    /// diagonal oracles.
    pub(crate) fn scale_where(&mut self, factor: Complex64, predicate: impl Fn(usize) -> bool) {
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if predicate(i) {
                *amp *= factor;
            }
        }
    }

    /// Swap amplitudes of `i` and `i | bit` for every index `i` (with the
    /// bit clear) selected by `predicate`. Used for bit-flip oracles.
    pub(crate) fn swap_pairs_where(&mut self, bit: usize, predicate: impl Fn(usize) -> bool) {
        let mask = 1usize << bit;
        for i in 0..self.amps.len() {
            if i & mask == 0 && predicate(i) {
                self.amps.swap(i, i | mask);
            }
        }
    }
}

/// |⟨a|b⟩|².
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64, SimError> {
    if a.num_qubits != b.num_qubits {
        return Err(SimError::DimensionMismatch);
    }
    let mut inner = Complex64::new(0.0, 0.0);
    for (x, y) in a.amps.iter().zip(b.amps.iter()) {
        inner += x.conj() * y;
    }
    Ok(inner.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gates::standard_gate_unitary;

    #[test]
    fn x_on_qubit_zero_of_two_qubit_zero_state() {
        let mut s = StateVector::new(2).unwrap();
        let x = standard_gate_unitary("x", &[]).unwrap();
        s.apply(&x, &[0], &[]).unwrap();
        // |01⟩ in qubit order means basis index 1.
        assert!((s.amps()[1].re - 1.0).abs() < 1e-12);
        assert!(s.amps()[0].norm() < 1e-12);
    }

    #[test]
    fn controlled_z_via_apply_controls() {
        let mut s = StateVector::new(2).unwrap();
        let x = standard_gate_unitary("x", &[]).unwrap();
        s.apply(&x, &[0], &[]).unwrap();
        s.apply(&x, &[1], &[]).unwrap();
        let z = standard_gate_unitary("z", &[]).unwrap();
        s.apply(&z, &[1], &[(0, true)]).unwrap();
        assert!((s.amps()[3].re + 1.0).abs() < 1e-12, "{:?}", s.amps());
    }

    #[test]
    fn negative_control_fires_on_zero() {
        let mut s = StateVector::new(2).unwrap();
        let x = standard_gate_unitary("x", &[]).unwrap();
        s.apply(&x, &[1], &[(0, false)]).unwrap();
        // qubit 0 is 0, so the X on qubit 1 fires: state index 2.
        assert!((s.amps()[2].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_is_conserved() {
        let mut s = StateVector::new(3).unwrap();
        for (name, params, targets) in [
            ("h", vec![], vec![0]),
            ("ry", vec![0.7], vec![1]),
            ("cx", vec![], vec![0, 2]),
            ("cp", vec![1.1], vec![1, 2]),
        ] {
            let u = standard_gate_unitary(name, &params).unwrap();
            s.apply(&u, &targets, &[]).unwrap();
            assert!((s.norm_sq() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn overlap_is_rejected() {
        let mut s = StateVector::new(2).unwrap();
        let cx = standard_gate_unitary("cx", &[]).unwrap();
        assert_eq!(s.apply(&cx, &[0, 0], &[]), Err(SimError::IndexOverlap));
        let x = standard_gate_unitary("x", &[]).unwrap();
        assert_eq!(s.apply(&x, &[0], &[(0, true)]), Err(SimError::IndexOverlap));
    }

    #[test]
    fn fidelity_basics() {
        let s = StateVector::new(2).unwrap();
        assert!((fidelity(&s, &s).unwrap() - 1.0).abs() < 1e-12);
        let mut t = StateVector::new(2).unwrap();
        let x = standard_gate_unitary("x", &[]).unwrap();
        t.apply(&x, &[0], &[]).unwrap();
        assert!(fidelity(&s, &t).unwrap() < 1e-12);
        let u = StateVector::new(3).unwrap();
        assert_eq!(fidelity(&s, &u), Err(SimError::DimensionMismatch));
    }

    #[test]
    fn qubit_cap_enforced() {
        assert!(StateVector::new(13).is_ok());
        assert_eq!(StateVector::new(14), Err(SimError::QubitLimitExceeded(14)));
    }
}
