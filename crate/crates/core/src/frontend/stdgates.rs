//! The built-in standard gate set.
//!
//! These names are always in scope, whether or not the program includes
//! `stdgates.inc`. Each entry records the number of angle parameters and the
//! number of qubit operands.

/// (name, parameter count, qubit arity)
pub const STANDARD_GATES: &[(&str, usize, usize)] = &[
    ("x", 0, 1),
    ("y", 0, 1),
    ("z", 0, 1),
    ("h", 0, 1),
    ("s", 0, 1),
    ("sdg", 0, 1),
    ("t", 0, 1),
    ("tdg", 0, 1),
    ("sx", 0, 1),
    ("rx", 1, 1),
    ("ry", 1, 1),
    ("rz", 1, 1),
    ("p", 1, 1),
    ("u", 3, 1),
    ("cx", 0, 2),
    ("cz", 0, 2),
    ("cp", 1, 2),
    ("swap", 0, 2),
    ("ccx", 0, 3),
    ("crx", 1, 2),
    ("cry", 1, 2),
    ("crz", 1, 2),
    ("ch", 0, 2),
];

/// Look up a standard gate signature by name.
pub fn standard_gate(name: &str) -> Option<(usize, usize)> {
    STANDARD_GATES
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, params, arity)| (*params, *arity))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_known_gates() {
        assert_eq!(standard_gate("h"), Some((0, 1)));
        assert_eq!(standard_gate("cp"), Some((1, 2)));
        assert_eq!(standard_gate("u"), Some((3, 1)));
        assert_eq!(standard_gate("ccx"), Some((0, 3)));
        assert_eq!(standard_gate("nope"), None);
    }

    #[test]
    fn table_has_no_duplicates() {
        for (i, (a, _, _)) in STANDARD_GATES.iter().enumerate() {
            for (b, _, _) in &STANDARD_GATES[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }
}
