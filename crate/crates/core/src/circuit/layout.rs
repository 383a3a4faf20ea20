use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named register of consecutive qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub width: usize,
}

/// Ordered registers; qubit 0 is the most significant bit of a basis index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    registers: Vec<Register>,
}

/// Name of the system register in every layout built here.
pub const SYSTEM: &str = "sys";

/// Single-qubit register carrying the coefficient rotation when it is not
/// shared with the comparator flag.
pub const RY_ANCILLA: &str = "ry";

/// Where the coefficient rotation of the LCU circuit acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RyPlacement {
    /// On its own qubit. Unitary equivalent of measuring the comparator
    /// flag and reusing the qubit.
    Dedicated,
    /// On the comparator flag `q1` itself, as drawn. The rotation then maps
    /// the flagged `q ≥ p` terms back into the block.
    SharedFlag,
}

/// Largest emulated width.
pub const MAX_QUBITS: usize = 14;

impl RegisterLayout {
    pub fn new(registers: Vec<(&str, usize)>) -> Result<Self> {
        let registers: Vec<Register> = registers
            .into_iter()
            .map(|(name, width)| Register {
                name: name.to_string(),
                width,
            })
            .collect();
        for (i, r) in registers.iter().enumerate() {
            if r.width == 0 {
                return Err(Error::InvalidCircuit(format!("register `{}` has zero width", r.name)));
            }
            if registers[..i].iter().any(|p| p.name == r.name) {
                return Err(Error::InvalidCircuit(format!("duplicate register `{}`", r.name)));
            }
        }
        let layout = Self { registers };
        if layout.n_qubits() > MAX_QUBITS {
            return Err(Error::InvalidCircuit(format!(
                "{} qubits exceed the dense emulation cap of {MAX_QUBITS}",
                layout.n_qubits()
            )));
        }
        Ok(layout)
    }

    /// `c1, c2 (p), c3 (q), q1, [ry,] q2, q3, q4, sys`, top to bottom.
    pub fn fig1(n_s: usize, n_m: usize, n_a: usize, ry: RyPlacement) -> Result<Self> {
        let mut regs = vec![("c1", 1), ("c2", n_m), ("c3", n_m), ("q1", 1)];
        if ry == RyPlacement::Dedicated {
            regs.push((RY_ANCILLA, 1));
        }
        regs.extend([("q2", 1), ("q3", n_a), ("q4", n_a), (SYSTEM, n_s)]);
        Self::new(regs)
    }

    /// `k, anc, sys` of a time-indexed oracle.
    pub fn ham_t(n_s: usize, n_m: usize, n_a: usize) -> Result<Self> {
        if n_m == 0 {
            Self::new(vec![("anc", n_a), (SYSTEM, n_s)])
        } else {
            Self::new(vec![("k", n_m), ("anc", n_a), (SYSTEM, n_s)])
        }
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn n_qubits(&self) -> usize {
        self.registers.iter().map(|r| r.width).sum()
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits()
    }

    pub fn qubits(&self, name: &str) -> Result<Range<usize>> {
        let mut start = 0;
        for r in &self.registers {
            if r.name == name {
                return Ok(start..start + r.width);
            }
            start += r.width;
        }
        Err(Error::InvalidCircuit(format!("no register named `{name}`")))
    }

    pub fn qubit(&self, name: &str) -> Result<usize> {
        let q = self.qubits(name)?;
        if q.len() != 1 {
            return Err(Error::InvalidCircuit(format!("register `{name}` is not a single qubit")));
        }
        Ok(q.start)
    }

    pub fn width(&self, name: &str) -> Result<usize> {
        self.qubits(name).map(|r| r.len())
    }

    /// Basis indices with every non-system qubit in `|0⟩`, in system order.
    pub fn system_block_indices(&self) -> Result<Vec<usize>> {
        let sys = self.qubits(SYSTEM)?;
        let n = self.n_qubits();
        let low = n - sys.end;
        Ok((0..1usize << sys.len()).map(|s| s << low).collect())
    }

    /// Qubits outside the system register.
    pub fn n_ancilla(&self) -> usize {
        self.n_qubits() - self.width(SYSTEM).unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_dimension_accounting() {
        let l = RegisterLayout::fig1(1, 1, 1, RyPlacement::SharedFlag).unwrap();
        // n_s + 2 n_m + 2 n_a + 3
        assert_eq!(l.n_qubits(), 1 + 2 + 2 + 3);
        assert_eq!(l.dim(), 1 << 8);
        assert_eq!(l.qubits("c3").unwrap(), 2..3);
        assert_eq!(l.qubit("q4").unwrap(), 6);
        assert_eq!(l.n_ancilla(), 7);
        assert_eq!(l.system_block_indices().unwrap(), vec![0, 1]);
        let d = RegisterLayout::fig1(1, 1, 1, RyPlacement::Dedicated).unwrap();
        assert_eq!(d.n_qubits(), 9);
        assert_eq!(d.qubit(RY_ANCILLA).unwrap(), 4);
        assert_eq!(d.qubit("q4").unwrap(), 7);
    }

    #[test]
    fn invalid_layouts() {
        assert!(RegisterLayout::new(vec![("a", 0)]).is_err());
        assert!(RegisterLayout::new(vec![("a", 1), ("a", 2)]).is_err());
        assert!(RegisterLayout::new(vec![("a", 15)]).is_err());
        assert!(RegisterLayout::fig1(1, 1, 1, RyPlacement::Dedicated).unwrap().qubit("c2").is_ok());
        assert!(RegisterLayout::fig1(1, 2, 1, RyPlacement::Dedicated).unwrap().qubit("c2").is_err());
    }

    #[test]
    fn system_in_the_middle() {
        let l = RegisterLayout::new(vec![("a", 1), (SYSTEM, 2), ("b", 1)]).unwrap();
        assert_eq!(l.system_block_indices().unwrap(), vec![0, 2, 4, 6]);
    }
}
