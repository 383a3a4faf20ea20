use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::layout::RegisterLayout;
use crate::error::{Error, Result};
use crate::operators::{CMatrix, DenseUnitary, C64, I, ONE, ZERO};

/// A control qubit. Closed controls fire on `|1⟩`, open ones on `|0⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Control {
    pub qubit: usize,
    pub closed: bool,
}

impl Control {
    pub fn closed(qubit: usize) -> Self {
        Self { qubit, closed: true }
    }

    pub fn open(qubit: usize) -> Self {
        Self { qubit, closed: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum GateKind {
    Hadamard,
    SGate,
    PauliZ,
    /// `exp(−iθY)`, so that `⟨0|Ry(θ)|0⟩ = cos θ`.
    Ry { theta: f64 },
    Swap,
    /// Comparator on `|p⟩|q⟩|flag⟩`.
    Comp { n_m: usize },
    /// Time-indexed oracle of step `j`; the matrix is registered on the circuit.
    HamT { j: usize },
    CustomUnitary { label: String },
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Hadamard => "hadamard",
            GateKind::SGate => "s_gate",
            GateKind::PauliZ => "pauli_z",
            GateKind::Ry { .. } => "ry",
            GateKind::Swap => "swap",
            GateKind::Comp { .. } => "comp",
            GateKind::HamT { .. } => "ham_t",
            GateKind::CustomUnitary { .. } => "custom_unitary",
        }
    }

    fn oracle_key(&self) -> Option<String> {
        match self {
            GateKind::HamT { j } => Some(format!("ham_t[{j}]")),
            GateKind::CustomUnitary { label } => Some(label.clone()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    #[serde(flatten)]
    pub kind: GateKind,
    /// Target qubits; the first is the most significant bit of the gate matrix.
    pub wires: Vec<usize>,
    pub controls: Vec<Control>,
}

pub fn hadamard() -> CMatrix {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    CMatrix::from_row_slice(2, 2, &[s, s, s, -s])
}

pub fn s_gate() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, I])
}

pub fn ry(theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    CMatrix::from_row_slice(2, 2, &[c.into(), (-s).into(), s.into(), c.into()])
}

fn swap() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(r, c)] = ONE;
    }
    m
}

/// A gate sequence on a register layout, with the matrices of its oracles.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Circuit {
    layout: RegisterLayout,
    gates: Vec<GateOp>,
    #[serde(skip)]
    oracles: BTreeMap<String, CMatrix>,
}

/// A gate lowered to index arithmetic.
struct Lowered {
    matrix: CMatrix,
    offsets: Vec<usize>,
    wire_mask: usize,
    control_mask: usize,
    control_value: usize,
}

impl Circuit {
    pub fn new(layout: RegisterLayout) -> Self {
        Self {
            layout,
            gates: Vec::new(),
            oracles: BTreeMap::new(),
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    /// Registers the matrix of oracle `HamT { j }`.
    pub fn define_ham_t(&mut self, j: usize, oracle: &DenseUnitary) -> Result<()> {
        self.define(GateKind::HamT { j }.oracle_key().expect("keyed"), oracle)
    }

    pub fn define_custom(&mut self, label: &str, unitary: &DenseUnitary) -> Result<()> {
        self.define(label.to_string(), unitary)
    }

    fn define(&mut self, key: String, u: &DenseUnitary) -> Result<()> {
        if !u.dim().is_power_of_two() {
            return Err(Error::InvalidCircuit(format!("oracle `{key}` has dimension {}", u.dim())));
        }
        self.oracles.insert(key, u.matrix().clone());
        Ok(())
    }

    /// Appends a gate after checking its wiring.
    pub fn push(&mut self, kind: GateKind, wires: Vec<usize>, controls: Vec<Control>) -> Result<()> {
        let op = GateOp { kind, wires, controls };
        self.lower(&op)?;
        self.gates.push(op);
        Ok(())
    }

    /// Appends `kind` on each wire separately.
    pub fn push_each(&mut self, kind: GateKind, wires: impl IntoIterator<Item = usize>) -> Result<()> {
        for w in wires {
            self.push(kind.clone(), vec![w], vec![])?;
        }
        Ok(())
    }

    /// Number of gates of each kind.
    pub fn counts(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for g in &self.gates {
            *out.entry(g.kind.name()).or_insert(0) += 1;
        }
        out
    }

    fn gate_matrix(&self, kind: &GateKind) -> Result<CMatrix> {
        Ok(match kind {
            GateKind::Hadamard => hadamard(),
            GateKind::SGate => s_gate(),
            GateKind::PauliZ => crate::operators::pauli::z(),
            GateKind::Ry { theta } => {
                if !theta.is_finite() {
                    return Err(Error::NonFinite("rotation angle".into()));
                }
                ry(*theta)
            }
            GateKind::Swap => swap(),
            GateKind::Comp { n_m } => super::oracles::comp_oracle(*n_m)?.into_matrix(),
            GateKind::HamT { .. } | GateKind::CustomUnitary { .. } => {
                let key = kind.oracle_key().expect("keyed");
                self.oracles
                    .get(&key)
                    .cloned()
                    .ok_or_else(|| Error::InvalidCircuit(format!("oracle `{key}` is not defined")))?
            }
        })
    }

    fn lower(&self, op: &GateOp) -> Result<Lowered> {
        let n = self.layout.n_qubits();
        let matrix = self.gate_matrix(&op.kind)?;
        let k = op.wires.len();
        if k == 0 || matrix.nrows() != 1 << k {
            return Err(Error::InvalidCircuit(format!(
                "{} acts on {} qubits but got {k} wires",
                op.kind.name(),
                matrix.nrows().trailing_zeros()
            )));
        }
        let mut used = vec![false; n];
        for q in op.wires.iter().copied().chain(op.controls.iter().map(|c| c.qubit)) {
            if q >= n {
                return Err(Error::InvalidCircuit(format!("qubit {q} outside a {n}-qubit layout")));
            }
            if used[q] {
                return Err(Error::InvalidCircuit(format!(
                    "qubit {q} used twice by {}",
                    op.kind.name()
                )));
            }
            used[q] = true;
        }
        let bit = |q: usize| 1usize << (n - 1 - q);
        let offsets = (0..1usize << k)
            .map(|l| {
                (0..k)
                    .filter(|i| l >> (k - 1 - i) & 1 == 1)
                    .map(|i| bit(op.wires[i]))
                    .sum()
            })
            .collect();
        let wire_mask = op.wires.iter().map(|&q| bit(q)).sum();
        let control_mask = op.controls.iter().map(|c| bit(c.qubit)).sum();
        let control_value = op.controls.iter().filter(|c| c.closed).map(|c| bit(c.qubit)).sum();
        Ok(Lowered {
            matrix,
            offsets,
            wire_mask,
            control_mask,
            control_value,
        })
    }

    fn lowered(&self) -> Result<Vec<Lowered>> {
        self.gates.iter().map(|g| self.lower(g)).collect()
    }

    /// Applies the circuit to a state vector in place.
    pub fn apply(&self, state: &mut [C64]) -> Result<()> {
        if state.len() != self.layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.layout.dim(),
                found: state.len(),
            });
        }
        let lowered = self.lowered()?;
        let mut scratch = Vec::new();
        for g in &lowered {
            apply_lowered(g, state, &mut scratch);
        }
        Ok(())
    }

    /// The dense unitary of the whole sequence, carrying the layout.
    pub fn unitary(&self) -> Result<DenseUnitary> {
        let dim = self.layout.dim();
        let lowered = self.lowered()?;
        let mut data = vec![ZERO; dim * dim];
        let mut scratch = Vec::new();
        for (j, column) in data.chunks_mut(dim).enumerate() {
            column[j] = ONE;
            for g in &lowered {
                apply_lowered(g, column, &mut scratch);
            }
        }
        DenseUnitary::from_trusted(CMatrix::from_vec(dim, dim, data)).with_layout(self.layout.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("gate lists serialize")
    }
}

fn apply_lowered(g: &Lowered, state: &mut [C64], scratch: &mut Vec<C64>) {
    let size = g.offsets.len();
    scratch.resize(size, ZERO);
    for base in 0..state.len() {
        if base & g.wire_mask != 0 || base & g.control_mask != g.control_value {
            continue;
        }
        for (s, &off) in scratch.iter_mut().zip(&g.offsets) {
            *s = state[base + off];
        }
        for (r, &off) in g.offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (c, s) in scratch.iter().enumerate() {
                acc += g.matrix[(r, c)] * s;
            }
            state[base + off] = acc;
        }
    }
}
