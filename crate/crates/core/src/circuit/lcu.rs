use serde::{Deserialize, Serialize};

use super::block::{extract_block, BlockEncoding};
use super::gates::{Circuit, Control, GateKind};
use super::layout::{RegisterLayout, RyPlacement, RY_ANCILLA, SYSTEM};
use super::oracles::{check_step, ham_t_oracle, index_qubits, step_samples, system_qubits, ANCILLA, INDEX};
use crate::error::{Error, Result};
use crate::integrators::omega2_from_samples;
use crate::operators::{comm, frobenius, max_abs, CMatrix, DenseUnitary, HermitianMatrix, TimeHamiltonian, C64, I};

/// Entrywise agreement required between the assembled target and `i·Ω̃₂`.
pub const TARGET_CONSISTENCY: f64 = 1e-12;

/// `Σ_p H_p (h/M) + (i/2) Σ_p [Σ_{q<p} H_q (h/M), H_p] (h/M)` on the
/// samples `H_p = H(jh + ph/M)`, by direct double summation.
///
/// Cross-checked against `i·Ω̃₂` from the integrators before returning.
pub fn assemble_lcu_target(h_t: &TimeHamiltonian, j: usize, h: f64, m: usize, alpha: f64) -> Result<HermitianMatrix> {
    check_step(h, alpha)?;
    if m == 0 {
        return Err(Error::param("m", "must be at least 1"));
    }
    let samples = step_samples(h_t, j, h, m)?;
    for (p, s) in samples.iter().enumerate() {
        let norm = s.norm();
        if norm > alpha * (1.0 + 1e-12) {
            return Err(Error::param("alpha", format!("‖H_{p}‖ = {norm} exceeds α = {alpha}")));
        }
    }
    let w = C64::new(h / m as f64, 0.0);
    let n = h_t.dim();
    let mut first = CMatrix::zeros(n, n);
    let mut second = CMatrix::zeros(n, n);
    for (p, hp) in samples.iter().enumerate() {
        first += hp.as_matrix() * w;
        for hq in &samples[..p] {
            second += comm(hq.as_matrix(), hp.as_matrix()) * (w * w);
        }
    }
    let target = HermitianMatrix::new(first + second * (I * 0.5))?;

    let omega = omega2_from_samples(&samples, j as f64 * h, h)?;
    let gap = max_abs(&(omega.matrix() * I - target.as_matrix()));
    if gap > TARGET_CONSISTENCY {
        return Err(Error::InvalidCircuit(format!(
            "LCU target differs from i·Ω̃₂ by {gap:e}"
        )));
    }
    Ok(target)
}

/// `θ = arccos(αh)`; requires `αh ≤ 1`.
pub fn coefficient_angle(alpha: f64, h: f64) -> Result<f64> {
    let x = alpha * h;
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::param("h", format!("αh = {x} must lie in (0, 1]")));
    }
    Ok(x.acos())
}

/// Gate sequence of the second-order LCU block encoding of one step.
pub fn fig1_circuit(
    h_t: &TimeHamiltonian,
    j: usize,
    h: f64,
    m: usize,
    alpha: f64,
    ry: RyPlacement,
) -> Result<Circuit> {
    check_step(h, alpha)?;
    let n_m = index_qubits(m)?;
    if n_m == 0 {
        return Err(Error::param("m", "the comparator needs M ≥ 2"));
    }
    let n_s = system_qubits(h_t.dim())?;
    let theta = coefficient_angle(alpha, h)?;
    let oracle = ham_t_oracle(h_t, j, h, m, alpha)?;
    let n_a = oracle.layout().width(ANCILLA)?;
    let layout = RegisterLayout::fig1(n_s, n_m, n_a, ry)?;

    let reg = |name: &str| -> Result<Vec<usize>> { Ok(layout.qubits(name)?.collect()) };
    let (c1, c2, c3) = (layout.qubit("c1")?, reg("c2")?, reg("c3")?);
    let (q1, q2, q3, q4) = (layout.qubit("q1")?, layout.qubit("q2")?, reg("q3")?, reg("q4")?);
    let sys = reg(SYSTEM)?;
    let ry_target = match ry {
        RyPlacement::Dedicated => layout.qubit(RY_ANCILLA)?,
        RyPlacement::SharedFlag => q1,
    };
    let ham_t = |index: &[usize]| -> Vec<usize> { [index, &q4, &sys].concat() };
    let hadamards: Vec<usize> = [&[c1][..], &c2, &c3, &[q2]].concat();

    let mut c = Circuit::new(layout.clone());
    debug_assert_eq!(oracle.layout().width(INDEX)?, n_m);
    c.define_ham_t(j, oracle.unitary())?;
    let oracle_gate = GateKind::HamT { j };
    let on = Control::closed;
    let off = Control::open;

    c.push_each(GateKind::Hadamard, hadamards.iter().copied())?;
    // First-order branch.
    c.push(oracle_gate.clone(), ham_t(&c2), vec![off(c1)])?;
    // Commutator branch: restrict to q < p and sign the k = 1 ordering.
    c.push(GateKind::Comp { n_m }, [&c2[..], &c3, &[q1]].concat(), vec![on(c1)])?;
    c.push(GateKind::PauliZ, vec![q2], vec![on(c1)])?;
    for (first, second, k) in [(&c2, &c3, false), (&c3, &c2, true)] {
        let ctrl = vec![on(c1), Control { qubit: q2, closed: k }];
        c.push(oracle_gate.clone(), ham_t(first), ctrl.clone())?;
        for (a, b) in q3.iter().zip(&q4) {
            c.push(GateKind::Swap, vec![*a, *b], ctrl.clone())?;
        }
        c.push(oracle_gate.clone(), ham_t(second), ctrl)?;
    }
    c.push(GateKind::Ry { theta }, vec![ry_target], vec![on(c1)])?;
    c.push(GateKind::SGate, vec![c1], vec![])?;
    c.push_each(GateKind::Hadamard, hadamards)?;
    Ok(c)
}

/// The dense unitary of [`fig1_circuit`] with a dedicated rotation qubit.
pub fn build_fig1_circuit(h_t: &TimeHamiltonian, j: usize, h: f64, m: usize, alpha: f64) -> Result<DenseUnitary> {
    fig1_circuit(h_t, j, h, m, alpha, RyPlacement::Dedicated)?.unitary()
}

/// The circuit as a block encoding with the claimed factor `2αh`.
pub fn fig1_block_encoding(
    h_t: &TimeHamiltonian,
    j: usize,
    h: f64,
    m: usize,
    alpha: f64,
    ry: RyPlacement,
) -> Result<BlockEncoding> {
    let u = fig1_circuit(h_t, j, h, m, alpha, ry)?.unitary()?;
    let ancillas = u
        .layout()
        .expect("circuit unitaries carry a layout")
        .registers()
        .iter()
        .filter(|r| r.name != SYSTEM)
        .map(|r| r.name.clone())
        .collect();
    BlockEncoding::new(u, 2.0 * alpha * h, ancillas, f64::INFINITY, None)
}

/// Least-squares fit `block ≈ c · target` over all entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProportionalityFit {
    pub re: f64,
    pub im: f64,
    /// `1/|c|`, the measured normalization factor.
    pub factor: f64,
    /// `arg c`
    pub phase: f64,
    /// `‖block/c − target‖_F`, in units of the target.
    pub residual: f64,
    pub target_norm: f64,
}

impl ProportionalityFit {
    pub fn scalar(&self) -> C64 {
        C64::new(self.re, self.im)
    }

    pub fn relative_residual(&self) -> f64 {
        self.residual / self.target_norm
    }
}

pub fn fit_proportionality(block: &CMatrix, target: &CMatrix) -> Result<ProportionalityFit> {
    if block.shape() != target.shape() {
        return Err(Error::DimensionMismatch {
            expected: target.nrows(),
            found: block.nrows(),
        });
    }
    let target_norm = frobenius(target);
    if target_norm == 0.0 {
        return Err(Error::param("target", "a zero target fixes no scale"));
    }
    let c: C64 = target.iter().zip(block.iter()).map(|(t, b)| t.conj() * b).sum::<C64>() / (target_norm * target_norm);
    if c.norm() == 0.0 {
        return Err(Error::InvalidCircuit("block is orthogonal to the target".into()));
    }
    let residual = frobenius(&(block / c - target));
    Ok(ProportionalityFit {
        re: c.re,
        im: c.im,
        factor: 1.0 / c.norm(),
        phase: c.arg(),
        residual,
        target_norm,
    })
}

/// Fit of the circuit's system block against the assembled target.
pub fn fig1_proportionality(
    h_t: &TimeHamiltonian,
    j: usize,
    h: f64,
    m: usize,
    alpha: f64,
    ry: RyPlacement,
) -> Result<ProportionalityFit> {
    let target = assemble_lcu_target(h_t, j, h, m, alpha)?;
    let u = fig1_circuit(h_t, j, h, m, alpha, ry)?.unitary()?;
    let block = extract_block(&u, u.layout().expect("circuit unitaries carry a layout"))?;
    fit_proportionality(&block, target.as_matrix())
}
