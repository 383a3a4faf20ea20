use super::block::{hermitian_dilation, BlockEncoding};
use super::gates::{Circuit, Control, GateKind};
use super::layout::{RegisterLayout, SYSTEM};
use crate::error::{Error, Result};
use crate::operators::{
    CMatrix, DenseUnitary, HermitianMatrix, InteractionPicture, Perturbation, TimeHamiltonian, ONE,
};

/// Name of the time-index register of an oracle.
pub const INDEX: &str = "k";
/// Name of the dilation ancilla of an oracle.
pub const ANCILLA: &str = "anc";

/// `|p⟩|q⟩|f⟩ → |p⟩|q⟩|f ⊕ [q ≥ p]⟩` on `2 n_m + 1` qubits.
pub fn comp_oracle(n_m: usize) -> Result<DenseUnitary> {
    if n_m == 0 {
        return Err(Error::param("n_m", "the comparator needs at least one index qubit"));
    }
    let layout = RegisterLayout::new(vec![("p", n_m), ("q", n_m), ("flag", 1)])?;
    let dim = layout.dim();
    let mut m = CMatrix::zeros(dim, dim);
    let mask = (1usize << n_m) - 1;
    for col in 0..dim {
        let p = col >> (n_m + 1);
        let q = (col >> 1) & mask;
        let row = if q < p { col } else { col ^ 1 };
        m[(row, col)] = ONE;
    }
    DenseUnitary::from_trusted(m).with_layout(layout)
}

/// `log₂ m`, for `m` a power of two.
pub(crate) fn index_qubits(m: usize) -> Result<usize> {
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::param("m", format!("must be a power of two, got {m}")));
    }
    Ok(m.trailing_zeros() as usize)
}

/// Number of qubits of a power-of-two system dimension.
pub(crate) fn system_qubits(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() {
        return Err(Error::param("dim", format!("system dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub(crate) fn check_step(h: f64, alpha: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::param("h", format!("must be positive, got {h}")));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::param("alpha", format!("must be positive, got {alpha}")));
    }
    Ok(())
}

/// `H(jh + kh/M)` for `k = 0..M`.
pub(crate) fn step_samples(h_t: &TimeHamiltonian, j: usize, h: f64, m: usize) -> Result<Vec<HermitianMatrix>> {
    h_t.sample_window(j as f64 * h, h, m)
}

/// Oracle with `⟨0_anc| U |0_anc⟩ = Σ_k |k⟩⟨k| ⊗ H(jh + kh/M)/α` on
/// `(k, anc, sys)`, one Hermitian dilation per `k`.
pub fn ham_t_oracle(h_t: &TimeHamiltonian, j: usize, h: f64, m: usize, alpha: f64) -> Result<BlockEncoding> {
    check_step(h, alpha)?;
    let n_m = index_qubits(m)?;
    let n = h_t.dim();
    let n_s = system_qubits(n)?;
    let layout = RegisterLayout::ham_t(n_s, n_m, 1)?;
    let dim = layout.dim();
    let mut u = CMatrix::zeros(dim, dim);
    for (k, hk) in step_samples(h_t, j, h, m)?.iter().enumerate() {
        let d = hermitian_dilation(&hk.scaled(1.0 / alpha))?;
        u.view_mut((2 * n * k, 2 * n * k), (2 * n, 2 * n)).copy_from(&d);
    }
    let u = DenseUnitary::from_trusted(u).with_layout(layout)?;
    BlockEncoding::new(u, alpha, vec![ANCILLA.into()], 0.0, None)
}

/// `e^{iAs}`
fn o_a(ip: &InteractionPicture, s: f64) -> DenseUnitary {
    ip.propagator_a(-s)
}

/// The interaction-picture oracle
/// `O_A(jh) · C[O_A(ph/M)] · O_B(j) · C[O_A(−ph/M)] · O_A(−jh)`,
/// whose block is `Σ_k |k⟩⟨k| ⊗ e^{iAt_k} B(t_k) e^{−iAt_k} / α_B`.
///
/// The `k`-controlled phases are products of single-bit controlled powers.
pub fn interaction_ham_t(ip: &InteractionPicture, j: usize, h: f64, m: usize) -> Result<BlockEncoding> {
    let alpha = ip.alpha_b();
    check_step(h, alpha)?;
    let b_t = match ip.perturbation() {
        Perturbation::Static(b) => TimeHamiltonian::constant(b.clone()),
        Perturbation::Driven(b) => b.clone(),
    };
    let o_b = ham_t_oracle(&b_t, j, h, m, alpha)?;
    let layout = o_b.layout().clone();
    let sys: Vec<usize> = layout.qubits(SYSTEM)?.collect();
    let index: Vec<usize> = layout.qubits(INDEX).map(|r| r.collect()).unwrap_or_default();
    let all: Vec<usize> = (0..layout.n_qubits()).collect();
    let n_m = index.len();
    let t_j = j as f64 * h;

    let mut c = Circuit::new(layout);
    c.define_custom("O_A(-jh)", &o_a(ip, -t_j))?;
    c.define_custom("O_A(jh)", &o_a(ip, t_j))?;
    c.define_custom("O_B", o_b.unitary())?;
    for b in 0..n_m {
        let tau = (1usize << b) as f64 * h / m as f64;
        c.define_custom(&format!("O_A(-{}h/M)", 1 << b), &o_a(ip, -tau))?;
        c.define_custom(&format!("O_A({}h/M)", 1 << b), &o_a(ip, tau))?;
    }
    // Index qubit i (most significant first) carries weight 2^{n_m-1-i}.
    let powers = |sign: &str| -> Vec<(String, usize)> {
        (0..n_m)
            .map(|i| (format!("O_A({sign}{}h/M)", 1usize << (n_m - 1 - i)), index[i]))
            .collect()
    };
    let custom = |label: &str| GateKind::CustomUnitary { label: label.into() };
    c.push(custom("O_A(-jh)"), sys.clone(), vec![])?;
    for (label, q) in powers("-") {
        c.push(custom(&label), sys.clone(), vec![Control::closed(q)])?;
    }
    c.push(custom("O_B"), all, vec![])?;
    for (label, q) in powers("") {
        c.push(custom(&label), sys.clone(), vec![Control::closed(q)])?;
    }
    c.push(custom("O_A(jh)"), sys, vec![])?;
    BlockEncoding::new(c.unitary()?, alpha, vec![ANCILLA.into()], 0.0, None)
}
