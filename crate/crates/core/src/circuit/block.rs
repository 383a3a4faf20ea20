use serde::{Deserialize, Serialize};

use super::layout::{RegisterLayout, SYSTEM};
use crate::error::{Error, Result};
use crate::operators::{matmul_adj_right, spectral_norm, CMatrix, DenseUnitary, HermitianMatrix, C64};

/// Slack allowed on `‖T‖ ≤ 1` before a dilation is refused.
pub const CONTRACTION_SLACK: f64 = 1e-12;

/// Basis indices of `layout` with every register in `projected` set to `|0⟩`,
/// ordered lexicographically in the remaining registers.
fn kept_indices(layout: &RegisterLayout, projected: &[&str]) -> Result<Vec<usize>> {
    let n = layout.n_qubits();
    let mut mask = 0usize;
    for name in projected {
        for q in layout.qubits(name)? {
            mask |= 1 << (n - 1 - q);
        }
    }
    Ok((0..layout.dim()).filter(|i| i & mask == 0).collect())
}

/// `⟨0_projected| U |0_projected⟩` as a matrix on the other registers.
pub fn project_block(u: &CMatrix, layout: &RegisterLayout, projected: &[&str]) -> Result<CMatrix> {
    if u.nrows() != layout.dim() || u.ncols() != layout.dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.dim(),
            found: u.nrows(),
        });
    }
    let idx = kept_indices(layout, projected)?;
    Ok(CMatrix::from_fn(idx.len(), idx.len(), |r, c| u[(idx[r], idx[c])]))
}

/// The system block with every other register in `|0⟩`.
pub fn extract_block(u: &DenseUnitary, layout: &RegisterLayout) -> Result<CMatrix> {
    let others: Vec<&str> = layout
        .registers()
        .iter()
        .map(|r| r.name.as_str())
        .filter(|n| *n != SYSTEM)
        .collect();
    project_block(u.matrix(), layout, &others)
}

/// `f(M)` for a Hermitian `M` with eigenvalues clamped into `[-1, 1]`
/// before `f` is applied.
fn hermitian_function(m: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<(CMatrix, f64)> {
    let eig = m.eigh()?;
    let norm = eig.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    Ok((eig.apply_function(|l| C64::new(f(l), 0.0)), norm))
}

/// `[[H̃, S], [S, −H̃]]` with `S = √(I − H̃²)`, for `‖H̃‖ ≤ 1`.
pub fn hermitian_dilation(h: &HermitianMatrix) -> Result<CMatrix> {
    let (s, norm) = hermitian_function(h, |l| (1.0 - l * l).max(0.0).sqrt())?;
    if norm > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContraction { norm });
    }
    let n = h.dim();
    let hm = h.as_matrix();
    Ok(CMatrix::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
        (true, true) => hm[(r, c)],
        (true, false) => s[(r, c - n)],
        (false, true) => s[(r - n, c)],
        (false, false) => -hm[(r - n, c - n)],
    }))
}

/// `[[T, √(I − TT†)], [√(I − T†T), −T†]]` for a contraction `T`.
///
/// Both square roots come from one SVD `T = U Σ V†`, so the off-diagonal
/// blocks intertwine `T` exactly even when `Σ ≈ I` and the roots are tiny.
pub fn contraction_dilation(t: &CMatrix) -> Result<CMatrix> {
    if !t.is_square() {
        return Err(Error::NotSquare {
            rows: t.nrows(),
            cols: t.ncols(),
        });
    }
    let n = t.nrows();
    let svd = t.clone().svd(true, true);
    let norm = svd.singular_values.iter().fold(0.0_f64, |a, s| a.max(*s));
    if !norm.is_finite() {
        return Err(Error::NonFinite("contraction entries".into()));
    }
    if norm > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContraction { norm });
    }
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Eigensolver("SVD did not return singular vectors".into())),
    };
    let roots: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|s| (1.0 - s.min(1.0).powi(2)).sqrt())
        .collect();
    let scaled = |m: &CMatrix| {
        let mut m = m.clone();
        for (j, r) in roots.iter().enumerate() {
            m.column_mut(j).scale_mut(*r);
        }
        m
    };
    let left = matmul_adj_right(&scaled(&u), &u);
    let v = v_t.adjoint();
    let right = matmul_adj_right(&scaled(&v), &v);
    Ok(CMatrix::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
        (true, true) => t[(r, c)],
        (true, false) => left[(r, c - n)],
        (false, true) => right[(r - n, c)],
        (false, false) => -t[(c - n, r - n)].conj(),
    }))
}

/// `(factor, n_anc, ε)` block encoding: `‖factor · ⟨0|U|0⟩ − target‖ ≤ ε`,
/// the projection running over the `ancillas` registers.
#[derive(Clone, Debug)]
pub struct BlockEncoding {
    unitary: DenseUnitary,
    factor: f64,
    ancillas: Vec<String>,
    epsilon: f64,
}

impl BlockEncoding {
    /// With a `target` the claimed accuracy is checked before returning.
    pub fn new(
        unitary: DenseUnitary,
        factor: f64,
        ancillas: Vec<String>,
        epsilon: f64,
        target: Option<&CMatrix>,
    ) -> Result<Self> {
        let layout = unitary
            .layout()
            .ok_or_else(|| Error::InvalidCircuit("block encodings need a register layout".into()))?;
        for a in &ancillas {
            layout.qubits(a)?;
        }
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::param("factor", format!("must be positive, got {factor}")));
        }
        let be = Self {
            unitary,
            factor,
            ancillas,
            epsilon,
        };
        if let Some(t) = target {
            let deviation = be.deviation(t)?;
            if deviation > epsilon {
                return Err(Error::InvalidCircuit(format!(
                    "block deviates from target by {deviation:e} > {epsilon:e}"
                )));
            }
        }
        Ok(be)
    }

    pub fn unitary(&self) -> &DenseUnitary {
        &self.unitary
    }

    pub fn layout(&self) -> &RegisterLayout {
        self.unitary.layout().expect("checked at construction")
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn ancillas(&self) -> &[String] {
        &self.ancillas
    }

    pub fn n_anc(&self) -> usize {
        self.ancillas
            .iter()
            .map(|a| self.layout().width(a).expect("checked at construction"))
            .sum()
    }

    /// `⟨0_anc| U |0_anc⟩`
    pub fn block(&self) -> CMatrix {
        let names: Vec<&str> = self.ancillas.iter().map(String::as_str).collect();
        project_block(self.unitary.matrix(), self.layout(), &names).expect("checked at construction")
    }

    /// `factor · block`
    pub fn encoded(&self) -> CMatrix {
        self.block() * C64::new(self.factor, 0.0)
    }

    fn deviation(&self, target: &CMatrix) -> Result<f64> {
        let enc = self.encoded();
        if enc.shape() != target.shape() {
            return Err(Error::DimensionMismatch {
                expected: enc.nrows(),
                found: target.nrows(),
            });
        }
        Ok(spectral_norm(&(enc - target)))
    }

    /// Registers left after projection, in layout order.
    fn kept(&self) -> Vec<(String, usize)> {
        self.layout()
            .registers()
            .iter()
            .filter(|r| !self.ancillas.contains(&r.name))
            .map(|r| (r.name.clone(), r.width))
            .collect()
    }
}

/// Outcome of [`verify_block_encoding`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub factor: f64,
    /// `‖factor · block − target‖`; infinite on a shape mismatch.
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn verify_block_encoding(be: &BlockEncoding, target: &CMatrix, tol: f64) -> BlockReport {
    let deviation = be.deviation(target).unwrap_or(f64::INFINITY);
    BlockReport {
        factor: be.factor,
        deviation,
        tolerance: tol,
        passed: deviation <= tol,
    }
}

/// Block encoding of `exp(−it · factor · block)` with one fresh ancilla.
///
/// The exponential is formed classically from the extracted block and then
/// dilated, standing in for singular value transformation of the input
/// encoding.
pub fn exponentiate_block_encoding(be: &BlockEncoding, t: f64) -> Result<BlockEncoding> {
    if !t.is_finite() {
        return Err(Error::NonFinite("evolution time".into()));
    }
    let h = HermitianMatrix::new(be.encoded())?;
    let u = h.eigh()?.exp_minus_i(t);
    let mut regs = vec![("anc".to_string(), 1)];
    regs.extend(be.kept().into_iter().filter(|(n, _)| n != "anc"));
    let layout = RegisterLayout::new(regs.iter().map(|(n, w)| (n.as_str(), *w)).collect())?;
    let w = DenseUnitary::from_trusted(contraction_dilation(&u)?).with_layout(layout)?;
    BlockEncoding::new(w, 1.0, vec!["anc".into()], 0.0, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{matmul, max_abs, pauli, ONE, ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, norm: f64) -> HermitianMatrix {
        let m = CMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = HermitianMatrix::symmetrized(&m + m.adjoint());
        let s = norm / h.norm();
        h.scaled(s)
    }

    #[test]
    fn dilating_a_unitary_stays_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(&mut rng, 4, 2.0);
        let u = h.eigh().unwrap().exp_minus_i(0.7);
        let d = DenseUnitary::new(contraction_dilation(&u).unwrap()).unwrap();
        assert!(d.unitarity_defect() < 1e-13);
    }

    #[test]
    fn identity_block() {
        let l = RegisterLayout::new(vec![("a", 1), (SYSTEM, 2)]).unwrap();
        let u = DenseUnitary::identity(8).with_layout(l.clone()).unwrap();
        assert_eq!(extract_block(&u, &l).unwrap(), CMatrix::identity(4, 4));
        let short = RegisterLayout::new(vec![(SYSTEM, 2)]).unwrap();
        assert!(extract_block(&u, &short).is_err());
    }

    #[test]
    fn conditioned_part_of_a_controlled_unitary() {
        // |0⟩⟨0| ⊗ X + |1⟩⟨1| ⊗ Z on (a, sys): the a = 0 block is X.
        let p0 = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let p1 = CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]);
        let m = p0.kronecker(&pauli::x()) + p1.kronecker(&pauli::z());
        let l = RegisterLayout::new(vec![("a", 1), (SYSTEM, 1)]).unwrap();
        let u = DenseUnitary::new(m).unwrap().with_layout(l.clone()).unwrap();
        assert_eq!(extract_block(&u, &l).unwrap(), pauli::x());
    }

    #[test]
    fn dilations_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 4] {
            let h = random_hermitian(&mut rng, n, 0.9);
            let d = DenseUnitary::new(hermitian_dilation(&h).unwrap()).unwrap();
            assert!(d.unitarity_defect() < 1e-13);
            let t = CMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let t = &t * C64::new(0.95 / spectral_norm(&t), 0.0);
            let d = DenseUnitary::new(contraction_dilation(&t).unwrap()).unwrap();
            assert!(d.unitarity_defect() < 1e-13);
            assert!(max_abs(&(d.matrix().view((0, 0), (n, n)) - &t)) < 1e-15);
        }
        assert!(matches!(
            hermitian_dilation(&HermitianMatrix::new(pauli::z() * C64::new(1.5, 0.0)).unwrap()),
            Err(Error::NotContraction { .. })
        ));
        assert!(contraction_dilation(&(pauli::x() * C64::new(2.0, 0.0))).is_err());
    }

    #[test]
    fn saturated_dilation_has_no_off_diagonal() {
        let h = HermitianMatrix::new(pauli::z()).unwrap();
        let d = hermitian_dilation(&h).unwrap();
        assert!(max_abs(&d.view((0, 2), (2, 2)).into_owned()) < 1e-15);
    }

    fn encoding_of(h: &HermitianMatrix, factor: f64) -> BlockEncoding {
        let l = RegisterLayout::new(vec![("anc", 1), (SYSTEM, h.dim().trailing_zeros() as usize)]).unwrap();
        let u = DenseUnitary::new(hermitian_dilation(&h.scaled(1.0 / factor)).unwrap())
            .unwrap()
            .with_layout(l)
            .unwrap();
        BlockEncoding::new(u, factor, vec!["anc".into()], 1e-12, Some(h.as_matrix())).unwrap()
    }

    #[test]
    fn verification_reports_miscaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(&mut rng, 2, 1.3);
        let be = encoding_of(&h, 2.0);
        let ok = verify_block_encoding(&be, h.as_matrix(), 1e-12);
        assert!(ok.passed && ok.deviation < 1e-14);
        let half = be.block() * C64::new(be.factor() / 2.0, 0.0);
        let bad = BlockEncoding::new(be.unitary().clone(), be.factor() / 2.0, vec!["anc".into()], 1.0, None).unwrap();
        let r = verify_block_encoding(&bad, h.as_matrix(), 1e-12);
        assert!(!r.passed);
        assert!((r.deviation - spectral_norm(&(half - h.as_matrix()))).abs() < 1e-14);
        assert!((r.deviation - h.norm() / 2.0).abs() < 1e-12);
        assert!(!verify_block_encoding(&be, &CMatrix::identity(4, 4), 1.0).passed);
        let wrong = BlockEncoding::new(be.unitary().clone(), 1.0, vec!["anc".into()], 1e-12, Some(h.as_matrix()));
        assert!(wrong.is_err());
    }

    #[test]
    fn zero_target() {
        let be = encoding_of(&HermitianMatrix::zeros(2), 1.0);
        assert_eq!(verify_block_encoding(&be, &CMatrix::zeros(2, 2), 0.0).deviation, 0.0);
    }

    #[test]
    fn exponentiation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(&mut rng, 2, 0.8);
        let be = encoding_of(&h, 1.5);
        let e0 = exponentiate_block_encoding(&be, 0.0).unwrap();
        assert!(max_abs(&(e0.block() - CMatrix::identity(2, 2))) < 1e-14);
        let e1 = exponentiate_block_encoding(&be, 0.3).unwrap();
        let e2 = exponentiate_block_encoding(&be, 0.5).unwrap();
        let e12 = exponentiate_block_encoding(&be, 0.8).unwrap();
        assert!(max_abs(&(matmul(&e2.block(), &e1.block()) - e12.block())) < 1e-12);
        assert!(e1.unitary().unitarity_defect() < 1e-13);
        assert_eq!(e1.n_anc(), 1);

        // A non-Hermitian block is refused.
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let l = RegisterLayout::new(vec![("anc", 1), (SYSTEM, 1)]).unwrap();
        let u = DenseUnitary::new(contraction_dilation(&m).unwrap()).unwrap().with_layout(l).unwrap();
        let nh = BlockEncoding::new(u, 1.0, vec!["anc".into()], 0.0, None).unwrap();
        assert!(matches!(exponentiate_block_encoding(&nh, 1.0), Err(Error::NotHermitian { .. })));
    }
}
