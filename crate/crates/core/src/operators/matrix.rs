use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::RegisterLayout;
use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Dense complex product through the packed `zgemm` kernel; nalgebra's
/// generic complex product is several times slower at the sizes used here.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul: inner dimensions differ");
    let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
    let mut out = CMatrix::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return out;
    }
    // SAFETY: `Complex64` is `repr(C)` with two `f64` fields, so it has the
    // layout of `[f64; 2]`. All three buffers are column-major with the
    // strides given and `out` does not alias the inputs.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [0.0, 0.0],
            out.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    out
}

/// `a · b†`
pub fn matmul_adj_right(a: &CMatrix, b: &CMatrix) -> CMatrix {
    matmul(a, &b.adjoint())
}

/// `a† · b`
pub fn matmul_adj_left(a: &CMatrix, b: &CMatrix) -> CMatrix {
    matmul(&a.adjoint(), b)
}

pub(crate) fn comm(x: &CMatrix, y: &CMatrix) -> CMatrix {
    matmul(x, y) - matmul(y, x)
}

/// `xy − yx`.
pub fn commutator(x: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
    if !x.is_square() {
        return Err(Error::NotSquare {
            rows: x.nrows(),
            cols: x.ncols(),
        });
    }
    if x.shape() != y.shape() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: y.nrows(),
        });
    }
    Ok(comm(x, y))
}

/// Largest singular value, from the top eigenvalue of the smaller Gram
/// matrix.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    if m.nrows() == 1 || m.ncols() == 1 {
        return frobenius(m);
    }
    // Rescaling keeps the Gram matrix away from under/overflow.
    let scaled = m.map(|z| z / scale);
    let gram = if scaled.ncols() <= scaled.nrows() {
        matmul_adj_left(&scaled, &scaled)
    } else {
        matmul_adj_right(&scaled, &scaled)
    };
    let gram = (&gram + gram.adjoint()) * C64::new(0.5, 0.0);
    let top = gram
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, &v| acc.max(v));
    scale * top.max(0.0).sqrt()
}

/// Dense Hermitian matrix. Construction rejects inputs whose anti-Hermitian
/// part exceeds `1e-12 · max|M_ij|` and symmetrizes the rest.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("Hermitian matrix entry".into()));
        }
        let adj = m.adjoint();
        let deviation = max_abs(&(&m - &adj));
        let tolerance = Self::TOLERANCE * max_abs(&m);
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        Ok(Self((m + adj) * C64::new(0.5, 0.0)))
    }

    /// `(M + M†)/2` without the tolerance check; for results that are
    /// Hermitian up to roundoff by construction.
    pub fn symmetrized(m: CMatrix) -> Self {
        debug_assert!(m.is_square());
        let adj = m.adjoint();
        Self((m + adj) * C64::new(0.5, 0.0))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    pub fn from_real_symmetric(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| C64::new(x, 0.0)))
    }

    /// Builds from row-major complex entries given as `(re, im)` pairs.
    pub fn from_rows(dim: usize, entries: &[(f64, f64)]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(CMatrix::from_fn(dim, dim, |i, j| {
            let (re, im) = entries[i * dim + j];
            C64::new(re, im)
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self(&self.0 + &other.0))
    }

    pub fn norm(&self) -> f64 {
        spectral_norm(&self.0)
    }

    pub fn eigh(&self) -> Result<Eigh> {
        let n = self.dim();
        if n == 0 {
            return Ok(Eigh {
                values: Vec::new(),
                vectors: CMatrix::zeros(0, 0),
            });
        }
        let eig = self
            .0
            .clone()
            .try_symmetric_eigen(f64::EPSILON, 1000 * (n + 10))
            .ok_or_else(|| Error::Eigensolver(format!("no convergence for dim {n}")))?;
        let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Eigensolver("non-finite eigenvalue".into()));
        }
        Ok(Eigh {
            values,
            vectors: eig.eigenvectors,
        })
    }
}

/// Eigendecomposition `M = V diag(λ) V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    /// `V diag(f(λ)) V†`
    pub fn apply_function(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= w);
        }
        matmul_adj_right(&scaled, &self.vectors)
    }

    /// `exp(-i t M)`
    pub fn exp_minus_i(&self, t: f64) -> CMatrix {
        self.apply_function(|lambda| C64::from_polar(1.0, -lambda * t))
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply_function(|lambda| C64::new(lambda, 0.0))
    }
}

/// Complex unitary matrix with optional register metadata.
#[derive(Clone, Debug)]
pub struct DenseUnitary {
    matrix: CMatrix,
    layout: Option<RegisterLayout>,
}

impl DenseUnitary {
    /// Per-dimension tolerance on `‖U†U − I‖`.
    pub const TOLERANCE: f64 = 1e-10;

    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let u = Self {
            matrix,
            layout: None,
        };
        let defect = u.unitarity_defect();
        let tolerance = Self::TOLERANCE * u.dim().max(1) as f64;
        if defect.is_nan() || defect > tolerance {
            return Err(Error::NotUnitary { defect, tolerance });
        }
        Ok(u)
    }

    /// Wraps a matrix that is unitary by construction (products and
    /// exponentials of validated inputs).
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self {
            matrix,
            layout: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_trusted(CMatrix::identity(dim, dim))
    }

    pub fn with_layout(mut self, layout: RegisterLayout) -> Result<Self> {
        if layout.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: layout.dim(),
            });
        }
        self.layout = Some(layout);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn layout(&self) -> Option<&RegisterLayout> {
        self.layout.as_ref()
    }

    /// `‖U†U − I‖`. Spectral norm up to dimension 256; above that the
    /// Frobenius norm, which bounds it from above.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let mut g = matmul_adj_left(&self.matrix, &self.matrix);
        for i in 0..n {
            g[(i, i)] -= ONE;
        }
        if n <= 256 {
            spectral_norm(&g)
        } else {
            frobenius(&g)
        }
    }

    /// `self · other`, i.e. `other` acts first.
    pub fn compose(&self, other: &DenseUnitary) -> Result<DenseUnitary> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self::from_trusted(matmul(&self.matrix, &other.matrix)))
    }

    pub fn adjoint(&self) -> DenseUnitary {
        Self::from_trusted(self.matrix.adjoint())
    }

    /// Spectral-norm distance to another operator of the same size.
    pub fn distance(&self, other: &DenseUnitary) -> f64 {
        spectral_norm(&(&self.matrix - &other.matrix))
    }
}

/// `exp(-i h t)` through the eigendecomposition of `h`.
pub fn unitary_from_hermitian(h: &HermitianMatrix, t: f64) -> Result<DenseUnitary> {
    if !t.is_finite() {
        return Err(Error::NonFinite("evolution time".into()));
    }
    Ok(DenseUnitary::from_trusted(h.eigh()?.exp_minus_i(t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
        let m = random_matrix(rng, n);
        HermitianMatrix::new((&m + m.adjoint()) * C64::new(0.5, 0.0)).unwrap()
    }

    fn pauli() -> (CMatrix, CMatrix, CMatrix) {
        use crate::operators::pauli;
        (pauli::x(), pauli::y(), pauli::z())
    }

    #[test]
    fn matmul_matches_nalgebra_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = CMatrix::from_fn(5, 3, |_, _| C64::new(rng.gen(), rng.gen()));
        let b = CMatrix::from_fn(3, 4, |_, _| C64::new(rng.gen(), rng.gen()));
        assert!(max_abs(&(matmul(&a, &b) - &a * &b)) < 1e-14);
        assert!(max_abs(&(matmul_adj_left(&a, &a) - a.adjoint() * &a)) < 1e-14);
    }

    #[test]
    fn spectral_norm_of_simple_matrices() {
        assert!((spectral_norm(&CMatrix::identity(7, 7)) - 1.0).abs() < 1e-14);
        let d = HermitianMatrix::from_real_diagonal(&[3.0, -5.0]);
        assert!((spectral_norm(d.as_matrix()) - 5.0).abs() < 1e-14);
        assert_eq!(spectral_norm(&CMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn spectral_norm_matches_svd_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let m = random_matrix(&mut rng, 8);
            let svd = m.clone().svd(false, false);
            let top = svd.singular_values.iter().fold(0.0_f64, |a, &b| a.max(b));
            let got = spectral_norm(&m);
            assert!((got - top).abs() <= 1e-10 * top, "{got} vs {top}");
        }
    }

    #[test]
    fn pauli_commutators() {
        let (x, y, z) = pauli();
        assert_eq!(max_abs(&commutator(&x, &x).unwrap()), 0.0);
        let xy = commutator(&x, &y).unwrap();
        assert!(max_abs(&(xy - z * C64::new(0.0, 2.0))) < 1e-15);
        let a = HermitianMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]);
        let b = HermitianMatrix::from_real_diagonal(&[-4.0, 0.5, 9.0]);
        assert_eq!(max_abs(&commutator(a.as_matrix(), b.as_matrix()).unwrap()), 0.0);
    }

    #[test]
    fn commutator_rejects_mismatched_dims() {
        let err = commutator(&CMatrix::identity(2, 2), &CMatrix::identity(3, 3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn commutator_of_hermitians_is_anti_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_hermitian(&mut rng, 6);
        let b = random_hermitian(&mut rng, 6);
        let c = commutator(a.as_matrix(), b.as_matrix()).unwrap();
        assert!(max_abs(&(&c + c.adjoint())) < 1e-14);
    }

    #[test]
    fn hermitian_construction_symmetrizes_or_rejects() {
        let mut m = CMatrix::from_row_slice(2, 2, &[ONE, C64::new(2.0, 1.0), C64::new(2.0, -1.0), ONE]);
        m[(0, 1)] += C64::new(1e-15, 0.0);
        let h = HermitianMatrix::new(m.clone()).unwrap();
        assert_eq!(h.as_matrix()[(0, 1)], h.as_matrix()[(1, 0)].conj());
        m[(0, 1)] += C64::new(1e-3, 0.0);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            HermitianMatrix::new(CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        let mut bad = CMatrix::identity(2, 2);
        bad[(1, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(HermitianMatrix::new(bad), Err(Error::NonFinite(_))));
    }

    #[test]
    fn exponential_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(&mut rng, 5);
        let u0 = unitary_from_hermitian(&h, 0.0).unwrap();
        assert!(max_abs(&(u0.matrix() - CMatrix::identity(5, 5))) < 1e-13);

        let d = HermitianMatrix::from_real_diagonal(&[0.3, -1.1]);
        let u = unitary_from_hermitian(&d, 2.0).unwrap();
        assert!((u.matrix()[(0, 0)] - C64::from_polar(1.0, -0.6)).norm() < 1e-15);
        assert!((u.matrix()[(1, 1)] - C64::from_polar(1.0, 2.2)).norm() < 1e-15);
        assert!(u.matrix()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn exponential_group_law_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(&mut rng, 16);
        for _ in 0..5 {
            let t1: f64 = rng.gen_range(-2.0..2.0);
            let t2: f64 = rng.gen_range(-2.0..2.0);
            let u1 = unitary_from_hermitian(&h, t1).unwrap();
            let u2 = unitary_from_hermitian(&h, t2).unwrap();
            let u12 = unitary_from_hermitian(&h, t1 + t2).unwrap();
            assert!(u1.compose(&u2).unwrap().distance(&u12) < 1e-10);
            assert!(u1.unitarity_defect() <= 1e-11 * 16.0);
        }
    }

    #[test]
    fn dense_unitary_rejects_non_unitary() {
        let m = CMatrix::identity(2, 2) * C64::new(2.0, 0.0);
        assert!(matches!(DenseUnitary::new(m), Err(Error::NotUnitary { .. })));
    }
}
