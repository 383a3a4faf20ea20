use std::sync::Arc;

use super::grid::{build_laplacian_1d, GridSpec, Potential};
use super::matrix::{
    comm, matmul, matmul_adj_left, matmul_adj_right, spectral_norm, DenseUnitary, Eigh,
    HermitianMatrix, C64,
};
use super::time::TimeHamiltonian;
use super::CMatrix;
use crate::error::{Error, Result};

/// The perturbation `B` of `H = A + B`.
#[derive(Clone, Debug)]
pub enum Perturbation {
    Static(HermitianMatrix),
    Driven(TimeHamiltonian),
}

#[derive(Debug)]
struct Inner {
    a: HermitianMatrix,
    eig: Eigh,
    b: Perturbation,
    alpha_b: f64,
    /// `Q† B Q` for static `B`.
    b_eigenbasis: Option<CMatrix>,
}

/// `H = A + B(t)` with a diagonalized, fast-forwardable `A`.
#[derive(Clone, Debug)]
pub struct InteractionPicture {
    inner: Arc<Inner>,
}

impl InteractionPicture {
    /// Relative spectral-norm tolerance on `Q diag(λ) Q† − A`.
    pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-10;

    pub fn new_static(a: HermitianMatrix, b: HermitianMatrix) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        let alpha_b = b.norm();
        Self::build(a, Perturbation::Static(b), alpha_b)
    }

    pub fn new_driven(a: HermitianMatrix, b: TimeHamiltonian) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        let alpha_b = b.alpha();
        Self::build(a, Perturbation::Driven(b), alpha_b)
    }

    /// `A = −Δ` on the grid and `B = V(x)`.
    pub fn schrodinger(grid: &GridSpec, potential: Potential) -> Result<Self> {
        Self::new_static(build_laplacian_1d(grid), potential.build(grid)?)
    }

    fn build(a: HermitianMatrix, b: Perturbation, alpha_b: f64) -> Result<Self> {
        let eig = a.eigh()?;
        let scale = a.norm();
        let defect = spectral_norm(&(eig.reconstruct() - a.as_matrix()));
        if defect > Self::RECONSTRUCTION_TOLERANCE * scale.max(f64::MIN_POSITIVE) && defect > 0.0 {
            return Err(Error::Eigensolver(format!(
                "reconstruction defect {defect:e} relative to norm {scale:e}"
            )));
        }
        let b_eigenbasis = match &b {
            Perturbation::Static(bm) => Some(matmul(&matmul_adj_left(&eig.vectors, bm.as_matrix()), &eig.vectors)),
            Perturbation::Driven(_) => None,
        };
        Ok(Self {
            inner: Arc::new(Inner {
                a,
                eig,
                b,
                alpha_b,
                b_eigenbasis,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.a.dim()
    }

    pub fn a(&self) -> &HermitianMatrix {
        &self.inner.a
    }

    pub fn a_eigvals(&self) -> &[f64] {
        &self.inner.eig.values
    }

    pub fn a_eigvecs(&self) -> &CMatrix {
        &self.inner.eig.vectors
    }

    pub fn perturbation(&self) -> &Perturbation {
        &self.inner.b
    }

    pub fn b_static(&self) -> Option<&HermitianMatrix> {
        match &self.inner.b {
            Perturbation::Static(b) => Some(b),
            Perturbation::Driven(_) => None,
        }
    }

    /// `Q† B Q` for static `B`.
    pub fn b_eigenbasis(&self) -> Option<&CMatrix> {
        self.inner.b_eigenbasis.as_ref()
    }

    pub fn alpha_b(&self) -> f64 {
        self.inner.alpha_b
    }

    pub fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        let q = &self.inner.eig.vectors;
        matmul(&matmul_adj_left(q, m), q)
    }

    pub fn from_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        let q = &self.inner.eig.vectors;
        matmul_adj_right(&matmul(q, x), q)
    }

    /// `e^{−iAt}`
    pub fn propagator_a(&self, t: f64) -> DenseUnitary {
        DenseUnitary::from_trusted(self.inner.eig.exp_minus_i(t))
    }

    /// `P(t) X P(t)†` with `P(t) = diag(e^{iλt})`, for `X` in the eigenbasis.
    pub fn rotate_eigenbasis(&self, x: &CMatrix, t: f64) -> CMatrix {
        let lam = &self.inner.eig.values;
        let phases: Vec<C64> = lam.iter().map(|&l| C64::from_polar(1.0, l * t)).collect();
        CMatrix::from_fn(x.nrows(), x.ncols(), |j, k| phases[j] * x[(j, k)] * phases[k].conj())
    }

    /// `e^{iAt} M e^{−iAt}`
    pub fn conjugate(&self, m: &CMatrix, t: f64) -> CMatrix {
        self.from_eigenbasis(&self.rotate_eigenbasis(&self.to_eigenbasis(m), t))
    }

    /// `‖[A, B]‖` for static `B`.
    pub fn commutator_norm(&self) -> Option<f64> {
        self.b_static()
            .map(|b| spectral_norm(&comm(self.inner.a.as_matrix(), b.as_matrix())))
    }

    /// The interaction-picture Hamiltonian `H_I(t) = e^{iAt} B(t) e^{−iAt}`.
    ///
    /// For static `B` the derivative bounds are `‖[A,B]‖` and `‖[A,[A,B]]‖`.
    pub fn interaction_hamiltonian(&self) -> TimeHamiltonian {
        let ip = self.clone();
        let dim = self.dim();
        let alpha = self.alpha_b();
        match &self.inner.b {
            Perturbation::Static(b) => {
                let a = self.inner.a.as_matrix();
                let ab = comm(a, b.as_matrix());
                let d1 = spectral_norm(&ab);
                let d2 = spectral_norm(&comm(a, &ab));
                TimeHamiltonian::new(dim, alpha, move |t| {
                    let b = ip.b_static().expect("static perturbation");
                    if t == 0.0 {
                        return Ok(b.clone());
                    }
                    let hb = ip.rotate_eigenbasis(ip.b_eigenbasis().expect("cached"), t);
                    Ok(HermitianMatrix::symmetrized(ip.from_eigenbasis(&hb)))
                })
                .expect("dimension checked at construction")
                .with_derivative_bounds(Some(d1), Some(d2))
            }
            Perturbation::Driven(_) => TimeHamiltonian::new(dim, alpha, move |t| {
                let Perturbation::Driven(bt) = ip.perturbation() else {
                    unreachable!("driven perturbation")
                };
                let b = bt.sample(t)?;
                if t == 0.0 {
                    return Ok(b);
                }
                Ok(HermitianMatrix::symmetrized(ip.conjugate(b.as_matrix(), t)))
            })
            .expect("dimension checked at construction"),
        }
    }

    /// The full Hamiltonian `A + B(t)` as a sampler.
    pub fn full_hamiltonian(&self) -> TimeHamiltonian {
        let ip = self.clone();
        let alpha = self.inner.a.norm() + self.alpha_b();
        TimeHamiltonian::new(self.dim(), alpha, move |t| {
            let b = match ip.perturbation() {
                Perturbation::Static(b) => b.clone(),
                Perturbation::Driven(bt) => bt.sample(t)?,
            };
            ip.a().add(&b)
        })
        .expect("dimension checked at construction")
    }
}
