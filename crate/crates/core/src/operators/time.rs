use std::fmt;
use std::sync::Arc;

use super::matrix::{HermitianMatrix, C64};
use super::CMatrix;
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Sampler = dyn Fn(f64) -> Result<HermitianMatrix> + Send + Sync;

/// Scalar coefficient `f(t)` of one term of a linear combination.
pub type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A fixed operator with its time-dependent coefficient.
pub type Term = (HermitianMatrix, Coefficient);

/// Time-dependent Hamiltonian `t ↦ H(t)` with declared bounds.
///
/// `alpha` bounds `‖H(t)‖`; `deriv_bound_1` and `deriv_bound_2` bound the
/// first two derivatives when known. Cloning shares the sampler.
#[derive(Clone)]
pub struct TimeHamiltonian {
    dim: usize,
    alpha: f64,
    deriv_bound_1: Option<f64>,
    deriv_bound_2: Option<f64>,
    sampler: Arc<Sampler>,
}

impl fmt::Debug for TimeHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeHamiltonian")
            .field("dim", &self.dim)
            .field("alpha", &self.alpha)
            .field("deriv_bound_1", &self.deriv_bound_1)
            .field("deriv_bound_2", &self.deriv_bound_2)
            .finish_non_exhaustive()
    }
}

impl TimeHamiltonian {
    pub fn new(
        dim: usize,
        alpha: f64,
        sampler: impl Fn(f64) -> Result<HermitianMatrix> + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "must be positive"));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::param("alpha", format!("must be finite and nonnegative, got {alpha}")));
        }
        Ok(Self {
            dim,
            alpha,
            deriv_bound_1: None,
            deriv_bound_2: None,
            sampler: Arc::new(sampler),
        })
    }

    pub fn with_derivative_bounds(mut self, d1: Option<f64>, d2: Option<f64>) -> Self {
        self.deriv_bound_1 = d1;
        self.deriv_bound_2 = d2;
        self
    }

    /// Time-independent `H`, with `alpha = ‖H‖` and vanishing derivatives.
    pub fn constant(h: HermitianMatrix) -> Self {
        let alpha = h.norm();
        let dim = h.dim();
        Self::new(dim, alpha, move |_| Ok(h.clone()))
            .expect("nonempty constant Hamiltonian")
            .with_derivative_bounds(Some(0.0), Some(0.0))
    }

    /// `H(t) = Σ_k f_k(t) P_k` over fixed Hermitian terms. The caller states
    /// the bounds since they depend on the coefficient functions.
    pub fn linear_combination(
        terms: Vec<Term>,
        alpha: f64,
    ) -> Result<Self> {
        let dim = terms
            .first()
            .map(|(m, _)| m.dim())
            .ok_or_else(|| Error::param("terms", "at least one term required"))?;
        if let Some((m, _)) = terms.iter().find(|(m, _)| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.dim(),
            });
        }
        Self::new(dim, alpha, move |t| {
            let mut acc = CMatrix::zeros(dim, dim);
            for (m, f) in &terms {
                let c = f(t);
                if !c.is_finite() {
                    return Err(Error::Sampler {
                        t,
                        reason: format!("coefficient evaluated to {c}"),
                    });
                }
                acc += m.as_matrix() * C64::new(c, 0.0);
            }
            HermitianMatrix::new(acc)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn deriv_bound_1(&self) -> Option<f64> {
        self.deriv_bound_1
    }

    pub fn deriv_bound_2(&self) -> Option<f64> {
        self.deriv_bound_2
    }

    /// Evaluates `H(t)`, checking the dimension.
    pub fn sample(&self, t: f64) -> Result<HermitianMatrix> {
        if !t.is_finite() {
            return Err(Error::Sampler {
                t,
                reason: "non-finite time".into(),
            });
        }
        let h = (self.sampler)(t).map_err(|e| match e {
            e @ Error::Sampler { .. } => e,
            other => Error::Sampler {
                t,
                reason: other.to_string(),
            },
        })?;
        if h.dim() != self.dim {
            return Err(Error::Sampler {
                t,
                reason: format!("expected dimension {}, got {}", self.dim, h.dim()),
            });
        }
        Ok(h)
    }

    /// Samples `t_j + k·h/m` for `k = 0..m`.
    pub fn sample_window(&self, t_j: f64, h: f64, m: usize) -> Result<Vec<HermitianMatrix>> {
        (0..m)
            .map(|k| self.sample(t_j + k as f64 * h / m as f64))
            .collect()
    }

    /// Largest `‖H(t)‖` over the given times, minus `alpha`; positive when
    /// the declared bound is violated.
    pub fn alpha_excess(&self, times: &[f64]) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for &t in times {
            worst = worst.max(self.sample(t)?.norm() - self.alpha);
        }
        Ok(worst)
    }

    /// Seeded smooth family `Σ_r w_r sin(f_r t + a_r) G_r` on `n_qubits`
    /// qubits with unit-norm random Hermitian `G_r` and `Σ w_r = 0.95 α`,
    /// so `‖H(t)‖ < α` everywhere. Derivative bounds are exact sup bounds
    /// of the coefficient sum.
    pub fn random_smooth(n_qubits: usize, alpha: f64, seed: u64) -> Result<Self> {
        if !(1..=6).contains(&n_qubits) {
            return Err(Error::param("n_qubits", format!("must lie in 1..=6, got {n_qubits}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::param("alpha", "must be positive"));
        }
        let dim = 1usize << n_qubits;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<(f64, f64, f64)> = (0..3)
            .map(|_| (rng.gen_range(0.2..1.0), rng.gen_range(1.0..6.0), rng.gen_range(-3.0..3.0)))
            .collect();
        let total: f64 = raw.iter().map(|r| r.0).sum();
        let mut terms: Vec<Term> = Vec::new();
        let (mut d1, mut d2) = (0.0, 0.0);
        for (w, f, a) in raw {
            let m = CMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let g = HermitianMatrix::symmetrized(&m + m.adjoint());
            let g = g.scaled(1.0 / g.norm());
            let w = 0.95 * alpha * w / total;
            d1 += w * f;
            d2 += w * f * f;
            terms.push((g, Arc::new(move |t: f64| w * (f * t + a).sin())));
        }
        Ok(Self::linear_combination(terms, alpha)?.with_derivative_bounds(Some(d1), Some(d2)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::matrix::max_abs;
    use crate::operators::pauli;

    #[test]
    fn constant_sampler_returns_same_matrix() {
        let h = HermitianMatrix::new(pauli::z()).unwrap();
        let ht = TimeHamiltonian::constant(h.clone());
        assert_eq!(ht.alpha(), 1.0);
        assert_eq!(ht.sample(3.7).unwrap(), h);
        assert_eq!(ht.deriv_bound_1(), Some(0.0));
    }

    #[test]
    fn random_smooth_is_bounded_and_seeded() {
        let a = TimeHamiltonian::random_smooth(2, 1.5, 9).unwrap();
        let b = TimeHamiltonian::random_smooth(2, 1.5, 9).unwrap();
        assert_eq!(a.dim(), 4);
        assert_eq!(a.sample(0.7).unwrap(), b.sample(0.7).unwrap());
        let grid: Vec<f64> = (0..200).map(|k| k as f64 * 0.05).collect();
        assert!(a.alpha_excess(&grid).unwrap() < 0.0);
        assert!(TimeHamiltonian::random_smooth(0, 1.0, 0).is_err());
        assert!(TimeHamiltonian::random_smooth(1, 0.0, 0).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let ht = TimeHamiltonian::new(3, 1.0, |_| Ok(HermitianMatrix::identity(2))).unwrap();
        assert!(matches!(ht.sample(0.0), Err(Error::Sampler { .. })));
    }

    #[test]
    fn linear_combination_evaluates() {
        let z = HermitianMatrix::new(pauli::z()).unwrap();
        let x = HermitianMatrix::new(pauli::x()).unwrap();
        let ht = TimeHamiltonian::linear_combination(
            vec![(z, Arc::new(|_: f64| 1.0)), (x, Arc::new(|t: f64| t.cos()))],
            2f64.sqrt(),
        )
        .unwrap();
        let h = ht.sample(0.4).unwrap();
        let want = pauli::z() + pauli::x() * C64::new(0.4f64.cos(), 0.0);
        assert!(max_abs(&(h.as_matrix() - want)) < 1e-15);
        let grid: Vec<f64> = (0..50).map(|k| k as f64 * 0.13).collect();
        assert!(ht.alpha_excess(&grid).unwrap() <= 1e-12);
    }

    #[test]
    fn non_finite_coefficient_fails() {
        let z = HermitianMatrix::new(pauli::z()).unwrap();
        let ht =
            TimeHamiltonian::linear_combination(vec![(z, Arc::new(|t: f64| 1.0 / t))], 1.0).unwrap();
        assert!(matches!(ht.sample(0.0), Err(Error::Sampler { .. })));
        assert!(ht.sample(f64::NAN).is_err());
    }
}
