use super::generator::{step_unitary, SkewGenerator};
use super::magnus::omega2_riemann;
use super::plan::StepPlan;
use crate::error::{Error, Result};
use crate::operators::{
    matmul, spectral_norm, CMatrix, DenseUnitary, InteractionPicture, TimeHamiltonian,
};

/// `Π_{j=L−1..0} exp(Ω_j)` where `generator(t_j, h)` supplies `Ω_j`; step 0
/// acts first.
pub fn evolve_product(
    plan: &StepPlan,
    dim: usize,
    mut generator: impl FnMut(f64, f64) -> Result<SkewGenerator>,
) -> Result<DenseUnitary> {
    let h = plan.step();
    let mut u = CMatrix::identity(dim, dim);
    for j in 0..plan.n_steps() {
        let g = generator(plan.t_start(j), h)?;
        if g.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: g.dim(),
            });
        }
        u = matmul(step_unitary(&g)?.matrix(), &u);
    }
    Ok(DenseUnitary::from_trusted(u))
}

/// `Ũ₂(T, 0)` with `M = plan.n_quad()` Riemann points per step.
pub fn evolve_magnus2(h_t: &TimeHamiltonian, plan: &StepPlan) -> Result<DenseUnitary> {
    let m = plan.n_quad();
    evolve_product(plan, h_t.dim(), |t, h| omega2_riemann(h_t, t, h, m))
}

/// Exact interaction-picture propagators, with `A + B` diagonalized once.
#[derive(Clone, Debug)]
pub struct InteractionReference {
    ip: InteractionPicture,
    full_eig: crate::operators::Eigh,
}

impl InteractionReference {
    pub fn new(ip: &InteractionPicture) -> Result<Self> {
        let b = ip
            .b_static()
            .ok_or_else(|| Error::param("perturbation", "exact reference needs a static B"))?;
        let full_eig = ip.a().add(b)?.eigh()?;
        Ok(Self {
            ip: ip.clone(),
            full_eig,
        })
    }

    /// `U(t, s) = e^{iAt} e^{−i(A+B)(t−s)} e^{−iAs}`
    pub fn propagator(&self, t: f64, s: f64) -> Result<DenseUnitary> {
        if !(t.is_finite() && s.is_finite()) {
            return Err(Error::NonFinite("propagator endpoints".into()));
        }
        if t == s {
            return Ok(DenseUnitary::identity(self.ip.dim()));
        }
        let w = self.full_eig.exp_minus_i(t - s);
        let in_eig = self.ip.to_eigenbasis(&w);
        let lam = self.ip.a_eigvals();
        let rotated = CMatrix::from_fn(in_eig.nrows(), in_eig.ncols(), |j, k| {
            crate::operators::C64::from_polar(1.0, lam[j] * t - lam[k] * s) * in_eig[(j, k)]
        });
        Ok(DenseUnitary::from_trusted(self.ip.from_eigenbasis(&rotated)))
    }
}

/// See [`InteractionReference::propagator`].
pub fn reference_interaction(ip: &InteractionPicture, t: f64, s: f64) -> Result<DenseUnitary> {
    InteractionReference::new(ip)?.propagator(t, s)
}

/// Largest substep count tried by [`reference_general`].
pub const MAX_SUBSTEPS: usize = 1 << 22;

/// A converged reference propagator.
#[derive(Clone, Debug)]
pub struct GeneralReference {
    pub unitary: DenseUnitary,
    pub substeps: usize,
    /// Spectral-norm gap to the previous refinement.
    pub gap: f64,
}

fn midpoint_product(h_t: &TimeHamiltonian, t: f64, s: f64, n: usize) -> Result<CMatrix> {
    let d = (t - s) / n as f64;
    let mut u = CMatrix::identity(h_t.dim(), h_t.dim());
    for k in 0..n {
        let mid = s + (k as f64 + 0.5) * d;
        let step = h_t.sample(mid)?.eigh()?.exp_minus_i(d);
        u = matmul(&step, &u);
    }
    Ok(u)
}

/// Time-ordered propagator from `s` to `t` by exponential-midpoint substeps,
/// doubling the count until successive products differ by at most `tol`.
/// Fails once the budget is spent or the gap reaches the roundoff floor.
pub fn reference_general(h_t: &TimeHamiltonian, t: f64, s: f64, tol: f64) -> Result<GeneralReference> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    if !(t.is_finite() && s.is_finite()) {
        return Err(Error::NonFinite("propagator endpoints".into()));
    }
    let mut n = 1usize;
    let mut prev = midpoint_product(h_t, t, s, n)?;
    let mut gap = f64::INFINITY;
    while n < MAX_SUBSTEPS {
        n *= 2;
        let cur = midpoint_product(h_t, t, s, n)?;
        let next = spectral_norm(&(&cur - &prev));
        if next <= tol {
            return Ok(GeneralReference {
                unitary: DenseUnitary::from_trusted(cur),
                substeps: n,
                gap: next,
            });
        }
        // Second-order convergence shrinks the gap fourfold per doubling;
        // once it stops halving, accumulated roundoff dominates.
        if n >= 64 && next > 0.5 * gap {
            return Err(Error::ReferenceNotConverged {
                substeps: n,
                gap: gap.min(next),
                tolerance: tol,
            });
        }
        gap = next;
        prev = cur;
    }
    Err(Error::ReferenceNotConverged {
        substeps: n,
        gap,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{
        max_abs, pauli, unitary_from_hermitian, GridSpec, HermitianMatrix, Potential, C64,
    };
    use std::sync::Arc;

    fn small_ip() -> InteractionPicture {
        InteractionPicture::schrodinger(&GridSpec::periodic(8).unwrap(), Potential::Cos).unwrap()
    }

    #[test]
    fn constant_hamiltonian_evolution_is_exact() {
        let h0 = HermitianMatrix::new(pauli::x() * C64::new(0.7, 0.0) + pauli::z()).unwrap();
        let ht = TimeHamiltonian::constant(h0.clone());
        let exact = unitary_from_hermitian(&h0, 1.3).unwrap();
        for (l, m) in [(1, 1), (3, 4), (10, 2)] {
            let plan = StepPlan::new(1.3, l, m).unwrap();
            assert!(evolve_magnus2(&ht, &plan).unwrap().distance(&exact) < 1e-10);
        }
    }

    #[test]
    fn single_step_equals_step_unitary() {
        let ip = small_ip();
        let ht = ip.interaction_hamiltonian();
        let plan = StepPlan::new(0.1, 1, 4).unwrap();
        let u = evolve_magnus2(&ht, &plan).unwrap();
        let v = step_unitary(&omega2_riemann(&ht, 0.0, 0.1, 4).unwrap()).unwrap();
        assert!(u.distance(&v) < 1e-15);
    }

    #[test]
    fn interaction_reference_properties() {
        let ip = small_ip();
        let r = InteractionReference::new(&ip).unwrap();
        assert!(max_abs(&(r.propagator(0.4, 0.4).unwrap().matrix() - CMatrix::identity(8, 8))) == 0.0);
        let direct = r.propagator(0.9, 0.1).unwrap();
        let split = r.propagator(0.9, 0.37).unwrap().compose(&r.propagator(0.37, 0.1).unwrap()).unwrap();
        assert!(direct.distance(&split) < 1e-10);
        assert!(direct.unitarity_defect() < 1e-12);
    }

    #[test]
    fn zero_a_reference_is_plain_exponential() {
        let b = Potential::Cos.build(&GridSpec::periodic(5).unwrap()).unwrap();
        let ip = InteractionPicture::new_static(HermitianMatrix::zeros(5), b.clone()).unwrap();
        let u = reference_interaction(&ip, 0.8, 0.2).unwrap();
        let want = unitary_from_hermitian(&b, 0.6).unwrap();
        assert!(u.distance(&want) < 1e-13);
    }

    #[test]
    fn general_reference_on_constant_hamiltonian_converges_immediately() {
        let h0 = HermitianMatrix::new(pauli::y() + pauli::z()).unwrap();
        let r = reference_general(&TimeHamiltonian::constant(h0.clone()), 0.5, 0.0, 1e-12).unwrap();
        assert_eq!(r.substeps, 2);
        assert!(r.unitary.distance(&unitary_from_hermitian(&h0, 0.5).unwrap()) < 1e-14);
    }

    #[test]
    fn general_reference_agrees_with_interaction_reference() {
        let ip = small_ip();
        let tol = 1e-9;
        let g = reference_general(&ip.interaction_hamiltonian(), 0.25, 0.05, tol).unwrap();
        let e = reference_interaction(&ip, 0.25, 0.05).unwrap();
        assert!(g.unitary.distance(&e) <= 10.0 * tol);
        assert!(g.unitary.unitarity_defect() < 1e-10);
    }

    #[test]
    fn roundoff_floor_is_reported() {
        let ip = small_ip();
        match reference_general(&ip.interaction_hamiltonian(), 0.25, 0.05, 1e-15) {
            Err(Error::ReferenceNotConverged { substeps, gap, .. }) => {
                assert!(substeps < MAX_SUBSTEPS);
                assert!(gap < 1e-9);
            }
            other => panic!("expected a floor, got {other:?}"),
        }
    }

    #[test]
    fn nonpositive_tolerance_rejected() {
        let ht = TimeHamiltonian::linear_combination(
            vec![(HermitianMatrix::new(pauli::x()).unwrap(), Arc::new(|t: f64| t))],
            1.0,
        )
        .unwrap();
        assert!(reference_general(&ht, 1.0, 0.0, 0.0).is_err());
    }
}
