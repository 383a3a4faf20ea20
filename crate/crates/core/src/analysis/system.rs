use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{
    magnus_exact, omega1_riemann, omega2_riemann, reference_general, InteractionKernel,
    InteractionReference, SkewGenerator,
};
use crate::operators::{pauli, DenseUnitary, HermitianMatrix, InteractionPicture, Term, TimeHamiltonian};

/// Truncation order of the Magnus series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MagnusOrder {
    First,
    Second,
}

impl MagnusOrder {
    /// Local error order expected in the superconvergent regime.
    pub fn superconvergent_local_order(&self) -> f64 {
        match self {
            MagnusOrder::First => 3.0,
            MagnusOrder::Second => 5.0,
        }
    }
}

/// Quadrature-point count as a function of the step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MRule {
    Fixed(usize),
    /// `M = ⌈scale · h^{−power}⌉`
    PowerOfStep { scale: f64, power: f64 },
}

impl MRule {
    pub fn points(&self, h: f64) -> usize {
        match *self {
            MRule::Fixed(m) => m.max(1),
            MRule::PowerOfStep { scale, power } => ((scale * h.powf(-power)).ceil() as usize).max(1),
        }
    }
}

/// How the step integrals are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    /// Converged integrals: closed form in the interaction picture,
    /// Romberg otherwise. Isolates the truncation error.
    Exact,
    Riemann(MRule),
}

/// Default Cauchy tolerance of general-Hamiltonian references.
pub const DEFAULT_REFERENCE_TOL: f64 = 1e-12;

/// A Hamiltonian together with its ground-truth propagator.
#[derive(Clone, Debug)]
pub enum MagnusSystem {
    /// `H_I(t)` of a static `A + B`, with the exact interaction propagator.
    Interaction(InteractionPicture),
    /// A general `H(t)` with a refined exponential-midpoint reference.
    General { hamiltonian: TimeHamiltonian },
}

/// Errors below this multiple of the reference gap are not trusted.
pub const REFERENCE_MARGIN: f64 = 100.0;

impl MagnusSystem {
    /// `H(t) = σz + cos(t) σx`.
    pub fn pauli_cosine() -> Self {
        let terms: Vec<Term> = vec![
            (HermitianMatrix::new(pauli::z()).expect("Pauli"), Arc::new(|_: f64| 1.0)),
            (HermitianMatrix::new(pauli::x()).expect("Pauli"), Arc::new(|t: f64| t.cos())),
        ];
        let h = TimeHamiltonian::linear_combination(terms, 2f64.sqrt())
            .expect("two-level family")
            .with_derivative_bounds(Some(1.0), Some(1.0));
        MagnusSystem::General { hamiltonian: h }
    }

    pub fn dim(&self) -> usize {
        match self {
            MagnusSystem::Interaction(ip) => ip.dim(),
            MagnusSystem::General { hamiltonian } => hamiltonian.dim(),
        }
    }

    /// The Hamiltonian the integrator sees.
    pub fn hamiltonian(&self) -> TimeHamiltonian {
        match self {
            MagnusSystem::Interaction(ip) => ip.interaction_hamiltonian(),
            MagnusSystem::General { hamiltonian } => hamiltonian.clone(),
        }
    }

    /// Roundoff scale of errors of unitaries of this size.
    pub fn roundoff_floor(&self) -> f64 {
        1e-14 * self.dim() as f64
    }
}

/// Per-system generator source that caches closed-form kernels by step.
pub struct GeneratorSource<'a> {
    system: &'a MagnusSystem,
    order: MagnusOrder,
    quadrature: Quadrature,
    kernels: HashMap<u64, InteractionKernel>,
}

impl<'a> GeneratorSource<'a> {
    pub fn new(system: &'a MagnusSystem, order: MagnusOrder, quadrature: Quadrature) -> Self {
        Self {
            system,
            order,
            quadrature,
            kernels: HashMap::new(),
        }
    }

    pub fn points(&self, h: f64) -> Option<usize> {
        match self.quadrature {
            Quadrature::Exact => None,
            Quadrature::Riemann(rule) => Some(rule.points(h)),
        }
    }

    pub fn generator(&mut self, t0: f64, h: f64) -> Result<SkewGenerator> {
        match (self.system, self.quadrature) {
            (MagnusSystem::Interaction(ip), Quadrature::Exact) => {
                let kernel = match self.kernels.entry(h.to_bits()) {
                    std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                    std::collections::hash_map::Entry::Vacant(v) => v.insert(InteractionKernel::new(ip, h)?),
                };
                match self.order {
                    MagnusOrder::First => kernel.omega1(t0),
                    MagnusOrder::Second => kernel.omega2(t0),
                }
            }
            (MagnusSystem::General { hamiltonian }, Quadrature::Exact) => {
                let g = magnus_exact(hamiltonian, t0, h, None)?;
                Ok(match self.order {
                    MagnusOrder::First => g.omega1,
                    MagnusOrder::Second => g.omega2,
                })
            }
            (system, Quadrature::Riemann(rule)) => {
                let h_t = system.hamiltonian();
                let m = rule.points(h);
                match self.order {
                    MagnusOrder::First => omega1_riemann(&h_t, t0, h, m),
                    MagnusOrder::Second => omega2_riemann(&h_t, t0, h, m),
                }
            }
        }
    }
}

/// Ground-truth propagators, with the tolerance adapted to the error being
/// measured.
pub enum ReferenceSource {
    Interaction(InteractionReference),
    General(TimeHamiltonian),
}

/// A reference propagator and the size of its own uncertainty.
pub struct Reference {
    pub unitary: DenseUnitary,
    /// Zero for the exact interaction propagator.
    pub gap: f64,
}

impl ReferenceSource {
    pub fn new(system: &MagnusSystem) -> Result<Self> {
        Ok(match system {
            MagnusSystem::Interaction(ip) => ReferenceSource::Interaction(InteractionReference::new(ip)?),
            MagnusSystem::General { hamiltonian } => ReferenceSource::General(hamiltonian.clone()),
        })
    }

    /// `U(t, s)`; for general systems refined until the Cauchy gap is
    /// `REFERENCE_MARGIN` times below the distance to `approx`.
    pub fn propagator(&self, t: f64, s: f64, approx: &DenseUnitary) -> Result<Reference> {
        match self {
            ReferenceSource::Interaction(r) => Ok(Reference {
                unitary: r.propagator(t, s)?,
                gap: 0.0,
            }),
            ReferenceSource::General(h_t) => {
                let coarse = reference_general(h_t, t, s, 1e-6)?;
                let estimate = coarse.unitary.distance(approx);
                let target = (estimate / (10.0 * REFERENCE_MARGIN)).clamp(1e-15, DEFAULT_REFERENCE_TOL);
                let mut tol = target;
                loop {
                    match reference_general(h_t, t, s, tol) {
                        Ok(r) => {
                            return Ok(Reference {
                                unitary: r.unitary,
                                gap: r.gap,
                            })
                        }
                        Err(Error::ReferenceNotConverged { .. }) if tol < estimate / REFERENCE_MARGIN => {
                            tol *= 4.0;
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
}
