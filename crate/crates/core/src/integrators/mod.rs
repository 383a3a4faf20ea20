//! Magnus generators, step unitaries and reference propagators.

mod closed_form;
mod generator;
mod magnus;
mod plan;
mod propagate;

pub use closed_form::{omega2_interaction, phi1, InteractionKernel};
pub use generator::{step_unitary, Provenance, SkewGenerator};
pub use magnus::{
    magnus_exact, omega1_riemann, omega2_exact, omega2_from_samples, omega2_riemann, riemann_terms,
    ExactGenerators, RiemannTerms, MAX_LEVELS,
};
pub use plan::StepPlan;
pub use propagate::{
    evolve_magnus2, evolve_product, reference_general, reference_interaction, GeneralReference,
    InteractionReference, MAX_SUBSTEPS,
};
