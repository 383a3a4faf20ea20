//! Numerical laboratory for the second-order Magnus integrator of
//! time-dependent Schrödinger dynamics.
//!
//! The crate is organised bottom-up:
//!
//! * [`operators`] builds the Hermitian operators (periodic finite-difference
//!   Laplacian, potentials, interaction-picture Hamiltonians) and the dense
//!   linear algebra used everywhere else.
//! * [`integrators`] computes Magnus generators (Riemann-sum and converged
//!   quadrature), per-step unitaries, long-time products and reference
//!   propagators.
//! * [`analysis`] turns error laws into measurements: log-log convergence
//!   fits, quadrature scaling, N-independence and nested-commutator norms.
//! * [`circuit`] emulates the HAM-T/COMP/LCU block-encoding constructions as
//!   dense unitaries.
//! * [`resources`] evaluates step counts and query costs for long-time runs.
//! * [`cli`] ties everything to named, reproducible studies.

pub mod analysis;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod integrators;
pub mod operators;
pub mod resources;

pub use error::{Error, Result};
pub use operators::{CMatrix, C64};
