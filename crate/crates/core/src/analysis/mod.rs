//! Convergence-order measurements and commutator experiments.

mod commutators;
mod report;
mod studies;
mod system;

pub use commutators::{
    commutator_bound_c_comm, key_commutator_norm, symmetric_grid, taylor_term_norm, TaylorSplit,
    KEY_GRID,
};
pub use report::{least_squares, spread, ConvergenceReport, SlopeCheck, Verdict};
pub use studies::{
    global_error_study, local_error_study, preconstant_vs_grid, quadrature_bound,
    quadrature_error_study, ErrorStudy, PreconstantTable, QuadratureStudy, StudyPoint,
};
pub use system::{
    GeneratorSource, MRule, MagnusOrder, MagnusSystem, Quadrature, Reference, ReferenceSource,
    DEFAULT_REFERENCE_TOL, REFERENCE_MARGIN,
};
