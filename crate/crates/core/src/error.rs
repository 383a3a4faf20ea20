use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian: deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not anti-Hermitian: deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    NotAntiHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not unitary: defect {defect:e} exceeds tolerance {tolerance:e}")]
    NotUnitary { defect: f64, tolerance: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("quadrature did not converge after {levels} refinements (last gap {gap:e}, tolerance {tolerance:e})")]
    QuadratureNotConverged { levels: usize, gap: f64, tolerance: f64 },

    #[error("reference propagator did not converge with {substeps} substeps (last gap {gap:e}, tolerance {tolerance:e})")]
    ReferenceNotConverged { substeps: usize, gap: f64, tolerance: f64 },

    #[error("operator norm {norm:e} exceeds 1; no unitary dilation exists")]
    NotContraction { norm: f64 },

    #[error("quadrature bound violated at M = {m}: error {error:e} > bound {bound:e}")]
    BoundViolation { m: usize, error: f64, bound: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("sampler failed at t = {t}: {reason}")]
    Sampler { t: f64, reason: String },

    #[error("missing column `{0}` in CSV input")]
    MissingColumn(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
