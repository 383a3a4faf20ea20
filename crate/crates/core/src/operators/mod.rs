//! Hermitian operators and the dense linear algebra behind them.

mod grid;
mod interaction;
mod matrix;
mod time;

pub use grid::{build_laplacian_1d, build_potential, GridSpec, Potential};
pub use interaction::{InteractionPicture, Perturbation};
pub use time::{Coefficient, Term, TimeHamiltonian};
pub use matrix::{
    commutator, frobenius, matmul, matmul_adj_left, matmul_adj_right, max_abs, spectral_norm,
    unitary_from_hermitian, CMatrix, DenseUnitary, Eigh, HermitianMatrix, C64,
};
pub(crate) use matrix::{comm, I, ONE, ZERO};

/// Pauli matrices.
pub mod pauli {
    use super::{CMatrix, I, ONE, ZERO};

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }
}
