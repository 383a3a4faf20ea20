use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{frobenius, max_abs, spectral_norm, CMatrix, DenseUnitary, HermitianMatrix, C64};

/// How a generator was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Magnus1Riemann,
    /// First-order term with the integral evaluated exactly.
    Magnus1Exact,
    Magnus2Exact,
    Magnus2Riemann,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Magnus1Riemann => "magnus1_riemann",
            Provenance::Magnus1Exact => "magnus1_exact",
            Provenance::Magnus2Exact => "magnus2_exact",
            Provenance::Magnus2Riemann => "magnus2_riemann",
        })
    }
}

/// Anti-Hermitian generator `Ω` of one step `[t_j, t_j + h]`.
#[derive(Clone, Debug)]
pub struct SkewGenerator {
    matrix: CMatrix,
    provenance: Provenance,
    t_start: f64,
    step: f64,
    n_quad: Option<usize>,
}

impl SkewGenerator {
    pub const TOLERANCE: f64 = 1e-11;

    /// Validates `‖Ω + Ω†‖ ≤ 1e-11 (1 + ‖Ω‖)` and removes the Hermitian part.
    pub fn new(
        matrix: CMatrix,
        provenance: Provenance,
        t_start: f64,
        step: f64,
        n_quad: Option<usize>,
    ) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("generator entry".into()));
        }
        let herm = &matrix + matrix.adjoint();
        // Frobenius and max-entry norms bracket the spectral norm, so the
        // cheap test is conservative; fall back to the exact one if it fails.
        let cheap = frobenius(&herm) <= Self::TOLERANCE * (1.0 + max_abs(&matrix));
        if !cheap {
            let deviation = spectral_norm(&herm);
            let tolerance = Self::TOLERANCE * (1.0 + spectral_norm(&matrix));
            if deviation > tolerance {
                return Err(Error::NotAntiHermitian {
                    deviation,
                    tolerance,
                });
            }
        }
        let matrix = (&matrix - matrix.adjoint()) * C64::new(0.5, 0.0);
        Ok(Self {
            matrix,
            provenance,
            t_start,
            step,
            n_quad,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t_start, self.step)
    }

    pub fn n_quad(&self) -> Option<usize> {
        self.n_quad
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `iΩ`, Hermitian.
    pub fn hermitian_part(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrized(&self.matrix * C64::new(0.0, 1.0))
    }
}

/// `exp(Ω)` through the eigendecomposition of `iΩ`.
pub fn step_unitary(gen: &SkewGenerator) -> Result<DenseUnitary> {
    let eig = gen.hermitian_part().eigh()?;
    Ok(DenseUnitary::from_trusted(eig.exp_minus_i(1.0)))
}
