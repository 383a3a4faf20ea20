use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::matrix::HermitianMatrix;
use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, length)` with points `x_k = k · spacing`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n_points: usize,
    domain_length: f64,
}

impl GridSpec {
    pub fn new(n_points: usize, domain_length: f64) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {n_points}"
            )));
        }
        if !(domain_length.is_finite() && domain_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "domain length must be positive and finite, got {domain_length}"
            )));
        }
        Ok(Self {
            n_points,
            domain_length,
        })
    }

    /// `n_points` on `[0, 2π)`.
    pub fn periodic(n_points: usize) -> Result<Self> {
        Self::new(n_points, 2.0 * PI)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    pub fn spacing(&self) -> f64 {
        self.domain_length / self.n_points as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.n_points).map(|k| k as f64 * dx).collect()
    }

    /// Analytic spectrum of [`build_laplacian_1d`], indexed by Fourier mode.
    pub fn laplacian_dispersion(&self) -> Vec<f64> {
        let n = self.n_points as f64;
        let dx2 = self.spacing().powi(2);
        (0..self.n_points)
            .map(|k| (2.0 - 2.0 * (2.0 * PI * k as f64 / n).cos()) / dx2)
            .collect()
    }
}

/// Periodic central second difference for `−d²/dx²`.
pub fn build_laplacian_1d(grid: &GridSpec) -> HermitianMatrix {
    let n = grid.n_points();
    let inv = 1.0 / grid.spacing().powi(2);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        m[(k, k)] += 2.0 * inv;
        m[(k, (k + 1) % n)] -= inv;
        m[(k, (k + n - 1) % n)] -= inv;
    }
    HermitianMatrix::from_real_symmetric(&m).expect("stencil is symmetric by construction")
}

/// Diagonal multiplication operator `v(x_k)`.
pub fn build_potential(grid: &GridSpec, v: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let values: Vec<f64> = grid.points().into_iter().map(&v).collect();
    if let Some((k, x)) = values.iter().enumerate().find(|(_, x)| !x.is_finite()) {
        return Err(Error::NonFinite(format!("potential value {x} at grid point {k}")));
    }
    Ok(HermitianMatrix::from_real_diagonal(&values))
}

/// Built-in smooth potentials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    Cos,
    Zero,
    /// `exp(−2 (x − π)²)`, negligible at the periodic seam.
    GaussianBump,
}

impl Potential {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::Cos => x.cos(),
            Potential::Zero => 0.0,
            Potential::GaussianBump => (-2.0 * (x - PI).powi(2)).exp(),
        }
    }

    pub fn build(&self, grid: &GridSpec) -> Result<HermitianMatrix> {
        build_potential(grid, |x| self.eval(x))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Potential::Cos => "cos",
            Potential::Zero => "zero",
            Potential::GaussianBump => "gaussian_bump",
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cos" => Ok(Potential::Cos),
            "zero" => Ok(Potential::Zero),
            "gaussian_bump" => Ok(Potential::GaussianBump),
            other => Err(Error::param(
                "potential",
                format!("unknown potential `{other}` (expected cos, zero or gaussian_bump)"),
            )),
        }
    }
}
