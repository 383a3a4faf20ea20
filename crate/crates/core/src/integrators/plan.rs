use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform partition of `[0, T]` into `L` steps with `M` quadrature points
/// per step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepPlan {
    t_total: f64,
    n_steps: usize,
    n_quad: usize,
}

impl StepPlan {
    pub fn new(t_total: f64, n_steps: usize, n_quad: usize) -> Result<Self> {
        if !(t_total.is_finite() && t_total > 0.0) {
            return Err(Error::param("t_total", format!("must be positive, got {t_total}")));
        }
        if n_steps == 0 {
            return Err(Error::param("n_steps", "must be at least 1"));
        }
        if n_quad == 0 {
            return Err(Error::param("n_quad", "must be at least 1"));
        }
        Ok(Self {
            t_total,
            n_steps,
            n_quad,
        })
    }

    /// Plan with step `h`; `T/h` must be an integer up to rounding.
    pub fn from_step(t_total: f64, h: f64, n_quad: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::param("step", format!("must be positive, got {h}")));
        }
        let ratio = t_total / h;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::param(
                "step",
                format!("T = {t_total} is not an integer multiple of h = {h}"),
            ));
        }
        Self::new(t_total, n as usize, n_quad)
    }

    pub fn t_total(&self) -> f64 {
        self.t_total
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_quad(&self) -> usize {
        self.n_quad
    }

    pub fn step(&self) -> f64 {
        self.t_total / self.n_steps as f64
    }

    /// Left endpoint of step `j`, computed without accumulation.
    pub fn t_start(&self, j: usize) -> f64 {
        self.t_total * j as f64 / self.n_steps as f64
    }

    pub fn with_n_quad(self, n_quad: usize) -> Result<Self> {
        Self::new(self.t_total, self.n_steps, n_quad)
    }
}
