use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of a log-log fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Residual within tolerance; the slope may be asserted.
    Fitted,
    /// Residual too large for a slope claim.
    Inconclusive,
    /// Every error sits at the roundoff floor; no fit attempted.
    Floor,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Fitted => "fitted",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Floor => "floor",
        })
    }
}

/// Result of comparing a fitted slope with an interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlopeCheck {
    Pass,
    Fail,
    Inconclusive,
}

/// Errors against step size or quadrature count with the least-squares fit
/// `ln e = slope · ln x + c`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub abscissae: Vec<f64>,
    pub errors: Vec<f64>,
    pub fitted_slope: f64,
    pub fitted_log_constant: f64,
    /// Largest `|ln e − fit|`.
    pub residual: f64,
    pub verdict: Verdict,
}

impl ConvergenceReport {
    /// Largest residual, in natural-log units, that still allows a slope claim.
    pub const RESIDUAL_TOLERANCE: f64 = 0.1;
    /// Errors below `FLOOR_MARGIN · floor` count as roundoff.
    pub const FLOOR_MARGIN: f64 = 100.0;

    /// Fits `errors` against `abscissae`. When every error is below
    /// `FLOOR_MARGIN · floor` the fit is skipped.
    pub fn fit(abscissae: Vec<f64>, errors: Vec<f64>, floor: f64) -> Result<Self> {
        if abscissae.len() != errors.len() {
            return Err(Error::DimensionMismatch {
                expected: abscissae.len(),
                found: errors.len(),
            });
        }
        if abscissae.len() < 2 {
            return Err(Error::param("abscissae", "need at least two points"));
        }
        if abscissae.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::param("abscissae", "must be positive and finite"));
        }
        let increasing = abscissae.windows(2).all(|w| w[1] > w[0]);
        let decreasing = abscissae.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::param("abscissae", "must be strictly monotone"));
        }
        if errors.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::param("errors", "must be finite and nonnegative"));
        }
        if errors.iter().all(|&e| e <= Self::FLOOR_MARGIN * floor) {
            return Ok(Self {
                abscissae,
                errors,
                fitted_slope: f64::NAN,
                fitted_log_constant: f64::NAN,
                residual: f64::NAN,
                verdict: Verdict::Floor,
            });
        }
        if errors.iter().any(|&e| e <= 0.0) {
            return Err(Error::param("errors", "zero error above the floor cannot be fitted"));
        }
        let xs: Vec<f64> = abscissae.iter().map(|x| x.ln()).collect();
        let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        let (slope, intercept) = least_squares(&xs, &ys);
        let residual = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - (slope * x + intercept)).abs())
            .fold(0.0, f64::max);
        let verdict = if residual <= Self::RESIDUAL_TOLERANCE {
            Verdict::Fitted
        } else {
            Verdict::Inconclusive
        };
        Ok(Self {
            abscissae,
            errors,
            fitted_slope: slope,
            fitted_log_constant: intercept,
            residual,
            verdict,
        })
    }

    /// `C` in `e ≈ C x^slope`.
    pub fn constant(&self) -> f64 {
        self.fitted_log_constant.exp()
    }

    pub fn check_slope(&self, lo: f64, hi: f64) -> SlopeCheck {
        match self.verdict {
            Verdict::Fitted if (lo..=hi).contains(&self.fitted_slope) => SlopeCheck::Pass,
            Verdict::Fitted => SlopeCheck::Fail,
            _ => SlopeCheck::Inconclusive,
        }
    }

    /// `e_i / x_i^order` for each sample.
    pub fn scaled_errors(&self, order: f64) -> Vec<f64> {
        self.abscissae
            .iter()
            .zip(&self.errors)
            .map(|(x, e)| e / x.powf(order))
            .collect()
    }
}

/// Ordinary least squares `y ≈ a x + b`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let a = sxy / sxx;
    (a, my - a * mx)
}

/// `max / min` of positive values.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}
