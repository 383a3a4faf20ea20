//! Step counts, quadrature sizes and query totals for long-time simulation.
//!
//! Asymptotic costs are evaluated with every hidden constant set to one;
//! the error budget itself is enforced exactly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Oracle calls made by one use of the second-order block encoding.
pub const HAM_T_PER_BLOCK: f64 = 5.0;
pub const COMP_PER_BLOCK: f64 = 1.0;

/// Relative slack allowed on the budget check for rounding.
const BUDGET_SLACK: f64 = 1e-12;

/// Inputs of a long-time cost estimate. The local error is assumed to obey
/// `‖U − U₂‖ ≤ C_H h^{1+θ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostQuery {
    pub alpha: f64,
    pub t_total: f64,
    pub epsilon: f64,
    pub c_h: f64,
    pub order_exponent: f64,
    /// `max_s ‖H′(s)‖`
    pub deriv_sup: f64,
    pub n_a: usize,
}

impl CostQuery {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be positive, got {v}")))
            }
        };
        positive("alpha", self.alpha)?;
        positive("c_h", self.c_h)?;
        positive("t_total", self.t_total)?;
        positive("deriv_sup", self.deriv_sup)?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::param("epsilon", format!("must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.t_total <= self.epsilon {
            return Err(Error::param("t_total", "must exceed epsilon"));
        }
        if !(self.order_exponent.is_finite() && self.order_exponent >= 1.0) {
            return Err(Error::param(
                "order_exponent",
                format!("θ = {} is outside the supported range θ ≥ 1", self.order_exponent),
            ));
        }
        if self.n_a == 0 {
            return Err(Error::param("n_a", "must be at least 1"));
        }
        Ok(())
    }
}

/// Output of [`plan_resources`]. Query and gate totals are up to constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    /// `C_H^{1/θ} T^{1+1/θ} / ε^{1/θ}` before rounding.
    pub n_steps_exact: f64,
    pub n_steps_l: f64,
    pub step: f64,
    /// `ε / L`
    pub per_step_delta: f64,
    pub quad_points_m: f64,
    /// Uses of the block encoding per step, `2αh + ln(1/δ)`.
    pub block_uses_per_step: f64,
    pub ham_t_queries: f64,
    pub comp_queries: f64,
    pub gate_count: f64,
    /// `L δ + 2 C_H T^{θ+1} / L^θ`
    pub budget: f64,
    /// `2 L δ'` with `δ' = δ + 2 C_H h^{θ+1}`.
    pub failure_prob_bound: f64,
}

impl ResourceEstimate {
    pub fn budget_holds(&self, epsilon: f64) -> bool {
        self.budget <= 3.0 * epsilon * (1.0 + BUDGET_SLACK)
    }
}

/// Ceiling that ignores roundoff just above an integer.
fn ceil_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= BUDGET_SLACK * x.abs() {
        r
    } else {
        x.ceil()
    }
}

fn ln_plus(x: f64) -> f64 {
    x.ln().max(0.0)
}

pub fn plan_resources(q: &CostQuery) -> Result<ResourceEstimate> {
    q.validate()?;
    let th = q.order_exponent;
    let (t, eps, c) = (q.t_total, q.epsilon, q.c_h);
    let l_exact = c.powf(1.0 / th) * t.powf(1.0 + 1.0 / th) / eps.powf(1.0 / th);
    let l = ceil_snapped(l_exact).max(1.0);
    let h = t / l;
    let delta = eps / l;
    let truncation = 2.0 * c * t.powf(th + 1.0) / l.powf(th);
    let budget = l * delta + truncation;
    let m = (q.deriv_sup * t.powf(1.0 - 1.0 / th) / (c.powf(1.0 / th) * eps.powf(1.0 - 1.0 / th))).max(1.0);
    let per_step = 2.0 * q.alpha * h + (1.0 / delta).ln();
    let block_uses = l * per_step;
    let gate_count = (q.n_a as f64 + ln_plus(q.deriv_sup * t / (c * eps)))
        * (q.alpha * t + l_exact * ln_plus(c * t / eps));
    let delta_prime = delta + 2.0 * c * h.powf(th + 1.0);
    let est = ResourceEstimate {
        n_steps_exact: l_exact,
        n_steps_l: l,
        step: h,
        per_step_delta: delta,
        quad_points_m: m,
        block_uses_per_step: per_step,
        ham_t_queries: HAM_T_PER_BLOCK * block_uses,
        comp_queries: COMP_PER_BLOCK * block_uses,
        gate_count,
        budget,
        failure_prob_bound: 2.0 * l * delta_prime,
    };
    if !est.budget_holds(eps) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("rounded plan spends {budget:e} > 3ε"),
        });
    }
    Ok(est)
}

/// Cost regimes compared for long-time simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    GeneralH,
    GeneralHDerivative,
    Superconvergence,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::GeneralH, Regime::GeneralHDerivative, Regime::Superconvergence];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::GeneralH => "general_H",
            Regime::GeneralHDerivative => "general_H_derivative",
            Regime::Superconvergence => "superconvergence",
        }
    }

    /// `θ` of the regime's local error law.
    pub fn order_exponent(&self) -> f64 {
        match self {
            Regime::GeneralH => 2.0,
            _ => 4.0,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::param("regime", format!("unknown regime `{s}`")))
    }
}

/// Constants for [`table1_row`]; each regime reads the ones it needs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table1Params {
    pub t_total: f64,
    pub epsilon: f64,
    pub alpha: Option<f64>,
    pub alpha_b: Option<f64>,
    pub c_comm: Option<f64>,
    pub c_h_prime: Option<f64>,
    pub c_v: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub regime: Regime,
    pub expression: String,
    pub value: f64,
}

fn required(v: Option<f64>, name: &'static str) -> Result<f64> {
    match v {
        Some(x) if x.is_finite() && x >= 0.0 => Ok(x),
        Some(x) => Err(Error::param(name, format!("must be nonnegative, got {x}"))),
        None => Err(Error::param(name, "required by this regime")),
    }
}

/// `a T + C^{1/θ} T^{1+1/θ} ε^{−1/θ} ln(C T/ε)`, with the second term zero when `C = 0`.
pub fn table1_row(regime: Regime, p: &Table1Params) -> Result<Table1Row> {
    if !(p.t_total.is_finite() && p.t_total > 0.0) {
        return Err(Error::param("t_total", "must be positive"));
    }
    if !(p.epsilon > 0.0 && p.epsilon < 1.0) {
        return Err(Error::param("epsilon", "must lie in (0, 1)"));
    }
    let (a, c, a_name, c_name) = match regime {
        Regime::GeneralH => (required(p.alpha, "alpha")?, required(p.c_comm, "c_comm")?, "α", "C_comm"),
        Regime::GeneralHDerivative => (
            required(p.alpha, "alpha")?,
            required(p.c_h_prime, "c_h_prime")?,
            "α",
            "C'_H",
        ),
        Regime::Superconvergence => (required(p.alpha_b, "alpha_b")?, required(p.c_v, "c_v")?, "α_B", "C_V"),
    };
    let th = regime.order_exponent();
    let (t, eps) = (p.t_total, p.epsilon);
    let tail = if c == 0.0 {
        0.0
    } else {
        c.powf(1.0 / th) * t.powf(1.0 + 1.0 / th) / eps.powf(1.0 / th) * (c * t / eps).ln()
    };
    let expression = format!(
        "{a_name}T + {c_name}^(1/{th})T^({})/eps^(1/{th}) log({c_name}T/eps)",
        1.0 + 1.0 / th
    );
    Ok(Table1Row {
        regime,
        expression,
        value: a * t + tail,
    })
}
