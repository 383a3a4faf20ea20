//! Magnus generators of `H_I(t) = e^{iAt} B e^{−iAt}` integrated in closed
//! form in the eigenbasis of `A`.
//!
//! With `B' = Q†BQ`, `ω_jk = λ_j − λ_k` and nodes `x_a = λ_a h`,
//!
//! ```text
//! X1_jk = −i h B'_jk e^{iω_jk t₀} φ(ω_jk h)
//! X2_jk = ½ h² e^{iω_jk t₀} Σ_l B'_jl B'_lk (e^{−i x_k} F_jlk − e^{i x_j} conj F_jlk)
//! ```
//!
//! where `φ(θ) = (e^{iθ} − 1)/(iθ)` and `F_abc` is the second divided
//! difference of `p ↦ e^{ip}` at `(x_a, x_b, x_c)`, normalised by `i²` so that
//! `F_aaa = e^{i x_a}/2`. The time-zero matrices depend only on `h`; a step at
//! `t₀` is a diagonal phase rotation of them.

use super::generator::{Provenance, SkewGenerator};
use crate::error::{Error, Result};
use crate::operators::{CMatrix, InteractionPicture, C64, I};

/// `(e^{iθ} − 1)/(iθ)`
pub fn phi1(theta: f64) -> C64 {
    if theta.abs() < 1e-4 {
        let t2 = theta * theta;
        C64::new(1.0 - t2 / 6.0 + t2 * t2 / 120.0, theta / 2.0 - theta * t2 / 24.0)
    } else {
        let s = (0.5 * theta).sin();
        C64::new(theta.sin() / theta, 2.0 * s * s / theta)
    }
}

/// First divided difference `(e^{iq} − e^{ip})/(i(q − p))`.
fn dd1(p: f64, cis_p: C64, q: f64) -> C64 {
    cis_p * phi1(q - p)
}

/// Nodes closer than this use the Taylor series of the divided difference.
const SERIES_SPREAD: f64 = 0.5;

/// `e^{ix} Σ_n iⁿ h_n(u, v)/(n+2)!` with `h_n` the complete homogeneous
/// polynomial of degree `n` in `u, v`.
fn dd2_series(cis_x: C64, u: f64, v: f64) -> C64 {
    let mut acc = C64::new(0.5, 0.0);
    let mut hn = 1.0;
    let mut un = 1.0;
    let mut fact = 0.5;
    let mut ipow = C64::new(1.0, 0.0);
    for n in 1..40 {
        un *= u;
        hn = v * hn + un;
        fact /= (n + 2) as f64;
        ipow *= I;
        let term = ipow * (hn * fact);
        acc += term;
        if term.norm() < 1e-18 * acc.norm() {
            break;
        }
    }
    cis_x * acc
}

/// Precomputed nodes of one step size.
struct Nodes {
    x: Vec<f64>,
    cis: Vec<C64>,
    /// `pair[a][b] = dd1(x_a, x_b)`, symmetric.
    pair: Vec<C64>,
    n: usize,
}

impl Nodes {
    fn new(lambda: &[f64], h: f64) -> Self {
        let n = lambda.len();
        let x: Vec<f64> = lambda.iter().map(|l| l * h).collect();
        let cis: Vec<C64> = x.iter().map(|&v| C64::from_polar(1.0, v)).collect();
        let mut pair = vec![C64::new(0.0, 0.0); n * n];
        for a in 0..n {
            for b in 0..n {
                pair[a * n + b] = dd1(x[a], cis[a], x[b]);
            }
        }
        Self { x, cis, pair, n }
    }

    fn dd2(&self, a: usize, b: usize, c: usize) -> C64 {
        let mut idx = [a, b, c];
        idx.sort_by(|&p, &q| self.x[p].total_cmp(&self.x[q]));
        let [lo, mid, hi] = idx;
        let spread = self.x[hi] - self.x[lo];
        if spread < SERIES_SPREAD {
            dd2_series(self.cis[lo], self.x[mid] - self.x[lo], spread)
        } else {
            (self.pair[mid * self.n + hi] - self.pair[lo * self.n + mid]) / (I * spread)
        }
    }
}

/// Closed-form generators of one step size `h`, at `t₀ = 0`, in the
/// eigenbasis of `A`.
#[derive(Clone, Debug)]
pub struct InteractionKernel {
    ip: InteractionPicture,
    h: f64,
    x1: CMatrix,
    x2: CMatrix,
}

impl InteractionKernel {
    pub fn new(ip: &InteractionPicture, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::param("step", format!("must be positive, got {h}")));
        }
        let bp = ip
            .b_eigenbasis()
            .ok_or_else(|| Error::param("perturbation", "closed form needs a static B"))?;
        let lam = ip.a_eigvals();
        let n = lam.len();
        let nodes = Nodes::new(lam, h);

        let x1 = CMatrix::from_fn(n, n, |j, k| -I * h * bp[(j, k)] * phi1((lam[j] - lam[k]) * h));

        let mut x2 = CMatrix::zeros(n, n);
        let mut row = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            let fwd_j = nodes.cis[j];
            row.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            for l in 0..n {
                let bjl = bp[(j, l)];
                if bjl == C64::new(0.0, 0.0) {
                    continue;
                }
                for (k, acc) in row.iter_mut().enumerate() {
                    let f = nodes.dd2(j, l, k);
                    let w = nodes.cis[k].conj() * f - fwd_j * f.conj();
                    *acc += bjl * bp[(l, k)] * w;
                }
            }
            for k in 0..n {
                x2[(j, k)] = row[k] * (0.5 * h * h);
            }
        }

        Ok(Self {
            ip: ip.clone(),
            h,
            x1,
            x2,
        })
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn interaction_picture(&self) -> &InteractionPicture {
        &self.ip
    }

    /// `Ω₁(t₀ + h, t₀)`
    pub fn omega1(&self, t0: f64) -> Result<SkewGenerator> {
        let m = self.ip.from_eigenbasis(&self.ip.rotate_eigenbasis(&self.x1, t0));
        SkewGenerator::new(m, Provenance::Magnus1Exact, t0, self.h, None)
    }

    /// `Ω₂(t₀ + h, t₀)`
    pub fn omega2(&self, t0: f64) -> Result<SkewGenerator> {
        let x = &self.x1 + &self.x2;
        let m = self.ip.from_eigenbasis(&self.ip.rotate_eigenbasis(&x, t0));
        SkewGenerator::new(m, Provenance::Magnus2Exact, t0, self.h, None)
    }
}

/// Closed-form `Ω₂` of the interaction-picture Hamiltonian on one step.
pub fn omega2_interaction(ip: &InteractionPicture, t0: f64, h: f64) -> Result<SkewGenerator> {
    InteractionKernel::new(ip, h)?.omega2(t0)
}
