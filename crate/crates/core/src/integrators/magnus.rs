use super::generator::{Provenance, SkewGenerator};
use crate::error::{Error, Result};
use crate::operators::{comm, spectral_norm, CMatrix, HermitianMatrix, TimeHamiltonian, C64, I};

/// The two Riemann sums of one step, kept apart so the first-order sum can
/// be reused verbatim.
#[derive(Clone, Debug)]
pub struct RiemannTerms {
    /// `Σ_p H_p (h/M)`
    pub first: CMatrix,
    /// `½ Σ_p [Σ_{q<p} H_q (h/M), H_p] (h/M)`
    pub second: CMatrix,
}

/// Both sums from `M` samples `H_p = H(t_j + p h/M)`, each used once.
pub fn riemann_terms(samples: &[HermitianMatrix], h: f64) -> Result<RiemannTerms> {
    let m = samples.len();
    let Some(first_sample) = samples.first() else {
        return Err(Error::param("n_quad", "must be at least 1"));
    };
    let n = first_sample.dim();
    let w = C64::new(h / m as f64, 0.0);
    let mut running = CMatrix::zeros(n, n);
    let mut comm_sum = CMatrix::zeros(n, n);
    for (p, hp) in samples.iter().enumerate() {
        if hp.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: hp.dim(),
            });
        }
        if p > 0 {
            comm_sum += comm(&running, hp.as_matrix());
        }
        running += hp.as_matrix() * w;
    }
    Ok(RiemannTerms {
        first: running,
        second: comm_sum * (w * C64::new(0.5, 0.0)),
    })
}

fn check_window(h: f64, m: usize) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::param("step", format!("must be positive, got {h}")));
    }
    if m == 0 {
        return Err(Error::param("n_quad", "must be at least 1"));
    }
    Ok(())
}

/// `Ω̃₁ = −i Σ_p H(t_j + ph/M)(h/M)`
pub fn omega1_riemann(h_t: &TimeHamiltonian, t_j: f64, h: f64, m: usize) -> Result<SkewGenerator> {
    check_window(h, m)?;
    let samples = h_t.sample_window(t_j, h, m)?;
    let terms = riemann_terms(&samples, h)?;
    SkewGenerator::new(terms.first * (-I), Provenance::Magnus1Riemann, t_j, h, Some(m))
}

/// `Ω̃₂ = −i Σ_p H_p (h/M) + ½ Σ_p [Σ_{q<p} H_q (h/M), H_p] (h/M)`
pub fn omega2_riemann(h_t: &TimeHamiltonian, t_j: f64, h: f64, m: usize) -> Result<SkewGenerator> {
    check_window(h, m)?;
    let samples = h_t.sample_window(t_j, h, m)?;
    omega2_from_samples(&samples, t_j, h)
}

/// [`omega2_riemann`] on samples already taken.
pub fn omega2_from_samples(samples: &[HermitianMatrix], t_j: f64, h: f64) -> Result<SkewGenerator> {
    check_window(h, samples.len())?;
    let terms = riemann_terms(samples, h)?;
    SkewGenerator::new(
        terms.first * (-I) + terms.second,
        Provenance::Magnus2Riemann,
        t_j,
        h,
        Some(samples.len()),
    )
}

/// Refinement budget for [`omega2_exact`]: at most `2^MAX_LEVELS` intervals.
pub const MAX_LEVELS: usize = 20;

/// Exact-integral Magnus generators of one step.
#[derive(Clone, Debug)]
pub struct ExactGenerators {
    pub omega1: SkewGenerator,
    pub omega2: SkewGenerator,
    /// Final Romberg gap of the second-order generator.
    pub gap: f64,
    pub intervals: usize,
}

/// Composite trapezoid on `n` intervals for `∫H` and for
/// `∫_0^h [∫_0^s H, H(s)] ds`, the inner integral by cumulative trapezoid.
/// Both errors expand in even powers of `h/n`.
fn trapezoid_pass(h_t: &TimeHamiltonian, t_j: f64, h: f64, n: usize) -> Result<(CMatrix, CMatrix)> {
    let d = h_t.dim();
    let dt = h / n as f64;
    let half = C64::new(0.5 * dt, 0.0);
    let mut i1 = CMatrix::zeros(d, d);
    let mut i2 = CMatrix::zeros(d, d);
    let mut cumulative = CMatrix::zeros(d, d);
    let mut prev = h_t.sample(t_j)?.into_matrix();
    // The integrand of the outer integral vanishes at s = 0.
    let mut prev_comm = CMatrix::zeros(d, d);
    for i in 1..=n {
        let cur = h_t.sample(t_j + i as f64 * dt)?.into_matrix();
        let panel = (&prev + &cur) * half;
        i1 += &panel;
        cumulative += &panel;
        let cur_comm = comm(&cumulative, &cur);
        i2 += (&prev_comm + &cur_comm) * half;
        prev = cur;
        prev_comm = cur_comm;
    }
    Ok((i1, i2))
}

/// Romberg-extrapolated `Ω₁` and `Ω₂` of one step.
///
/// The interval count doubles until successive diagonal entries of the
/// Romberg table for `Ω₂` differ by at most `tol` in spectral norm. `None`
/// uses `1e-12·αh`.
pub fn magnus_exact(h_t: &TimeHamiltonian, t_j: f64, h: f64, tol: Option<f64>) -> Result<ExactGenerators> {
    check_window(h, 1)?;
    let tol = tol.unwrap_or(1e-12 * h_t.alpha() * h);
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::param("tol", format!("must be nonnegative, got {tol}")));
    }
    // Rows of the Romberg tables for Ω₁ and Ω₂.
    let mut prev1: Vec<CMatrix> = Vec::new();
    let mut prev2: Vec<CMatrix> = Vec::new();
    let mut gap = f64::INFINITY;
    for level in 0..=MAX_LEVELS {
        let n = 1usize << level;
        let (i1, i2) = trapezoid_pass(h_t, t_j, h, n)?;
        let o1 = i1 * (-I);
        let o2 = &o1 + i2 * C64::new(0.5, 0.0);
        let mut row1 = vec![o1];
        let mut row2 = vec![o2];
        for k in 1..=level {
            let f = C64::new(1.0 / (4f64.powi(k as i32) - 1.0), 0.0);
            let r1 = &row1[k - 1] + (&row1[k - 1] - &prev1[k - 1]) * f;
            let r2 = &row2[k - 1] + (&row2[k - 1] - &prev2[k - 1]) * f;
            row1.push(r1);
            row2.push(r2);
        }
        if level >= 2 {
            gap = spectral_norm(&(&row2[level] - &prev2[level - 1]));
            if gap <= tol {
                let omega1 = SkewGenerator::new(
                    row1.pop().expect("nonempty row"),
                    Provenance::Magnus1Exact,
                    t_j,
                    h,
                    None,
                )?;
                let omega2 = SkewGenerator::new(
                    row2.pop().expect("nonempty row"),
                    Provenance::Magnus2Exact,
                    t_j,
                    h,
                    None,
                )?;
                return Ok(ExactGenerators {
                    omega1,
                    omega2,
                    gap,
                    intervals: n,
                });
            }
        }
        prev1 = row1;
        prev2 = row2;
    }
    Err(Error::QuadratureNotConverged {
        levels: MAX_LEVELS,
        gap,
        tolerance: tol,
    })
}

/// `Ω₂(t_j + h, t_j)` with converged nested integrals.
pub fn omega2_exact(h_t: &TimeHamiltonian, t_j: f64, h: f64, tol: Option<f64>) -> Result<SkewGenerator> {
    magnus_exact(h_t, t_j, h, tol).map(|g| g.omega2)
}
