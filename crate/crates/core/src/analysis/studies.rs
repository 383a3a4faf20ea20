use serde::{Deserialize, Serialize};

use super::report::{spread, ConvergenceReport};
use super::system::{GeneratorSource, MagnusOrder, MagnusSystem, Quadrature, ReferenceSource};
use crate::error::{Error, Result};
use crate::integrators::{evolve_product, magnus_exact, omega2_riemann, step_unitary, StepPlan};
use crate::operators::{GridSpec, InteractionPicture, Potential, TimeHamiltonian};

/// One measured point of a convergence study.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StudyPoint {
    pub h: f64,
    pub n_steps: usize,
    pub n_quad: Option<usize>,
    pub error: f64,
    /// Uncertainty of the reference used for this point.
    pub reference_gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorStudy {
    pub points: Vec<StudyPoint>,
    pub report: ConvergenceReport,
}

impl ErrorStudy {
    /// Largest ratio of reference uncertainty to measured error.
    pub fn worst_reference_ratio(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.reference_gap / p.error)
            .fold(0.0, f64::max)
    }
}

fn check_list(name: &'static str, values: &[f64], min_len: usize) -> Result<()> {
    if values.len() < min_len {
        return Err(Error::param(name, format!("need at least {min_len} values")));
    }
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::param(name, "values must be positive"));
    }
    Ok(())
}

/// Single-step errors `‖U(t₀+h, t₀) − exp Ω(t₀+h, t₀)‖` over `h_list`.
pub fn local_error_study(
    system: &MagnusSystem,
    h_list: &[f64],
    t0: f64,
    order: MagnusOrder,
    quadrature: Quadrature,
) -> Result<ErrorStudy> {
    check_list("h_list", h_list, 2)?;
    let mut source = GeneratorSource::new(system, order, quadrature);
    let reference = ReferenceSource::new(system)?;
    let mut points = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let u = step_unitary(&source.generator(t0, h)?)?;
        let r = reference.propagator(t0 + h, t0, &u)?;
        points.push(StudyPoint {
            h,
            n_steps: 1,
            n_quad: source.points(h),
            error: r.unitary.distance(&u),
            reference_gap: r.gap,
        });
    }
    finish(points, system)
}

/// Errors `‖U(T, 0) − Π exp Ω_j‖` with `h = T/L` for each `L`.
pub fn global_error_study(
    system: &MagnusSystem,
    t_total: f64,
    l_list: &[usize],
    order: MagnusOrder,
    quadrature: Quadrature,
) -> Result<ErrorStudy> {
    if l_list.len() < 2 || l_list.contains(&0) {
        return Err(Error::param("l_list", "need at least two positive step counts"));
    }
    let mut source = GeneratorSource::new(system, order, quadrature);
    let reference = ReferenceSource::new(system)?;
    let mut products = Vec::with_capacity(l_list.len());
    for &l in l_list {
        let plan = StepPlan::new(t_total, l, 1)?;
        let h = plan.step();
        let u = evolve_product(&plan, system.dim(), |t, h| source.generator(t, h))?;
        products.push((l, h, u));
    }
    // One reference for the whole study, refined against the most accurate
    // product.
    let best = products
        .iter()
        .max_by_key(|(l, _, _)| *l)
        .map(|(_, _, u)| u)
        .expect("nonempty");
    let exact = reference.propagator(t_total, 0.0, best)?;
    let points = products
        .iter()
        .map(|(l, h, u)| StudyPoint {
            h: *h,
            n_steps: *l,
            n_quad: source.points(*h),
            error: exact.unitary.distance(u),
            reference_gap: exact.gap,
        })
        .collect();
    finish(points, system)
}

fn finish(mut points: Vec<StudyPoint>, system: &MagnusSystem) -> Result<ErrorStudy> {
    points.sort_by(|a, b| a.h.total_cmp(&b.h));
    let report = ConvergenceReport::fit(
        points.iter().map(|p| p.h).collect(),
        points.iter().map(|p| p.error).collect(),
        system.roundoff_floor(),
    )?;
    Ok(ErrorStudy { points, report })
}

/// Local truncation studies of `−Δ + V` for several grid sizes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PreconstantTable {
    pub rows: Vec<(usize, ErrorStudy)>,
    /// `max/min` of the fitted constants across `N`.
    pub spread: f64,
}

pub fn preconstant_vs_grid(
    potential: Potential,
    h_list: &[f64],
    n_list: &[usize],
    t0: f64,
    order: MagnusOrder,
) -> Result<PreconstantTable> {
    if n_list.is_empty() {
        return Err(Error::param("n_list", "must be nonempty"));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let ip = InteractionPicture::schrodinger(&GridSpec::periodic(n)?, potential)?;
        let study = local_error_study(&MagnusSystem::Interaction(ip), h_list, t0, order, Quadrature::Exact)?;
        rows.push((n, study));
    }
    let constants: Vec<f64> = rows.iter().map(|(_, s)| s.report.constant()).collect();
    Ok(PreconstantTable {
        spread: spread(&constants),
        rows,
    })
}

/// Errors of the Riemann step against the converged step versus `M`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadratureStudy {
    pub h: f64,
    pub m_list: Vec<usize>,
    pub bounds: Vec<f64>,
    pub report: ConvergenceReport,
}

impl QuadratureStudy {
    /// First `M` whose error exceeds its bound.
    pub fn first_violation(&self) -> Option<(usize, f64, f64)> {
        self.m_list
            .iter()
            .zip(&self.report.errors)
            .zip(&self.bounds)
            .find(|((_, e), b)| e > b)
            .map(|((m, e), b)| (*m, *e, *b))
    }

    /// `Err(BoundViolation)` at the first offending `M`.
    pub fn assert_bound(&self) -> Result<()> {
        match self.first_violation() {
            Some((m, error, bound)) => Err(Error::BoundViolation { m, error, bound }),
            None => Ok(()),
        }
    }
}

/// `(h²/M) d₁ + (3h³/M) α d₁` with `d₁` bounding `‖H′‖`.
pub fn quadrature_bound(h: f64, m: usize, alpha: f64, d1: f64) -> f64 {
    let m = m as f64;
    h * h / m * d1 + 3.0 * h.powi(3) / m * alpha * d1
}

pub fn quadrature_error_study(
    h_t: &TimeHamiltonian,
    t0: f64,
    h: f64,
    m_list: &[usize],
) -> Result<QuadratureStudy> {
    if m_list.len() < 2 || m_list.contains(&0) {
        return Err(Error::param("m_list", "need at least two positive values"));
    }
    let d1 = h_t
        .deriv_bound_1()
        .ok_or_else(|| Error::param("deriv_bound_1", "the bound needs sup ‖H′‖"))?;
    let exact = step_unitary(&magnus_exact(h_t, t0, h, None)?.omega2)?;
    let mut ms = m_list.to_vec();
    ms.sort_unstable();
    let mut errors = Vec::with_capacity(ms.len());
    let mut bounds = Vec::with_capacity(ms.len());
    for &m in &ms {
        let u = step_unitary(&omega2_riemann(h_t, t0, h, m)?)?;
        errors.push(exact.distance(&u));
        bounds.push(quadrature_bound(h, m, h_t.alpha(), d1));
    }
    let report = ConvergenceReport::fit(
        ms.iter().map(|&m| m as f64).collect(),
        errors,
        1e-14 * h_t.dim() as f64,
    )?;
    Ok(QuadratureStudy {
        h,
        m_list: ms,
        bounds,
        report,
    })
}
