use crate::error::{Error, Result};
use crate::operators::{comm, spectral_norm, CMatrix, InteractionPicture, TimeHamiltonian, C64, I};

/// First-order Taylor split of `A(t) = −i e^{iAt} B e^{−iAt}`:
/// `A(t) = α + β t + γ(t)`.
#[derive(Clone, Debug)]
pub struct TaylorSplit {
    ip: InteractionPicture,
    /// `−iB`
    pub alpha_term: CMatrix,
    /// `[A, B]`
    pub beta_term: CMatrix,
}

impl TaylorSplit {
    pub fn new(ip: &InteractionPicture) -> Result<Self> {
        let b = ip
            .b_static()
            .ok_or_else(|| Error::param("perturbation", "the split needs a static B"))?;
        Ok(Self {
            ip: ip.clone(),
            alpha_term: b.as_matrix() * (-I),
            beta_term: comm(ip.a().as_matrix(), b.as_matrix()),
        })
    }

    /// `A(t)`
    pub fn generator_at(&self, t: f64) -> CMatrix {
        let b = self.ip.b_static().expect("static perturbation");
        if t == 0.0 {
            return b.as_matrix() * (-I);
        }
        let bp = self.ip.b_eigenbasis().expect("static perturbation");
        self.ip.from_eigenbasis(&self.ip.rotate_eigenbasis(bp, t)) * (-I)
    }

    /// `γ(t) = A(t) − α − β t` by direct subtraction.
    pub fn gamma_at(&self, t: f64) -> CMatrix {
        self.generator_at(t) - &self.alpha_term - &self.beta_term * C64::new(t, 0.0)
    }
}

/// `‖[α, [β, γ(t)]]‖` for each `t`.
pub fn taylor_term_norm(ts: &TaylorSplit, t_grid: &[f64]) -> Vec<f64> {
    t_grid
        .iter()
        .map(|&t| {
            let inner = comm(&ts.beta_term, &ts.gamma_at(t));
            spectral_norm(&comm(&ts.alpha_term, &inner))
        })
        .collect()
}

/// `n` equispaced points on `[−h, h]`, endpoints included.
pub fn symmetric_grid(h: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|k| -h + 2.0 * h * k as f64 / (n - 1) as f64)
        .collect()
}

/// Side of the `(τ, s)` grid approximating the supremum.
pub const KEY_GRID: usize = 9;

/// `sup_{τ,s} ‖[V_τ, [V_s, V]]‖` with `V_x = e^{iAx} V e^{−iAx}` over a
/// `KEY_GRID × KEY_GRID` grid on `[−h, h]²`.
///
/// `A` and `V` are real, so `(τ, s) → (−τ, −s)` conjugates the operator and
/// only `s > 0` is evaluated; `s = 0` vanishes identically.
pub fn key_commutator_norm(ip: &InteractionPicture, h_grid: &[f64]) -> Result<Vec<f64>> {
    let v = ip
        .b_static()
        .ok_or_else(|| Error::param("perturbation", "needs a static potential"))?
        .as_matrix();
    let vp = ip.b_eigenbasis().expect("static perturbation");
    let conj = |x: f64| ip.from_eigenbasis(&ip.rotate_eigenbasis(vp, x));
    let mut out = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::param("h_grid", format!("step must be positive, got {h}")));
        }
        let grid = symmetric_grid(h, KEY_GRID);
        let rotated: Vec<CMatrix> = grid.iter().map(|&x| conj(x)).collect();
        let mut sup = 0.0_f64;
        for (si, &s) in grid.iter().enumerate() {
            if s <= 0.0 {
                continue;
            }
            let inner = comm(&rotated[si], v);
            for vt in &rotated {
                sup = sup.max(spectral_norm(&comm(vt, &inner)));
            }
        }
        out.push(sup);
    }
    Ok(out)
}

/// `max ‖[H(τ), [H(s), H(t)]]‖` over an `n`-point grid on the window.
/// Antisymmetry in `(s, t)` halves the work.
pub fn commutator_bound_c_comm(h_t: &TimeHamiltonian, window: (f64, f64), n_samples: usize) -> Result<f64> {
    if n_samples < 3 {
        return Err(Error::param("n_samples", "need at least 3 per axis"));
    }
    let (a, b) = window;
    if !(a.is_finite() && b.is_finite() && b >= a) {
        return Err(Error::param("window", format!("invalid window [{a}, {b}]")));
    }
    let times: Vec<f64> = (0..n_samples)
        .map(|k| a + (b - a) * k as f64 / (n_samples - 1) as f64)
        .collect();
    let hs: Vec<CMatrix> = times
        .iter()
        .map(|&t| h_t.sample(t).map(|h| h.into_matrix()))
        .collect::<Result<_>>()?;
    let mut sup = 0.0_f64;
    for s in 0..n_samples {
        for t in s + 1..n_samples {
            let inner = comm(&hs[s], &hs[t]);
            for ht in &hs {
                sup = sup.max(spectral_norm(&comm(ht, &inner)));
            }
        }
    }
    Ok(sup)
}
