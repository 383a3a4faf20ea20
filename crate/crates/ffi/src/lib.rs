//! C interface to `magnus-sim`.
//!
//! Objects cross the boundary as opaque handles that the caller releases with
//! the matching `*_free` function. Every fallible call returns an [`MsStatus`];
//! the message of the most recent failure on the calling thread is available
//! from [`ms_last_error_message`]. Panics are caught and reported as
//! [`MsStatus::Panic`].
//!
//! Strings are copied out through caller buffers: the call stores the size
//! needed including the terminating NUL in `needed` and returns
//! [`MsStatus::BufferTooSmall`] when `capacity` is short of it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use magnus_sim::analysis::MagnusSystem;
use magnus_sim::cli::{render_csv, run_study, CliError, Status, StudyConfig, StudyKind};
use magnus_sim::integrators::{evolve_magnus2, StepPlan};
use magnus_sim::operators::{CMatrix, TimeHamiltonian};
use magnus_sim::resources::{plan_resources, CostQuery};
use magnus_sim::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    NotConverged = 4,
    Numerical = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Exit status of a study, matching the command-line runner.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsStudyStatus {
    Pass = 0,
    Fail = 1,
    Inconclusive = 3,
}

/// A time-dependent Hamiltonian.
pub struct MsHamiltonian(TimeHamiltonian);

/// The finished output of one study.
pub struct MsStudy {
    csv: String,
    checks: String,
    rows: usize,
    status: MsStudyStatus,
}

/// Inputs of a long-time cost estimate.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MsCostQuery {
    pub alpha: f64,
    pub t_total: f64,
    pub epsilon: f64,
    pub c_h: f64,
    pub order_exponent: f64,
    pub deriv_sup: f64,
    pub n_a: usize,
}

/// Step count, quadrature size and query totals of a cost estimate.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct MsResourceEstimate {
    pub n_steps_exact: f64,
    pub n_steps: f64,
    pub step: f64,
    pub per_step_delta: f64,
    pub quad_points: f64,
    pub block_uses_per_step: f64,
    pub ham_t_queries: f64,
    pub comp_queries: f64,
    pub gate_count: f64,
    pub budget: f64,
    pub failure_prob_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(MsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidParameter { .. }
            | Error::InvalidGrid(_)
            | Error::DimensionMismatch { .. }
            | Error::MissingColumn(_) => MsStatus::InvalidArgument,
            Error::QuadratureNotConverged { .. } | Error::ReferenceNotConverged { .. } => MsStatus::NotConverged,
            Error::Io(_) => MsStatus::Io,
            _ => MsStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        match e {
            CliError::Study(inner) => inner.into(),
            CliError::Io { .. } => Failure(MsStatus::Io, e.to_string()),
            CliError::Config { .. } => Failure(MsStatus::InvalidArgument, e.to_string()),
        }
    }
}

fn fail(status: MsStatus, message: impl Into<String>) -> Failure {
    Failure(status, message.into())
}

fn set_last_error(message: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

/// Runs `f`, recording the message of a failure or panic.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MsStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            MsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(MsStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn deref_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| fail(MsStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(MsStatus::NullPointer, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(MsStatus::InvalidUtf8, format!("`{name}`: {e}")))
}

/// Copies `s` with a trailing NUL into `buf`.
unsafe fn write_str(s: &str, buf: *mut c_char, capacity: usize, needed: *mut usize) -> Result<(), Failure> {
    let size = s.len() + 1;
    if let Some(n) = needed.as_mut() {
        *n = size;
    }
    if capacity < size {
        return Err(fail(
            MsStatus::BufferTooSmall,
            format!("buffer holds {capacity} bytes, {size} needed"),
        ));
    }
    if buf.is_null() {
        return Err(fail(MsStatus::NullPointer, "`buf` is null"));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Writes `m` row-major into separate real and imaginary arrays of `len` entries.
unsafe fn write_matrix(m: &CMatrix, re: *mut f64, im: *mut f64, len: usize) -> Result<(), Failure> {
    let n = m.nrows() * m.ncols();
    if len < n {
        return Err(fail(MsStatus::BufferTooSmall, format!("arrays hold {len} entries, {n} needed")));
    }
    if re.is_null() || im.is_null() {
        return Err(fail(MsStatus::NullPointer, "output arrays are null"));
    }
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            *re.add(r * m.ncols() + c) = z.re;
            *im.add(r * m.ncols() + c) = z.im;
        }
    }
    Ok(())
}

fn into_handle<T>(value: T, out: &mut *mut T) {
    *out = Box::into_raw(Box::new(value));
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ms_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last failure message of this thread; empty when none occurred.
///
/// # Safety
/// `buf` must be valid for `capacity` bytes; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn ms_last_error_message(buf: *mut c_char, capacity: usize, needed: *mut usize) -> MsStatus {
    let message = LAST_ERROR.with(|e| e.borrow().clone());
    match write_str(&message, buf, capacity, needed) {
        Ok(()) => MsStatus::Ok,
        Err(Failure(status, _)) => status,
    }
}

/// `H(t) = σz + cos(t) σx`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ms_hamiltonian_pauli_cosine(out: *mut *mut MsHamiltonian) -> MsStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        into_handle(MsHamiltonian(MagnusSystem::pauli_cosine().hamiltonian()), out);
        Ok(())
    })
}

/// A seeded random smooth Hamiltonian on `n_qubits` qubits with `‖H(t)‖ ≤ alpha`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ms_hamiltonian_random_smooth(
    n_qubits: usize,
    alpha: f64,
    seed: u64,
    out: *mut *mut MsHamiltonian,
) -> MsStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        into_handle(MsHamiltonian(TimeHamiltonian::random_smooth(n_qubits, alpha, seed)?), out);
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle; `dim` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ms_hamiltonian_dim(h: *const MsHamiltonian, dim: *mut usize) -> MsStatus {
    guard(|| {
        *deref_mut(dim, "dim")? = deref(h, "h")?.0.dim();
        Ok(())
    })
}

/// Samples `H(t)` into row-major arrays of at least `dim²` entries.
///
/// # Safety
/// `h` must be a live handle; `re` and `im` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn ms_hamiltonian_sample(
    h: *const MsHamiltonian,
    t: f64,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> MsStatus {
    guard(|| {
        let sample = deref(h, "h")?.0.sample(t)?;
        write_matrix(sample.as_matrix(), re, im, len)
    })
}

/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ms_hamiltonian_free(h: *mut MsHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Second-order Magnus propagator over `[0, t_total]` with `n_steps` steps and
/// `n_quad` Riemann points per step, written row-major.
///
/// # Safety
/// `h` must be a live handle; `re` and `im` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn ms_evolve_magnus2(
    h: *const MsHamiltonian,
    t_total: f64,
    n_steps: usize,
    n_quad: usize,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> MsStatus {
    guard(|| {
        let plan = StepPlan::new(t_total, n_steps, n_quad)?;
        let u = evolve_magnus2(&deref(h, "h")?.0, &plan)?;
        write_matrix(u.matrix(), re, im, len)
    })
}

/// Long-time cost estimate.
///
/// # Safety
/// `query` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_plan_resources(query: *const MsCostQuery, out: *mut MsResourceEstimate) -> MsStatus {
    guard(|| {
        let q = deref(query, "query")?;
        let out = deref_mut(out, "out")?;
        let e = plan_resources(&CostQuery {
            alpha: q.alpha,
            t_total: q.t_total,
            epsilon: q.epsilon,
            c_h: q.c_h,
            order_exponent: q.order_exponent,
            deriv_sup: q.deriv_sup,
            n_a: q.n_a,
        })?;
        *out = MsResourceEstimate {
            n_steps_exact: e.n_steps_exact,
            n_steps: e.n_steps_l,
            step: e.step,
            per_step_delta: e.per_step_delta,
            quad_points: e.quad_points_m,
            block_uses_per_step: e.block_uses_per_step,
            ham_t_queries: e.ham_t_queries,
            comp_queries: e.comp_queries,
            gate_count: e.gate_count,
            budget: e.budget,
            failure_prob_bound: e.failure_prob_bound,
        };
        Ok(())
    })
}

/// Runs the named study. `config_json` uses the runner's config format and
/// may be null for the defaults. Nothing is written to disk.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ms_study_run(
    study: *const c_char,
    config_json: *const c_char,
    out: *mut *mut MsStudy,
) -> MsStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let kind: StudyKind = read_str(study, "study")?.parse()?;
        let cfg = if config_json.is_null() {
            StudyConfig::default()
        } else {
            StudyConfig::from_json(read_str(config_json, "config_json")?)?
        }
        .bind(kind)?;
        cfg.validate()?;
        let result = run_study(kind, &cfg)?;
        let checks: String = result.checks.iter().map(|c| format!("{c}\n")).collect();
        let status = match result.status() {
            Status::Pass => MsStudyStatus::Pass,
            Status::Fail => MsStudyStatus::Fail,
            Status::Inconclusive => MsStudyStatus::Inconclusive,
        };
        into_handle(
            MsStudy {
                csv: render_csv(&result.rows, &cfg.hash())?,
                checks,
                rows: result.rows.len(),
                status,
            },
            out,
        );
        Ok(())
    })
}

/// # Safety
/// `study` must be a live handle; the outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ms_study_status(
    study: *const MsStudy,
    status: *mut MsStudyStatus,
    n_rows: *mut usize,
) -> MsStatus {
    guard(|| {
        let s = deref(study, "study")?;
        *deref_mut(status, "status")? = s.status;
        if let Some(n) = n_rows.as_mut() {
            *n = s.rows;
        }
        Ok(())
    })
}

/// The study's CSV table, comment header included.
///
/// # Safety
/// `study` must be a live handle; `buf` must be valid for `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn ms_study_csv(
    study: *const MsStudy,
    buf: *mut c_char,
    capacity: usize,
    needed: *mut usize,
) -> MsStatus {
    guard(|| write_str(&deref(study, "study")?.csv, buf, capacity, needed))
}

/// One `STATUS name: detail` line per assertion of the study.
///
/// # Safety
/// `study` must be a live handle; `buf` must be valid for `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn ms_study_checks(
    study: *const MsStudy,
    buf: *mut c_char,
    capacity: usize,
    needed: *mut usize,
) -> MsStatus {
    guard(|| write_str(&deref(study, "study")?.checks, buf, capacity, needed))
}

/// # Safety
/// `study` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ms_study_free(study: *mut MsStudy) {
    if !study.is_null() {
        drop(Box::from_raw(study));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        let mut needed = 0;
        unsafe {
            ms_last_error_message(ptr::null_mut(), 0, &mut needed);
            let mut buf = vec![0 as c_char; needed];
            assert_eq!(ms_last_error_message(buf.as_mut_ptr(), needed, ptr::null_mut()), MsStatus::Ok);
            CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
        }
    }

    #[test]
    fn version_matches_the_package() {
        let v = unsafe { CStr::from_ptr(ms_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn short_buffer_reports_the_needed_size() {
        let mut needed = 0;
        let mut buf = [0 as c_char; 2];
        let status = unsafe { write_str("hello", buf.as_mut_ptr(), 2, &mut needed) };
        assert!(matches!(status, Err(Failure(MsStatus::BufferTooSmall, _))));
        assert_eq!(needed, 6);
    }

    #[test]
    fn panics_become_status_codes() {
        assert_eq!(guard(|| panic!("boom")), MsStatus::Panic);
        assert_eq!(last_error(), "panic: boom");
    }

    #[test]
    fn errors_map_to_codes() {
        let f: Failure = Error::ReferenceNotConverged {
            substeps: 1,
            gap: 1.0,
            tolerance: 0.1,
        }
        .into();
        assert_eq!(f.0, MsStatus::NotConverged);
        let f: Failure = Error::NonFinite("x".into()).into();
        assert_eq!(f.0, MsStatus::Numerical);
    }
}
