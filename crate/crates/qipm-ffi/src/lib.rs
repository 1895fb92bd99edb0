//! C ABI over the solver stack.
//!
//! Conventions: every object crosses the boundary as an opaque pointer
//! created by a `qipm_*` constructor and released by the matching `_free`;
//! every fallible call returns a status code and leaves a human-readable
//! message readable through [`qipm_last_error_message`] (thread-local,
//! valid until the next failing call on the same thread). Panics are caught
//! at the boundary and reported as [`QipmStatus::Panic`].
//!
//! The ABI works in `f64`; the extended-precision backend stays behind the
//! Rust API and the CLI.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use qipm::bench::Algo;
use qipm::generate::generate_centered_instance;
use qipm::ipm::{interior_dual_start, run_dual, run_ifqipm_oss, IPMConfig};
use qipm::ir::run_ir;
use qipm::linalg::Matrix;
use qipm::model::{DualIterate, LOProblem, PrimalDualIterate};
use qipm::mps::read_mps;
use qipm::oracle::{Backend, Oracle, OracleConfig};
use qipm::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QipmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SolverFailure = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QipmAlgo {
    /// Single-scale dual method.
    Ae = 0,
    /// Dual method inside the refinement loop.
    Ir = 1,
    /// Feasible primal-dual method.
    Oss = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QipmBackend {
    Exact = 0,
    Perturbed = 1,
    Cg = 2,
}

/// Plain-data solve configuration; get defaults from
/// [`qipm_solve_options_default`] and override fields as needed.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct QipmSolveOptions {
    pub algo: QipmAlgo,
    pub backend: QipmBackend,
    /// Certified duality-gap target for ae/oss; final precision for ir.
    pub eps: f64,
    /// Per-round precision of the refined run (ir only).
    pub zeta_tilde: f64,
    /// Barrier reduction rate; zero or negative picks 1/(4 sqrt(n)).
    pub theta: f64,
    /// Direction error of the noisy oracle backends.
    pub eps_dir: f64,
    /// Oracle seed.
    pub seed: u64,
}

/// Opaque problem handle: constraint matrix, right-hand side, costs, and
/// (for generated instances) a centered start iterate.
pub struct QipmProblem {
    inner: LOProblem<f64>,
    start: Option<DualIterate<f64>>,
}

/// Opaque solution handle; read through the `qipm_solution_*` accessors.
pub struct QipmSolution {
    y: Vec<f64>,
    s: Vec<f64>,
    x: Option<Vec<f64>>,
    objective: f64,
    gap: f64,
    iterations: u64,
    outer_iterations: u64,
    queries: u64,
    converged: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn status_for(e: &Error) -> QipmStatus {
    match e {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::Json(_)
        | Error::InvalidConfig(_)
        | Error::Dimension(_) => QipmStatus::InvalidArgument,
        _ => QipmStatus::SolverFailure,
    }
}

fn fail(e: &Error) -> QipmStatus {
    set_error(e.to_string());
    status_for(e)
}

fn null_arg(what: &str) -> QipmStatus {
    set_error(format!("{what} must not be null"));
    QipmStatus::NullPointer
}

fn guard(f: impl FnOnce() -> QipmStatus) -> QipmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic crossed the C boundary".into());
            QipmStatus::Panic
        }
    }
}

/// Message describing the most recent failure on this thread, or null when
/// the last call succeeded. The pointer stays valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn qipm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qipm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[no_mangle]
pub extern "C" fn qipm_solve_options_default() -> QipmSolveOptions {
    QipmSolveOptions {
        algo: QipmAlgo::Ae,
        backend: QipmBackend::Exact,
        eps: 1e-8,
        zeta_tilde: 1e-2,
        theta: 0.0,
        eps_dir: 1e-2,
        seed: 0,
    }
}

/// Builds a random strictly feasible instance with a centered start.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qipm_problem_generate(
    n: usize,
    m: usize,
    seed: u64,
    out: *mut *mut QipmProblem,
) -> QipmStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        match generate_centered_instance::<f64>(n, m, 1.0, seed) {
            Ok((inner, start)) => {
                *out = Box::into_raw(Box::new(QipmProblem {
                    inner,
                    start: Some(start),
                }));
                QipmStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Reads an MPS file and canonicalizes it to equality standard form.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qipm_problem_from_mps(
    path: *const c_char,
    out: *mut *mut QipmProblem,
) -> QipmStatus {
    guard(|| {
        if path.is_null() {
            return null_arg("path");
        }
        if out.is_null() {
            return null_arg("out");
        }
        let path = match CStr::from_ptr(path).to_str() {
            Ok(p) => p,
            Err(_) => {
                set_error("path is not valid UTF-8".into());
                return QipmStatus::InvalidArgument;
            }
        };
        match read_mps(path) {
            Ok(parsed) => {
                *out = Box::into_raw(Box::new(QipmProblem {
                    inner: parsed.problem,
                    start: None,
                }));
                QipmStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Builds a problem from dense arrays: `a` is row-major `m x n`.
///
/// # Safety
/// `a`, `b`, `c` must point to `m*n`, `m`, and `n` readable doubles; `name`
/// may be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qipm_problem_from_parts(
    m: usize,
    n: usize,
    a: *const f64,
    b: *const f64,
    c: *const f64,
    name: *const c_char,
    out: *mut *mut QipmProblem,
) -> QipmStatus {
    guard(|| {
        if a.is_null() || b.is_null() || c.is_null() {
            return null_arg("a, b, and c");
        }
        if out.is_null() {
            return null_arg("out");
        }
        let Some(len) = m.checked_mul(n).filter(|_| m > 0 && n > 0) else {
            set_error(format!("bad dimensions m={m}, n={n}"));
            return QipmStatus::InvalidArgument;
        };
        let a = std::slice::from_raw_parts(a, len);
        let b = std::slice::from_raw_parts(b, m).to_vec();
        let c = std::slice::from_raw_parts(c, n).to_vec();
        let name = if name.is_null() {
            "ffi".to_string()
        } else {
            match CStr::from_ptr(name).to_str() {
                Ok(s) => s.to_string(),
                Err(_) => {
                    set_error("name is not valid UTF-8".into());
                    return QipmStatus::InvalidArgument;
                }
            }
        };
        let matrix = Matrix::from_fn(m, n, |i, j| a[i * n + j]);
        match LOProblem::new(matrix, b, c, name) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(QipmProblem { inner, start: None }));
                QipmStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a problem handle; null is a no-op.
///
/// # Safety
/// `p` must come from a `qipm_problem_*` constructor and not be used after.
#[no_mangle]
pub unsafe extern "C" fn qipm_problem_free(p: *mut QipmProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of equality constraints, or 0 for null.
///
/// # Safety
/// `p` must be a live problem handle or null.
#[no_mangle]
pub unsafe extern "C" fn qipm_problem_num_constraints(p: *const QipmProblem) -> usize {
    p.as_ref().map_or(0, |p| p.inner.m())
}

/// Number of variables, or 0 for null.
///
/// # Safety
/// `p` must be a live problem handle or null.
#[no_mangle]
pub unsafe extern "C" fn qipm_problem_num_variables(p: *const QipmProblem) -> usize {
    p.as_ref().map_or(0, |p| p.inner.n())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn solve_impl(problem: &QipmProblem, options: &QipmSolveOptions) -> Result<QipmSolution, Error> {
    let p = &problem.inner;
    let n = p.n();
    let start = match &problem.start {
        Some(start) => start.clone(),
        None => interior_dual_start(p)?,
    };
    let algo = match options.algo {
        QipmAlgo::Ae => Algo::Ae,
        QipmAlgo::Ir => Algo::Ir,
        QipmAlgo::Oss => Algo::Oss,
    };
    let backend = match options.backend {
        QipmBackend::Exact => Backend::Exact,
        QipmBackend::Perturbed => Backend::Perturbed,
        QipmBackend::Cg => Backend::TruncatedIterative,
    };
    let mu_stop = match algo {
        Algo::Ae | Algo::Oss => options.eps / n as f64,
        Algo::Ir => options.zeta_tilde,
    };
    let mut config = IPMConfig::for_dimension(n, mu_stop);
    if options.theta > 0.0 {
        config.theta = options.theta;
    }
    let mut oracle = Oracle::new(OracleConfig {
        epsilon_direction: options.eps_dir,
        epsilon_norm: options.eps_dir,
        backend,
        seed: options.seed,
    })?;

    match algo {
        Algo::Ae => {
            let out = run_dual(p, &start, &config, &mut oracle)?;
            Ok(QipmSolution {
                objective: dot(p.b(), &out.iterate.y),
                gap: out.gap_certificate(),
                y: out.iterate.y,
                s: out.iterate.s,
                x: None,
                iterations: out.trajectory.iterations() as u64,
                outer_iterations: 0,
                queries: out.trajectory.total_queries(),
                converged: out.converged,
            })
        }
        Algo::Ir => {
            let out = run_ir(p, &start, options.eps, options.zeta_tilde, &config, &mut oracle)?;
            Ok(QipmSolution {
                objective: dot(p.b(), &out.iterate.y),
                gap: out.gap_certificate(),
                y: out.iterate.y,
                s: out.iterate.s,
                x: None,
                iterations: out.outer.iter().map(|r| r.inner_iterations as u64).sum(),
                outer_iterations: out.outer.len() as u64,
                queries: out.total_queries,
                converged: out.converged,
            })
        }
        Algo::Oss => {
            if problem.start.is_none() {
                return Err(Error::InvalidConfig(
                    "oss needs a generated problem: no interior primal start can be \
                     derived from raw data"
                        .into(),
                ));
            }
            // generated starts are centered at mu0 = 1, pinning x = 1 / s
            let x0: Vec<f64> = start.s.iter().map(|si| 1.0 / si).collect();
            let pd = PrimalDualIterate {
                x: x0,
                y: start.y.clone(),
                s: start.s.clone(),
            };
            let out = run_ifqipm_oss(p, &pd, &config, &mut oracle)?;
            Ok(QipmSolution {
                objective: dot(p.c(), &out.iterate.x),
                gap: out.gap_certificate(),
                y: out.iterate.y,
                s: out.iterate.s,
                x: Some(out.iterate.x),
                iterations: out.trajectory.iterations() as u64,
                outer_iterations: 0,
                queries: out.trajectory.total_queries(),
                converged: out.converged,
            })
        }
    }
}

/// Solves the instance; on `Ok` the caller owns `*out` and must release it
/// with [`qipm_solution_free`]. Null `options` means defaults.
///
/// # Safety
/// `p` must be a live problem handle; `options` null or valid; `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qipm_solve(
    p: *const QipmProblem,
    options: *const QipmSolveOptions,
    out: *mut *mut QipmSolution,
) -> QipmStatus {
    guard(|| {
        let Some(problem) = p.as_ref() else {
            return null_arg("problem");
        };
        if out.is_null() {
            return null_arg("out");
        }
        let defaults = qipm_solve_options_default();
        let options = options.as_ref().unwrap_or(&defaults);
        match solve_impl(problem, options) {
            Ok(solution) => {
                *out = Box::into_raw(Box::new(solution));
                QipmStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a solution handle; null is a no-op.
///
/// # Safety
/// `s` must come from [`qipm_solve`] and not be used after.
#[no_mangle]
pub unsafe extern "C" fn qipm_solution_free(s: *mut QipmSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

macro_rules! solution_getter {
    ($(#[$doc:meta])* $name:ident, $field:ident, $ty:ty, $default:expr) => {
        $(#[$doc])*
        /// Returns the default for a null handle.
        ///
        /// # Safety
        /// `s` must be a live solution handle or null.
        #[no_mangle]
        pub unsafe extern "C" fn $name(s: *const QipmSolution) -> $ty {
            s.as_ref().map_or($default, |s| s.$field)
        }
    };
}

solution_getter!(
    /// Dual objective for ae/ir, primal objective for oss.
    qipm_solution_objective,
    objective,
    f64,
    f64::NAN
);
solution_getter!(
    /// Certified complementarity gap at the final iterate.
    qipm_solution_gap,
    gap,
    f64,
    f64::NAN
);
solution_getter!(qipm_solution_iterations, iterations, u64, 0);
solution_getter!(qipm_solution_outer_iterations, outer_iterations, u64, 0);
solution_getter!(qipm_solution_queries, queries, u64, 0);
solution_getter!(qipm_solution_converged, converged, bool, false);

/// Length of the dual vector `y` (also the constraint count).
///
/// # Safety
/// `s` must be a live solution handle or null.
#[no_mangle]
pub unsafe extern "C" fn qipm_solution_dual_len(s: *const QipmSolution) -> usize {
    s.as_ref().map_or(0, |s| s.y.len())
}

/// Length of the slack vector `s` (also the variable count).
///
/// # Safety
/// `s` must be a live solution handle or null.
#[no_mangle]
pub unsafe extern "C" fn qipm_solution_slack_len(s: *const QipmSolution) -> usize {
    s.as_ref().map_or(0, |s| s.s.len())
}

unsafe fn copy_vec(v: &[f64], buf: *mut f64, len: usize) -> QipmStatus {
    if buf.is_null() {
        return null_arg("buf");
    }
    if len != v.len() {
        set_error(format!("buffer holds {len} values, need {}", v.len()));
        return QipmStatus::InvalidArgument;
    }
    std::ptr::copy_nonoverlapping(v.as_ptr(), buf, len);
    QipmStatus::Ok
}

/// Copies the dual vector into `buf`, which must hold exactly
/// `qipm_solution_dual_len` doubles.
///
/// # Safety
/// `s` live or null; `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qipm_solution_copy_dual(
    s: *const QipmSolution,
    buf: *mut f64,
    len: usize,
) -> QipmStatus {
    guard(|| {
        let Some(sol) = s.as_ref() else {
            return null_arg("solution");
        };
        copy_vec(&sol.y, buf, len)
    })
}

/// Copies the slack vector into `buf`, which must hold exactly
/// `qipm_solution_slack_len` doubles.
///
/// # Safety
/// `s` live or null; `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qipm_solution_copy_slack(
    s: *const QipmSolution,
    buf: *mut f64,
    len: usize,
) -> QipmStatus {
    guard(|| {
        let Some(sol) = s.as_ref() else {
            return null_arg("solution");
        };
        copy_vec(&sol.s, buf, len)
    })
}

/// Copies the primal vector into `buf`; only the oss pipeline produces one,
/// other solutions report `InvalidArgument`.
///
/// # Safety
/// `s` live or null; `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qipm_solution_copy_primal(
    s: *const QipmSolution,
    buf: *mut f64,
    len: usize,
) -> QipmStatus {
    guard(|| {
        let Some(sol) = s.as_ref() else {
            return null_arg("solution");
        };
        let Some(x) = &sol.x else {
            set_error("this solution has no primal vector (dual-only pipeline)".into());
            return QipmStatus::InvalidArgument;
        };
        copy_vec(x, buf, len)
    })
}
