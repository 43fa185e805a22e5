//! C ABI for the axmots toolkit.
//!
//! Conventions: every fallible call returns an `int32_t` status
//! (`AXMOTS_OK` = 0; positive codes mirror the CLI exit codes) and writes its
//! result through out-pointers. Stability problems are held behind an opaque
//! handle with explicit create/solve/free. The last error message per thread
//! is available as a NUL-terminated string. No call unwinds across the
//! boundary.
//!
//! Safety contract for every pointer-taking function: pointers must be null
//! or valid for the access implied by their type (strings NUL-terminated,
//! buffers at least `len` elements); handles must come from this library and
//! not be used after `axmots_problem_free`. Null pointers are rejected with
//! `AXMOTS_ERR_NULL`.
#![allow(clippy::missing_safety_doc)]

use axmots::config::ModelConfig;
use axmots::error::Error;
use axmots::grid::ThetaGrid;
use axmots::initial_data::{omega_of_surface, surface_quantities};
use axmots::stability::{principal_eigenpair, EigenResult, StabilityProblem};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

pub const AXMOTS_OK: i32 = 0;
pub const AXMOTS_ERR_DOMAIN: i32 = 1;
pub const AXMOTS_ERR_NUMERICAL: i32 = 2;
pub const AXMOTS_ERR_USAGE: i32 = 3;
pub const AXMOTS_ERR_NULL: i32 = 4;
pub const AXMOTS_ERR_PANIC: i32 = 5;
pub const AXMOTS_ERR_NOT_SOLVED: i32 = 6;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn code_of(e: &Error) -> i32 {
    e.exit_code()
}

fn guard<F: FnOnce() -> i32>(f: F) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            AXMOTS_ERR_PANIC
        }
    }
}

/// Pointer to the NUL-terminated message of the most recent error on this
/// thread. Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn axmots_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static version string of the underlying crate.
#[no_mangle]
pub extern "C" fn axmots_version() -> *const c_char {
    concat!("axmots ", env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Largest admissible rotation parameter for the given scale factor.
#[no_mangle]
pub extern "C" fn axmots_nariai_a_max(ell: f64) -> f64 {
    axmots::nariai::a_max(ell)
}

/// Single point of the extremal rotating horizon family.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AxmotsNariaiPoint {
    pub a: f64,
    pub ell: f64,
    pub eps: f64,
    pub rc2: f64,
    pub area: f64,
    pub omega: f64,
    pub bound: f64,
    pub gap: f64,
}

/// Computes the horizon report at rotation a and scale ell using quad_n
/// Gauss-Legendre nodes (pass 0 for the default).
#[no_mangle]
pub unsafe extern "C" fn axmots_nariai_point(
    a: f64,
    ell: f64,
    quad_n: usize,
    out: *mut AxmotsNariaiPoint,
) -> i32 {
    guard(|| {
        if out.is_null() {
            set_error("out pointer is null");
            return AXMOTS_ERR_NULL;
        }
        let qn = if quad_n == 0 { axmots::nariai::DEFAULT_QUAD_N } else { quad_n };
        let result = axmots::nariai::NariaiParams::new(a, ell)
            .and_then(|p| axmots::nariai::report(&p, qn));
        match result {
            Ok(r) => {
                unsafe {
                    *out = AxmotsNariaiPoint {
                        a: r.a,
                        ell: r.ell,
                        eps: r.eps,
                        rc2: r.rc2,
                        area: r.area,
                        omega: r.omega,
                        bound: r.bound,
                        gap: r.gap,
                    };
                }
                AXMOTS_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                code_of(&e)
            }
        }
    })
}

/// Rotation average, area, Komar integral and the bound 4 pi / (c + omega)
/// on the t = 0 slice of the model described by a TOML config string.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AxmotsOmegaReport {
    pub omega: f64,
    pub area: f64,
    pub komar: f64,
    pub bound: f64,
    pub c: f64,
}

#[no_mangle]
pub unsafe extern "C" fn axmots_omega_slice(
    config_toml: *const c_char,
    c: f64,
    n: usize,
    out: *mut AxmotsOmegaReport,
) -> i32 {
    guard(|| {
        if config_toml.is_null() || out.is_null() {
            set_error("null pointer argument");
            return AXMOTS_ERR_NULL;
        }
        let text = match unsafe { std::ffi::CStr::from_ptr(config_toml) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("config string is not valid UTF-8");
                return AXMOTS_ERR_USAGE;
            }
        };
        let run = || -> axmots::Result<AxmotsOmegaReport> {
            let cfg = ModelConfig::from_toml_str(text)?;
            let nn = cfg.n(if n == 0 { 256 } else { n })?;
            let data = cfg.build_initial_data()?;
            let grid = ThetaGrid::gauss(nn, data.metric().domain_len());
            let s = axmots::geometry::GraphSurface::constant(data.metric(), &grid, 0.0);
            let q = surface_quantities(&data, &s, &grid)?;
            let r = omega_of_surface(&q, &grid, cfg.c(c))?;
            Ok(AxmotsOmegaReport { omega: r.omega, area: r.area, komar: r.komar, bound: r.bound, c: r.c })
        };
        match run() {
            Ok(r) => {
                unsafe { *out = r };
                AXMOTS_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                code_of(&e)
            }
        }
    })
}

/// Opaque stability problem handle.
pub struct AxmotsProblem {
    problem: StabilityProblem,
    solution: Option<EigenResult>,
}

/// Spectral summary of a solved problem.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AxmotsEigSummary {
    pub lambda1: f64,
    pub lambda1_adjoint: f64,
    pub lambda1_symmetrized: f64,
    /// min over m >= 1 of (min Re spec(mode m) - lambda1).
    pub mode_ordering_margin: f64,
    pub n: usize,
    pub m_max: usize,
}

fn problem_out(p: StabilityProblem, out: *mut *mut AxmotsProblem) -> i32 {
    let boxed = Box::new(AxmotsProblem { problem: p, solution: None });
    unsafe { *out = Box::into_raw(boxed) };
    AXMOTS_OK
}

/// Round sphere of curvature c with the saturated potential Q = kappa - c.
#[no_mangle]
pub unsafe extern "C" fn axmots_problem_round(
    c: f64,
    n: usize,
    m_max: usize,
    out: *mut *mut AxmotsProblem,
) -> i32 {
    guard(|| {
        if out.is_null() {
            set_error("out pointer is null");
            return AXMOTS_ERR_NULL;
        }
        match StabilityProblem::rigid_round(c, n, m_max) {
            Ok(p) => problem_out(p, out),
            Err(e) => {
                set_error(&e.to_string());
                code_of(&e)
            }
        }
    })
}

/// Slice operator of the product data described by a TOML config string.
#[no_mangle]
pub unsafe extern "C" fn axmots_problem_from_config(
    config_toml: *const c_char,
    n: usize,
    m_max: usize,
    out: *mut *mut AxmotsProblem,
) -> i32 {
    guard(|| {
        if config_toml.is_null() || out.is_null() {
            set_error("null pointer argument");
            return AXMOTS_ERR_NULL;
        }
        let text = match unsafe { std::ffi::CStr::from_ptr(config_toml) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("config string is not valid UTF-8");
                return AXMOTS_ERR_USAGE;
            }
        };
        let run = || -> axmots::Result<StabilityProblem> {
            let cfg = ModelConfig::from_toml_str(text)?;
            let d = cfg.build_product()?;
            let nn = cfg.n(if n == 0 { 256 } else { n })?;
            let grid = ThetaGrid::midpoint(nn, d.metric.domain_len());
            StabilityProblem::from_product_slice(&d, grid, cfg.m_max(m_max))
        };
        match run() {
            Ok(p) => problem_out(p, out),
            Err(e) => {
                set_error(&e.to_string());
                code_of(&e)
            }
        }
    })
}

/// Solves all mode blocks and caches the result on the handle.
#[no_mangle]
pub unsafe extern "C" fn axmots_problem_solve(
    handle: *mut AxmotsProblem,
    out: *mut AxmotsEigSummary,
) -> i32 {
    guard(|| {
        if handle.is_null() || out.is_null() {
            set_error("null pointer argument");
            return AXMOTS_ERR_NULL;
        }
        let h = unsafe { &mut *handle };
        let r = match principal_eigenpair(&h.problem) {
            Ok(r) => r,
            Err(e) => {
                set_error(&e.to_string());
                return code_of(&e);
            }
        };
        unsafe {
            *out = AxmotsEigSummary {
                lambda1: r.lambda1,
                lambda1_adjoint: r.lambda1_adjoint,
                lambda1_symmetrized: r.lambda1_symmetrized,
                mode_ordering_margin: r.mode_ordering_margin(),
                n: r.n,
                m_max: h.problem.m_max,
            };
        }
        h.solution = Some(r);
        AXMOTS_OK
    })
}

/// Number of grid nodes of the problem behind the handle, or -1 on error.
#[no_mangle]
pub unsafe extern "C" fn axmots_problem_n(handle: *const AxmotsProblem) -> isize {
    if handle.is_null() {
        return -1;
    }
    unsafe { &*handle }.problem.grid.n() as isize
}

/// Copies the grid nodes and the positive principal eigenfunction into the
/// caller's buffers (each of length len >= n). Requires a prior solve.
#[no_mangle]
pub unsafe extern "C" fn axmots_problem_eigenfunction(
    handle: *const AxmotsProblem,
    theta_out: *mut f64,
    u_out: *mut f64,
    len: usize,
) -> i32 {
    guard(|| {
        if handle.is_null() || theta_out.is_null() || u_out.is_null() {
            set_error("null pointer argument");
            return AXMOTS_ERR_NULL;
        }
        let h = unsafe { &*handle };
        let sol = match &h.solution {
            Some(s) => s,
            None => {
                set_error("problem has not been solved yet");
                return AXMOTS_ERR_NOT_SOLVED;
            }
        };
        let n = h.problem.grid.n();
        if len < n {
            set_error("buffer too small");
            return AXMOTS_ERR_USAGE;
        }
        unsafe {
            std::ptr::copy_nonoverlapping(h.problem.grid.nodes().as_ptr(), theta_out, n);
            std::ptr::copy_nonoverlapping(sol.u.as_ptr(), u_out, n);
        }
        AXMOTS_OK
    })
}

/// Releases a problem handle. Passing null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn axmots_problem_free(handle: *mut AxmotsProblem) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}
