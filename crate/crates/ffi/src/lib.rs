//! C ABI over the `graphwave` solvers.
//!
//! Every object crosses the boundary as an opaque pointer created by a
//! `*_new`/`*_from_*` function and released by its matching `*_free`.
//! Every function returns a [`GwStatus`]; on failure the message is available
//! from [`gw_last_error_message`] on the same thread. Output arrays are
//! caller-allocated and sized by the interior length of the problem.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::os::raw::c_int;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use graphwave::io::parse_problem;
use graphwave::spectral::{FormulaVariant, SpectralSolution};
use graphwave::{assemble, solve_rothe, Error, RotheRun, WaveProblem};

/// Result code of every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed or inconsistent input data.
    InvalidInput = 3,
    /// A solver or eigensolver failed, or a numerical precondition was not met.
    Numerical = 4,
    OutOfRange = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Modal formula selector for [`gw_spectral_new`].
pub const GW_VARIANT_DUHAMEL: c_int = 0;
/// Initial velocity replaced by h - f(0); kept for comparison only.
pub const GW_VARIANT_SHIFTED: c_int = 1;

/// Parsed wave problem: graph, domain, initial data and forcing.
pub struct GwProblem {
    inner: WaveProblem,
}

/// Eigendecomposition of a problem plus its modal data.
pub struct GwSpectralSolution {
    inner: SpectralSolution,
}

/// All time levels of a Rothe run.
pub struct GwRotheRun {
    inner: RotheRun,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    // Interior NULs cannot occur in our messages, but never lose the text.
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: GwStatus, message: impl Into<String>) -> GwStatus {
    set_error(message.into());
    status
}

fn from_error(e: Error) -> GwStatus {
    let status = if e.is_input_error() {
        GwStatus::InvalidInput
    } else {
        GwStatus::Numerical
    };
    fail(status, e.to_string())
}

/// Runs `body`, converting a panic into [`GwStatus::Panic`].
fn guard(body: impl FnOnce() -> GwStatus) -> GwStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == GwStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(GwStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, GwStatus> {
    if p.is_null() {
        return Err(fail(GwStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(GwStatus::InvalidUtf8, "string argument is not valid UTF-8"))
}

unsafe fn write_slice(src: &[f64], out: *mut f64, len: usize) -> GwStatus {
    if out.is_null() {
        return fail(GwStatus::NullPointer, "null output buffer");
    }
    if len < src.len() {
        return fail(
            GwStatus::BufferTooSmall,
            format!("output buffer holds {len} values, {} needed", src.len()),
        );
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    GwStatus::Ok
}

macro_rules! deref {
    ($p:expr) => {
        match $p.as_ref() {
            Some(v) => v,
            None => return fail(GwStatus::NullPointer, concat!("null ", stringify!($p))),
        }
    };
}

/// Message of the last failed call on this thread, or NULL after a
/// successful call. The pointer stays valid until the next call on this
/// thread.
#[no_mangle]
pub extern "C" fn gw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a problem from JSON text. Relative graph paths inside the document
/// resolve against `base_dir`, or the working directory when it is NULL.
///
/// # Safety
/// `json` must be a NUL-terminated string, `base_dir` NULL or NUL-terminated,
/// and `out` a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn gw_problem_from_json(
    json: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut GwProblem,
) -> GwStatus {
    guard(|| {
        if out.is_null() {
            return fail(GwStatus::NullPointer, "null out");
        }
        let text = match read_str(json) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let base = if base_dir.is_null() {
            "."
        } else {
            match read_str(base_dir) {
                Ok(s) => s,
                Err(s) => return s,
            }
        };
        match parse_problem(text, Path::new(base), None) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(GwProblem { inner: p }));
                GwStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `problem` must be NULL or a handle from [`gw_problem_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gw_problem_free(problem: *mut GwProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Number of interior vertices, the length of every state vector.
///
/// # Safety
/// `problem` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_problem_interior_len(problem: *const GwProblem, out: *mut usize) -> GwStatus {
    guard(|| {
        let p = deref!(problem);
        if out.is_null() {
            return fail(GwStatus::NullPointer, "null out");
        }
        *out = p.inner.domain().interior_len();
        GwStatus::Ok
    })
}

/// Copies the id of interior vertex `index` into `buf` as a NUL-terminated
/// string. `needed` (if not NULL) receives the buffer size required,
/// including the terminator, also when `buf` is too small.
///
/// # Safety
/// `problem` must be a live handle; `buf` must hold `cap` bytes or be NULL
/// with `cap` zero.
#[no_mangle]
pub unsafe extern "C" fn gw_problem_interior_id(
    problem: *const GwProblem,
    index: usize,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> GwStatus {
    guard(|| {
        let p = deref!(problem);
        let Some(id) = p.inner.domain().interior_ids().nth(index) else {
            return fail(GwStatus::OutOfRange, format!("interior index {index} out of range"));
        };
        let size = id.len() + 1;
        if !needed.is_null() {
            *needed = size;
        }
        if cap < size || buf.is_null() {
            return fail(
                GwStatus::BufferTooSmall,
                format!("id needs {size} bytes, buffer has {cap}"),
            );
        }
        ptr::copy_nonoverlapping(id.as_ptr().cast::<c_char>(), buf, id.len());
        *buf.add(id.len()) = 0;
        GwStatus::Ok
    })
}

/// Builds the modal solution. `variant` is [`GW_VARIANT_DUHAMEL`] or
/// [`GW_VARIANT_SHIFTED`].
///
/// # Safety
/// `problem` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_spectral_new(
    problem: *const GwProblem,
    variant: c_int,
    out: *mut *mut GwSpectralSolution,
) -> GwStatus {
    guard(|| {
        let p = deref!(problem);
        if out.is_null() {
            return fail(GwStatus::NullPointer, "null out");
        }
        let variant = match variant {
            GW_VARIANT_DUHAMEL => FormulaVariant::Duhamel,
            GW_VARIANT_SHIFTED => FormulaVariant::Shifted,
            v => return fail(GwStatus::OutOfRange, format!("unknown formula variant {v}")),
        };
        match SpectralSolution::new(&p.inner, variant) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(GwSpectralSolution { inner: s }));
                GwStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `solution` must be NULL or a handle from [`gw_spectral_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gw_spectral_free(solution: *mut GwSpectralSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Writes the eigenvalues in ascending order.
///
/// # Safety
/// `solution` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gw_spectral_eigenvalues(
    solution: *const GwSpectralSolution,
    out: *mut f64,
    len: usize,
) -> GwStatus {
    guard(|| write_slice(deref!(solution).inner.spectrum().eigenvalues(), out, len))
}

/// Evaluates u(t) and u_t(t) on the interior. Either output may be NULL to
/// skip it.
///
/// # Safety
/// `solution` must be a live handle; non-NULL outputs must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gw_spectral_state(
    solution: *const GwSpectralSolution,
    t: f64,
    u: *mut f64,
    du: *mut f64,
    len: usize,
) -> GwStatus {
    guard(|| {
        let s = deref!(solution);
        let state = match s.inner.state(t) {
            Ok(v) => v,
            Err(e) => return from_error(e),
        };
        for (src, dst) in [(&state.u, u), (&state.du, du)] {
            if !dst.is_null() {
                let status = write_slice(src, dst, len);
                if status != GwStatus::Ok {
                    return status;
                }
            }
        }
        GwStatus::Ok
    })
}

/// Runs the Rothe scheme with `steps` uniform steps on [0, horizon].
///
/// # Safety
/// `problem` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_rothe_solve(
    problem: *const GwProblem,
    horizon: f64,
    steps: usize,
    out: *mut *mut GwRotheRun,
) -> GwStatus {
    guard(|| {
        let p = deref!(problem);
        if out.is_null() {
            return fail(GwStatus::NullPointer, "null out");
        }
        match solve_rothe(&p.inner, horizon, steps) {
            Ok(run) => {
                *out = Box::into_raw(Box::new(GwRotheRun { inner: run }));
                GwStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `run` must be NULL or a handle from [`gw_rothe_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gw_rothe_free(run: *mut GwRotheRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Number of steps n; levels are indexed 0..=n.
///
/// # Safety
/// `run` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_rothe_steps(run: *const GwRotheRun, out: *mut usize) -> GwStatus {
    guard(|| {
        let r = deref!(run);
        if out.is_null() {
            return fail(GwStatus::NullPointer, "null out");
        }
        *out = r.inner.steps();
        GwStatus::Ok
    })
}

/// Writes level `index` (the approximation at t = index * T / n).
///
/// # Safety
/// `run` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gw_rothe_level(run: *const GwRotheRun, index: usize, out: *mut f64, len: usize) -> GwStatus {
    guard(|| {
        let r = deref!(run);
        if index > r.inner.steps() {
            return fail(
                GwStatus::OutOfRange,
                format!("level {index} out of range 0..={}", r.inner.steps()),
            );
        }
        write_slice(r.inner.level(index), out, len)
    })
}

/// Largest scheme residual relative to its scale; at most 1e-10 for a
/// correctly solved run.
///
/// # Safety
/// `run` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_rothe_scheme_residual(run: *const GwRotheRun, out: *mut f64) -> GwStatus {
    guard(|| {
        let r = deref!(run);
        if out.is_null() {
            return fail(GwStatus::NullPointer, "null out");
        }
        *out = r.inner.scheme_residual(&assemble(r.inner.domain())).relative();
        GwStatus::Ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, GwStatus::Panic);
        let msg = unsafe { CStr::from_ptr(gw_last_error_message()) }.to_str().unwrap();
        assert_eq!(msg, "panic: boom");
    }

    #[test]
    fn success_clears_error() {
        let _ = fail(GwStatus::InvalidInput, "x");
        assert!(!gw_last_error_message().is_null());
        assert_eq!(guard(|| GwStatus::Ok), GwStatus::Ok);
        assert!(gw_last_error_message().is_null());
    }

    #[test]
    fn short_buffer_is_reported() {
        let mut out = [0.0; 1];
        let status = unsafe { write_slice(&[1.0, 2.0], out.as_mut_ptr(), 1) };
        assert_eq!(status, GwStatus::BufferTooSmall);
    }
}
