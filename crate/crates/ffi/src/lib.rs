//! C ABI over `permlab`.
//!
//! Matrices are opaque `PlMatrix` handles created by `pl_matrix_from_entries`
//! or `pl_matrix_parse` and released with `pl_matrix_free`. Every fallible call
//! returns a `PlStatus` and writes its result through an out pointer; on a
//! non-`Ok` status `pl_last_error_message` describes the failure for the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use permlab::dittert::phi;
use permlab::lihwang::{gap_direct, roots_in_open_unit};
use permlab::matcore::{is_doubly_stochastic, is_fully_indecomposable, parse_matrix_text, MAX_EXHAUSTIVE_ORDER};
use permlab::perm::{laplace_expand, per_naive, per_ryser, sigma_k};
use permlab::poly::Poly;
use permlab::{Error, Mat, Rational, Scalar, SubsetIndex};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Parse = 4,
    NonConvergence = 5,
    HypothesisFailed = 6,
    Utf8 = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlPermMethod {
    Naive = 0,
    Ryser = 1,
    /// Laplace expansion along the first row.
    Laplace = 2,
}

enum Inner {
    Float(Mat<f64>),
    Exact(Mat<Rational>),
}

/// Opaque matrix handle.
pub struct PlMatrix {
    inner: Inner,
}

impl PlMatrix {
    fn float(&self) -> Mat<f64> {
        match &self.inner {
            Inner::Float(m) => m.clone(),
            Inner::Exact(m) => m.to_f64(),
        }
    }

    fn order(&self) -> usize {
        match &self.inner {
            Inner::Float(m) => m.order(),
            Inner::Exact(m) => m.order(),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> PlStatus {
    match e {
        Error::Domain(_) | Error::ZeroLine { .. } => PlStatus::Domain,
        Error::InvalidArgument(_) => PlStatus::InvalidArgument,
        Error::NonConvergence { .. } => PlStatus::NonConvergence,
        Error::Parse { .. } => PlStatus::Parse,
        Error::HypothesisFailed(_) => PlStatus::HypothesisFailed,
    }
}

/// Runs `f`, converting errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), (PlStatus, String)>) -> PlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PlStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (PlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PlStatus, String) {
    (PlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn handle<'a>(m: *const PlMatrix) -> Result<&'a PlMatrix, (PlStatus, String)> {
    m.as_ref().ok_or_else(|| null("matrix handle"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (PlStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Message for the most recent failure on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Builds an `n x n` matrix from `n*n` row-major doubles.
///
/// # Safety
/// `entries` must point to `n*n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_matrix_from_entries(n: usize, entries: *const f64, out: *mut *mut PlMatrix) -> PlStatus {
    guard(|| {
        if entries.is_null() {
            return Err(null("entries"));
        }
        let len = n.checked_mul(n).ok_or((PlStatus::InvalidArgument, "order overflows".to_string()))?;
        let data = std::slice::from_raw_parts(entries, len).to_vec();
        if data.iter().any(|v| !v.is_finite()) {
            return Err((PlStatus::InvalidArgument, "entries must be finite".into()));
        }
        let m = Mat::from_entries(n, data).map_err(lib_err)?;
        write(out, Box::into_raw(Box::new(PlMatrix { inner: Inner::Float(m) })))
    })
}

/// Parses the text matrix format (order line, then rows of integers,
/// decimals or `p/q` fractions). The result keeps exact rational entries.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_matrix_parse(text: *const c_char, out: *mut *mut PlMatrix) -> PlStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text).to_str().map_err(|e| (PlStatus::Utf8, e.to_string()))?;
        let m = parse_matrix_text(s).map_err(lib_err)?;
        write(out, Box::into_raw(Box::new(PlMatrix { inner: Inner::Exact(m) })))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `m` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pl_matrix_free(m: *mut PlMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Order of the matrix, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_matrix_order(m: *const PlMatrix) -> usize {
    m.as_ref().map_or(0, PlMatrix::order)
}

fn per_by<S: Scalar>(a: &Mat<S>, method: PlPermMethod) -> Result<S, (PlStatus, String)> {
    match method {
        PlPermMethod::Naive => Ok(per_naive(a)),
        PlPermMethod::Ryser => Ok(per_ryser(a)),
        PlPermMethod::Laplace => {
            let rows = SubsetIndex::new(vec![0], a.order()).map_err(lib_err)?;
            laplace_expand(a, &rows).map_err(lib_err)
        }
    }
}

/// Permanent in double precision.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_permanent(m: *const PlMatrix, method: PlPermMethod, out: *mut f64) -> PlStatus {
    guard(|| {
        let v = per_by(&handle(m)?.float(), method)?;
        write(out, v)
    })
}

/// Exact permanent rendered as `p/q` (or an integer). Float handles are
/// lifted exactly, so the result is the permanent of the stored doubles.
/// Free the string with `pl_string_free`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_permanent_exact(m: *const PlMatrix, out: *mut *mut c_char) -> PlStatus {
    guard(|| {
        let v = match &handle(m)?.inner {
            Inner::Exact(a) => per_ryser(a),
            Inner::Float(a) => per_ryser(&a.to_exact()),
        };
        let s = CString::new(v.render()).expect("rendered rationals contain no NUL");
        write(out, s.into_raw())
    })
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Sum of permanents of all `k x k` submatrices.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_sigma_k(m: *const PlMatrix, k: usize, out: *mut f64) -> PlStatus {
    guard(|| {
        let v = sigma_k(&handle(m)?.float(), k).map_err(lib_err)?;
        write(out, v)
    })
}

/// Whether the matrix is doubly stochastic. Exact handles ignore `tol`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_is_doubly_stochastic(m: *const PlMatrix, tol: f64, out: *mut bool) -> PlStatus {
    guard(|| {
        let v = match &handle(m)?.inner {
            Inner::Float(a) => is_doubly_stochastic(a, &tol),
            Inner::Exact(a) => is_doubly_stochastic(a, &Rational::from_int(0)),
        };
        write(out, v)
    })
}

/// Full indecomposability by exhaustive zero-block search (order at most 8).
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_is_fully_indecomposable(m: *const PlMatrix, out: *mut bool) -> PlStatus {
    guard(|| {
        let h = handle(m)?;
        if h.order() > MAX_EXHAUSTIVE_ORDER {
            return Err((
                PlStatus::InvalidArgument,
                format!("order {} exceeds {MAX_EXHAUSTIVE_ORDER}", h.order()),
            ));
        }
        let v = match &h.inner {
            Inner::Float(a) => is_fully_indecomposable(a),
            Inner::Exact(a) => is_fully_indecomposable(a),
        };
        write(out, v)
    })
}

/// Dittert's function. The matrix must be nonnegative with entry sum `n`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_phi(m: *const PlMatrix, out: *mut f64) -> PlStatus {
    guard(|| {
        let v = match &handle(m)?.inner {
            Inner::Float(a) => phi(a).map_err(lib_err)?,
            Inner::Exact(a) => phi(a).map_err(lib_err)?.to_f64(),
        };
        write(out, v)
    })
}

/// `t per(J_n) + (1-t) per(A) - per(tJ_n + (1-t)A)` for doubly stochastic `A`
/// and `t` in [0, 1].
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pl_gap_direct(m: *const PlMatrix, t: f64, out: *mut f64) -> PlStatus {
    guard(|| {
        if !t.is_finite() {
            return Err((PlStatus::InvalidArgument, "t must be finite".into()));
        }
        let v = match &handle(m)?.inner {
            Inner::Float(a) => gap_direct(a, &t).map_err(lib_err)?,
            Inner::Exact(a) => gap_direct(a, &Rational::from_f64(t)).map_err(lib_err)?.to_f64(),
        };
        write(out, v)
    })
}

/// Looks for a real root in (0, 1) of the polynomial with ascending
/// coefficients `coeffs[0..len]`. On success `*found` says whether one
/// exists; if so `[*lo, *hi]` brackets it with width `2*tol`.
///
/// # Safety
/// `coeffs` must point to `len` doubles; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_roots_in_open_unit(
    coeffs: *const f64,
    len: usize,
    tol: f64,
    found: *mut bool,
    lo: *mut f64,
    hi: *mut f64,
) -> PlStatus {
    guard(|| {
        if coeffs.is_null() && len > 0 {
            return Err(null("coeffs"));
        }
        let c = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(coeffs, len).to_vec() };
        if c.iter().any(|v| !v.is_finite()) {
            return Err((PlStatus::InvalidArgument, "coefficients must be finite".into()));
        }
        match roots_in_open_unit(&Poly::new(c), tol) {
            Some((a, b)) => {
                write(found, true)?;
                write(lo, a)?;
                write(hi, b)
            }
            None => write(found, false),
        }
    })
}
