//! C ABI over the besselsum evaluators.
//!
//! Handles are opaque; every entry point returns a [`BsStatus`], never unwinds,
//! and records a per-thread message retrievable with [`bs_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use besselsum::engine::Evaluator;
use besselsum::{
    Error, EvalOptions, EvalResult, MethodChoice, MethodId, RegionFlag, SumKind, SumParams,
};

pub const BS_KIND_J: u32 = 0;
pub const BS_KIND_K: u32 = 1;

/// Region-based selection with fallback to direct summation.
pub const BS_METHOD_AUTO: u32 = 0;
pub const BS_METHOD_DIRECT: u32 = 1;
pub const BS_METHOD_POLYLOG_SERIES: u32 = 2;
pub const BS_METHOD_THEOREM1: u32 = 3;
pub const BS_METHOD_THEOREM2: u32 = 4;
pub const BS_METHOD_A0_CLOSED_FORM: u32 = 5;
pub const BS_METHOD_THEOREM3: u32 = 6;
pub const BS_METHOD_THEOREM3_ASYMPTOTIC: u32 = 7;
pub const BS_METHOD_NU0_LIMIT: u32 = 8;
pub const BS_METHOD_HALF_INTEGER: u32 = 9;
pub const BS_METHOD_EPSILON_AVERAGE: u32 = 10;

pub const BS_FLAG_NEAR_BOUNDARY: u32 = 1;
pub const BS_FLAG_CONDITIONAL_CONVERGENCE: u32 = 2;
pub const BS_FLAG_FALLBACK_USED: u32 = 4;
pub const BS_FLAG_NOT_CONVERGED: u32 = 8;

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsStatus {
    Ok = 0,
    /// Argument outside the mathematical domain (e.g. a < 0).
    Domain = 1,
    /// Outside the convergence region of the requested method.
    Region = 2,
    /// Formally valid but numerically ill-conditioned.
    Conditioning = 3,
    /// A table or truncation cap was exceeded.
    Capacity = 4,
    /// The method does not apply to these parameters.
    Routing = 5,
    NullPointer = 6,
    InvalidArgument = 7,
    /// An internal panic was caught at the boundary.
    Panic = 8,
}

/// A computed sum; `method` is a `BS_METHOD_*` code, `flags` a mask of `BS_FLAG_*`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsResult {
    pub value: f64,
    pub est_error: f64,
    pub terms_used: u64,
    pub method: u32,
    pub flags: u32,
}

/// Opaque evaluator handle owning its coefficient caches; safe to share across threads.
pub struct BsEvaluator {
    inner: Evaluator,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BsStatus {
    match e {
        Error::Domain(_) => BsStatus::Domain,
        Error::Region { .. } => BsStatus::Region,
        Error::Conditioning { .. } => BsStatus::Conditioning,
        Error::Capacity { .. } => BsStatus::Capacity,
        Error::Routing(_) => BsStatus::Routing,
    }
}

/// Runs `f` behind a panic barrier, recording any failure message.
fn guarded(f: impl FnOnce() -> Result<(), (BsStatus, String)>) -> BsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            BsStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_owned());
            set_last_error(format!("internal panic: {msg}"));
            BsStatus::Panic
        }
    }
}

fn method_code(m: MethodId) -> u32 {
    MethodId::ALL
        .iter()
        .position(|&x| x == m)
        .map_or(BS_METHOD_AUTO, |i| i as u32 + 1)
}

fn method_from_code(code: u32) -> Option<MethodId> {
    code.checked_sub(1)
        .and_then(|i| MethodId::ALL.get(i as usize).copied())
}

fn flag_mask(r: &EvalResult) -> u32 {
    r.flags
        .iter()
        .map(|f| match f {
            RegionFlag::NearBoundary => BS_FLAG_NEAR_BOUNDARY,
            RegionFlag::ConditionalConvergence => BS_FLAG_CONDITIONAL_CONVERGENCE,
            RegionFlag::FallbackUsed => BS_FLAG_FALLBACK_USED,
            RegionFlag::NotConverged => BS_FLAG_NOT_CONVERGED,
        })
        .fold(0, |m, f| m | f)
}

/// Creates an evaluator; `tol` > 0 is the target accuracy of truncation-controlled
/// paths (1e-10 is the usual choice), `max_terms` = 0 selects the default cap.
/// Returns NULL on invalid arguments.
#[no_mangle]
pub extern "C" fn bs_evaluator_new(tol: f64, max_terms: u64) -> *mut BsEvaluator {
    let mut out = ptr::null_mut();
    let _ = guarded(|| {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err((
                BsStatus::InvalidArgument,
                format!("tol must be positive and finite, got {tol}"),
            ));
        }
        let mut opts = EvalOptions::with_tol(tol);
        if max_terms > 0 {
            opts.max_terms = usize::try_from(max_terms).unwrap_or(usize::MAX);
        }
        out = Box::into_raw(Box::new(BsEvaluator {
            inner: Evaluator::new(opts),
        }));
        Ok(())
    });
    out
}

/// Releases an evaluator; NULL is ignored.
///
/// # Safety
/// `handle` must be NULL or a pointer returned by [`bs_evaluator_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bs_evaluator_free(handle: *mut BsEvaluator) {
    if !handle.is_null() {
        // SAFETY: ownership returns to Rust exactly once per the contract above.
        let _ = catch_unwind(AssertUnwindSafe(|| drop(unsafe { Box::from_raw(handle) })));
    }
}

/// Evaluates Σ s_n e^{-an}(½bn)^{-ν} C_ν(bn), C = J or K by `kind`, with
/// s_n = (−1)^{n−1} when `alternating`. `method` is `BS_METHOD_AUTO` or an exact method.
///
/// # Safety
/// `handle` must come from [`bs_evaluator_new`]; `out` must point to writable `BsResult`.
#[no_mangle]
pub unsafe extern "C" fn bs_evaluate(
    handle: *const BsEvaluator,
    kind: u32,
    alternating: bool,
    a: f64,
    b: f64,
    nu: f64,
    method: u32,
    out: *mut BsResult,
) -> BsStatus {
    guarded(|| {
        if handle.is_null() || out.is_null() {
            return Err((
                BsStatus::NullPointer,
                "handle and out must be non-null".into(),
            ));
        }
        // SAFETY: non-null and valid per the contract.
        let ev = unsafe { &(*handle).inner };
        let kind = match kind {
            BS_KIND_J => SumKind::J,
            BS_KIND_K => SumKind::K,
            k => return Err((BsStatus::InvalidArgument, format!("unknown kind code {k}"))),
        };
        let p = SumParams::new(kind, a, b, nu).alternating(alternating);
        let r = if method == BS_METHOD_AUTO {
            ev.evaluate(&p, MethodChoice::Auto)
        } else {
            let m = method_from_code(method).ok_or_else(|| {
                (
                    BsStatus::InvalidArgument,
                    format!("unknown method code {method}"),
                )
            })?;
            ev.evaluate_exact(&p, m)
        }
        .map_err(|e| (status_of(&e), e.to_string()))?;
        let res = BsResult {
            value: r.value,
            est_error: r.est_error,
            terms_used: r.terms_used as u64,
            method: method_code(r.method),
            flags: flag_mask(&r),
        };
        // SAFETY: `out` is non-null and writable per the contract.
        unsafe { out.write(res) };
        Ok(())
    })
}

/// Message for the last failed call on this thread ("" after a success).
/// The pointer stays valid until the next call from the same thread.
#[no_mangle]
pub extern "C" fn bs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Canonical name of a `BS_METHOD_*` code, or NULL for unknown codes. Static storage.
#[no_mangle]
pub extern "C" fn bs_method_name(method: u32) -> *const c_char {
    const NAMES: [&CStr; 11] = [
        c"auto",
        c"direct",
        c"polylog-series",
        c"theorem1",
        c"theorem2",
        c"a0-closed-form",
        c"theorem3",
        c"theorem3-asymptotic",
        c"nu0-limit",
        c"half-integer",
        c"epsilon-average",
    ];
    NAMES
        .get(method as usize)
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// Short description of a status code. Static storage.
#[no_mangle]
pub extern "C" fn bs_status_name(status: BsStatus) -> *const c_char {
    match status {
        BsStatus::Ok => c"ok",
        BsStatus::Domain => c"domain error",
        BsStatus::Region => c"region error",
        BsStatus::Conditioning => c"conditioning error",
        BsStatus::Capacity => c"capacity error",
        BsStatus::Routing => c"routing error",
        BsStatus::NullPointer => c"null pointer",
        BsStatus::InvalidArgument => c"invalid argument",
        BsStatus::Panic => c"internal panic",
    }
    .as_ptr()
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn bs_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(s) => s,
            Err(_) => c"unknown",
        };
    VERSION.as_ptr()
}
