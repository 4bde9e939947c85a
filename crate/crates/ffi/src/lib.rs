//! C ABI over `toric-extremal`.
//!
//! Every function returns a [`TeStatus`]; results go through out-pointers,
//! which are written only on success. After a non-`Ok` status,
//! [`te_last_error_message`] describes the failure on the calling thread.
//! Metrics are opaque handles owned by the caller and released with
//! [`te_metric_free`]. Strings returned by the library are released with
//! [`te_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use toric_extremal::abreu::abreu_scalar_curvature;
use toric_extremal::bridge::{bridge_cross_check, geometric_samples, BridgePreset};
use toric_extremal::calabi::{self, ExtremalCoefficients, ExtremalMetric};
use toric_extremal::cli::{
    self, Command, RunConfig, BRIDGE_S_RANGE, DEFAULT_TOLERANCE_HARD, DEFAULT_TOLERANCE_SOFT,
};
use toric_extremal::radial::radial_scalar_curvature;
use toric_extremal::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameters = 2,
    DomainViolation = 3,
    Pole = 4,
    DegenerateMetric = 5,
    SingularSystem = 6,
    NumericalFailure = 7,
    /// The computation ran but a check failed; outputs are still written.
    VerificationFailed = 8,
    Panic = 9,
}

impl From<&Error> for TeStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameters(_)
            | Error::DimensionMismatch { .. }
            | Error::EmptyRegion { .. }
            | Error::DimensionTooLarge(_)
            | Error::NonInteriorPoint { .. } => Self::InvalidParameters,
            Error::DomainViolation { .. }
            | Error::OutOfRange { .. }
            | Error::StencilExitsDomain { .. } => Self::DomainViolation,
            Error::Pole { .. } => Self::Pole,
            Error::DegenerateMetric { .. }
            | Error::PositivityViolation { .. }
            | Error::SingularHessian => Self::DegenerateMetric,
            Error::SingularSystem { .. } | Error::ZeroDenominator => Self::SingularSystem,
            _ => Self::NumericalFailure,
        }
    }
}

/// Coefficients of `S(t) = A t + B` and of `α`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeCoefficients {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub slope: f64,
    pub intercept: f64,
    pub linear: f64,
    pub constant: f64,
}

impl From<&ExtremalCoefficients> for TeCoefficients {
    fn from(e: &ExtremalCoefficients) -> Self {
        Self {
            n: e.n,
            a: e.a,
            b: e.b,
            p: e.p,
            slope: e.slope,
            intercept: e.intercept,
            linear: e.linear,
            constant: e.constant,
        }
    }
}

/// Opaque extremal metric.
pub struct TeMetric {
    inner: ExtremalMetric,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

/// Runs `body`, converting errors and panics into a status.
fn guard<F>(body: F) -> TeStatus
where
    F: FnOnce() -> Result<TeStatus, (TeStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => {
            if status == TeStatus::Ok {
                set_last_error("");
            }
            status
        }
        Ok(Err((status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("panic inside toric-extremal");
            TeStatus::Panic
        }
    }
}

fn fail(e: Error) -> (TeStatus, String) {
    (TeStatus::from(&e), e.to_string())
}

fn null(name: &str) -> (TeStatus, String) {
    (TeStatus::NullPointer, format!("{name} is null"))
}

/// # Safety
/// `ptr` is null or valid for writes of `T`.
unsafe fn write_out<T>(ptr: *mut T, name: &str, value: T) -> Result<(), (TeStatus, String)> {
    if ptr.is_null() {
        return Err(null(name));
    }
    ptr.write(value);
    Ok(())
}

/// # Safety
/// `ptr` is null or points to a live `TeMetric`.
unsafe fn metric<'a>(ptr: *const TeMetric) -> Result<&'a TeMetric, (TeStatus, String)> {
    ptr.as_ref().ok_or_else(|| null("metric"))
}

/// Message for the last non-`Ok` status on this thread. Empty after a
/// success. Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn te_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Static, NUL-terminated name of a status.
#[no_mangle]
pub extern "C" fn te_status_name(status: TeStatus) -> *const c_char {
    let name: &'static CStr = match status {
        TeStatus::Ok => c"ok",
        TeStatus::NullPointer => c"null-pointer",
        TeStatus::InvalidParameters => c"invalid-parameters",
        TeStatus::DomainViolation => c"domain-violation",
        TeStatus::Pole => c"pole",
        TeStatus::DegenerateMetric => c"degenerate-metric",
        TeStatus::SingularSystem => c"singular-system",
        TeStatus::NumericalFailure => c"numerical-failure",
        TeStatus::VerificationFailed => c"verification-failed",
        TeStatus::Panic => c"panic",
    };
    name.as_ptr()
}

/// Solves the boundary system for `(A, B, C, D)`.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn te_solve_coefficients(
    n: usize,
    a: f64,
    b: f64,
    out: *mut TeCoefficients,
) -> TeStatus {
    guard(|| {
        let e = calabi::solve_coefficients(n, a, b).map_err(fail)?;
        write_out(out, "out", TeCoefficients::from(&e))?;
        Ok(TeStatus::Ok)
    })
}

/// `(A, B, C, D)` from the closed-form expressions.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn te_closed_form_coefficients(
    n: usize,
    a: f64,
    b: f64,
    out: *mut TeCoefficients,
) -> TeStatus {
    guard(|| {
        let e = calabi::closed_form_coefficients(n, a, b).map_err(fail)?;
        write_out(out, "out", TeCoefficients::from(&e))?;
        Ok(TeStatus::Ok)
    })
}

/// Builds the extremal metric for `(n, a, b)`. On success `*out` owns a new
/// handle.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn te_metric_new(
    n: usize,
    a: f64,
    b: f64,
    out: *mut *mut TeMetric,
) -> TeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = calabi::build_extremal_metric(n, a, b).map_err(fail)?;
        out.write(Box::into_raw(Box::new(TeMetric { inner })));
        Ok(TeStatus::Ok)
    })
}

/// Releases a handle from [`te_metric_new`]. Null is a no-op.
///
/// # Safety
/// `metric` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn te_metric_free(metric: *mut TeMetric) {
    if !metric.is_null() {
        drop(Box::from_raw(metric));
    }
}

/// # Safety
/// `metric` is a live handle; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn te_metric_coefficients(
    metric: *const TeMetric,
    out: *mut TeCoefficients,
) -> TeStatus {
    guard(|| {
        let m = self::metric(metric)?;
        write_out(out, "out", TeCoefficients::from(&m.inner.coefficients))?;
        Ok(TeStatus::Ok)
    })
}

/// `F''(t)` for `a < t < b`; `Pole` at the endpoints.
///
/// # Safety
/// `metric` is a live handle; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn te_metric_f_second(
    metric: *const TeMetric,
    t: f64,
    out: *mut f64,
) -> TeStatus {
    guard(|| {
        let m = self::metric(metric)?;
        let v = calabi::extremal_f_second(&m.inner.coefficients, t).map_err(fail)?;
        write_out(out, "out", v)?;
        Ok(TeStatus::Ok)
    })
}

/// `h''(t)`, the smooth part of the potential, for `a < t < b`.
///
/// # Safety
/// `metric` is a live handle; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn te_metric_h_second(
    metric: *const TeMetric,
    t: f64,
    out: *mut f64,
) -> TeStatus {
    guard(|| {
        let m = self::metric(metric)?;
        let v = calabi::h_second(&m.inner.coefficients, t).map_err(fail)?;
        write_out(out, "out", v)?;
        Ok(TeStatus::Ok)
    })
}

/// Scalar curvature at `t` from the radial formula.
///
/// # Safety
/// `metric` is a live handle; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn te_metric_radial_curvature(
    metric: *const TeMetric,
    t: f64,
    out: *mut f64,
) -> TeStatus {
    guard(|| {
        let m = self::metric(metric)?;
        let v = radial_scalar_curvature(&m.inner.profile, t).map_err(fail)?;
        write_out(out, "out", v)?;
        Ok(TeStatus::Ok)
    })
}

/// Scalar curvature at the point `x[0..len]` from the general toric formula.
/// `step <= 0` selects the default finite-difference step.
///
/// # Safety
/// `metric` is a live handle; `x` is valid for `len` reads; `out` is null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn te_metric_abreu_curvature(
    metric: *const TeMetric,
    x: *const f64,
    len: usize,
    step: f64,
    out: *mut f64,
) -> TeStatus {
    guard(|| {
        let m = self::metric(metric)?;
        if x.is_null() {
            return Err(null("x"));
        }
        let point = std::slice::from_raw_parts(x, len);
        let step = (step > 0.0).then_some(step);
        let v =
            abreu_scalar_curvature(&m.inner.symplectic_potential(), point, step).map_err(fail)?;
        write_out(out, "out", v)?;
        Ok(TeStatus::Ok)
    })
}

/// Runs the verification battery and returns its JSON report in `*out_json`,
/// identical to the `verify` command's output with default tolerances.
/// Returns `VerificationFailed` (with the report written) when a required
/// check fails.
///
/// # Safety
/// `out_json` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn te_verify_json(
    n: usize,
    a: f64,
    b: f64,
    points: usize,
    seed: u64,
    out_json: *mut *mut c_char,
) -> TeStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let config = RunConfig {
            command: Command::Verify,
            n,
            a,
            b,
            points,
            samples: None,
            seed,
            step: None,
            margin: None,
            format: None,
            tolerance_hard: DEFAULT_TOLERANCE_HARD,
            tolerance_soft: DEFAULT_TOLERANCE_SOFT,
            preset: BridgePreset::FubiniStudy,
        };
        let outcome = cli::run(&config);
        if outcome.stdout.is_empty() {
            let status = if outcome.exit == 2 {
                TeStatus::InvalidParameters
            } else {
                TeStatus::NumericalFailure
            };
            return Err((status, outcome.stderr.trim_end().to_string()));
        }
        let text = CString::new(outcome.stdout)
            .map_err(|e| (TeStatus::NumericalFailure, e.to_string()))?;
        out_json.write(text.into_raw());
        if outcome.exit == 0 {
            Ok(TeStatus::Ok)
        } else {
            set_last_error(outcome.stderr.trim_end());
            Ok(TeStatus::VerificationFailed)
        }
    })
}

/// Releases a string returned by the library. Null is a no-op.
///
/// # Safety
/// `s` is null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn te_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Compares Calabi's formula with the radial formula for a named preset
/// (`"flat"`, `"fubini-study"` or `"extremal"`) at `samples` geometrically
/// spaced `s`. Writes the largest relative discrepancy, or NaN with
/// `*out_supported = false` for presets without a Kähler potential.
///
/// # Safety
/// `preset` is a NUL-terminated string; out-pointers are null or valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn te_bridge_check(
    preset: *const c_char,
    n: usize,
    samples: usize,
    out_max_rel_discrepancy: *mut f64,
    out_supported: *mut bool,
) -> TeStatus {
    guard(|| {
        if preset.is_null() {
            return Err(null("preset"));
        }
        if out_max_rel_discrepancy.is_null() {
            return Err(null("out_max_rel_discrepancy"));
        }
        if out_supported.is_null() {
            return Err(null("out_supported"));
        }
        let name = CStr::from_ptr(preset).to_str().map_err(|_| {
            (
                TeStatus::InvalidParameters,
                "preset is not UTF-8".to_string(),
            )
        })?;
        let preset: BridgePreset = name.parse().map_err(fail)?;
        if samples == 0 {
            return Err(fail(Error::InvalidParameters(
                "samples must be at least 1".into(),
            )));
        }
        match preset.potential(n) {
            None => {
                out_max_rel_discrepancy.write(f64::NAN);
                out_supported.write(false);
            }
            Some(potential) => {
                let potential = potential.map_err(fail)?;
                let s = geometric_samples(BRIDGE_S_RANGE.0, BRIDGE_S_RANGE.1, samples);
                let report = bridge_cross_check(&potential, &s).map_err(fail)?;
                out_max_rel_discrepancy.write(report.max_rel_discrepancy);
                out_supported.write(true);
            }
        }
        Ok(TeStatus::Ok)
    })
}
