//! C ABI for the calibration engine.
//!
//! Series and fit results are opaque handles created and released through
//! paired constructor/free functions. Every fallible call returns an
//! [`LpplStatus`]; on failure a thread-local message with details is
//! available from [`lppl_last_error_message`]. The generated header lives
//! in `include/lppl.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lppl::calibrate::{self, CalibConfig, FitWindow};
use lppl::data::{self, SynthSpec};
use lppl::error::Error;
use lppl::model::{self, PhaseParams};

/// Outcome of a C API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpplStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// File could not be read or written.
    Io = 3,
    /// Input data was malformed (CSV syntax, duplicate dates, bad prices).
    ParseError = 4,
    /// An argument violated a documented precondition.
    InvalidInput = 5,
    /// Evaluation at or beyond the critical time, or an invalid window.
    DomainError = 6,
    /// The linear system was numerically rank deficient.
    RankDeficient = 7,
    /// Every optimizer start failed to produce a finite cost.
    SearchFailed = 8,
    /// An internal panic was caught at the boundary.
    Panic = 9,
}

/// Opaque price series handle.
pub struct LpplSeries(data::PriceSeries);

/// Opaque fit result handle.
pub struct LpplFitResult(calibrate::FitResult);

/// Model parameters in cartesian form.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LpplParams {
    pub t_c: f64,
    pub m: f64,
    pub omega: f64,
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Calibration options; obtain defaults from [`lppl_fit_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LpplFitOptions {
    /// Seed of the multistart generator.
    pub seed: u64,
    /// Local searches per critical-time grid point.
    pub n_starts: usize,
    /// Critical-time scan horizon past the window end, in trading days.
    pub tc_horizon: f64,
    /// Critical-time grid step in trading days.
    pub tc_step: f64,
    /// Iteration cap per local search.
    pub max_iterations: usize,
    /// Simplex location tolerance.
    pub x_tolerance: f64,
    /// Simplex value-spread tolerance.
    pub f_tolerance: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> LpplStatus {
    match err {
        Error::Io(_) => LpplStatus::Io,
        Error::Parse { .. } | Error::DuplicateDate(_) | Error::NonPositivePrice { .. } => {
            LpplStatus::ParseError
        }
        Error::InvalidParameter(_) | Error::InvalidConfig(_) => LpplStatus::InvalidInput,
        Error::BeyondCriticalTime { .. }
        | Error::EmptyWindow(_)
        | Error::InvalidWindow(_)
        | Error::NonFinite(_) => LpplStatus::DomainError,
        Error::RankDeficient { .. } => LpplStatus::RankDeficient,
        Error::AllStartsFailed => LpplStatus::SearchFailed,
    }
}

fn fail(err: &Error) -> LpplStatus {
    set_last_error(&err.to_string());
    status_of(err)
}

fn guarded(body: impl FnOnce() -> LpplStatus) -> LpplStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic caught at the C boundary");
            LpplStatus::Panic
        }
    }
}

fn config_from(options: Option<&LpplFitOptions>) -> CalibConfig {
    let mut config = match options {
        Some(o) => {
            let mut c = CalibConfig::new(o.seed);
            c.optimizer.n_starts = o.n_starts;
            c.optimizer.max_iterations = o.max_iterations;
            c.optimizer.x_tolerance = o.x_tolerance;
            c.optimizer.f_tolerance = o.f_tolerance;
            c.tc_horizon = o.tc_horizon;
            c.tc_step = o.tc_step;
            c
        }
        None => CalibConfig::new(42),
    };
    if config.optimizer.n_starts == 0 {
        config.optimizer.n_starts = 1;
    }
    config
}

/// Returns the default calibration options.
#[no_mangle]
pub extern "C" fn lppl_fit_options_default() -> LpplFitOptions {
    let config = CalibConfig::new(42);
    LpplFitOptions {
        seed: 42,
        n_starts: config.optimizer.n_starts,
        tc_horizon: config.tc_horizon,
        tc_step: config.tc_step,
        max_iterations: config.optimizer.max_iterations,
        x_tolerance: config.optimizer.x_tolerance,
        f_tolerance: config.optimizer.f_tolerance,
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lppl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Loads a `date,price` CSV file into a new series handle.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer to receive the handle. The handle must be released with
/// [`lppl_series_free`].
#[no_mangle]
pub unsafe extern "C" fn lppl_series_load_csv(
    path: *const c_char,
    out: *mut *mut LpplSeries,
) -> LpplStatus {
    guarded(|| {
        if path.is_null() || out.is_null() {
            set_last_error("null argument");
            return LpplStatus::NullArgument;
        }
        let path = match unsafe { CStr::from_ptr(path) }.to_str() {
            Ok(p) => p,
            Err(_) => {
                set_last_error("path is not valid UTF-8");
                return LpplStatus::InvalidUtf8;
            }
        };
        match data::load_csv(path) {
            Ok(series) => {
                unsafe { *out = Box::into_raw(Box::new(LpplSeries(series))) };
                LpplStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Builds a series from an array of prices, one observation per trading
/// day. Synthetic consecutive calendar dates are attached as metadata.
///
/// # Safety
/// `prices` must point to `len` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lppl_series_from_prices(
    prices: *const f64,
    len: usize,
    out: *mut *mut LpplSeries,
) -> LpplStatus {
    guarded(|| {
        if prices.is_null() || out.is_null() {
            set_last_error("null argument");
            return LpplStatus::NullArgument;
        }
        let values = unsafe { std::slice::from_raw_parts(prices, len) };
        match data::PriceSeries::from_daily_prices(values.to_vec()) {
            Ok(series) => {
                unsafe { *out = Box::into_raw(Box::new(LpplSeries(series))) };
                LpplStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Generates a synthetic series from phase-form truth parameters with
/// additive Gaussian log-price noise. The critical time is given as an
/// offset past the last generated observation.
///
/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn lppl_series_synthetic(
    m: f64,
    omega: f64,
    tc_offset: f64,
    a: f64,
    b: f64,
    c: f64,
    phi: f64,
    n_points: usize,
    noise_sigma: f64,
    seed: u64,
    out: *mut *mut LpplSeries,
) -> LpplStatus {
    guarded(|| {
        if out.is_null() {
            set_last_error("null argument");
            return LpplStatus::NullArgument;
        }
        if n_points < 2 {
            set_last_error("n_points must be at least 2");
            return LpplStatus::InvalidInput;
        }
        let params = PhaseParams::new((n_points - 1) as f64 + tc_offset, m, omega, a, b, c, phi);
        let spec = SynthSpec { params, n_points, noise_sigma, rng_seed: seed };
        match data::synth_generate(&spec) {
            Ok(series) => {
                unsafe { *out = Box::into_raw(Box::new(LpplSeries(series))) };
                LpplStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Number of observations in a series; zero for a null handle.
///
/// # Safety
/// `series` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn lppl_series_len(series: *const LpplSeries) -> usize {
    if series.is_null() {
        return 0;
    }
    unsafe { &*series }.0.len()
}

/// Releases a series handle; null is ignored.
///
/// # Safety
/// `series` must be a handle from this library, not yet freed, or null.
#[no_mangle]
pub unsafe extern "C" fn lppl_series_free(series: *mut LpplSeries) {
    if !series.is_null() {
        drop(unsafe { Box::from_raw(series) });
    }
}

unsafe fn run_fit(
    series: *const LpplSeries,
    start_index: usize,
    end_index: usize,
    options: *const LpplFitOptions,
    out: *mut *mut LpplFitResult,
    legacy: bool,
) -> LpplStatus {
    if series.is_null() || out.is_null() {
        set_last_error("null argument");
        return LpplStatus::NullArgument;
    }
    let series = unsafe { &*series };
    let options = if options.is_null() { None } else { Some(unsafe { &*options }) };
    let config = config_from(options);
    let window = FitWindow::new(start_index, end_index);
    let result = if legacy {
        calibrate::legacy_fit(&series.0, window, &config)
    } else {
        calibrate::fit(&series.0, window, &config)
    };
    match result {
        Ok(fit) => {
            unsafe { *out = Box::into_raw(Box::new(LpplFitResult(fit))) };
            LpplStatus::Ok
        }
        Err(err) => fail(&err),
    }
}

/// Calibrates the model on the inclusive window `[start_index, end_index]`.
/// Pass null options for the defaults. The result handle must be released
/// with [`lppl_fit_result_free`].
///
/// # Safety
/// `series` must be a live handle; `options` null or valid; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lppl_fit(
    series: *const LpplSeries,
    start_index: usize,
    end_index: usize,
    options: *const LpplFitOptions,
    out: *mut *mut LpplFitResult,
) -> LpplStatus {
    guarded(|| unsafe { run_fit(series, start_index, end_index, options, out, false) })
}

/// Calibrates with the legacy four-nonlinear-parameter scheme.
///
/// # Safety
/// As [`lppl_fit`].
#[no_mangle]
pub unsafe extern "C" fn lppl_legacy_fit(
    series: *const LpplSeries,
    start_index: usize,
    end_index: usize,
    options: *const LpplFitOptions,
    out: *mut *mut LpplFitResult,
) -> LpplStatus {
    guarded(|| unsafe { run_fit(series, start_index, end_index, options, out, true) })
}

/// Copies the fitted parameters into `params`.
///
/// # Safety
/// `fit` must be a live result handle; `params` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lppl_fit_result_params(
    fit: *const LpplFitResult,
    params: *mut LpplParams,
) -> LpplStatus {
    if fit.is_null() || params.is_null() {
        set_last_error("null argument");
        return LpplStatus::NullArgument;
    }
    let p = unsafe { &*fit }.0.params;
    unsafe {
        *params = LpplParams {
            t_c: p.t_c,
            m: p.m,
            omega: p.omega,
            a: p.a,
            b: p.b,
            c1: p.c1,
            c2: p.c2,
        };
    }
    LpplStatus::Ok
}

/// Final sum of squared residuals; NaN for a null handle.
///
/// # Safety
/// `fit` must be a live result handle or null.
#[no_mangle]
pub unsafe extern "C" fn lppl_fit_result_cost(fit: *const LpplFitResult) -> f64 {
    if fit.is_null() {
        return f64::NAN;
    }
    unsafe { &*fit }.0.cost
}

/// Whether the fitted parameters satisfy the stylized bubble constraints.
///
/// # Safety
/// `fit` must be a live result handle or null.
#[no_mangle]
pub unsafe extern "C" fn lppl_fit_result_qualified(fit: *const LpplFitResult) -> bool {
    if fit.is_null() {
        return false;
    }
    unsafe { &*fit }.0.qualification.qualified
}

/// Distinct qualified local minima at the best critical time.
///
/// # Safety
/// `fit` must be a live result handle or null.
#[no_mangle]
pub unsafe extern "C" fn lppl_fit_result_minima_count(fit: *const LpplFitResult) -> usize {
    if fit.is_null() {
        return 0;
    }
    unsafe { &*fit }.0.minima_count
}

/// Profiled-cost evaluations spent by the pipeline.
///
/// # Safety
/// `fit` must be a live result handle or null.
#[no_mangle]
pub unsafe extern "C" fn lppl_fit_result_objective_evals(fit: *const LpplFitResult) -> u64 {
    if fit.is_null() {
        return 0;
    }
    unsafe { &*fit }.0.n_objective_evals
}

/// Copies up to `capacity` per-observation residuals into `buffer` and
/// returns the total residual count. Call with a null buffer and zero
/// capacity to query the size first.
///
/// # Safety
/// `fit` must be a live result handle; `buffer` must point to `capacity`
/// writable doubles or be null when `capacity` is zero.
#[no_mangle]
pub unsafe extern "C" fn lppl_fit_result_residuals(
    fit: *const LpplFitResult,
    buffer: *mut f64,
    capacity: usize,
) -> usize {
    if fit.is_null() {
        return 0;
    }
    let residuals = &unsafe { &*fit }.0.diagnostics;
    if !buffer.is_null() {
        let n = residuals.len().min(capacity);
        unsafe { std::ptr::copy_nonoverlapping(residuals.as_ptr(), buffer, n) };
    }
    residuals.len()
}

/// Releases a fit result handle; null is ignored.
///
/// # Safety
/// `fit` must be a handle from this library, not yet freed, or null.
#[no_mangle]
pub unsafe extern "C" fn lppl_fit_result_free(fit: *mut LpplFitResult) {
    if !fit.is_null() {
        drop(unsafe { Box::from_raw(fit) });
    }
}

/// Evaluates the model at trading-day time `t`. Fails with `DomainError`
/// when `t` is not strictly before the critical time.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lppl_eval(
    params: *const LpplParams,
    t: f64,
    out: *mut f64,
) -> LpplStatus {
    guarded(|| {
        if params.is_null() || out.is_null() {
            set_last_error("null argument");
            return LpplStatus::NullArgument;
        }
        let p = unsafe { &*params };
        let core = model::LpplParams {
            t_c: p.t_c,
            m: p.m,
            omega: p.omega,
            a: p.a,
            b: p.b,
            c1: p.c1,
            c2: p.c2,
        };
        match model::eval_lppl(&core, t) {
            Ok(value) => {
                unsafe { *out = value };
                LpplStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}
