#ifndef LPPL_H
#define LPPL_H

/* Generated by cbindgen from lppl-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a C API call.
 */
typedef enum {
  LPPL_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  LPPL_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  LPPL_STATUS_INVALID_UTF8 = 2,
  /**
   * File could not be read or written.
   */
  LPPL_STATUS_IO = 3,
  /**
   * Input data was malformed (CSV syntax, duplicate dates, bad prices).
   */
  LPPL_STATUS_PARSE_ERROR = 4,
  /**
   * An argument violated a documented precondition.
   */
  LPPL_STATUS_INVALID_INPUT = 5,
  /**
   * Evaluation at or beyond the critical time, or an invalid window.
   */
  LPPL_STATUS_DOMAIN_ERROR = 6,
  /**
   * The linear system was numerically rank deficient.
   */
  LPPL_STATUS_RANK_DEFICIENT = 7,
  /**
   * Every optimizer start failed to produce a finite cost.
   */
  LPPL_STATUS_SEARCH_FAILED = 8,
  /**
   * An internal panic was caught at the boundary.
   */
  LPPL_STATUS_PANIC = 9,
} LpplStatus;

/**
 * Opaque fit result handle.
 */
typedef struct LpplFitResult LpplFitResult;

/**
 * Opaque price series handle.
 */
typedef struct LpplSeries LpplSeries;

/**
 * Calibration options; obtain defaults from [`lppl_fit_options_default`].
 */
typedef struct {
  /**
   * Seed of the multistart generator.
   */
  uint64_t seed;
  /**
   * Local searches per critical-time grid point.
   */
  size_t n_starts;
  /**
   * Critical-time scan horizon past the window end, in trading days.
   */
  double tc_horizon;
  /**
   * Critical-time grid step in trading days.
   */
  double tc_step;
  /**
   * Iteration cap per local search.
   */
  size_t max_iterations;
  /**
   * Simplex location tolerance.
   */
  double x_tolerance;
  /**
   * Simplex value-spread tolerance.
   */
  double f_tolerance;
} LpplFitOptions;

/**
 * Model parameters in cartesian form.
 */
typedef struct {
  double t_c;
  double m;
  double omega;
  double a;
  double b;
  double c1;
  double c2;
} LpplParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the default calibration options.
 */
LpplFitOptions lppl_fit_options_default(void);

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *lppl_last_error_message(void);

/**
 * Loads a `date,price` CSV file into a new series handle.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be a valid
 * pointer to receive the handle. The handle must be released with
 * [`lppl_series_free`].
 */
LpplStatus lppl_series_load_csv(const char *path, LpplSeries **out);

/**
 * Builds a series from an array of prices, one observation per trading
 * day. Synthetic consecutive calendar dates are attached as metadata.
 *
 * # Safety
 * `prices` must point to `len` readable doubles; `out` must be valid.
 */
LpplStatus lppl_series_from_prices(const double *prices, size_t len, LpplSeries **out);

/**
 * Generates a synthetic series from phase-form truth parameters with
 * additive Gaussian log-price noise. The critical time is given as an
 * offset past the last generated observation.
 *
 * # Safety
 * `out` must be a valid pointer to receive the handle.
 */
LpplStatus lppl_series_synthetic(double m,
                                 double omega,
                                 double tc_offset,
                                 double a,
                                 double b,
                                 double c,
                                 double phi,
                                 size_t n_points,
                                 double noise_sigma,
                                 uint64_t seed,
                                 LpplSeries **out);

/**
 * Number of observations in a series; zero for a null handle.
 *
 * # Safety
 * `series` must be a live handle from this library or null.
 */
size_t lppl_series_len(const LpplSeries *series);

/**
 * Releases a series handle; null is ignored.
 *
 * # Safety
 * `series` must be a handle from this library, not yet freed, or null.
 */
void lppl_series_free(LpplSeries *series);

/**
 * Calibrates the model on the inclusive window `[start_index, end_index]`.
 * Pass null options for the defaults. The result handle must be released
 * with [`lppl_fit_result_free`].
 *
 * # Safety
 * `series` must be a live handle; `options` null or valid; `out` valid.
 */
LpplStatus lppl_fit(const LpplSeries *series,
                    size_t start_index,
                    size_t end_index,
                    const LpplFitOptions *options,
                    LpplFitResult **out);

/**
 * Calibrates with the legacy four-nonlinear-parameter scheme.
 *
 * # Safety
 * As [`lppl_fit`].
 */
LpplStatus lppl_legacy_fit(const LpplSeries *series,
                           size_t start_index,
                           size_t end_index,
                           const LpplFitOptions *options,
                           LpplFitResult **out);

/**
 * Copies the fitted parameters into `params`.
 *
 * # Safety
 * `fit` must be a live result handle; `params` must be valid.
 */
LpplStatus lppl_fit_result_params(const LpplFitResult *fit, LpplParams *params);

/**
 * Final sum of squared residuals; NaN for a null handle.
 *
 * # Safety
 * `fit` must be a live result handle or null.
 */
double lppl_fit_result_cost(const LpplFitResult *fit);

/**
 * Whether the fitted parameters satisfy the stylized bubble constraints.
 *
 * # Safety
 * `fit` must be a live result handle or null.
 */
bool lppl_fit_result_qualified(const LpplFitResult *fit);

/**
 * Distinct qualified local minima at the best critical time.
 *
 * # Safety
 * `fit` must be a live result handle or null.
 */
size_t lppl_fit_result_minima_count(const LpplFitResult *fit);

/**
 * Profiled-cost evaluations spent by the pipeline.
 *
 * # Safety
 * `fit` must be a live result handle or null.
 */
uint64_t lppl_fit_result_objective_evals(const LpplFitResult *fit);

/**
 * Copies up to `capacity` per-observation residuals into `buffer` and
 * returns the total residual count. Call with a null buffer and zero
 * capacity to query the size first.
 *
 * # Safety
 * `fit` must be a live result handle; `buffer` must point to `capacity`
 * writable doubles or be null when `capacity` is zero.
 */
size_t lppl_fit_result_residuals(const LpplFitResult *fit, double *buffer, size_t capacity);

/**
 * Releases a fit result handle; null is ignored.
 *
 * # Safety
 * `fit` must be a handle from this library, not yet freed, or null.
 */
void lppl_fit_result_free(LpplFitResult *fit);

/**
 * Evaluates the model at trading-day time `t`. Fails with `DomainError`
 * when `t` is not strictly before the critical time.
 *
 * # Safety
 * `params` and `out` must be valid pointers.
 */
LpplStatus lppl_eval(const LpplParams *params, double t, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LPPL_H */
