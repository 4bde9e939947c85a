#ifndef TORIC_EXTREMAL_H
#define TORIC_EXTREMAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TeStatus {
  TE_STATUS_OK = 0,
  TE_STATUS_NULL_POINTER = 1,
  TE_STATUS_INVALID_PARAMETERS = 2,
  TE_STATUS_DOMAIN_VIOLATION = 3,
  TE_STATUS_POLE = 4,
  TE_STATUS_DEGENERATE_METRIC = 5,
  TE_STATUS_SINGULAR_SYSTEM = 6,
  TE_STATUS_NUMERICAL_FAILURE = 7,
  /**
   * The computation ran but a check failed; outputs are still written.
   */
  TE_STATUS_VERIFICATION_FAILED = 8,
  TE_STATUS_PANIC = 9,
} TeStatus;

/**
 * Opaque extremal metric.
 */
typedef struct TeMetric TeMetric;

/**
 * Coefficients of `S(t) = A t + B` and of `α`.
 */
typedef struct TeCoefficients {
  size_t n;
  double a;
  double b;
  double p;
  double slope;
  double intercept;
  double linear;
  double constant;
} TeCoefficients;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last non-`Ok` status on this thread. Empty after a
 * success. Valid until the next call into the library on the same thread.
 */
const char *te_last_error_message(void);

/**
 * Static, NUL-terminated name of a status.
 */
const char *te_status_name(enum TeStatus status);

/**
 * Solves the boundary system for `(A, B, C, D)`.
 *
 * # Safety
 * `out` is null or valid for writes.
 */
enum TeStatus te_solve_coefficients(size_t n, double a, double b, struct TeCoefficients *out);

/**
 * `(A, B, C, D)` from the closed-form expressions.
 *
 * # Safety
 * `out` is null or valid for writes.
 */
enum TeStatus te_closed_form_coefficients(size_t n, double a, double b, struct TeCoefficients *out);

/**
 * Builds the extremal metric for `(n, a, b)`. On success `*out` owns a new
 * handle.
 *
 * # Safety
 * `out` is null or valid for writes.
 */
enum TeStatus te_metric_new(size_t n, double a, double b, struct TeMetric **out);

/**
 * Releases a handle from [`te_metric_new`]. Null is a no-op.
 *
 * # Safety
 * `metric` is null or a handle not yet freed.
 */
void te_metric_free(struct TeMetric *metric);

/**
 * # Safety
 * `metric` is a live handle; `out` is null or valid for writes.
 */
enum TeStatus te_metric_coefficients(const struct TeMetric *metric, struct TeCoefficients *out);

/**
 * `F''(t)` for `a < t < b`; `Pole` at the endpoints.
 *
 * # Safety
 * `metric` is a live handle; `out` is null or valid for writes.
 */
enum TeStatus te_metric_f_second(const struct TeMetric *metric, double t, double *out);

/**
 * `h''(t)`, the smooth part of the potential, for `a < t < b`.
 *
 * # Safety
 * `metric` is a live handle; `out` is null or valid for writes.
 */
enum TeStatus te_metric_h_second(const struct TeMetric *metric, double t, double *out);

/**
 * Scalar curvature at `t` from the radial formula.
 *
 * # Safety
 * `metric` is a live handle; `out` is null or valid for writes.
 */
enum TeStatus te_metric_radial_curvature(const struct TeMetric *metric, double t, double *out);

/**
 * Scalar curvature at the point `x[0..len]` from the general toric formula.
 * `step <= 0` selects the default finite-difference step.
 *
 * # Safety
 * `metric` is a live handle; `x` is valid for `len` reads; `out` is null or
 * valid for writes.
 */
enum TeStatus te_metric_abreu_curvature(const struct TeMetric *metric,
                                        const double *x,
                                        size_t len,
                                        double step,
                                        double *out);

/**
 * Runs the verification battery and returns its JSON report in `*out_json`,
 * identical to the `verify` command's output with default tolerances.
 * Returns `VerificationFailed` (with the report written) when a required
 * check fails.
 *
 * # Safety
 * `out_json` is null or valid for writes.
 */
enum TeStatus te_verify_json(size_t n,
                             double a,
                             double b,
                             size_t points,
                             uint64_t seed,
                             char **out_json);

/**
 * Releases a string returned by the library. Null is a no-op.
 *
 * # Safety
 * `s` is null or a string from this library not yet freed.
 */
void te_string_free(char *s);

/**
 * Compares Calabi's formula with the radial formula for a named preset
 * (`"flat"`, `"fubini-study"` or `"extremal"`) at `samples` geometrically
 * spaced `s`. Writes the largest relative discrepancy, or NaN with
 * `*out_supported = false` for presets without a Kähler potential.
 *
 * # Safety
 * `preset` is a NUL-terminated string; out-pointers are null or valid for
 * writes.
 */
enum TeStatus te_bridge_check(const char *preset,
                              size_t n,
                              size_t samples,
                              double *out_max_rel_discrepancy,
                              bool *out_supported);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORIC_EXTREMAL_H */
