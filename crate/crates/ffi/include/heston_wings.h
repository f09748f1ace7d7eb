#ifndef HESTON_WINGS_H
#define HESTON_WINGS_H

/* Generated by cbindgen from the heston-wings-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum HwStatus {
  HW_STATUS_OK = 0,
  HW_STATUS_DOMAIN_ERROR = 1,
  HW_STATUS_EXPLODED_ERROR = 2,
  HW_STATUS_BRANCH_ERROR = 3,
  HW_STATUS_TOLERANCE_ERROR = 4,
  HW_STATUS_NO_EXPLOSION_ERROR = 5,
  HW_STATUS_CONVERGENCE_ERROR = 6,
  HW_STATUS_STRIP_ERROR = 7,
  HW_STATUS_NEGATIVE_MASS_ERROR = 8,
  HW_STATUS_ARBITRAGE_ERROR = 9,
  HW_STATUS_BOUNDS_ERROR = 10,
  HW_STATUS_NULL_POINTER = 11,
  HW_STATUS_PANIC = 12,
} HwStatus;

typedef enum HwSide {
  HW_SIDE_UPPER = 0,
  HW_SIDE_LOWER = 1,
} HwSide;

/**
 * Opaque model handle: coefficients plus maturity.
 */
typedef struct HwModel HwModel;

typedef struct HwCriticalPoint {
  double s_crit;
  double sigma;
  double kappa;
  double dtstar_ds;
} HwCriticalPoint;

/**
 * `D(x) ~ c1 x^{-/+c3} exp(c2 sqrt|log x|) |log x|^power_exp`.
 */
typedef struct HwTailConstants {
  double c1;
  double c2;
  double c3;
  double beta;
  double gamma_const;
  double power_exp;
} HwTailConstants;

/**
 * `sigma sqrt(T) ~ c_sqrt |k|^{1/2} + c_const + c_log log|k| / |k|^{1/2}`.
 */
typedef struct HwSmileCoeffs {
  double c_sqrt;
  double c_const;
  double c_log;
} HwSmileCoeffs;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a model from `(a, b, c, rho, v0)` and a maturity.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum HwStatus hw_model_new(double a,
                           double b,
                           double c,
                           double rho,
                           double v0,
                           double maturity,
                           struct HwModel **out);

/**
 * Creates a model from `(vbar, lambda, c, rho, v0)`: `a = vbar lambda`, `b = -lambda`.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum HwStatus hw_model_from_mean_reversion(double vbar,
                                           double lambda,
                                           double c,
                                           double rho,
                                           double v0,
                                           double maturity,
                                           struct HwModel **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void hw_model_free(struct HwModel *model);

/**
 * Explosion time of the moment of order `s` (`+inf` if it never explodes).
 *
 * # Safety
 * `model` must be null or live; `out` null or writable.
 */
enum HwStatus hw_explosion_time(const struct HwModel *model, double s, double *out);

/**
 * # Safety
 * `model` must be null or live; `out` null or writable.
 */
enum HwStatus hw_critical_point(const struct HwModel *model,
                                enum HwSide side,
                                struct HwCriticalPoint *out);

/**
 * # Safety
 * `model` must be null or live; `out` null or writable.
 */
enum HwStatus hw_tail_constants(const struct HwModel *model,
                                enum HwSide side,
                                struct HwTailConstants *out);

/**
 * # Safety
 * `model` must be null or live; `out` null or writable.
 */
enum HwStatus hw_smile_coeffs(const struct HwModel *model,
                              enum HwSide side,
                              struct HwSmileCoeffs *out);

/**
 * `log D_T(x)` at `log x = log_x` by Mellin inversion along the saddle contour.
 *
 * # Safety
 * `model` must be null or live; `out` null or writable.
 */
enum HwStatus hw_density_log(const struct HwModel *model,
                             double log_x,
                             double quad_tol,
                             double *out);

/**
 * Undiscounted call on a unit forward with strike `e^k`, default damping.
 *
 * # Safety
 * `model` must be null or live; `out` null or writable.
 */
enum HwStatus hw_call_price(const struct HwModel *model, double k, double quad_tol, double *out);

/**
 * Black-Scholes implied volatility of the model at log-strike `k`.
 *
 * # Safety
 * `model` must be null or live; `out` null or writable.
 */
enum HwStatus hw_model_implied_vol(const struct HwModel *model,
                                   double k,
                                   double quad_tol,
                                   double *out);

/**
 * Black-Scholes implied volatility of an undiscounted call price.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum HwStatus hw_implied_vol(double call_price, double k, double maturity, double *out);

/**
 * Undiscounted Black-Scholes call on a unit forward.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum HwStatus hw_bs_call(double k, double vol, double maturity, double *out);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *hw_last_error_message(void);

/**
 * Stable name of a status code, e.g. `"DomainError"`. Static storage.
 */
const char *hw_status_name(enum HwStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HESTON_WINGS_H */
