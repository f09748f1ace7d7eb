use std::f64::consts::PI;

use num_complex::Complex64;

use super::{mgf_real, mgf_saddle, moment_interval, HalfLine, DEFAULT_QUAD_TOL};
use crate::error::{domain, Error, Result};
use crate::model::{EvalContext, ModelParams};
use crate::riccati::mgf_log;

/// Damping used for calls when none is given.
pub const DEFAULT_CALL_ALPHA: f64 = 29.1;
/// Damping used for puts when none is given.
pub const DEFAULT_PUT_ALPHA: f64 = -4.4;

/// Settings for Lee's damped Fourier pricing formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingSpec {
    /// Damping exponent: positive prices the call, below -1 prices the put.
    /// `None` takes 29.1 for calls and -4.4 for puts (pulled inside the
    /// moment interval when those are not admissible).
    pub alpha: Option<f64>,
    pub truncation: Option<f64>,
    pub quad_tol: f64,
}

impl Default for DampingSpec {
    fn default() -> Self {
        DampingSpec {
            alpha: None,
            truncation: None,
            quad_tol: DEFAULT_QUAD_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Payoff {
    Call,
    Put,
}

fn check_alpha(alpha: f64, s_lo: f64, s_hi: f64) -> Result<Payoff> {
    if !alpha.is_finite() || (-1.0..=0.0).contains(&alpha) {
        return Err(domain!("damping exponent must lie outside [-1, 0], got {alpha}"));
    }
    // the moment of order alpha + 1 must be finite
    if !(alpha + 1.0 > s_lo && alpha + 1.0 < s_hi) {
        return Err(Error::Strip {
            abscissa: alpha,
            lo: s_lo - 1.0,
            hi: s_hi - 1.0,
        });
    }
    Ok(if alpha > 0.0 { Payoff::Call } else { Payoff::Put })
}

/// Largest admissible excess of the integrand's magnitude over the saddle
/// choice, in nats, before the fixed default damping is abandoned.
const CONDITIONING_SLACK: f64 = 12.0;

fn fixed_alpha(payoff: Payoff, s_lo: f64, s_hi: f64) -> f64 {
    match payoff {
        Payoff::Call if DEFAULT_CALL_ALPHA + 1.0 < s_hi => DEFAULT_CALL_ALPHA,
        Payoff::Call => 0.5 * (s_hi - 1.0),
        Payoff::Put if DEFAULT_PUT_ALPHA + 1.0 > s_lo => DEFAULT_PUT_ALPHA,
        Payoff::Put => 0.5 * (s_lo - 1.0) - 0.5,
    }
}

/// Damping at the saddle point of `e^{-alpha k} E[S^{alpha+1}]`, kept at
/// least one unit away from the excluded interval `[-1, 0]`.
fn saddle_alpha(params: &ModelParams, ctx: &EvalContext, k: f64, payoff: Payoff, s_lo: f64, s_hi: f64) -> Result<f64> {
    let z = mgf_saddle(params, ctx, k, s_lo, s_hi)?;
    Ok(match payoff {
        Payoff::Call => {
            let alpha = (z - 1.0).max(1.0);
            if alpha + 1.0 < s_hi {
                alpha
            } else {
                0.5 * (s_hi - 1.0)
            }
        }
        Payoff::Put => {
            let alpha = (z - 1.0).min(-2.0);
            if alpha + 1.0 > s_lo {
                alpha
            } else {
                0.5 * (s_lo - 1.0) - 0.5
            }
        }
    })
}

/// Log-modulus of the priced integrand at `u = 0`, prefactor included.
fn magnitude(params: &ModelParams, ctx: &EvalContext, k: f64, alpha: f64) -> Result<f64> {
    Ok(-alpha * k + mgf_real(params, ctx, alpha + 1.0)? - (alpha * (alpha + 1.0)).abs().ln())
}

/// 29.1 for calls and -4.4 for puts, unless that makes the integrand exceed
/// the saddle choice by more than `CONDITIONING_SLACK` nats (near the money
/// the fixed values cancel away all significant digits).
fn default_alpha(params: &ModelParams, ctx: &EvalContext, k: f64, payoff: Payoff, s_lo: f64, s_hi: f64) -> Result<f64> {
    let fixed = fixed_alpha(payoff, s_lo, s_hi);
    let saddle = saddle_alpha(params, ctx, k, payoff, s_lo, s_hi)?;
    if magnitude(params, ctx, k, fixed)? <= magnitude(params, ctx, k, saddle)? + CONDITIONING_SLACK {
        Ok(fixed)
    } else {
        Ok(saddle)
    }
}

fn payoff_for(k: f64) -> Payoff {
    if k >= 0.0 {
        Payoff::Call
    } else {
        Payoff::Put
    }
}

/// `(log prefactor, integral)` of Lee's formula
///
/// ```text
/// price = exp(-alpha k) E[S^{alpha+1}] / pi
///         * int_0^inf Re( e^{-iuk} E[S^{alpha+1+iu}] / E[S^{alpha+1}] / ((alpha+iu)(alpha+1+iu)) ) du
/// ```
///
/// which is the call for `alpha > 0` and the put for `alpha < -1`.
fn lee(params: &ModelParams, ctx: &EvalContext, k: f64, alpha: f64, spec: &DampingSpec) -> Result<(f64, f64)> {
    if !(spec.quad_tol > 0.0) {
        return Err(domain!("quadrature tolerance must be positive, got {}", spec.quad_tol));
    }
    let z = alpha + 1.0;
    let m0 = mgf_real(params, ctx, z)?;
    let integrand = |u: f64| -> Result<f64> {
        let m = mgf_log(params, ctx, Complex64::new(z, u))?;
        let num = Complex64::new(m.re - m0, m.im - u * k).exp();
        Ok((num / (Complex64::new(alpha, u) * Complex64::new(z, u))).re)
    };
    let envelope = |u: f64| -> Result<f64> {
        let m = mgf_log(params, ctx, Complex64::new(z, u))?;
        Ok((m.re - m0).exp() / (alpha.abs() * z.abs()).max(u * u))
    };
    let half = HalfLine {
        first_width: 2.0f64.min(PI / k.abs().max(1e-3)),
        growth: 1.3,
        quad_tol: spec.quad_tol,
        truncation: spec.truncation,
    };
    let integral = half.integrate(integrand, envelope)?;
    Ok((-alpha * k + m0 - PI.ln(), integral))
}

fn intrinsic(k: f64) -> f64 {
    (1.0 - k.exp()).max(0.0)
}

fn clamp_call(price: f64, k: f64, tol: f64) -> Result<f64> {
    let (lo, hi) = (intrinsic(k), 1.0);
    if !price.is_finite() || price < lo - tol || price > hi + tol {
        return Err(Error::Bounds { price, lo, hi });
    }
    Ok(price.clamp(lo, hi))
}

/// Undiscounted call price `E[(S_T - e^k)^+]`. Out-of-the-money strikes are
/// priced directly, in-the-money ones through the put and parity, unless
/// `spec.alpha` says otherwise.
pub fn call_price_numeric(params: &ModelParams, ctx: &EvalContext, k: f64, spec: &DampingSpec) -> Result<f64> {
    if !k.is_finite() {
        return Err(domain!("log-strike must be finite, got {k}"));
    }
    let (s_lo, s_hi) = moment_interval(params, ctx)?;
    let alpha = match spec.alpha {
        Some(a) => a,
        None => default_alpha(params, ctx, k, payoff_for(k), s_lo, s_hi)?,
    };
    let payoff = check_alpha(alpha, s_lo, s_hi)?;
    let (log_pre, integral) = lee(params, ctx, k, alpha, spec)?;
    let direct = log_pre.exp() * integral;
    let call = match payoff {
        Payoff::Call => direct,
        Payoff::Put => direct + 1.0 - k.exp(),
    };
    clamp_call(call, k, spec.quad_tol)
}

/// Undiscounted put price `E[(e^k - S_T)^+]`.
pub fn put_price_numeric(params: &ModelParams, ctx: &EvalContext, k: f64, spec: &DampingSpec) -> Result<f64> {
    if !k.is_finite() {
        return Err(domain!("log-strike must be finite, got {k}"));
    }
    let (s_lo, s_hi) = moment_interval(params, ctx)?;
    let alpha = match spec.alpha {
        Some(a) => a,
        None => default_alpha(params, ctx, k, payoff_for(k), s_lo, s_hi)?,
    };
    let payoff = check_alpha(alpha, s_lo, s_hi)?;
    let (log_pre, integral) = lee(params, ctx, k, alpha, spec)?;
    let direct = log_pre.exp() * integral;
    let put = match payoff {
        Payoff::Put => direct,
        Payoff::Call => direct - 1.0 + k.exp(),
    };
    let (lo, hi) = ((k.exp() - 1.0).max(0.0), k.exp());
    if !put.is_finite() || put < lo - spec.quad_tol || put > hi + spec.quad_tol {
        return Err(Error::Bounds { price: put, lo, hi });
    }
    Ok(put.clamp(lo, hi))
}

/// Log of the out-of-the-money option price (call for `k >= 0`, put for
/// `k < 0`), for strikes whose prices underflow. Without an explicit `alpha`
/// the damping is placed at the saddle point of the integrand, which keeps
/// the integral well conditioned far out in the wings.
pub fn otm_price_numeric_log(params: &ModelParams, ctx: &EvalContext, k: f64, spec: &DampingSpec) -> Result<f64> {
    if !k.is_finite() {
        return Err(domain!("log-strike must be finite, got {k}"));
    }
    let (s_lo, s_hi) = moment_interval(params, ctx)?;
    let want = payoff_for(k);
    let alpha = match spec.alpha {
        Some(a) => a,
        None => saddle_alpha(params, ctx, k, want, s_lo, s_hi)?,
    };
    if check_alpha(alpha, s_lo, s_hi)? != want {
        return Err(domain!(
            "damping exponent {alpha} prices the wrong option for log-strike {k}"
        ));
    }
    let (log_pre, integral) = lee(params, ctx, k, alpha, spec)?;
    if !(integral > 0.0) {
        return Err(Error::NegativeMass { value: integral });
    }
    Ok(log_pre + integral.ln())
}

/// Log of the call price; see [`otm_price_numeric_log`] for the damping.
pub fn call_price_numeric_log(params: &ModelParams, ctx: &EvalContext, k: f64, spec: &DampingSpec) -> Result<f64> {
    if k >= 0.0 {
        otm_price_numeric_log(params, ctx, k, spec)
    } else {
        Ok(call_price_numeric(params, ctx, k, spec)?.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn market() -> ModelParams {
        ModelParams::market_example()
    }

    fn one_year() -> EvalContext {
        EvalContext::new(1.0).unwrap()
    }

    fn with_alpha(alpha: f64) -> DampingSpec {
        DampingSpec {
            alpha: Some(alpha),
            ..DampingSpec::default()
        }
    }

    #[test]
    fn deep_in_the_money() {
        let c = call_price_numeric(&market(), &one_year(), -14.0, &DampingSpec::default()).unwrap();
        assert!((c - (1.0 - (-14.0f64).exp())).abs() <= 1e-9);
    }

    #[test]
    fn parity_and_damping_invariance() {
        let p = market();
        let c = one_year();
        // both fixed dampings are well conditioned here
        for k in [0.7, 0.85, 1.0] {
            let call = call_price_numeric(&p, &c, k, &with_alpha(29.1)).unwrap();
            let put = put_price_numeric(&p, &c, k, &with_alpha(-4.4)).unwrap();
            assert!((call - put - (1.0 - k.exp())).abs() < 1e-10, "k = {k}");
        }
        for k in [-1.0, -0.2, 0.0, 0.3] {
            let call = call_price_numeric(&p, &c, k, &with_alpha(2.0)).unwrap();
            let put = put_price_numeric(&p, &c, k, &with_alpha(-3.0)).unwrap();
            assert!((call - put - (1.0 - k.exp())).abs() < 1e-10, "k = {k}");
        }
        for k in [0.5, 0.7, 1.5, 2.0] {
            let a = call_price_numeric(&p, &c, k, &with_alpha(29.1)).unwrap();
            let b = call_price_numeric(&p, &c, k, &with_alpha(15.0)).unwrap();
            assert!((a - b).abs() < 1e-9, "k = {k}");
        }
    }

    #[test]
    fn out_of_the_money_prices_vanish_monotonically() {
        let p = market();
        let c = one_year();
        let mut prev = f64::INFINITY;
        for k in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let lc = call_price_numeric_log(&p, &c, k, &DampingSpec::default()).unwrap();
            assert!(lc < prev);
            prev = lc;
        }
        assert!(prev < -100.0);
    }

    #[test]
    fn log_price_agrees_with_direct_price() {
        let p = market();
        let c = one_year();
        for k in [-1.5, -0.5, 0.5, 2.0] {
            let lg = otm_price_numeric_log(&p, &c, k, &DampingSpec::default()).unwrap();
            let direct = if k >= 0.0 {
                call_price_numeric(&p, &c, k, &DampingSpec::default()).unwrap()
            } else {
                put_price_numeric(&p, &c, k, &DampingSpec::default()).unwrap()
            };
            assert!((lg.exp() / direct - 1.0).abs() < 1e-7, "k = {k}");
        }
    }

    #[test]
    fn inadmissible_damping() {
        let p = market();
        let c = one_year();
        for alpha in [-0.5, 0.0, -1.0] {
            assert!(matches!(
                call_price_numeric(&p, &c, 0.2, &with_alpha(alpha)),
                Err(Error::Domain(_))
            ));
        }
        for alpha in [40.0, -12.0] {
            assert!(matches!(
                call_price_numeric(&p, &c, 0.2, &with_alpha(alpha)),
                Err(Error::Strip { .. })
            ));
        }
    }
}
