//! Numerical reference engine: density by Mellin inversion, prices by Lee's
//! damped Fourier formula, Black-Scholes and implied volatility. Nothing here
//! uses the asymptotic results, so it can be used to check them.

mod black_scholes;
mod density;
mod pricing;

pub use black_scholes::{bs_call, bs_otm, bs_otm_log, bs_put, implied_vol, implied_vol_otm, norm_cdf};
pub use density::{density_numeric_log, ContourSpec};
pub use pricing::{call_price_numeric, call_price_numeric_log, otm_price_numeric_log, put_price_numeric, DampingSpec};

use num_complex::Complex64;

use crate::criticality::critical_point;
use crate::error::{Error, Result, Side};
use crate::model::{EvalContext, ModelParams};
use crate::numerics::{brent, integrate, QuadOptions};
use crate::riccati::mgf_log;

/// Default quadrature tolerance of the reference engine.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Open interval `(s_-, s_+)` of real orders `z` with `E[S_T^z] < inf`;
/// an infinite end means no explosion on that side.
pub fn moment_interval(params: &ModelParams, ctx: &EvalContext) -> Result<(f64, f64)> {
    let end = |side| match critical_point(params, ctx, side) {
        Ok(cp) => Ok(cp.s_crit),
        Err(Error::NoExplosion(_)) => Ok(match side {
            Side::Upper => f64::INFINITY,
            Side::Lower => f64::NEG_INFINITY,
        }),
        Err(e) => Err(e),
    };
    Ok((end(Side::Lower)?, end(Side::Upper)?))
}

/// Real `log E[S_T^z]`.
pub(crate) fn mgf_real(params: &ModelParams, ctx: &EvalContext, z: f64) -> Result<f64> {
    Ok(mgf_log(params, ctx, Complex64::new(z, 0.0))?.re)
}

/// `d/dz log E[S_T^z]` by central differences.
fn mgf_slope(params: &ModelParams, ctx: &EvalContext, z: f64) -> Result<f64> {
    let h = 1e-6 * z.abs().max(1.0);
    Ok((mgf_real(params, ctx, z + h)? - mgf_real(params, ctx, z - h)?) / (2.0 * h))
}

/// Second derivative of `log E[S_T^z]` by central differences.
fn mgf_curvature(params: &ModelParams, ctx: &EvalContext, z: f64) -> Result<f64> {
    let h = 1e-4 * z.abs().max(1.0);
    let f0 = mgf_real(params, ctx, z)?;
    Ok((mgf_real(params, ctx, z + h)? - 2.0 * f0 + mgf_real(params, ctx, z - h)?) / (h * h))
}

/// Solves `d/dz log E[S_T^z] = target` inside `(lo, hi)`, the saddle point of
/// the inversion integrands. Infinite ends are replaced by a doubling search.
/// Returns the nearest admissible end when the target is out of reach.
fn mgf_saddle(params: &ModelParams, ctx: &EvalContext, target: f64, lo: f64, hi: f64) -> Result<f64> {
    let g = |z: f64| mgf_slope(params, ctx, z).map(|d| d - target);
    let shrink = |x: f64, toward: f64| x + 1e-4 * (toward - x).signum() * (toward - x).abs().min(1.0);
    let finite_end = |end: f64, other: f64, dir: f64| -> Result<f64> {
        if end.is_finite() {
            return Ok(shrink(end, other));
        }
        let mut width = 1.0;
        let mut z = other + dir * width;
        for _ in 0..12 {
            if (g(z)? * dir) > 0.0 {
                break;
            }
            width *= 2.0;
            z = other + dir * width;
        }
        Ok(z)
    };
    let mid = if lo.is_finite() && hi.is_finite() {
        0.5 * (lo + hi)
    } else if lo.is_finite() {
        lo + 1.0
    } else if hi.is_finite() {
        hi - 1.0
    } else {
        0.5
    };
    let a = finite_end(lo, mid, -1.0)?;
    let b = finite_end(hi, mid, 1.0)?;
    let (ga, gb) = (g(a)?, g(b)?);
    if ga >= 0.0 {
        return Ok(a);
    }
    if gb <= 0.0 {
        return Ok(b);
    }
    let mut failure = None;
    let root = brent(
        |z| match g(z) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        1e-12 * (1.0 + target.abs().sqrt()),
        200,
    );
    match failure {
        Some(e) => Err(e),
        None => root,
    }
}

/// Integration of `f` over `[0, inf)` in panels of geometrically growing width.
///
/// Without an explicit truncation, stops once the decay envelope at the end
/// of two consecutive panels, times the panel width, falls below a tenth of
/// the tolerance on the running total.
struct HalfLine {
    first_width: f64,
    growth: f64,
    quad_tol: f64,
    truncation: Option<f64>,
}

impl HalfLine {
    const MAX_PANELS: usize = 600;

    fn integrate<F, G>(&self, mut f: F, envelope: G) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
        G: Fn(f64) -> Result<f64>,
    {
        // absolute tolerances are relative to the first panel's magnitude
        let scale = f(0.0)?.abs() * self.first_width;
        let mut total = 0.0f64;
        let mut start = 0.0;
        let mut width = self.first_width;
        let mut quiet = 0;
        let mut failure = None;
        for _ in 0..Self::MAX_PANELS {
            let mut end = start + width;
            if let Some(trunc) = self.truncation {
                end = end.min(trunc);
            }
            let abs_tol = 0.01 * self.quad_tol * total.abs().max(scale);
            let est = integrate(
                |y| match f(y) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                },
                start,
                end,
                QuadOptions::new(abs_tol, 0.01 * self.quad_tol),
            );
            if let Some(e) = failure.take() {
                return Err(e);
            }
            total += est?.value;
            match self.truncation {
                Some(trunc) if end >= trunc => return Ok(total),
                Some(_) => {}
                None => {
                    let tail = envelope(end)? * width;
                    if tail < 0.1 * self.quad_tol * total.abs() {
                        quiet += 1;
                        if quiet >= 2 {
                            return Ok(total);
                        }
                    } else {
                        quiet = 0;
                    }
                }
            }
            start = end;
            width *= self.growth;
        }
        Err(Error::Tolerance(format!(
            "integrand has not decayed after {} panels (reached {start})",
            Self::MAX_PANELS
        )))
    }
}
