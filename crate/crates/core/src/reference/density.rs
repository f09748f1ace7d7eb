use std::f64::consts::PI;

use num_complex::Complex64;

use super::{mgf_curvature, mgf_real, mgf_saddle, moment_interval, HalfLine, DEFAULT_QUAD_TOL};
use crate::error::{domain, Error, Result};
use crate::model::{EvalContext, ModelParams};
use crate::riccati::mgf_log;

/// Vertical contour for the Mellin inversion of the density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    /// Real part `u` of the contour, in the Mellin variable: the integrand
    /// is `x^{-u} E[S_T^{u-1}]`, so `u` must lie in `(s_- + 1, s_+ + 1)`.
    /// `None` picks the saddle point for the requested `log x`.
    pub abscissa: Option<f64>,
    /// Upper limit of the imaginary part. `None` extends the contour until
    /// the integrand's modulus has decayed below the tolerance.
    pub truncation: Option<f64>,
    pub quad_tol: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec {
            abscissa: None,
            truncation: None,
            quad_tol: DEFAULT_QUAD_TOL,
        }
    }
}

/// `log D_T(x)` for `log x = log_x`, from
///
/// ```text
/// D_T(x) = x^{-u} E[S_T^{u-1}] / pi * int_0^inf Re( x^{-iy} E[S_T^{u-1+iy}] / E[S_T^{u-1}] ) dy
/// ```
pub fn density_numeric_log(params: &ModelParams, ctx: &EvalContext, log_x: f64, spec: &ContourSpec) -> Result<f64> {
    if !log_x.is_finite() {
        return Err(domain!("log x must be finite, got {log_x}"));
    }
    if !(spec.quad_tol > 0.0) {
        return Err(domain!("quadrature tolerance must be positive, got {}", spec.quad_tol));
    }
    if let Some(t) = spec.truncation {
        if !(t > 0.0) {
            return Err(domain!("truncation must be positive, got {t}"));
        }
    }
    let (s_lo, s_hi) = moment_interval(params, ctx)?;
    // z = u - 1 is the moment order
    let z = match spec.abscissa {
        Some(u) => {
            if !(u - 1.0 > s_lo && u - 1.0 < s_hi) {
                return Err(Error::Strip {
                    abscissa: u,
                    lo: s_lo + 1.0,
                    hi: s_hi + 1.0,
                });
            }
            u - 1.0
        }
        None => mgf_saddle(params, ctx, log_x, s_lo, s_hi)?,
    };
    let m0 = mgf_real(params, ctx, z)?;
    let curvature = mgf_curvature(params, ctx, z)?;
    // width of the Gaussian bump around the saddle
    let width = if curvature > 0.0 { (1.0 / curvature).sqrt() } else { 1.0 };
    let first_width = width.min(std::f64::consts::TAU / log_x.abs().max(1e-3));

    let integrand = |y: f64| -> Result<f64> {
        let m = mgf_log(params, ctx, Complex64::new(z, y))?;
        Ok((Complex64::new(m.re - m0, m.im - y * log_x)).exp().re)
    };
    let envelope = |y: f64| -> Result<f64> { Ok((mgf_log(params, ctx, Complex64::new(z, y))?.re - m0).exp()) };
    let half = HalfLine {
        first_width,
        growth: 1.5,
        quad_tol: spec.quad_tol,
        truncation: spec.truncation,
    };
    let total = half.integrate(integrand, envelope)?;
    if !(total > 0.0) {
        return Err(Error::NegativeMass { value: total });
    }
    Ok(-(z + 1.0) * log_x + m0 + (total / PI).ln())
}
