//! Moment explosion: explosion times `T*(s)`, critical moments and the
//! critical slope/curvature on both tails.

use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, Error, Result, Side};
use crate::model::{EvalContext, ModelParams};
use crate::numerics::{brent, integrate, QuadOptions};

/// One tail's critical moment together with the derivatives of `T*` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub side: Side,
    /// `s_+ > 1` on the upper side, `s_- < 0` on the lower side.
    pub s_crit: f64,
    /// Critical slope `|dT*/ds|` at `s_crit`.
    pub sigma: f64,
    /// Critical curvature `d^2 T*/ds^2` at `s_crit`.
    pub kappa: f64,
    /// Signed `dT*/ds` at `s_crit` (negative on the upper side, positive on
    /// the lower side).
    pub dtstar_ds: f64,
}

/// Explosion time of the moment of order `s`; `+inf` when `Delta(s) >= 0`.
///
/// Uses `2 / sqrt(-Delta) * atan2(sqrt(-Delta), chi)`, which equals
/// `2 / sqrt(-Delta) * (arctan(sqrt(-Delta) / chi) + pi [chi < 0])`.
pub fn explosion_time(params: &ModelParams, s: f64) -> f64 {
    let delta = params.delta(s);
    if delta >= 0.0 {
        return f64::INFINITY;
    }
    let q = (-delta).sqrt();
    2.0 / q * q.atan2(params.chi(s))
}

/// `1 / T*(s)`, continuous through the boundary of the explosive region.
fn inverse_explosion_time(params: &ModelParams, s: f64) -> f64 {
    let delta = params.delta(s);
    if delta >= 0.0 {
        return 0.0;
    }
    let q = (-delta).sqrt();
    0.5 * q / q.atan2(params.chi(s))
}

/// Explosion time by direct quadrature of `int_0^inf d eta / R(s, eta)`.
///
/// With `eta = k tan(theta)`, `k = sqrt(s^2 - s) / c`, the integrand becomes
/// `2k / ((s^2 - s) + chi k sin(2 theta))` on `[0, pi/2]`.
pub fn explosion_time_oracle(params: &ModelParams, s: f64, tol: f64) -> Result<f64> {
    if params.delta(s) >= 0.0 {
        return Ok(f64::INFINITY);
    }
    let m = s * s - s;
    let k = m.sqrt() / params.c();
    let chi = params.chi(s);
    let est = integrate(
        |theta| 2.0 * k / (m + chi * k * (2.0 * theta).sin()),
        0.0,
        FRAC_PI_2,
        QuadOptions::new(0.0, tol),
    )?;
    Ok(est.value)
}

/// `dT*/ds` in closed form. Requires `Delta(s) < 0`.
pub fn explosion_time_derivative(params: &ModelParams, s: f64) -> Result<f64> {
    let delta = params.delta(s);
    if delta >= 0.0 {
        return Err(domain!("dT*/ds needs Delta(s) < 0; Delta({s}) = {delta}"));
    }
    let (rho, c) = (params.rho(), params.c());
    let chi = params.chi(s);
    let tstar = explosion_time(params, s);
    let w = c * c * (2.0 * s - 1.0) - 2.0 * rho * c * chi;
    Ok(tstar * w / (2.0 * delta) - (w * chi + 2.0 * rho * c * delta) / (delta * (chi * chi - delta)))
}

/// Critical slope as the explicit fraction `R1 / R2`, valid where
/// `T*(s) = T`. Returns `-dT*/ds` (so positive on the upper side).
pub fn critical_slope_closed(params: &ModelParams, ctx: &EvalContext, s: f64) -> f64 {
    let (rho, c) = (params.rho(), params.c());
    let t = ctx.maturity();
    let chi = params.chi(s);
    let c2 = c * c;
    let m = s * (s - 1.0);
    let w = c2 * (2.0 * s - 1.0) - 2.0 * rho * c * chi;
    let r1 = t * c2 * m * w - 2.0 * chi * w + 4.0 * rho * c * (c2 * m - chi * chi);
    let r2 = 2.0 * c2 * m * (c2 * m - chi * chi);
    r1 / r2
}

/// Boundary of the explosive region on the given side: the root of
/// `Delta(s) = 0` with `s >= 1` (upper) or `s <= 0` (lower). `None` when no
/// moment of that side ever explodes.
pub fn explosion_boundary(params: &ModelParams, side: Side) -> Option<f64> {
    let (rho, b, c) = (params.rho(), params.b(), params.c());
    let qa = -c * c * (1.0 - rho * rho);
    let qb = 2.0 * rho * b * c + c * c;
    let qc = b * b;
    if qa == 0.0 {
        // rho = -1: Delta is linear with positive slope
        return match side {
            Side::Upper => None,
            Side::Lower => Some(-qc / qb),
        };
    }
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    let sq = disc.sqrt();
    // stable pair of roots of qa s^2 + qb s + qc
    let qq = -0.5 * (qb + qb.signum() * sq);
    let (r1, r2) = if qq != 0.0 { (qq / qa, qc / qq) } else { (0.0, 0.0) };
    let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
    match side {
        Side::Upper => Some(hi),
        Side::Lower => Some(lo),
    }
}

/// Solves `T*(s) = T` on one side and evaluates slope and curvature there.
pub fn critical_point(params: &ModelParams, ctx: &EvalContext, side: Side) -> Result<CriticalPoint> {
    let t = ctx.maturity();
    let boundary = explosion_boundary(params, side).ok_or(Error::NoExplosion(side))?;
    let dir = match side {
        Side::Upper => 1.0,
        Side::Lower => -1.0,
    };
    let g = |s: f64| inverse_explosion_time(params, s) - 1.0 / t;
    if g(boundary) > 0.0 {
        return Err(Error::Convergence(format!(
            "explosion time at the boundary {boundary} is already below T = {t}"
        )));
    }
    let mut width = boundary.abs().max(1.0);
    let mut far = boundary + dir * width;
    let mut doublings = 0;
    while g(far) <= 0.0 {
        width *= 2.0;
        far = boundary + dir * width;
        doublings += 1;
        if doublings > 200 || !far.is_finite() {
            return Err(Error::NoExplosion(side));
        }
    }
    let (lo, hi) = if dir > 0.0 { (boundary, far) } else { (far, boundary) };
    let s_crit = brent(g, lo, hi, 1e-14, 500)?;

    let residual = (explosion_time(params, s_crit) - t).abs();
    if !(residual <= 1e-10 * t) {
        return Err(Error::Convergence(format!(
            "critical moment residual |T*(s) - T| = {residual:e} exceeds 1e-10 T"
        )));
    }

    let dtstar_ds = explosion_time_derivative(params, s_crit)?;
    let sigma = dtstar_ds.abs();
    let closed = critical_slope_closed(params, ctx, s_crit).abs();
    if (closed - sigma).abs() > 1e-6 * sigma {
        return Err(Error::Convergence(format!(
            "critical slope mismatch: dT*/ds gives {sigma}, R1/R2 gives {closed}"
        )));
    }

    let kappa = curvature(params, s_crit, boundary)?;
    Ok(CriticalPoint {
        side,
        s_crit,
        sigma,
        kappa,
        dtstar_ds,
    })
}

/// Second derivative of `T*` by central differences of the analytic first
/// derivative with one Richardson step.
fn curvature(params: &ModelParams, s: f64, boundary: f64) -> Result<f64> {
    let h = (1e-5 * s.abs().max(1.0)).min(0.25 * (s - boundary).abs());
    let central = |h: f64| -> Result<f64> {
        Ok((explosion_time_derivative(params, s + h)? - explosion_time_derivative(params, s - h)?) / (2.0 * h))
    };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Lee's moment-formula function `Psi(x) = 2 - 4 (sqrt(x^2 + x) - x)`.
pub fn lee_psi(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain!("Psi(x) needs x >= 0, got {x}"));
    }
    // sqrt(x^2 + x) - x = 1 / (sqrt(1 + 1/x) + 1), free of cancellation
    Ok(2.0 - 4.0 / ((1.0 + 1.0 / x).sqrt() + 1.0))
}
