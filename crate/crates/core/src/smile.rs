//! Implied-volatility wing expansions, the un-expanded square-root form, the
//! exact smile from the reference engine, and the SVI comparison.

use std::f64::consts::SQRT_2;

use crate::criticality::critical_point;
use crate::error::{domain, Result, Side};
use crate::model::{EvalContext, ModelParams};
use crate::reference::{implied_vol_otm, otm_price_numeric_log, DampingSpec};
use crate::tails::{tail_constants_at, TailConstants, GAMMA_QUAD_TOL};

/// Wing coefficients: `sigma_BS(k, T) sqrt(T) ~ c_sqrt |k|^{1/2} + c_const
/// + c_log log|k| / |k|^{1/2}` as `k -> +inf` (upper) or `k -> -inf` (lower).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmileCoeffs {
    pub side: Side,
    pub c_sqrt: f64,
    pub c_const: f64,
    pub c_log: f64,
}

/// The pair `(P, Q)` with `P - Q = 1` from which all wing coefficients are
/// built: `(A3 - 1, A3 - 2)` on the right, `(B3 + 2, B3 + 1)` on the left.
fn radicands(consts: &TailConstants) -> Result<(f64, f64)> {
    match consts.side {
        Side::Upper if consts.c3 > 2.0 => Ok((consts.c3 - 1.0, consts.c3 - 2.0)),
        Side::Lower if consts.c3 > -1.0 => Ok((consts.c3 + 2.0, consts.c3 + 1.0)),
        Side::Upper => Err(domain!("upper wing needs A3 > 2, got {}", consts.c3)),
        Side::Lower => Err(domain!("lower wing needs B3 > -1, got {}", consts.c3)),
    }
}

pub fn smile_coeffs(consts: &TailConstants, params: &ModelParams) -> Result<SmileCoeffs> {
    let (p, q) = radicands(consts)?;
    let (sp, sq) = (p.sqrt(), q.sqrt());
    // sqrt(2) (sqrt(P) - sqrt(Q)) without the cancellation
    let c_sqrt = SQRT_2 / (sp + sq);
    let c_const = consts.c2 / SQRT_2 * (1.0 / sq - 1.0 / sp);
    let c_log = (0.25 - params.a_over_c2()) / SQRT_2 * (1.0 / sp - 1.0 / sq);
    Ok(SmileCoeffs {
        side: consts.side,
        c_sqrt,
        c_const,
        c_log,
    })
}

/// Which terms of the wing expansion to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    /// `c_sqrt |k|^{1/2}`
    First,
    /// adds `c_const` (diagnostic; no error bound is claimed for it)
    Second,
    /// adds `c_log log|k| / |k|^{1/2}`
    Third,
}

impl TryFrom<u8> for Order {
    type Error = crate::error::Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            3 => Ok(Order::Third),
            _ => Err(domain!("expansion order must be 1, 2 or 3, got {n}")),
        }
    }
}

/// An expansion value together with whether `k` lies in the wing (`|k| > 1`)
/// where the expansion is meant to be used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WingValue {
    pub value: f64,
    pub in_regime: bool,
}

fn wing_distance(side: Side, k: f64) -> Result<f64> {
    match side {
        Side::Upper if k > 0.0 => Ok(k),
        Side::Lower if k < 0.0 => Ok(-k),
        side => Err(domain!("log-strike {k} is not on the {side} wing")),
    }
}

/// Implied volatility from the wing expansion of the given order.
pub fn implied_vol_expansion(coeffs: &SmileCoeffs, ctx: &EvalContext, k: f64, order: Order) -> Result<WingValue> {
    let l = wing_distance(coeffs.side, k)?;
    let mut sum = coeffs.c_sqrt * l.sqrt();
    if order >= Order::Second {
        sum += coeffs.c_const;
    }
    if order >= Order::Third {
        sum += coeffs.c_log * l.ln() / l.sqrt();
    }
    if !(sum > 0.0) {
        return Err(domain!("wing expansion is not positive at k = {k} ({sum})"));
    }
    Ok(WingValue {
        value: sum / ctx.maturity().sqrt(),
        in_regime: l > 1.0,
    })
}

/// Total implied variance `sigma_BS^2 T` to the terms that grow with `|k|`:
/// `c_sqrt^2 |k| + 2 c_sqrt c_const |k|^{1/2} + 2 c_sqrt c_log log|k|`.
pub fn total_variance_expansion(coeffs: &SmileCoeffs, k: f64) -> Result<WingValue> {
    let l = wing_distance(coeffs.side, k)?;
    let w = coeffs.c_sqrt * coeffs.c_sqrt * l
        + 2.0 * coeffs.c_sqrt * coeffs.c_const * l.sqrt()
        + 2.0 * coeffs.c_sqrt * coeffs.c_log * l.ln();
    if !(w >= 0.0) {
        return Err(domain!("total variance expansion is negative at k = {k} ({w})"));
    }
    Ok(WingValue {
        value: w,
        in_regime: l > 1.0,
    })
}

/// The difference of square roots from which the wing expansion is derived,
/// before Taylor expansion:
///
/// ```text
/// sigma sqrt(T) / sqrt(2) = sqrt(P L - C2 sqrt(L) - (a/c^2 - 1/4) log L)
///                         - sqrt(Q L - C2 sqrt(L) - (a/c^2 - 1/4) log L)
/// ```
///
/// with `L = |k|` and `(P, Q)` as for the coefficients.
pub fn smile_sqrt_form(consts: &TailConstants, params: &ModelParams, ctx: &EvalContext, k: f64) -> Result<f64> {
    let l = wing_distance(consts.side, k)?;
    let (p, q) = radicands(consts)?;
    let common = -consts.c2 * l.sqrt() - (params.a_over_c2() - 0.25) * l.ln();
    let (rp, rq) = (p * l + common, q * l + common);
    if !(rq > 0.0) {
        return Err(domain!("square-root form has a non-positive radicand at k = {k}"));
    }
    // difference of roots as a quotient: (rp - rq) = l
    Ok(SQRT_2 * l / (rp.sqrt() + rq.sqrt()) / ctx.maturity().sqrt())
}

/// Implied volatility of the model price at log-strike `k`, from the
/// out-of-the-money price given by the Fourier reference engine. The
/// third-order wing expansion seeds the solver when `|k| > 1`.
pub fn exact_implied_vol(params: &ModelParams, ctx: &EvalContext, k: f64, spec: &DampingSpec) -> Result<f64> {
    let log_price = otm_price_numeric_log(params, ctx, k, spec)?;
    let guess = if k.abs() > 1.0 {
        let side = if k > 0.0 { Side::Upper } else { Side::Lower };
        critical_point(params, ctx, side)
            .and_then(|cp| tail_constants_at(params, ctx, &cp, GAMMA_QUAD_TOL))
            .and_then(|tc| smile_coeffs(&tc, params))
            .and_then(|co| implied_vol_expansion(&co, ctx, k, Order::Third))
            .map(|w| w.value)
            .ok()
    } else {
        None
    };
    implied_vol_otm(log_price.exp(), k, ctx.maturity(), guess.or(Some(0.2)))
}

/// Raw SVI total-variance parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SviParams {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub m: f64,
    pub s: f64,
}

impl SviParams {
    pub fn new(a: f64, b: f64, r: f64, m: f64, s: f64) -> Result<Self> {
        if ![a, b, r, m, s].iter().all(|v| v.is_finite()) {
            return Err(domain!("SVI parameters must be finite"));
        }
        if b < 0.0 {
            return Err(domain!("SVI needs b >= 0, got {b}"));
        }
        if r.abs() > 1.0 {
            return Err(domain!("SVI needs |r| <= 1, got {r}"));
        }
        if s < 0.0 {
            return Err(domain!("SVI needs s >= 0, got {s}"));
        }
        if !(b * (1.0 + r) > 0.0) {
            return Err(domain!("SVI right wing is flat: b (1 + r) = {}", b * (1.0 + r)));
        }
        Ok(SviParams { a, b, r, m, s })
    }
}

/// `a + b (r (k - m) + sqrt((k - m)^2 + s))`
pub fn svi(k: f64, p: &SviParams) -> f64 {
    let x = k - p.m;
    p.a + p.b * (p.r * x + (x * x + p.s).sqrt())
}

/// Right-wing asymptote `svi(k) = slope k + intercept + O(1/k)`.
pub fn svi_wing_expansion(p: &SviParams) -> (f64, f64) {
    let slope = p.b * (1.0 + p.r);
    (slope, p.a - p.b * p.m * (1.0 + p.r))
}
