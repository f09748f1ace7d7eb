//! Tail constants of the density and the leading-order asymptotic formulas
//! for the density, the log-spot density, the survival function and call
//! prices. Everything is returned in log form: the tails underflow doubles
//! long before the asymptotics become accurate.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::criticality::{critical_point, CriticalPoint};
use crate::error::{domain, Result, Side};
use crate::model::{EvalContext, ModelParams};
use crate::numerics::{integrate, QuadOptions};
use crate::riccati::psi_closed;

/// Default relative tolerance for the regularized integral inside `Gamma`.
pub const GAMMA_QUAD_TOL: f64 = 1e-12;

/// Relative distance to the explosion time below which the integrand of the
/// regularized integral is replaced by its limit.
const GAMMA_CUTOFF: f64 = 1e-6;

/// Density tail constants for one side.
///
/// Upper tail: `D(x) ~ C1 x^{-C3} exp(C2 sqrt(log x)) (log x)^{power_exp}`.
/// Lower tail: `D(x) ~ C1 x^{C3} exp(C2 sqrt(-log x)) (-log x)^{power_exp}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailConstants {
    pub side: Side,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// `sqrt(2 v0 / (c^2 sigma))`
    pub beta: f64,
    pub gamma_const: f64,
    /// `-3/4 + a/c^2`
    pub power_exp: f64,
}

/// The constant `Gamma` of the singular expansion, with the regularized
/// integral computed to relative tolerance [`GAMMA_QUAD_TOL`].
pub fn gamma_constant(params: &ModelParams, ctx: &EvalContext, side: Side) -> Result<f64> {
    gamma_constant_with_tol(params, ctx, side, GAMMA_QUAD_TOL)
}

pub fn gamma_constant_with_tol(params: &ModelParams, ctx: &EvalContext, side: Side, tol: f64) -> Result<f64> {
    let cp = critical_point(params, ctx, side)?;
    gamma_at(params, ctx, &cp, tol)
}

/// `Gamma = -v0 (chi(s)/c^2 + kappa/(c^2 sigma^2)) + (2a/c^2) log(T/sigma)
///          + a int_0^T (psi(s, th) - 2/(c^2 (T - th))) dth`
fn gamma_at(params: &ModelParams, ctx: &EvalContext, cp: &CriticalPoint, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(domain!("quadrature tolerance must be positive, got {tol}"));
    }
    let t = ctx.maturity();
    let c2 = params.c() * params.c();
    let s = cp.s_crit;
    let chi = params.chi(s);
    let mut gamma = -params.v0() * (chi / c2 + cp.kappa / (c2 * cp.sigma * cp.sigma));
    if params.a() > 0.0 {
        let integral = regularized_psi_integral(params, ctx, s, tol)?;
        gamma += 2.0 * params.a() / c2 * (t / cp.sigma).ln() + params.a() * integral;
    }
    Ok(gamma)
}

/// `int_0^T (psi(s, th) - 2/(c^2 (T - th))) dth` for the critical moment `s`.
pub fn regularized_psi_integral(params: &ModelParams, ctx: &EvalContext, s: f64, tol: f64) -> Result<f64> {
    let t = ctx.maturity();
    let c2 = params.c() * params.c();
    let limit = -params.chi(s) / c2;
    let cut = t * (1.0 - GAMMA_CUTOFF);
    let u = Complex64::new(s, 0.0);
    let mut failure = None;
    let est = integrate(
        |th| match psi_closed(params, u, th) {
            Ok(psi) => psi.re - 2.0 / (c2 * (t - th)),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        cut,
        QuadOptions::new(tol * t, tol),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(est?.value + limit * (t - cut))
}

/// Tail constants for the given side.
pub fn tail_constants(params: &ModelParams, ctx: &EvalContext, side: Side) -> Result<TailConstants> {
    let cp = critical_point(params, ctx, side)?;
    tail_constants_at(params, ctx, &cp, GAMMA_QUAD_TOL)
}

pub fn tail_constants_at(
    params: &ModelParams,
    ctx: &EvalContext,
    cp: &CriticalPoint,
    tol: f64,
) -> Result<TailConstants> {
    let c2 = params.c() * params.c();
    let ac2 = params.a() / c2;
    let beta = (2.0 * params.v0() / (c2 * cp.sigma)).sqrt();
    let gamma = gamma_at(params, ctx, cp, tol)?;
    let log_c1 = gamma + (0.5 - 2.0 * ac2) * beta.ln() - (2.0 * PI.sqrt()).ln();
    let c3 = match cp.side {
        Side::Upper => cp.s_crit + 1.0,
        Side::Lower => -(cp.s_crit + 1.0),
    };
    Ok(TailConstants {
        side: cp.side,
        c1: log_c1.exp(),
        c2: 2.0 * beta,
        c3,
        beta,
        gamma_const: gamma,
        power_exp: -0.75 + ac2,
    })
}

/// How the hyperbolic sine in the product form of the leading constant is
/// read: with or without the maturity multiplying its argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinhArgument {
    WithMaturity,
    WithoutMaturity,
}

/// Leading constant `C1` from its closed product form, evaluated in complex
/// arithmetic (the square root of `Delta(s_crit) < 0` is imaginary and the
/// sinh becomes a sine). Used to cross-check the `Gamma` route.
pub fn leading_constant_product_form(
    params: &ModelParams,
    ctx: &EvalContext,
    side: Side,
    reading: SinhArgument,
) -> Result<f64> {
    let cp = critical_point(params, ctx, side)?;
    let (a, c, v0) = (params.a(), params.c(), params.v0());
    let c2 = c * c;
    let ac2 = a / c2;
    let t = ctx.maturity();
    let s = cp.s_crit;
    let chi = params.chi(s);

    let mut log_c1 = -(2.0 * PI.sqrt()).ln() + (0.25 - ac2) * (2.0 * v0).ln() + (2.0 * ac2 - 0.5) * c.ln()
        - (ac2 + 0.25) * cp.sigma.ln()
        - v0 * (chi / c2 + cp.kappa / (c2 * cp.sigma * cp.sigma))
        - a * t / c2 * chi;
    if a > 0.0 {
        let root = Complex64::new(params.delta(s), 0.0).sqrt();
        let arg = match reading {
            SinhArgument::WithMaturity => 0.5 * root * t,
            SinhArgument::WithoutMaturity => 0.5 * root,
        };
        let ratio = 2.0 * root / (c2 * s * (s - 1.0) * arg.sinh());
        if ratio.re <= 0.0 {
            return Err(domain!("product form is not positive ({ratio}) under this reading"));
        }
        log_c1 += 2.0 * ac2 * ratio.norm().ln();
    }
    Ok(log_c1.exp())
}

fn require_side(consts: &TailConstants, side: Side, what: &str) -> Result<()> {
    if consts.side != side {
        return Err(domain!("{what} is only available for the {side} tail"));
    }
    Ok(())
}

/// `log D_T(x)` to leading order, from `log x`.
pub fn density_asymptotic_log(consts: &TailConstants, log_x: f64) -> Result<f64> {
    let l = match consts.side {
        Side::Upper if log_x > 0.0 => log_x,
        Side::Lower if log_x < 0.0 => -log_x,
        side => {
            return Err(domain!(
                "log x = {log_x} lies on the wrong side of 0 for the {side} tail"
            ))
        }
    };
    // x^{-A3} = e^{-A3 l} on the right, x^{B3} = e^{-B3 l} on the left
    Ok(consts.c1.ln() - consts.c3 * l + consts.c2 * l.sqrt() + consts.power_exp * l.ln())
}

/// `log D_T^log(x)` to leading order, for the density of the log-spot at `x`.
pub fn logspot_density_asymptotic_log(consts: &TailConstants, x: f64) -> Result<f64> {
    Ok(density_asymptotic_log(consts, x)? + x)
}

/// `log P[S_T > x]` to leading order (upper tail only).
pub fn survival_asymptotic_log(consts: &TailConstants, log_x: f64) -> Result<f64> {
    require_side(consts, Side::Upper, "the survival asymptotic")?;
    if !(log_x > 0.0) {
        return Err(domain!("survival asymptotic needs log x > 0, got {log_x}"));
    }
    let l = log_x;
    Ok((consts.c1 / (consts.c3 - 1.0)).ln() - (consts.c3 - 1.0) * l + consts.c2 * l.sqrt() + consts.power_exp * l.ln())
}

/// `log C(K)` to leading order as `K -> inf`, from `log K`.
pub fn call_price_asymptotic_log(consts: &TailConstants, log_k: f64) -> Result<f64> {
    require_side(consts, Side::Upper, "the call-price asymptotic")?;
    if consts.c3 <= 2.0 {
        return Err(domain!("call-price asymptotic needs A3 > 2, got {}", consts.c3));
    }
    if !(log_k > 0.0) {
        return Err(domain!("call-price asymptotic needs log K > 0, got {log_k}"));
    }
    let l = log_k;
    Ok(
        (consts.c1 / ((consts.c3 - 1.0) * (consts.c3 - 2.0))).ln() - (consts.c3 - 2.0) * l
            + consts.c2 * l.sqrt()
            + consts.power_exp * l.ln(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn market() -> ModelParams {
        ModelParams::market_example()
    }

    fn ctx(t: f64) -> EvalContext {
        EvalContext::new(t).unwrap()
    }

    #[test]
    fn market_constants() {
        let tc = tail_constants(&market(), &ctx(1.0), Side::Upper).unwrap();
        assert!((tc.c3 - 33.2124).abs() < 5e-3);
        assert!((tc.c2 - 12.3533).abs() < 5e-3);
        assert!((tc.c1 / 2311.69 - 1.0).abs() < 5e-3, "{}", tc.c1);
        assert!((tc.c2 - 2.0 * tc.beta).abs() < 1e-14);
    }

    #[test]
    fn regularized_integral_has_closed_form() {
        let p = market();
        for t in [0.5, 1.0, 3.0] {
            let c = ctx(t);
            let cp = critical_point(&p, &c, Side::Upper).unwrap();
            let s = cp.s_crit;
            let c2 = p.c() * p.c();
            let exact = (-p.chi(s) * t - (c2 * s * (s - 1.0) * t * t / 4.0).ln()) / c2;
            let got = regularized_psi_integral(&p, &c, s, 1e-12).unwrap();
            assert!((got - exact).abs() < 1e-8 * exact.abs(), "T = {t}: {got} vs {exact}");
        }
    }

    #[test]
    fn zero_inflow_gamma() {
        let p = market().with_a(0.0).unwrap();
        let c = ctx(1.0);
        let cp = critical_point(&p, &c, Side::Upper).unwrap();
        let c2 = p.c() * p.c();
        let expected = -p.v0() * ((p.b() + cp.s_crit * p.rho() * p.c()) / c2 + cp.kappa / (c2 * cp.sigma * cp.sigma));
        assert_eq!(gamma_constant(&p, &c, Side::Upper).unwrap(), expected);
        let tc = tail_constants(&p, &c, Side::Upper).unwrap();
        assert_eq!(tc.power_exp, -0.75);
    }

    #[test]
    fn product_form_needs_maturity_inside_sinh() {
        let p = market();
        // At T = 1 both readings coincide.
        let g = tail_constants(&p, &ctx(1.0), Side::Upper).unwrap().c1;
        for reading in [SinhArgument::WithMaturity, SinhArgument::WithoutMaturity] {
            let pf = leading_constant_product_form(&p, &ctx(1.0), Side::Upper, reading).unwrap();
            assert!((pf / g - 1.0).abs() < 1e-6);
        }
        let c = ctx(2.0);
        let g = tail_constants(&p, &c, Side::Upper).unwrap().c1;
        let with = leading_constant_product_form(&p, &c, Side::Upper, SinhArgument::WithMaturity).unwrap();
        assert!((with / g - 1.0).abs() < 1e-6, "{with} vs {g}");
        let without = leading_constant_product_form(&p, &c, Side::Upper, SinhArgument::WithoutMaturity);
        assert!(without.map_or(true, |w| (w / g - 1.0).abs() > 1e-3));
    }

    #[test]
    fn product_form_on_lower_tail() {
        let p = market();
        for t in [0.5, 1.0, 2.0] {
            let c = ctx(t);
            let g = tail_constants(&p, &c, Side::Lower).unwrap().c1;
            let pf = leading_constant_product_form(&p, &c, Side::Lower, SinhArgument::WithMaturity).unwrap();
            assert!((pf / g - 1.0).abs() < 1e-6, "T = {t}: {pf} vs {g}");
        }
    }

    #[test]
    fn gamma_is_insensitive_to_quadrature_tolerance() {
        let p = market();
        for side in [Side::Upper, Side::Lower] {
            let g1 = gamma_constant_with_tol(&p, &ctx(1.0), side, 1e-10).unwrap();
            let g2 = gamma_constant_with_tol(&p, &ctx(1.0), side, 1e-12).unwrap();
            assert!((g1 - g2).abs() < 1e-8);
        }
    }

    #[test]
    fn lower_constants() {
        let tc = tail_constants(&market(), &ctx(1.0), Side::Lower).unwrap();
        assert!(tc.c3 > -1.0);
        assert!(tc.c1 > 0.0 && tc.c2 > 0.0);
    }

    #[test]
    fn pure_power_law() {
        let tc = TailConstants {
            side: Side::Upper,
            c1: 1.0,
            c2: 0.0,
            c3: 2.0,
            beta: 0.0,
            gamma_const: 0.0,
            power_exp: 0.0,
        };
        assert_eq!(density_asymptotic_log(&tc, 1.0).unwrap(), -2.0);
        assert!(density_asymptotic_log(&tc, -1.0).is_err());
        // not defined at A3 = 2
        assert!(call_price_asymptotic_log(&tc, 3.0).is_err());
    }

    #[test]
    fn algebraic_relations_between_formulas() {
        let tc = tail_constants(&market(), &ctx(1.0), Side::Upper).unwrap();
        for l in [2.0, 10.0, 50.0] {
            let d = density_asymptotic_log(&tc, l).unwrap();
            let s = survival_asymptotic_log(&tc, l).unwrap();
            let c = call_price_asymptotic_log(&tc, l).unwrap();
            assert!((s - d - l + (tc.c3 - 1.0).ln()).abs() < 1e-9);
            assert!((c - s - l + (tc.c3 - 2.0).ln()).abs() < 1e-9);
            assert!((logspot_density_asymptotic_log(&tc, l).unwrap() - d - l).abs() < 1e-12);
        }
        assert!(call_price_asymptotic_log(&tc, 1e4).unwrap() < call_price_asymptotic_log(&tc, 1e3).unwrap());
        let lower = tail_constants(&market(), &ctx(1.0), Side::Lower).unwrap();
        assert!(survival_asymptotic_log(&lower, 3.0).is_err());
        let v = logspot_density_asymptotic_log(&lower, -10.0).unwrap();
        assert!(v.is_finite());
    }
}
