//! The affine transform `log E[exp(u X_t)] = phi(u, t) + v0 psi(u, t)` of the
//! log-spot, in closed form and by direct integration of its Riccati system.

use num_complex::Complex64;

use crate::criticality::{critical_point, explosion_time};
use crate::error::{Error, Result, Side};
use crate::model::{EvalContext, ModelParams};
use crate::numerics::{dopri5, OdeOptions};
use crate::tails::gamma_constant;

/// `(phi, psi)` at one complex argument and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub phi: Complex64,
    pub psi: Complex64,
}

impl TransformValue {
    pub fn conj(self) -> Self {
        TransformValue {
            phi: self.phi.conj(),
            psi: self.psi.conj(),
        }
    }
}

/// Right-hand sides `phi' = F(u, psi) = a psi` and
/// `psi' = R(u, psi) = (u^2 - u)/2 + c^2 psi^2 / 2 + b psi + u rho c psi`.
#[derive(Debug, Clone, Copy)]
pub struct RiccatiRhs {
    a: f64,
    b: f64,
    c: f64,
    rho: f64,
}

impl RiccatiRhs {
    pub fn new(params: &ModelParams) -> Self {
        RiccatiRhs {
            a: params.a(),
            b: params.b(),
            c: params.c(),
            rho: params.rho(),
        }
    }

    pub fn f(&self, v: Complex64) -> Complex64 {
        v * self.a
    }

    pub fn r(&self, u: Complex64, v: Complex64) -> Complex64 {
        0.5 * (u * u - u) + 0.5 * self.c * self.c * v * v + (self.b + u * self.rho * self.c) * v
    }

    pub fn chi(&self, u: Complex64) -> Complex64 {
        u * (self.rho * self.c) + self.b
    }

    pub fn delta(&self, u: Complex64) -> Complex64 {
        let chi = self.chi(u);
        chi * chi - self.c * self.c * (u * u - u)
    }
}

/// `(1 - exp(-x)) / x`, accurate for small `|x|`.
fn one_minus_exp_over(x: Complex64) -> Complex64 {
    if x.norm() < 0.5 {
        // sum_{n>=0} (-x)^n / (n+1)!
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for n in 1..30 {
            term *= -x / (n as f64 + 1.0);
            sum += term;
            if term.norm() < 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (1.0 - (-x).exp()) / x
    }
}

/// Closed-form pieces for one argument `u`: with `beta = -chi(u)` and
/// `d = sqrt(Delta(u))`, `Re d >= 0`,
///
/// ```text
/// h(t)   = (1 - exp(-d t)) / d
/// D(t)   = (beta h(t) + 1 + exp(-d t)) / 2
/// psi(t) = (u^2 - u) h(t) / (2 D(t))
/// phi(t) = (a / c^2) ((beta - d) t - 2 log D(t))
/// ```
///
/// `D` vanishes exactly at the explosion time; `log D` is continued along `t`.
struct ClosedForm {
    u: Complex64,
    beta: Complex64,
    d: Complex64,
}

impl ClosedForm {
    fn new(rhs: &RiccatiRhs, u: Complex64) -> Self {
        let beta = -rhs.chi(u);
        let mut d = rhs.delta(u).sqrt();
        if d.re < 0.0 {
            d = -d;
        }
        ClosedForm { u, beta, d }
    }

    /// `(h(t), D(t))`
    fn parts(&self, t: f64) -> (Complex64, Complex64) {
        let x = self.d * t;
        let h = one_minus_exp_over(x) * t;
        let e = (-x).exp();
        (h, 0.5 * (self.beta * h + 1.0 + e))
    }

    fn psi(&self, t: f64) -> Complex64 {
        let (h, dd) = self.parts(t);
        (self.u * self.u - self.u) * h / (2.0 * dd)
    }

    /// `log D(t)`, continued from `log D(0) = 0`.
    fn log_d(&self, t: f64) -> Result<Complex64> {
        // Beyond exp(-Re(d) t) < e^-40 the oscillating part is invisible.
        let t_eff = if self.d.re > 0.0 { t.min(40.0 / self.d.re) } else { t };
        let turns = self.d.im.abs() * t_eff / std::f64::consts::FRAC_PI_4;
        let n = (turns.ceil() as usize).clamp(8, 200_000);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut prev_t = 0.0;
        let mut prev = Complex64::new(1.0, 0.0);
        let mut grid: Vec<f64> = (1..=n).map(|j| t_eff * j as f64 / n as f64).collect();
        if t_eff < t {
            grid.push(t);
        }
        for next_t in grid {
            let (step, end) = self.log_step(prev_t, prev, next_t, 0)?;
            acc += step;
            prev = end;
            prev_t = next_t;
        }
        // Tie the real part to the modulus at the end point directly.
        Ok(Complex64::new(prev.norm().ln(), acc.im))
    }

    /// Continued `log(D(t1) / D(t0))`, bisecting until consecutive samples
    /// turn by less than pi/4.
    fn log_step(&self, t0: f64, d0: Complex64, t1: f64, depth: u32) -> Result<(Complex64, Complex64)> {
        let d1 = self.parts(t1).1;
        let ratio = d1 / d0;
        if !ratio.is_finite() || d1 == Complex64::new(0.0, 0.0) {
            return Err(Error::Branch(format!(
                "D(t) vanished or overflowed at t = {t1} for u = {}",
                self.u
            )));
        }
        let step = ratio.ln();
        if step.im.abs() < std::f64::consts::FRAC_PI_4 {
            return Ok((step, d1));
        }
        if depth > 40 {
            return Err(Error::Branch(format!(
                "cannot resolve the winding of D(t) near t = {t0} for u = {}",
                self.u
            )));
        }
        let tm = 0.5 * (t0 + t1);
        let (s1, dm) = self.log_step(t0, d0, tm, depth + 1)?;
        let (s2, d1) = self.log_step(tm, dm, t1, depth + 1)?;
        Ok((s1 + s2, d1))
    }
}

fn check_not_exploded(params: &ModelParams, u: Complex64, t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be positive and finite, got {t}")));
    }
    let tstar = explosion_time(params, u.re);
    if t >= tstar {
        return Err(Error::Exploded { s: u.re, t, tstar });
    }
    Ok(())
}

/// `(phi(u, t), psi(u, t))` from the closed-form solution.
pub fn transform_closed(params: &ModelParams, u: Complex64, t: f64) -> Result<TransformValue> {
    check_not_exploded(params, u, t)?;
    let rhs = RiccatiRhs::new(params);
    let cf = ClosedForm::new(&rhs, u);
    let psi = cf.psi(t);
    let c2 = params.c() * params.c();
    let phi = if params.a() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        (params.a() / c2) * ((cf.beta - cf.d) * t - 2.0 * cf.log_d(t)?)
    };
    if !(phi.is_finite() && psi.is_finite()) {
        return Err(Error::Exploded {
            s: u.re,
            t,
            tstar: explosion_time(params, u.re),
        });
    }
    Ok(TransformValue { phi, psi })
}

/// `psi(u, t)` alone; no logarithm is involved, so no continuation is needed.
pub fn psi_closed(params: &ModelParams, u: Complex64, t: f64) -> Result<Complex64> {
    check_not_exploded(params, u, t)?;
    let cf = ClosedForm::new(&RiccatiRhs::new(params), u);
    Ok(cf.psi(t))
}

/// `(phi(u, t), psi(u, t))` by adaptive Dormand-Prince integration of the
/// Riccati system with absolute and relative tolerance `tol`.
pub fn transform_ode(params: &ModelParams, u: Complex64, t: f64, tol: f64) -> Result<TransformValue> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be positive and finite, got {t}")));
    }
    let rhs = RiccatiRhs::new(params);
    let opts = OdeOptions {
        abs_tol: tol,
        rel_tol: tol,
        overflow_guard: 1e12,
        max_steps: 2_000_000,
    };
    let zero = Complex64::new(0.0, 0.0);
    let out = dopri5(
        |_, y: &[Complex64; 2]| [rhs.f(y[1]), rhs.r(u, y[1])],
        [zero, zero],
        t,
        opts,
    )
    .map_err(|e| match e {
        Error::Exploded { t: reached, .. } => Error::Exploded {
            s: u.re,
            t: reached,
            tstar: explosion_time(params, u.re),
        },
        other => other,
    })?;
    Ok(TransformValue {
        phi: out.y[0],
        psi: out.y[1],
    })
}

/// `log E[S_T^u] = phi(u, T) + v0 psi(u, T)`.
pub fn mgf_log(params: &ModelParams, ctx: &EvalContext, u: Complex64) -> Result<Complex64> {
    let tv = transform_closed(params, u, ctx.maturity())?;
    Ok(tv.phi + params.v0() * tv.psi)
}

/// Coefficients of the singular expansion of `phi(u-1, T) + v0 psi(u-1, T)`
/// at the singularity `u* = s_crit + 1` of the Mellin transform:
/// `pole / |u* - u| + log_coeff * log(1 / |u* - u|) + constant + O(u* - u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularExpansion {
    pub singularity: f64,
    /// `beta^2 = 2 v0 / (c^2 sigma)`
    pub pole_coeff: f64,
    /// `Gamma`
    pub const_term: f64,
    /// `2a / c^2`
    pub log_coeff: f64,
}

pub fn singular_expansion(params: &ModelParams, ctx: &EvalContext, side: Side) -> Result<SingularExpansion> {
    let cp = critical_point(params, ctx, side)?;
    let c2 = params.c() * params.c();
    Ok(SingularExpansion {
        singularity: cp.s_crit + 1.0,
        pole_coeff: 2.0 * params.v0() / (c2 * cp.sigma),
        const_term: gamma_constant(params, ctx, side)?,
        log_coeff: 2.0 * params.a() / c2,
    })
}
