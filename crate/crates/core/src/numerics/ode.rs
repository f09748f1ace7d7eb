//! Dormand-Prince 5(4) integrator for small complex systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order solution minus embedded fourth-order solution
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Any component exceeding this modulus aborts with `Exploded`.
    pub overflow_guard: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOutcome<const N: usize> {
    pub y: [Complex64; N],
    pub steps: usize,
}

/// Integrates `y' = f(t, y)` from `t = 0` to `t_end`.
///
/// On `Exploded` the returned error carries `t` = the time reached and `s` = NaN;
/// callers fill in context.
pub fn dopri5<const N: usize, F>(mut f: F, y0: [Complex64; N], t_end: f64, opts: OdeOptions) -> Result<OdeOutcome<N>>
where
    F: FnMut(f64, &[Complex64; N]) -> [Complex64; N],
{
    let mut t = 0.0;
    let mut y = y0;
    if t_end == 0.0 {
        return Ok(OdeOutcome { y, steps: 0 });
    }
    let mut k = [[Complex64::new(0.0, 0.0); N]; 7];
    k[0] = f(t, &y);
    let mut h = initial_step(&y, &k[0], t_end, opts);
    let mut steps = 0;

    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::Tolerance(format!(
                "ODE step budget ({}) exhausted at t = {t}",
                opts.max_steps
            )));
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        for s in 1..7 {
            let mut ys = y;
            for (i, ysi) in ys.iter_mut().enumerate() {
                for j in 0..s {
                    *ysi += k[j][i] * (h * A[s][j]);
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y_new = y;
        for (i, yi) in y_new.iter_mut().enumerate() {
            for j in 0..6 {
                *yi += k[j][i] * (h * A[6][j]);
            }
        }
        let mut err = 0.0;
        for i in 0..N {
            let mut e = Complex64::new(0.0, 0.0);
            for j in 0..7 {
                e += k[j][i] * (h * E[j]);
            }
            let scale = opts.abs_tol + opts.rel_tol * y[i].norm().max(y_new[i].norm());
            err += (e.norm() / scale).powi(2);
        }
        let err = (err / N as f64).sqrt();
        steps += 1;

        if !err.is_finite() {
            h *= 0.2;
        } else if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y_new;
            if y.iter().any(|v| !(v.norm() <= opts.overflow_guard)) {
                return Err(Error::Exploded {
                    s: f64::NAN,
                    t,
                    tstar: f64::NAN,
                });
            }
            // FSAL: the last stage is the derivative at the new point
            k[0] = k[6];
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
        if h < 1e-15 * t_end.max(t) {
            return Err(Error::Tolerance(format!("ODE step size underflow at t = {t}")));
        }
    }
    Ok(OdeOutcome { y, steps })
}

fn initial_step<const N: usize>(y: &[Complex64; N], dy: &[Complex64; N], t_end: f64, opts: OdeOptions) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = opts.abs_tol + opts.rel_tol * y[i].norm();
        d0 += (y[i].norm() / sc).powi(2);
        d1 += (dy[i].norm() / sc).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(t_end).max(1e-12 * t_end)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(tol: f64) -> OdeOptions {
        OdeOptions {
            abs_tol: tol,
            rel_tol: tol,
            overflow_guard: 1e12,
            max_steps: 100_000,
        }
    }

    #[test]
    fn complex_exponential() {
        let lam = Complex64::new(-0.5, 3.0);
        let out = dopri5(
            |_, y: &[Complex64; 1]| [lam * y[0]],
            [Complex64::new(1.0, 0.0)],
            2.0,
            opts(1e-12),
        )
        .unwrap();
        let exact = (lam * 2.0).exp();
        assert!((out.y[0] - exact).norm() < 1e-10);
    }

    #[test]
    fn riccati_blowup_is_caught() {
        // y' = 1 + y^2 explodes at pi/2
        let r = dopri5(
            |_, y: &[Complex64; 1]| [Complex64::new(1.0, 0.0) + y[0] * y[0]],
            [Complex64::new(0.0, 0.0)],
            2.0,
            opts(1e-10),
        );
        assert!(matches!(r, Err(Error::Exploded { .. }) | Err(Error::Tolerance(_))));
        let ok = dopri5(
            |_, y: &[Complex64; 1]| [Complex64::new(1.0, 0.0) + y[0] * y[0]],
            [Complex64::new(0.0, 0.0)],
            1.5,
            opts(1e-12),
        )
        .unwrap();
        assert!((ok.y[0].re - 1.5f64.tan()).abs() < 1e-9 * 1.5f64.tan());
    }
}
