//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // stop at the tolerance, or once it sinks below rounding
        if depth == 0 || delta.abs() <= 15.0 * tol.max(8.0 * f64::EPSILON * (left + right).abs()) {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Composite Simpson on precomputed equally spaced samples (odd count).
pub fn simpson_samples(values: &[f64], h: f64) -> f64 {
    assert!(values.len() % 2 == 1 && values.len() >= 3);
    let n = values.len() - 1;
    let mut s = values[0] + values[n];
    for (i, v) in values.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * v;
    }
    s * h / 3.0
}

/// Ridders' extrapolated derivative of order 1 or 2, from central differences.
pub fn ridders<F: Fn(f64) -> f64>(f: &F, x: f64, h0: f64, order: u32) -> f64 {
    let diff = |h: f64| match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        _ => unreachable!(),
    };
    const N: usize = 10;
    let mut table = [[0.0f64; N]; N];
    let mut h = h0;
    table[0][0] = diff(h);
    let mut best = table[0][0];
    let mut err = f64::INFINITY;
    for i in 1..N {
        h /= 1.4;
        table[0][i] = diff(h);
        let mut fac = 1.96;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= 1.96;
            let e = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    best
}

/// Heston coefficients as plain numbers, so the oracles share nothing with the library.
#[derive(Debug, Clone, Copy)]
pub struct Raw {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rho: f64,
    pub v0: f64,
}

pub const MARKET: Raw = Raw {
    a: 0.0707 * 0.6067,
    b: -0.6067,
    c: 0.2928,
    rho: -0.7571,
    v0: 0.0654,
};

/// `(phi, psi)` by classical RK4 with `n` steps, Richardson-corrected against `2n`.
pub fn riccati_rk4(p: &Raw, u: Complex64, t: f64, n: usize) -> (Complex64, Complex64) {
    let rhs = |psi: Complex64| -> (Complex64, Complex64) {
        let dpsi = 0.5 * (u * u - u) + 0.5 * p.c * p.c * psi * psi + (p.b + u * p.rho * p.c) * psi;
        (p.a * psi, dpsi)
    };
    let solve = |n: usize| {
        let h = t / n as f64;
        let (mut phi, mut psi) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for _ in 0..n {
            let (f1, g1) = rhs(psi);
            let (f2, g2) = rhs(psi + 0.5 * h * g1);
            let (f3, g3) = rhs(psi + 0.5 * h * g2);
            let (f4, g4) = rhs(psi + h * g3);
            phi += h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
            psi += h / 6.0 * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
        }
        (phi, psi)
    };
    let (p1, s1) = solve(n);
    let (p2, s2) = solve(2 * n);
    (p2 + (p2 - p1) / 15.0, s2 + (s2 - s1) / 15.0)
}

/// `T*(s) = int_0^inf dv / (m/2 + chi v + c^2 v^2 / 2)`, mapped to `[0, 1]` by `v = w / (1 - w)`.
pub fn explosion_time_quadrature(p: &Raw, s: f64) -> f64 {
    let m = s * s - s;
    let chi = s * p.rho * p.c + p.b;
    let c2 = p.c * p.c;
    // m/2 + chi v + c^2 v^2/2 = c^2/2 (v - v*)^2 + (c^2 m - chi^2) / (2 c^2), v* = -chi / c^2,
    // which stays accurate where the quadratic nearly touches zero
    let (v_star, floor) = (-chi / c2, (c2 * m - chi * chi) / (2.0 * c2));
    let f = |w: f64| {
        let one = 1.0 - w;
        let shifted = w - v_star * one;
        1.0 / (0.5 * c2 * shifted * shifted + floor * one * one)
    };
    // with chi < 0 the denominator dips towards zero at v = -chi / c^2;
    // split there so the peak cannot slip between samples
    let mut cuts = vec![0.0, 1.0];
    if chi < 0.0 {
        let v = -chi / (p.c * p.c);
        cuts.insert(1, v / (1.0 + v));
    }
    let pieces = 16;
    cuts.windows(2)
        .flat_map(|w| {
            (0..pieces).map(move |i| {
                (
                    w[0] + (w[1] - w[0]) * i as f64 / pieces as f64,
                    w[0] + (w[1] - w[0]) * (i + 1) as f64 / pieces as f64,
                )
            })
        })
        .map(|(a, b)| simpson(&f, a, b, 1e-16))
        .sum()
}

/// Lee's `Psi(x) = 2 - 4 (sqrt(x^2 + x) - x)`, written out directly.
pub fn lee_psi(x: f64) -> f64 {
    2.0 - 4.0 * ((x * x + x).sqrt() - x)
}
