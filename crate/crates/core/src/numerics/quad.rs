//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl QuadOptions {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Error level set by rounding, below which refinement is pointless.
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Single 15-point Kronrod rule on `[a, b]` with the QUADPACK error scaling.
pub fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let (value, err, _) = kronrod15_abs(f, a, b);
    (value, err)
}

/// As [`kronrod15`], also returning the rounding floor `50 eps int |f|`.
fn kronrod15_abs<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (value, err, floor)
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// Stops when the error estimate meets the tolerance, or when it is within
/// twice the rounding floor of the rule (further bisection cannot help).
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    let (value, error, floor) = kronrod15_abs(&mut f, a, b);
    let mut evals = 15;
    if !value.is_finite() {
        return Err(Error::Tolerance(format!("integrand not finite on [{a}, {b}]")));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value,
        error,
        floor,
    });
    let mut total = value;
    let mut total_err = error;
    let mut total_floor = floor;

    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs()).max(2.0 * total_floor);
        if total_err <= target {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Tolerance(format!(
                "quadrature on [{a}, {b}] stalled at error {total_err:e} > {target:e}"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Tolerance(format!(
                "interval around {mid} cannot be bisected further"
            )));
        }
        let (v1, e1, r1) = kronrod15_abs(&mut f, worst.a, mid);
        let (v2, e2, r2) = kronrod15_abs(&mut f, mid, worst.b);
        evals += 30;
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::Tolerance(format!(
                "integrand not finite on [{}, {}]",
                worst.a, worst.b
            )));
        }
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        total_floor += r1 + r2 - worst.floor;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            floor: r1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            floor: r2,
        });
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(Estimate { value, error, evals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_degree_22() {
        for deg in 0..=22 {
            let mut f = |x: f64| x.powi(deg);
            let (v, _) = kronrod15(&mut f, 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((v - exact).abs() < 1e-15, "degree {deg}: {v} vs {exact}");
        }
    }

    #[test]
    fn gauss_weights_integrate_degree_13() {
        // Use the embedded Gauss rule alone.
        for deg in 0..=13 {
            let mut g = 0.0;
            let nodes = [XGK[1], XGK[3], XGK[5]];
            for (j, x) in nodes.iter().enumerate() {
                g += WG[j] * (x.powi(deg) + (-x).powi(deg));
            }
            g += WG[3] * if deg == 0 { 1.0 } else { 0.0 };
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((g - exact).abs() < 1e-15, "degree {deg}");
        }
    }

    #[test]
    fn adaptive_handles_peaks_and_endpoint_singularities() {
        let e = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, QuadOptions::new(1e-12, 1e-12)).unwrap();
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert!((e.value - exact).abs() < 1e-9 * exact);

        let e = integrate(|x| x.sqrt().ln(), 0.0, 1.0, QuadOptions::new(1e-12, 1e-12)).unwrap();
        assert!((e.value + 0.5).abs() < 1e-11);
    }

    #[test]
    fn oscillatory() {
        let e = integrate(|x| (50.0 * x).cos(), 0.0, 3.0, QuadOptions::new(1e-14, 1e-14)).unwrap();
        assert!((e.value - (150.0f64).sin() / 50.0).abs() < 1e-13);
    }
}
