//! Heston coefficients and the evaluation context.
//!
//! The variance follows `dV = (a + bV) dt + c sqrt(V) dZ` with `V_0 = v0`, and
//! the spot `dS = S sqrt(V) dW` starts at one with zero drift, `d<W, Z> = rho dt`.

use crate::error::{domain, Result};

/// Heston coefficients `(a, b, c, rho, v0)`.
///
/// Constructed through [`ModelParams::new`] or
/// [`ModelParams::from_mean_reversion`], both of which validate; every
/// downstream routine assumes a validated value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    a: f64,
    b: f64,
    c: f64,
    rho: f64,
    v0: f64,
}

impl ModelParams {
    pub fn new(a: f64, b: f64, c: f64, rho: f64, v0: f64) -> Result<Self> {
        ModelParams { a, b, c, rho, v0 }.validate()
    }

    /// Builds the coefficients from a mean-reversion level `vbar` and speed
    /// `lambda`: `a = vbar * lambda`, `b = -lambda`.
    pub fn from_mean_reversion(vbar: f64, lambda: f64, c: f64, rho: f64, v0: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(domain!("mean-reversion speed lambda must be positive, got {lambda}"));
        }
        if !(vbar >= 0.0) || !vbar.is_finite() {
            return Err(domain!("mean-reversion level vbar must be nonnegative, got {vbar}"));
        }
        Self::new(vbar * lambda, -lambda, c, rho, v0)
    }

    /// Checks every admissibility invariant and returns the params unchanged.
    pub fn validate(self) -> Result<Self> {
        let ModelParams { a, b, c, rho, v0 } = self;
        for (name, v) in [("a", a), ("b", b), ("c", c), ("rho", rho), ("v0", v0)] {
            if !v.is_finite() {
                return Err(domain!("parameter {name} must be finite, got {v}"));
            }
        }
        if a < 0.0 {
            return Err(domain!("a must be nonnegative, got {a}"));
        }
        if b > 0.0 {
            return Err(domain!("b must be nonpositive, got {b}"));
        }
        if c <= 0.0 {
            return Err(domain!("c (vol-of-vol) must be positive, got {c}"));
        }
        if !(-1.0..=1.0).contains(&rho) {
            return Err(domain!("rho must lie in [-1, 1], got {rho}"));
        }
        if rho > 0.0 {
            return Err(domain!("rho must be nonpositive, got {rho}"));
        }
        if v0 <= 0.0 {
            return Err(domain!("v0 must be positive, got {v0}"));
        }
        if rho == 0.0 && b == 0.0 {
            return Err(domain!(
                "rho = 0 together with b = 0 gives chi(s) = 0 for every s; need chi(s) < 0 for s > 0"
            ));
        }
        Ok(self)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn v0(&self) -> f64 {
        self.v0
    }

    /// Mean-reversion level `a / (-b)`; infinite when `b = 0`.
    pub fn vbar(&self) -> f64 {
        self.a / (-self.b)
    }

    /// Mean-reversion speed `-b`.
    pub fn lambda(&self) -> f64 {
        -self.b
    }

    /// `a / c^2`, the exponent that keeps showing up in the tail constants.
    pub fn a_over_c2(&self) -> f64 {
        self.a / (self.c * self.c)
    }

    pub fn with_a(self, a: f64) -> Result<Self> {
        ModelParams { a, ..self }.validate()
    }

    pub fn with_v0(self, v0: f64) -> Result<Self> {
        ModelParams { v0, ..self }.validate()
    }

    pub fn with_rho(self, rho: f64) -> Result<Self> {
        ModelParams { rho, ..self }.validate()
    }

    /// `chi(s) = s rho c + b`.
    pub fn chi(&self, s: f64) -> f64 {
        s * self.rho * self.c + self.b
    }

    /// `Delta(s) = chi(s)^2 - c^2 (s^2 - s)`; moments of order `s` explode in
    /// finite time exactly where this is negative.
    pub fn delta(&self, s: f64) -> f64 {
        let chi = self.chi(s);
        chi * chi - self.c * self.c * (s * s - s)
    }

    /// Parameter set used throughout the numerical examples (Schoutens,
    /// Simons and Tistaert market calibration).
    pub fn market_example() -> Self {
        Self::from_mean_reversion(0.0707, 0.6067, 0.2928, -0.7571, 0.0654).expect("example parameters are admissible")
    }
}

/// Maturity of the evaluation. Spot is fixed at one and the drift at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalContext {
    maturity: f64,
}

impl EvalContext {
    pub fn new(maturity: f64) -> Result<Self> {
        if !(maturity > 0.0) || !maturity.is_finite() {
            return Err(domain!("maturity must be positive and finite, got {maturity}"));
        }
        Ok(EvalContext { maturity })
    }

    pub fn maturity(&self) -> f64 {
        self.maturity
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use proptest::prelude::*;

    #[test]
    fn market_example_is_valid() {
        let p = ModelParams::new(0.0707 * 0.6067, -0.6067, 0.2928, -0.7571, 0.0654).unwrap();
        assert!((p.a() - 0.042_893_69).abs() < 1e-8);
        assert_eq!(p.b(), -0.6067);
        assert_eq!(p, ModelParams::market_example());
    }

    #[test]
    fn rejects_each_violated_invariant() {
        let bad = [
            (0.04, -0.6, 0.0, -0.7, 0.06, "c"),
            (0.04, -0.6, 0.29, 0.1, 0.06, "rho"),
            (-0.1, -0.6, 0.29, -0.7, 0.06, "a"),
            (0.04, 0.1, 0.29, -0.7, 0.06, "b"),
            (0.04, -0.6, 0.29, -0.7, 0.0, "v0"),
            (0.04, -0.6, 0.29, -1.2, 0.06, "rho"),
            (0.04, 0.0, 0.29, 0.0, 0.06, "rho = 0 together with b = 0"),
        ];
        for (a, b, c, rho, v0, needle) in bad {
            match ModelParams::new(a, b, c, rho, v0) {
                Err(Error::Domain(msg)) => assert!(msg.contains(needle), "{msg}"),
                other => panic!("expected domain error for {needle}, got {other:?}"),
            }
        }
    }

    #[test]
    fn feller_condition_is_not_enforced() {
        assert!(ModelParams::new(0.0, -1.0, 2.0, -0.5, 0.04).is_ok());
        // b = 0 is fine as long as rho < 0
        assert!(ModelParams::new(0.1, 0.0, 0.3, -0.5, 0.04).is_ok());
    }

    #[test]
    fn mean_reversion_form() {
        let p = ModelParams::from_mean_reversion(0.0707, 0.6067, 0.2928, -0.7571, 0.0654).unwrap();
        assert!((p.a() - 0.042_893_69).abs() < 1e-8);
        assert_eq!(p.b(), -0.6067);
        assert!((p.vbar() - 0.0707).abs() < 1e-15);

        let z = ModelParams::from_mean_reversion(0.0, 1.0, 0.3, -0.5, 0.04).unwrap();
        assert_eq!(z.a(), 0.0);

        assert!(ModelParams::from_mean_reversion(0.05, 0.0, 0.3, -0.5, 0.04).is_err());
        assert!(ModelParams::from_mean_reversion(-0.05, 1.0, 0.3, -0.5, 0.04).is_err());
    }

    #[test]
    fn maturity_must_be_positive() {
        assert!(EvalContext::new(0.0).is_err());
        assert!(EvalContext::new(-1.0).is_err());
        assert!(EvalContext::new(f64::INFINITY).is_err());
        assert_eq!(EvalContext::new(2.5).unwrap().maturity(), 2.5);
    }

    proptest! {
        #[test]
        fn validate_is_idempotent(a in 0.0..1.0f64, b in -3.0..-0.01f64, c in 0.05..1.5f64,
                                  rho in -1.0..0.0f64, v0 in 0.001..0.5f64) {
            let p = ModelParams::new(a, b, c, rho, v0).unwrap();
            prop_assert_eq!(p.validate().unwrap(), p);
            prop_assert_eq!(p.validate().unwrap().validate().unwrap(), p.validate().unwrap());
        }

        #[test]
        fn mean_reversion_round_trip(a in 0.0..1.0f64, b in -3.0..-0.01f64, c in 0.05..1.5f64,
                                     rho in -1.0..0.0f64, v0 in 0.001..0.5f64) {
            let p = ModelParams::new(a, b, c, rho, v0).unwrap();
            let q = ModelParams::from_mean_reversion(p.vbar(), p.lambda(), c, rho, v0).unwrap();
            prop_assert!((q.a() - p.a()).abs() <= 1e-15 * p.a().max(1.0));
            prop_assert_eq!(q.b(), p.b());
        }
    }
}
