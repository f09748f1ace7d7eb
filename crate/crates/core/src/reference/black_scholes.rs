use std::f64::consts::SQRT_2;

use crate::error::{domain, Error, Result};

/// Standard normal distribution function, accurate in both tails.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

fn check(k: f64, vol: f64, t: f64) -> Result<()> {
    if !k.is_finite() {
        return Err(domain!("log-strike must be finite, got {k}"));
    }
    if !(vol >= 0.0) || !vol.is_finite() {
        return Err(domain!("volatility must be non-negative, got {vol}"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain!("maturity must be positive, got {t}"));
    }
    Ok(())
}

fn d1_d2(k: f64, vol: f64, t: f64) -> (f64, f64) {
    let sd = vol * t.sqrt();
    let d1 = (-k + 0.5 * sd * sd) / sd;
    (d1, d1 - sd)
}

/// Undiscounted Black-Scholes call on a unit forward, strike `e^k`.
pub fn bs_call(k: f64, vol: f64, t: f64) -> Result<f64> {
    check(k, vol, t)?;
    if vol == 0.0 {
        return Ok((1.0 - k.exp()).max(0.0));
    }
    let (d1, d2) = d1_d2(k, vol, t);
    let price = norm_cdf(d1) - k.exp() * norm_cdf(d2);
    Ok(price.clamp((1.0 - k.exp()).max(0.0), 1.0))
}

/// Undiscounted Black-Scholes put on a unit forward, strike `e^k`.
pub fn bs_put(k: f64, vol: f64, t: f64) -> Result<f64> {
    check(k, vol, t)?;
    if vol == 0.0 {
        return Ok((k.exp() - 1.0).max(0.0));
    }
    let (d1, d2) = d1_d2(k, vol, t);
    let price = k.exp() * norm_cdf(-d2) - norm_cdf(-d1);
    Ok(price.clamp((k.exp() - 1.0).max(0.0), k.exp()))
}

/// Out-of-the-money price: the call for `k >= 0`, the put for `k < 0`.
pub fn bs_otm(k: f64, vol: f64, t: f64) -> Result<f64> {
    if k >= 0.0 {
        bs_call(k, vol, t)
    } else {
        bs_put(k, vol, t)
    }
}

/// `log bs_otm`, keeping relative accuracy where the price is tiny.
pub fn bs_otm_log(k: f64, vol: f64, t: f64) -> Result<f64> {
    check(k, vol, t)?;
    if vol == 0.0 {
        return Ok(if k == 0.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    let (d1, d2) = d1_d2(k, vol, t);
    // call: N(d1) - e^k N(d2) = N(d1) (1 - e^k N(d2)/N(d1)), and the mirror for puts
    let (big, small, w) = if k >= 0.0 {
        (norm_cdf(d1), norm_cdf(d2), k.exp())
    } else {
        (norm_cdf(-d2), norm_cdf(-d1), (-k).exp())
    };
    let lead = if k >= 0.0 { big.ln() } else { k + big.ln() };
    let ratio = w * small / big;
    if !(ratio < 1.0) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(lead + (-ratio).ln_1p())
}

/// Black-Scholes implied volatility of an out-of-the-money price (call for
/// `k >= 0`, put for `k < 0`). Newton steps on the log-price, safeguarded by
/// a bisection bracket.
pub fn implied_vol_otm(price: f64, k: f64, t: f64, initial_guess: Option<f64>) -> Result<f64> {
    check(k, 0.0, t)?;
    let upper = if k >= 0.0 { 1.0 } else { k.exp() };
    if !(price > 0.0 && price < upper) {
        return Err(Error::Arbitrage {
            price,
            lo: 0.0,
            hi: upper,
        });
    }
    let target = price.ln();
    let f = |v: f64| bs_otm_log(k, v, t).map(|l| l - target);

    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while f(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::Convergence(format!(
                "no volatility below {hi} reproduces price {price}"
            )));
        }
    }
    let mut v = match initial_guess {
        Some(g) if g > lo && g < hi => g,
        _ => 0.5 * (lo + hi),
    };
    for _ in 0..200 {
        let fv = f(v)?;
        if fv == 0.0 {
            return Ok(v);
        }
        if fv < 0.0 {
            lo = lo.max(v);
        } else {
            hi = hi.min(v);
        }
        // d log(price)/d vol = vega / price
        let h = 1e-7 * v.max(1e-3);
        let slope = (f(v + h)? - f(v - h)?) / (2.0 * h);
        let mut next = v - fv / slope;
        if !(next > lo && next < hi) || !slope.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - v).abs() <= 1e-15 * v.max(1e-3) || hi - lo <= 1e-15 * hi {
            return Ok(next);
        }
        v = next;
    }
    Err(Error::Convergence(format!(
        "implied volatility for k = {k}, price {price}"
    )))
}

/// Black-Scholes implied volatility of an undiscounted call price.
pub fn implied_vol(call_price: f64, k: f64, t: f64, initial_guess: Option<f64>) -> Result<f64> {
    check(k, 0.0, t)?;
    let lo = (1.0 - k.exp()).max(0.0);
    if !(call_price > lo && call_price < 1.0) {
        return Err(Error::Arbitrage {
            price: call_price,
            lo,
            hi: 1.0,
        });
    }
    let otm = if k >= 0.0 {
        call_price
    } else {
        call_price - (1.0 - k.exp())
    };
    implied_vol_otm(otm, k, t, initial_guess).map_err(|e| match e {
        Error::Arbitrage { .. } => Error::Arbitrage {
            price: call_price,
            lo,
            hi: 1.0,
        },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_values() {
        assert_eq!(norm_cdf(0.0), 0.5);
        assert!(
            (norm_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 2e-16,
            "{}",
            norm_cdf(1.0)
        );
        assert!((norm_cdf(-10.0) / 7.619_853_024_160_527e-24 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn at_the_money_identity() {
        for vol in [0.05, 0.2, 1.0] {
            let c = bs_call(0.0, vol, 2.0).unwrap();
            assert!((c - (2.0 * norm_cdf(vol * 2f64.sqrt() / 2.0) - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_vol_is_intrinsic() {
        assert_eq!(bs_call(0.5, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(bs_call(-0.5, 0.0, 1.0).unwrap(), 1.0 - (-0.5f64).exp());
        assert!(bs_call(0.5, 1e-9, 1.0).unwrap() < 1e-300);
    }

    #[test]
    fn call_price_increases_with_vol() {
        let mut prev = 0.0;
        for i in 1..50 {
            let c = bs_call(0.3, 0.02 * i as f64, 1.0).unwrap();
            assert!(c > prev);
            prev = c;
        }
    }

    #[test]
    fn log_price_matches_price() {
        for (k, v) in [(0.3, 0.2), (-0.4, 0.3), (2.0, 0.22), (-2.0, 0.47)] {
            let direct = bs_otm(k, v, 1.0).unwrap();
            assert!((bs_otm_log(k, v, 1.0).unwrap() - direct.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip() {
        for k in [-2.0, -0.5, 0.0, 0.5, 2.0] {
            // at k = -2 the call carries ~1e-12 of time value on top of 0.86
            if k > -2.0 {
                let c = bs_call(k, 0.3, 1.0).unwrap();
                let iv = implied_vol(c, k, 1.0, None).unwrap();
                assert!((iv - 0.3).abs() < 1e-10, "k = {k}: {iv}");
            }
            // out-of-the-money prices resolve much smaller volatilities
            for vol in [0.1, 0.3, 0.8] {
                let p = bs_otm(k, vol, 1.0).unwrap();
                let iv = implied_vol_otm(p, k, 1.0, Some(0.2)).unwrap();
                assert!((iv - vol).abs() < 1e-10, "k = {k}, vol = {vol}: {iv}");
            }
        }
    }

    #[test]
    fn prices_outside_the_arbitrage_bounds() {
        assert!(matches!(implied_vol(1.0, 0.2, 1.0, None), Err(Error::Arbitrage { .. })));
        assert!(matches!(implied_vol(0.0, 0.2, 1.0, None), Err(Error::Arbitrage { .. })));
        let lo = 1.0 - (-0.3f64).exp();
        match implied_vol(lo + 1e-16, -0.3, 1.0, None) {
            Err(Error::Arbitrage { .. }) => {}
            Ok(v) => assert!(v < 0.05),
            Err(e) => panic!("{e}"),
        }
    }
}
