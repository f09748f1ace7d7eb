use std::fmt;

use thiserror::Error;

/// Which tail of the distribution (equivalently, which wing of the smile).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Large strikes, moments of order `s > 1`.
    Upper,
    /// Small strikes, moments of negative order.
    Lower,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Upper => f.write_str("upper"),
            Side::Lower => f.write_str("lower"),
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" | "right" => Ok(Side::Upper),
            "lower" | "left" => Ok(Side::Lower),
            other => Err(Error::Domain(format!("unknown side `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0}")]
    Domain(String),
    #[error("transform exploded: t = {t} is not below the explosion time {tstar} of order {s}")]
    Exploded { s: f64, t: f64, tstar: f64 },
    #[error("complex logarithm lost continuity: {0}")]
    Branch(String),
    #[error("tolerance not reached: {0}")]
    Tolerance(String),
    #[error("no moment explosion on the {0} side; moment formula degenerate")]
    NoExplosion(Side),
    #[error("did not converge: {0}")]
    Convergence(String),
    #[error("abscissa {abscissa} outside the admissible strip ({lo}, {hi})")]
    Strip { abscissa: f64, lo: f64, hi: f64 },
    #[error("inversion integral is not positive ({value:e}); truncation too small")]
    NegativeMass { value: f64 },
    #[error("price {price} outside the no-arbitrage interval ({lo}, {hi})")]
    Arbitrage { price: f64, lo: f64, hi: f64 },
    #[error("price {price} violates the bounds [{lo}, {hi}] beyond tolerance")]
    Bounds { price: f64, lo: f64, hi: f64 },
}

impl Error {
    /// Stable identifier, used by the CLI and the C ABI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::Exploded { .. } => "ExplodedError",
            Error::Branch(_) => "BranchError",
            Error::Tolerance(_) => "ToleranceError",
            Error::NoExplosion(_) => "NoExplosionError",
            Error::Convergence(_) => "ConvergenceError",
            Error::Strip { .. } => "StripError",
            Error::NegativeMass { .. } => "NegativeMassError",
            Error::Arbitrage { .. } => "ArbitrageError",
            Error::Bounds { .. } => "BoundsError",
        }
    }

    /// Process exit code: 2 for bad inputs, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::Exploded { .. }
            | Error::NoExplosion(_)
            | Error::Strip { .. }
            | Error::Arbitrage { .. } => 2,
            Error::Branch(_)
            | Error::Tolerance(_)
            | Error::Convergence(_)
            | Error::NegativeMass { .. }
            | Error::Bounds { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::error::Error::Domain(format!($($arg)*))
    };
}
pub(crate) use domain;
