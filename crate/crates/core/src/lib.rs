//! Critical moments, tail asymptotics and implied-volatility wing expansions
//! for the Heston model with non-positive correlation, together with a
//! numerical reference engine (Mellin inversion, Fourier pricing, implied
//! volatility) used to check them.

// `!(x > 0.0)` is how inputs are checked so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod criticality;
pub mod error;
pub mod model;
pub mod numerics;
pub mod reference;
pub mod riccati;
pub mod smile;
pub mod tails;

pub use criticality::CriticalPoint;
pub use error::{Error, Result, Side};
pub use model::{EvalContext, ModelParams};
pub use riccati::TransformValue;
pub use tails::TailConstants;
