//! Root finding, quadrature and ODE integration used by the model code.

pub mod ode;
pub mod quad;
pub mod roots;

pub use ode::{dopri5, OdeOptions};
pub use quad::{integrate, Estimate, QuadOptions};
pub use roots::brent;
