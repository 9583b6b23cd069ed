//! Exact counting of lattice points under `h^a r^b <= x`, the error term
//! `Δ_{a,b}(x)`, its truncated Voronoi expansion, the coincidence constant
//! `G_{a,b}`, and piecewise-exact window moments of `Δ` and `Δ²`.
//!
//! Every numeric quantity travels as a [`RealBall`](precision::RealBall): an
//! MPFR midpoint with a rigorous radius. Integer exponent pairs are counted in
//! exact integer arithmetic; irrational pairs use certified ball comparisons
//! with precision escalation.

pub mod coincidence;
pub mod correlation;
pub mod counting;
pub mod error;
pub mod moments;
pub mod precision;
pub mod sampling;
pub mod voronoi;

#[cfg(test)]
mod properties;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use precision::{ExponentPair, PairKind, PrecisionContext, RealBall};
