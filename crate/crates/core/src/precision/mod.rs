//! Certified real arithmetic and the special functions built on it.

mod ball;
mod contfrac;
mod context;
mod exponent;
mod frac;
mod pair;
mod roots;
mod surd;
mod zeta;

pub use ball::{RealBall, RAD_PREC};
pub use contfrac::cf_convergents;
pub use context::{
    escalation_count, PrecisionContext, DEFAULT_BITS, DEFAULT_ESCALATION, DEFAULT_MAX_BITS,
    MAX_BITS_ENV,
};
pub use exponent::{parse_exponent, parse_rational, Exponent};
pub use frac::{frac_decompose, Approximable, FracDecomposition, Lazy};
pub use pair::{DerivedConstants, ExponentPair, PairKind, RoleExponents, Roles, MAX_INTEGER_EXPONENT};
pub use roots::{integer_kth_root, kth_root_u64, pow_u128};
pub use surd::{QuadSurd, MAX_RADICAND};
pub use zeta::zeta_real;

pub(crate) use ball::interval_to_ball;
