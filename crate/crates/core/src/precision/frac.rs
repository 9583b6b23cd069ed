use std::cmp::Ordering;

use rug::{Float, Integer, Rational};

use super::{interval_to_ball, PrecisionContext, RealBall};
use crate::error::{Error, Result};

/// A real number that can be enclosed at any requested precision.
pub trait Approximable {
    fn ball(&self, bits: u32) -> RealBall;

    /// The exact rational value, when known.
    fn exact(&self) -> Option<Rational> {
        None
    }
}

impl Approximable for Rational {
    fn ball(&self, bits: u32) -> RealBall {
        RealBall::from_rational(self, bits)
    }

    fn exact(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl Approximable for Integer {
    fn ball(&self, bits: u32) -> RealBall {
        RealBall::from_integer(self, bits)
    }

    fn exact(&self) -> Option<Rational> {
        Some(Rational::from(self))
    }
}

/// A fixed ball; escalation cannot shrink it.
impl Approximable for RealBall {
    fn ball(&self, _bits: u32) -> RealBall {
        self.clone()
    }
}

/// A closure `bits -> ball`, optionally paired with a known exact value.
pub struct Lazy<F> {
    f: F,
    exact: Option<Rational>,
}

impl<F: Fn(u32) -> RealBall> Lazy<F> {
    pub fn new(f: F) -> Self {
        Lazy { f, exact: None }
    }

    pub fn with_exact(f: F, exact: Option<Rational>) -> Self {
        Lazy { f, exact }
    }
}

impl<F: Fn(u32) -> RealBall> Approximable for Lazy<F> {
    fn ball(&self, bits: u32) -> RealBall {
        (self.f)(bits)
    }

    fn exact(&self) -> Option<Rational> {
        self.exact.clone()
    }
}

/// Certified `[t]`, `{t}`, `ψ(t)` and `‖t‖`.
#[derive(Clone, Debug)]
pub struct FracDecomposition {
    pub floor_part: Integer,
    pub frac_part: RealBall,
    pub psi: RealBall,
    pub dist: RealBall,
}

impl FracDecomposition {
    fn from_exact(t: &Rational, bits: u32) -> Self {
        let floor_part = Integer::from(t.floor_ref());
        let frac = Rational::from(t - &floor_part);
        let half = Rational::from((1, 2));
        let dist = if frac <= half {
            frac.clone()
        } else {
            Rational::from(1) - &frac
        };
        FracDecomposition {
            floor_part,
            psi: RealBall::from_rational(&Rational::from(&frac - &half), bits),
            frac_part: RealBall::from_rational(&frac, bits),
            dist: RealBall::from_rational(&dist, bits),
        }
    }

    fn from_ball(t: &RealBall, floor_part: Integer) -> Self {
        let p = t.prec();
        let raw = t.sub_ball(&RealBall::from_integer(&floor_part, p));
        let zero = Float::new(p);
        let one = Float::with_val(p, 1);
        let lo = raw.lower();
        let hi = raw.upper();
        let lo = if lo < zero { zero } else { lo };
        let hi = if hi > one { one } else { hi };
        let frac_part = interval_to_ball(&lo, &hi, p);
        let half = RealBall::from_rational(&Rational::from((1, 2)), p);
        let psi = frac_part.sub_ball(&half);
        let dist = frac_part.min(&RealBall::one(p).sub_ball(&frac_part));
        FracDecomposition {
            floor_part,
            frac_part,
            psi,
            dist,
        }
    }
}

/// Decompose `t` into integer and fractional parts with a certified floor.
///
/// Exact inputs are decided in rational arithmetic, so integers give
/// `ψ = -1/2` and `‖t‖ = 0` exactly. Otherwise the enclosure is refined along
/// the precision ladder until it lies strictly between two integers.
pub fn frac_decompose<A: Approximable + ?Sized>(t: &A, ctx: &PrecisionContext) -> Result<FracDecomposition> {
    if let Some(q) = t.exact() {
        return Ok(FracDecomposition::from_exact(&q, ctx.bits));
    }
    let mut last = ctx.bits;
    for bits in ctx.ladder() {
        last = bits;
        let b = t.ball(bits);
        if !b.is_finite() {
            continue;
        }
        if let Some(n) = b.exact_integer() {
            return Ok(FracDecomposition::from_exact(&Rational::from(n), bits));
        }
        if let Some(n) = b.floor_certified() {
            // the ball must also avoid the integer n itself
            if b.cmp_rational(&Rational::from(&n)) == Some(Ordering::Greater) {
                return Ok(FracDecomposition::from_ball(&b, n));
            }
        }
        if b.is_exact() {
            // an exact dyadic midpoint is its own value
            let q = b.mid().to_rational().expect("finite");
            return Ok(FracDecomposition::from_exact(&q, bits));
        }
    }
    Err(Error::AmbiguousFloor { bits: last })
}
