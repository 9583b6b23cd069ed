use std::cmp::Ordering;
use std::fmt;

use rug::{Integer, Rational};

use super::RealBall;
use crate::error::{Error, Result};

/// Exact element `p + q·√d` of a real quadratic field (or ℚ when `q = 0`).
///
/// `d` is kept squarefree and greater than 1 whenever `q != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSurd {
    p: Rational,
    q: Rational,
    d: Integer,
}

/// Largest accepted radicand (squarefree reduction is by trial division).
pub const MAX_RADICAND: u64 = 1_000_000_000_000;

/// Split `n > 0` as `k² · m` with `m` squarefree.
fn squarefree_split(n: &Integer) -> (Integer, Integer) {
    let mut m = n.clone();
    let mut k = Integer::from(1);
    let mut f = Integer::from(2);
    while Integer::from(&f * &f) <= m {
        let sq = Integer::from(&f * &f);
        while m.is_divisible(&sq) {
            m /= &sq;
            k *= &f;
        }
        f += 1;
    }
    (k, m)
}

impl QuadSurd {
    pub fn rational(p: Rational) -> Self {
        QuadSurd {
            p,
            q: Rational::new(),
            d: Integer::from(1),
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::rational(Rational::from(v))
    }

    /// `p + q·√n`, normalizing `n` to its squarefree part.
    pub fn new(p: Rational, q: Rational, n: Integer) -> Result<Self> {
        if n <= 0 {
            return Err(Error::Parse(format!("square root of nonpositive integer {n}")));
        }
        if n > MAX_RADICAND {
            return Err(Error::Parse(format!("radicand {n} exceeds {MAX_RADICAND}")));
        }
        let (k, m) = squarefree_split(&n);
        let q = q * k;
        if m == 1 || q == 0 {
            return Ok(Self::rational(p + q * m));
        }
        Ok(QuadSurd { p, q, d: m })
    }

    pub fn sqrt_of(n: u64) -> Result<Self> {
        Self::new(Rational::new(), Rational::from(1), Integer::from(n))
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn radicand(&self) -> &Integer {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.q == 0
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.p)
    }

    pub fn as_integer(&self) -> Option<Integer> {
        self.as_rational()
            .filter(|r| *r.denom() == 1)
            .map(|r| r.numer().clone())
    }

    fn field(&self, other: &QuadSurd) -> Result<Integer> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok(Integer::from(1)),
            (false, true) => Ok(self.d.clone()),
            (true, false) => Ok(other.d.clone()),
            (false, false) if self.d == other.d => Ok(self.d.clone()),
            _ => Err(Error::InvalidPair(format!(
                "surds from different fields: sqrt({}) and sqrt({})",
                self.d, other.d
            ))),
        }
    }

    fn build(p: Rational, q: Rational, d: Integer) -> Self {
        if q == 0 || d == 1 {
            QuadSurd::rational(p)
        } else {
            QuadSurd { p, q, d }
        }
    }

    pub fn add(&self, o: &QuadSurd) -> Result<Self> {
        let d = self.field(o)?;
        Ok(Self::build(
            Rational::from(&self.p + &o.p),
            Rational::from(&self.q + &o.q),
            d,
        ))
    }

    pub fn sub(&self, o: &QuadSurd) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        QuadSurd {
            p: Rational::from(-&self.p),
            q: Rational::from(-&self.q),
            d: self.d.clone(),
        }
    }

    pub fn mul(&self, o: &QuadSurd) -> Result<Self> {
        let d = self.field(o)?;
        let p = Rational::from(&self.p * &o.p) + Rational::from(&self.q * &o.q) * &d;
        let q = Rational::from(&self.p * &o.q) + Rational::from(&self.q * &o.p);
        Ok(Self::build(p, q, d))
    }

    /// `p² − q² d`; nonzero for every nonzero element.
    fn norm(&self) -> Rational {
        Rational::from(self.p.square_ref()) - Rational::from(self.q.square_ref()) * &self.d
    }

    pub fn recip(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0 {
            return Err(Error::InvalidArgument("division by zero surd".to_string()));
        }
        Ok(Self::build(
            Rational::from(&self.p / &n),
            Rational::from(-&self.q) / &n,
            self.d.clone(),
        ))
    }

    pub fn div(&self, o: &QuadSurd) -> Result<Self> {
        self.field(o)?;
        self.mul(&o.recip()?)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::build(
            Rational::from(&self.p * k),
            Rational::from(&self.q * k),
            self.d.clone(),
        )
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        let sp = self.p.cmp0();
        let sq = self.q.cmp0();
        if sq == Ordering::Equal {
            return sp;
        }
        if sp == Ordering::Equal || sp == sq {
            return sq;
        }
        // opposite signs: compare p² with q² d
        let p2 = Rational::from(self.p.square_ref());
        let q2d = Rational::from(self.q.square_ref()) * &self.d;
        if p2 > q2d {
            sp
        } else {
            sq
        }
    }

    pub fn cmp_exact(&self, o: &QuadSurd) -> Result<Ordering> {
        Ok(self.sub(o)?.signum())
    }

    pub fn to_ball(&self, prec: u32) -> RealBall {
        let p = RealBall::from_rational(&self.p, prec);
        if self.is_rational() {
            return p;
        }
        let root = RealBall::from_integer(&self.d, prec).sqrt();
        p.add_ball(&RealBall::from_rational(&self.q, prec).mul_ball(&root))
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.p);
        }
        if self.p != 0 {
            write!(f, "{}+", self.p)?;
        }
        if self.q == 1 {
            write!(f, "sqrt({})", self.d)
        } else {
            write!(f, "({})*sqrt({})", self.q, self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_square_factors() {
        let s = QuadSurd::sqrt_of(8).unwrap();
        assert_eq!(s.radicand(), &Integer::from(2));
        assert_eq!(s.q(), &Rational::from(2));
        assert!(QuadSurd::sqrt_of(9).unwrap().is_rational());
    }

    #[test]
    fn field_arithmetic_is_exact() {
        let r2 = QuadSurd::sqrt_of(2).unwrap();
        let sq = r2.mul(&r2).unwrap();
        assert_eq!(sq.as_integer(), Some(Integer::from(2)));
        let one = QuadSurd::from_i64(1);
        let ratio = one.div(&r2).unwrap();
        assert_eq!(ratio.q(), &Rational::from((1, 2)));
        assert!(!ratio.is_rational());
        let back = ratio.mul(&r2).unwrap();
        assert_eq!(back, one);
    }

    #[test]
    fn exact_sign_of_close_surd() {
        // 140/99 < sqrt(2) < 141421357/100000000
        let r2 = QuadSurd::sqrt_of(2).unwrap();
        let a = r2.sub(&QuadSurd::rational(Rational::from((140, 99)))).unwrap();
        assert_eq!(a.signum(), Ordering::Greater);
        let b = r2
            .sub(&QuadSurd::rational(Rational::from((141_421_357, 100_000_000))))
            .unwrap();
        assert_eq!(b.signum(), Ordering::Less);
    }

    #[test]
    fn mixing_fields_is_rejected() {
        let r2 = QuadSurd::sqrt_of(2).unwrap();
        let r3 = QuadSurd::sqrt_of(3).unwrap();
        assert!(r2.add(&r3).is_err());
    }
}
