use std::cmp::Ordering;
use std::fmt;

use rug::{Integer, Rational};

use super::exponent::{parse_exponent, Exponent};
use super::{PrecisionContext, RealBall};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairKind {
    /// Coprime integers `1 <= a < b`.
    IntegerCoprime,
    /// Elements of one real quadratic field with `a/b` certified irrational.
    QuadraticSurd,
    /// Decimal approximations; irrationality of `a/b` is asserted by the user.
    Decimal,
}

impl PairKind {
    /// True when distinct `(h, r)` can never give equal `h^a r^b`.
    pub fn irrational_ratio(self) -> bool {
        !matches!(self, PairKind::IntegerCoprime)
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PairKind::IntegerCoprime => "integer_coprime",
            PairKind::QuadraticSurd => "quadratic_surd",
            PairKind::Decimal => "decimal",
        };
        f.write_str(s)
    }
}

/// Which parameter plays the role of `a` in a role-asymmetric quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Roles {
    /// `(a, b)` as given.
    Ab,
    /// `(b, a)`: the roles of the exponents (and of `h`, `r`) swapped.
    Ba,
}

/// Exponents of a pair, in the order selected by [`Roles`].
#[derive(Clone, Debug)]
pub struct RoleExponents {
    pub a: Exponent,
    pub b: Exponent,
    /// Integer values of `(a, b)` for the integer kind.
    pub ints: Option<(u32, u32)>,
    pub e_h: Exponent,
    pub e_r: Exponent,
}

impl RoleExponents {
    pub fn a_ball(&self, bits: u32) -> RealBall {
        self.a.to_ball(bits)
    }

    pub fn b_ball(&self, bits: u32) -> RealBall {
        self.b.to_ball(bits)
    }
}

/// Ball values of the constants derived from `(a, b)`.
#[derive(Clone, Debug)]
pub struct DerivedConstants {
    /// `1/(a+b)`
    pub theta: RealBall,
    /// `(a+2b)/(2(a+b))`, the decay exponent in `h`.
    pub e_h: RealBall,
    /// `(2a+b)/(2(a+b))`, the decay exponent in `r`.
    pub e_r: RealBall,
    /// `a^{b/(2(a+b))} b^{a/(2(a+b))} (a+b)^{-1/2}`
    pub c1: RealBall,
    /// `(a/b)^{b/(a+b)} + (b/a)^{a/(a+b)}`
    pub c2: RealBall,
}

/// The exponent pair `(a, b)` with its kind and exact derived exponents.
#[derive(Clone, Debug)]
pub struct ExponentPair {
    kind: PairKind,
    a: Exponent,
    b: Exponent,
    a_int: Option<u32>,
    b_int: Option<u32>,
    sum: Exponent,
    b_over_a: Exponent,
    a_over_b: Exponent,
    theta: Exponent,
    e_h: Exponent,
    e_r: Exponent,
    kappa: Exponent,
    derived: DerivedConstants,
}

/// Largest integer exponent accepted; keeps `h^a r^b` inside `u128` at desk scale.
pub const MAX_INTEGER_EXPONENT: u32 = 64;

impl ExponentPair {
    pub fn integer(a: u32, b: u32) -> Result<Self> {
        Self::from_exponents(Exponent::integer(a as i64), Exponent::integer(b as i64), &PrecisionContext::default())
    }

    /// Parse both parameters (see [`parse_exponent`]) and validate the pair.
    pub fn parse(a: &str, b: &str, ctx: &PrecisionContext) -> Result<Self> {
        Self::from_exponents(parse_exponent(a)?, parse_exponent(b)?, ctx)
    }

    pub fn from_exponents(a: Exponent, b: Exponent, ctx: &PrecisionContext) -> Result<Self> {
        let kind = classify(&a, &b)?;
        let one = Exponent::integer(1);
        match a.cmp_certified(&one)? {
            Some(Ordering::Greater) | Some(Ordering::Equal) => {}
            _ => return Err(Error::InvalidPair(format!("need a >= 1, got a = {a}"))),
        }
        match a.cmp_certified(&b)? {
            Some(Ordering::Less) => {}
            Some(Ordering::Equal) => {
                return Err(Error::InvalidPair("a = b is the classical divisor problem".to_string()))
            }
            _ => return Err(Error::InvalidPair(format!("need a < b, got a = {a}, b = {b}"))),
        }
        let (a_int, b_int) = match kind {
            PairKind::IntegerCoprime => {
                let ai = a.as_integer().and_then(|v| v.to_u32());
                let bi = b.as_integer().and_then(|v| v.to_u32());
                match (ai, bi) {
                    (Some(x), Some(y)) if y <= MAX_INTEGER_EXPONENT => (Some(x), Some(y)),
                    _ => {
                        return Err(Error::InvalidPair(format!(
                            "integer exponents must be at most {MAX_INTEGER_EXPONENT}"
                        )))
                    }
                }
            }
            _ => (None, None),
        };
        let sum = a.add(&b)?;
        let two_sum = sum.scale(&Rational::from(2))?;
        let b_over_a = b.div(&a)?;
        let a_over_b = a.div(&b)?;
        let theta = sum.recip()?;
        let e_h = a.add(&b.scale(&Rational::from(2))?)?.div(&two_sum)?;
        let e_r = a.scale(&Rational::from(2))?.add(&b)?.div(&two_sum)?;
        // b e_h + a e_r = (a² + ab + b²)/(a+b)
        let kappa = b.mul(&e_h)?.add(&a.mul(&e_r)?)?;
        let mut pair = ExponentPair {
            kind,
            a,
            b,
            a_int,
            b_int,
            sum,
            b_over_a,
            a_over_b,
            theta,
            e_h,
            e_r,
            kappa,
            derived: DerivedConstants {
                theta: RealBall::zero(ctx.bits),
                e_h: RealBall::zero(ctx.bits),
                e_r: RealBall::zero(ctx.bits),
                c1: RealBall::zero(ctx.bits),
                c2: RealBall::zero(ctx.bits),
            },
        };
        pair.derived = pair.constants(ctx.bits);
        Ok(pair)
    }

    pub fn kind(&self) -> PairKind {
        self.kind
    }

    pub fn a(&self) -> &Exponent {
        &self.a
    }

    pub fn b(&self) -> &Exponent {
        &self.b
    }

    /// `(a, b)` as machine integers for the integer kind.
    pub fn integer_exponents(&self) -> Option<(u32, u32)> {
        Some((self.a_int?, self.b_int?))
    }

    pub fn sum(&self) -> &Exponent {
        &self.sum
    }

    pub fn b_over_a(&self) -> &Exponent {
        &self.b_over_a
    }

    pub fn a_over_b(&self) -> &Exponent {
        &self.a_over_b
    }

    pub fn theta(&self) -> &Exponent {
        &self.theta
    }

    pub fn e_h(&self) -> &Exponent {
        &self.e_h
    }

    pub fn e_r(&self) -> &Exponent {
        &self.e_r
    }

    /// `σ₁ = (a+2b)/(a+b) = 2 e_h`
    pub fn sigma1(&self) -> Exponent {
        self.e_h.scale(&Rational::from(2)).expect("same field")
    }

    /// `σ₂ = (2a+b)/(a+b) = 2 e_r`
    pub fn sigma2(&self) -> Exponent {
        self.e_r.scale(&Rational::from(2)).expect("same field")
    }

    /// `κ = (a²+ab+b²)/(a+b)`
    pub fn kappa(&self) -> &Exponent {
        &self.kappa
    }

    /// The pair with the roles of `a` and `b` swapped (not validated as `a < b`).
    pub fn swapped_exponents(&self) -> (Exponent, Exponent) {
        (self.b.clone(), self.a.clone())
    }

    /// Derived constants at the construction precision.
    pub fn derived(&self) -> &DerivedConstants {
        &self.derived
    }

    /// Derived constants recomputed at `bits`.
    pub fn constants(&self, bits: u32) -> DerivedConstants {
        let a = self.a.to_ball(bits);
        let b = self.b.to_ball(bits);
        let theta = self.theta.to_ball(bits);
        let half_theta = theta.mul_2si(-1);
        let ln_a = a.ln();
        let ln_b = b.ln();
        let ln_sum = self.sum.to_ball(bits).ln();
        let c1 = b
            .mul_ball(&half_theta)
            .mul_ball(&ln_a)
            .add_ball(&a.mul_ball(&half_theta).mul_ball(&ln_b))
            .sub_ball(&ln_sum.mul_2si(-1))
            .exp();
        let ln_ratio = ln_a.sub_ball(&ln_b);
        let c2 = b
            .mul_ball(&theta)
            .mul_ball(&ln_ratio)
            .exp()
            .add_ball(&a.mul_ball(&theta).mul_ball(&ln_ratio.neg()).exp());
        DerivedConstants {
            theta,
            e_h: self.e_h.to_ball(bits),
            e_r: self.e_r.to_ball(bits),
            c1,
            c2,
        }
    }

    /// Coefficient `a^{b/(a+b)} b^{a/(a+b)} / (2π²(a+b)) = c1² / (2π²)` of the
    /// mean-square main term.
    pub fn mean_square_coefficient(&self, bits: u32) -> RealBall {
        let c1 = self.constants(bits).c1;
        let pi = RealBall::pi(bits);
        c1.sqr().div_ball(&pi.sqr().mul_2si(1))
    }

    /// The exponents with roles assigned; `θ` and `κ` are role-symmetric.
    pub fn roles(&self, roles: Roles) -> RoleExponents {
        match roles {
            Roles::Ab => RoleExponents {
                a: self.a.clone(),
                b: self.b.clone(),
                ints: self.integer_exponents(),
                e_h: self.e_h.clone(),
                e_r: self.e_r.clone(),
            },
            Roles::Ba => RoleExponents {
                a: self.b.clone(),
                b: self.a.clone(),
                ints: self.integer_exponents().map(|(a, b)| (b, a)),
                e_h: self.e_r.clone(),
                e_r: self.e_h.clone(),
            },
        }
    }

    /// Short textual description such as `(1, sqrt(2))`.
    pub fn label(&self) -> String {
        format!("({}, {})", self.a, self.b)
    }
}

fn classify(a: &Exponent, b: &Exponent) -> Result<PairKind> {
    match (a, b) {
        (Exponent::Exact(x), Exponent::Exact(y)) => {
            if x.is_rational() && y.is_rational() {
                let xi = x.as_integer();
                let yi = y.as_integer();
                match (xi, yi) {
                    (Some(xi), Some(yi)) => {
                        if Integer::from(xi.gcd_ref(&yi)) != 1 {
                            return Err(Error::InvalidPair(format!(
                                "gcd({xi}, {yi}) != 1: enter the reduced pair"
                            )));
                        }
                        Ok(PairKind::IntegerCoprime)
                    }
                    _ => Err(Error::InvalidPair(
                        "rational ratio a/b: enter the reduced coprime integer pair".to_string(),
                    )),
                }
            } else {
                let ratio = x.div(y)?;
                if ratio.is_rational() {
                    return Err(Error::InvalidPair(
                        "a/b is rational: enter the reduced coprime integer pair".to_string(),
                    ));
                }
                Ok(PairKind::QuadraticSurd)
            }
        }
        _ => {
            for e in [a, b] {
                if let Exponent::Exact(s) = e {
                    if !s.is_rational() {
                        return Err(Error::InvalidPair(
                            "cannot mix a quadratic surd with a decimal parameter".to_string(),
                        ));
                    }
                }
            }
            Ok(PairKind::Decimal)
        }
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.label(), self.kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_pair_constants() {
        let p = ExponentPair::integer(1, 2).unwrap();
        assert_eq!(p.kind(), PairKind::IntegerCoprime);
        assert_eq!(p.theta().as_rational(), Some(&Rational::from((1, 3))));
        assert_eq!(p.e_h().as_rational(), Some(&Rational::from((5, 6))));
        assert_eq!(p.e_r().as_rational(), Some(&Rational::from((2, 3))));
        assert_eq!(p.kappa().as_rational(), Some(&Rational::from((7, 3))));
        // c1(1,2) = 2^{1/6}/sqrt(3); c2(1,2) = 2^{-2/3} + 2^{1/3}
        let d = p.derived();
        let c1 = 2f64.powf(1.0 / 6.0) / 3f64.sqrt();
        let c2 = 2f64.powf(-2.0 / 3.0) + 2f64.powf(1.0 / 3.0);
        assert!((d.c1.to_f64() - c1).abs() < 1e-15);
        assert!((d.c2.to_f64() - c2).abs() < 1e-15);
        assert!(d.c1.rad_f64() < 1e-50);
    }

    #[test]
    fn constants_are_symmetric() {
        let ctx = PrecisionContext::default();
        for (a, b) in [("1", "2"), ("2", "3"), ("1", "sqrt(2)"), ("1", "1.7320508")] {
            let p = ExponentPair::parse(a, b, &ctx).unwrap();
            let (sa, sb) = p.swapped_exponents();
            // build the swapped constants directly (a > b is fine for the formulas)
            let q = ExponentPair {
                a: sa,
                b: sb,
                ..p.clone()
            };
            let c = p.constants(192);
            let s = q.constants(192);
            assert!(c.c1.overlaps(&s.c1), "c1 asymmetric for {a},{b}");
            assert!(c.c2.overlaps(&s.c2), "c2 asymmetric for {a},{b}");
            assert!(c.c1.is_positive() && c.c2.is_positive());
        }
    }

    #[test]
    fn rejects_invalid_pairs() {
        let ctx = PrecisionContext::default();
        for (a, b) in [("2", "2"), ("2", "4"), ("3", "2"), ("1/2", "2"), ("3/2", "3"), ("sqrt(2)", "2*sqrt(2)"), ("sqrt(2)", "sqrt(3)"), ("0", "1")] {
            assert!(ExponentPair::parse(a, b, &ctx).is_err(), "({a},{b}) accepted");
        }
    }

    #[test]
    fn surd_pair_is_certified_irrational() {
        let p = ExponentPair::parse("1", "sqrt(2)", &PrecisionContext::default()).unwrap();
        assert_eq!(p.kind(), PairKind::QuadraticSurd);
        assert!(!p.a_over_b().as_exact().unwrap().is_rational());
        let s1 = p.sigma1().to_f64();
        let want = (1.0 + 2.0 * 2f64.sqrt()) / (1.0 + 2f64.sqrt());
        assert!((s1 - want).abs() < 1e-14);
    }
}
