use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::{Constant, Round, Special};
use rug::ops::{AssignRound, PowAssignRound};
use rug::{Float, Integer, Rational};

/// Precision of the radius. Radii are always rounded up.
pub const RAD_PREC: u32 = 64;

/// A real number `mid ± rad` with an MPFR midpoint and a rigorous radius.
///
/// Every operation returns a ball that contains the exact result for every
/// choice of inputs inside the operand balls.
#[derive(Clone, Debug)]
pub struct RealBall {
    mid: Float,
    rad: Float,
}

fn up<T>(val: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(RAD_PREC, val, Round::Up).0
}

fn down<T>(val: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(RAD_PREC, val, Round::Down).0
}

fn zero_rad() -> Float {
    Float::new(RAD_PREC)
}

fn inf_rad() -> Float {
    Float::with_val(RAD_PREC, Special::Infinity)
}

/// Bound on the error of a correctly rounded result `mid` at precision `prec`.
fn rounding_err(mid: &Float, ternary: Ordering) -> Float {
    if ternary == Ordering::Equal {
        return zero_rad();
    }
    if mid.is_zero() || !mid.is_finite() {
        return inf_rad();
    }
    let mut e = up(mid.abs_ref());
    e >>= mid.prec() - 1;
    e
}

fn abs_up(x: &Float) -> Float {
    up(x.abs_ref())
}

fn abs_down(x: &Float) -> Float {
    down(x.abs_ref())
}

impl RealBall {
    pub fn from_parts(mid: Float, rad: Float) -> Self {
        let rad = if rad.is_nan() { inf_rad() } else { up(rad.abs_ref()) };
        RealBall { mid, rad }
    }

    pub fn zero(prec: u32) -> Self {
        RealBall {
            mid: Float::new(prec),
            rad: zero_rad(),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    /// A ball covering the whole real line.
    pub fn indeterminate(prec: u32) -> Self {
        RealBall {
            mid: Float::new(prec),
            rad: inf_rad(),
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        let (mid, t) = Float::with_val_round(prec, v, Round::Nearest);
        let rad = rounding_err(&mid, t);
        RealBall { mid, rad }
    }

    pub fn from_u64(v: u64, prec: u32) -> Self {
        let (mid, t) = Float::with_val_round(prec, v, Round::Nearest);
        let rad = rounding_err(&mid, t);
        RealBall { mid, rad }
    }

    pub fn from_integer(v: &Integer, prec: u32) -> Self {
        let (mid, t) = Float::with_val_round(prec, v, Round::Nearest);
        let rad = rounding_err(&mid, t);
        RealBall { mid, rad }
    }

    pub fn from_rational(v: &Rational, prec: u32) -> Self {
        let (mid, t) = Float::with_val_round(prec, v, Round::Nearest);
        let rad = rounding_err(&mid, t);
        RealBall { mid, rad }
    }

    /// Exact conversion of a finite `f64` (requires `prec >= 53`).
    pub fn from_f64(v: f64, prec: u32) -> Self {
        let (mid, t) = Float::with_val_round(prec.max(53), v, Round::Nearest);
        let rad = rounding_err(&mid, t);
        RealBall { mid, rad }
    }

    /// Ball covering the rational interval `[lo, hi]`.
    pub fn from_rational_interval(lo: &Rational, hi: &Rational, prec: u32) -> Self {
        let center = Rational::from(lo + hi) / 2u32;
        let half = Rational::from(hi - lo) / 2u32;
        let mut b = Self::from_rational(&center, prec);
        b.rad = up(&b.rad + &up(&half));
        b
    }

    pub fn pi(prec: u32) -> Self {
        let (mid, t) = Float::with_val_round(prec, Constant::Pi, Round::Nearest);
        let rad = rounding_err(&mid, t);
        RealBall { mid, rad }
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> &Float {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.mid.is_finite() && self.rad.is_finite()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64_round(Round::Up)
    }

    /// Lower endpoint rounded toward −∞ at the midpoint precision.
    pub fn lower(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid - &self.rad, Round::Down).0
    }

    /// Upper endpoint rounded toward +∞ at the midpoint precision.
    pub fn upper(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid + &self.rad, Round::Up).0
    }

    /// Re-round the midpoint to `prec` bits, widening the radius accordingly.
    pub fn with_prec(&self, prec: u32) -> Self {
        let (mid, t) = Float::with_val_round(prec, &self.mid, Round::Nearest);
        let rad = up(&self.rad + &rounding_err(&mid, t));
        RealBall { mid, rad }
    }

    /// Add `extra` (an absolute error bound) to the radius.
    pub fn widen(&self, extra: &Float) -> Self {
        RealBall {
            mid: self.mid.clone(),
            rad: up(&self.rad + &abs_up(extra)),
        }
    }

    /// Certified sign; `None` when the ball contains zero but is not the exact zero.
    pub fn sign(&self) -> Option<Ordering> {
        if !self.is_finite() {
            return None;
        }
        if self.rad.is_zero() {
            return self.mid.partial_cmp(&0);
        }
        if self.lower() > 0 {
            Some(Ordering::Greater)
        } else if self.upper() < 0 {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Some(Ordering::Greater)
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Some(Ordering::Less)
    }

    /// Certified comparison with another ball.
    pub fn cmp_ball(&self, other: &RealBall) -> Option<Ordering> {
        if self.is_exact() && other.is_exact() {
            return self.mid.partial_cmp(&other.mid);
        }
        if !self.is_finite() || !other.is_finite() {
            return None;
        }
        if self.lower() > other.upper() {
            Some(Ordering::Greater)
        } else if self.upper() < other.lower() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Certified comparison with an exact rational.
    pub fn cmp_rational(&self, q: &Rational) -> Option<Ordering> {
        if !self.is_finite() {
            return None;
        }
        if self.rad.is_zero() {
            return self.mid.partial_cmp(q);
        }
        if self.lower() > *q {
            Some(Ordering::Greater)
        } else if self.upper() < *q {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.is_finite() && self.lower() <= *q && self.upper() >= *q
    }

    pub fn contains_f64(&self, v: f64) -> bool {
        self.is_finite() && self.lower() <= v && self.upper() >= v
    }

    pub fn overlaps(&self, other: &RealBall) -> bool {
        self.cmp_ball(other).is_none() || (self.is_exact() && other.is_exact() && self.mid == other.mid)
    }

    /// Floor, if it is the same integer for every point of the ball.
    pub fn floor_certified(&self) -> Option<Integer> {
        if !self.is_finite() {
            return None;
        }
        if self.rad.is_zero() {
            return Float::with_val(self.prec(), self.mid.floor_ref()).to_integer();
        }
        let lo = Float::with_val(self.prec(), self.lower().floor_ref());
        let hi = Float::with_val(self.prec(), self.upper().floor_ref());
        if lo == hi {
            lo.to_integer()
        } else {
            None
        }
    }

    /// True when the ball is the exact integer it represents.
    pub fn exact_integer(&self) -> Option<Integer> {
        if self.rad.is_zero() && self.mid.is_integer() {
            self.mid.to_integer()
        } else {
            None
        }
    }

    pub fn neg(&self) -> Self {
        RealBall {
            mid: Float::with_val(self.prec(), -&self.mid),
            rad: self.rad.clone(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.mid.is_sign_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add_ball(&self, o: &RealBall) -> Self {
        let p = self.prec().max(o.prec());
        let (mid, t) = Float::with_val_round(p, &self.mid + &o.mid, Round::Nearest);
        let rad = up(&up(&self.rad + &o.rad) + &rounding_err(&mid, t));
        RealBall { mid, rad }
    }

    pub fn sub_ball(&self, o: &RealBall) -> Self {
        let p = self.prec().max(o.prec());
        let (mid, t) = Float::with_val_round(p, &self.mid - &o.mid, Round::Nearest);
        let rad = up(&up(&self.rad + &o.rad) + &rounding_err(&mid, t));
        RealBall { mid, rad }
    }

    pub fn mul_ball(&self, o: &RealBall) -> Self {
        let p = self.prec().max(o.prec());
        let (mid, t) = Float::with_val_round(p, &self.mid * &o.mid, Round::Nearest);
        let mut rad = rounding_err(&mid, t);
        if !self.rad.is_zero() || !o.rad.is_zero() {
            let a = up(&abs_up(&self.mid) * &o.rad);
            let b = up(&abs_up(&o.mid) * &self.rad);
            let c = up(&self.rad * &o.rad);
            rad = up(&rad + &up(&up(&a + &b) + &c));
        }
        RealBall { mid, rad }
    }

    pub fn div_ball(&self, o: &RealBall) -> Self {
        let p = self.prec().max(o.prec());
        let den_abs = abs_down(&o.mid);
        if den_abs.partial_cmp(&o.rad) != Some(Ordering::Greater) || !self.is_finite() {
            return RealBall::indeterminate(p);
        }
        let (mid, t) = Float::with_val_round(p, &self.mid / &o.mid, Round::Nearest);
        let mut rad = rounding_err(&mid, t);
        if !self.rad.is_zero() || !o.rad.is_zero() {
            let num = up(&up(&abs_up(&self.mid) * &o.rad) + &up(&abs_up(&o.mid) * &self.rad));
            let gap = down(&den_abs - &o.rad);
            let den = down(&den_abs * &gap);
            rad = up(&rad + &up(&num / &den));
        }
        RealBall { mid, rad }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        let (mid, t) = Float::with_val_round(self.prec(), &self.mid * k, Round::Nearest);
        let scaled = up(&self.rad * k.unsigned_abs());
        let rad = up(&scaled + &rounding_err(&mid, t));
        RealBall { mid, rad }
    }

    pub fn add_i64(&self, k: i64) -> Self {
        let (mid, t) = Float::with_val_round(self.prec(), &self.mid + k, Round::Nearest);
        let rad = up(&self.rad + &rounding_err(&mid, t));
        RealBall { mid, rad }
    }

    pub fn add_integer(&self, k: &Integer) -> Self {
        let (mid, t) = Float::with_val_round(self.prec(), &self.mid + k, Round::Nearest);
        let rad = up(&self.rad + &rounding_err(&mid, t));
        RealBall { mid, rad }
    }

    pub fn div_i64(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        let (mid, t) = Float::with_val_round(self.prec(), &self.mid / k, Round::Nearest);
        let scaled = up(&self.rad / k.unsigned_abs());
        let rad = up(&scaled + &rounding_err(&mid, t));
        RealBall { mid, rad }
    }

    /// Multiply by `2^k` (exact up to exponent range).
    pub fn mul_2si(&self, k: i32) -> Self {
        let mut mid = self.mid.clone();
        let mut rad = self.rad.clone();
        if k >= 0 {
            mid <<= k as u32;
            rad <<= k as u32;
        } else {
            mid >>= (-k) as u32;
            rad >>= (-k) as u32;
        }
        RealBall { mid, rad }
    }

    pub fn sqr(&self) -> Self {
        let p = self.prec();
        let (mid, t) = Float::with_val_round(p, self.mid.square_ref(), Round::Nearest);
        let mut rad = rounding_err(&mid, t);
        if !self.rad.is_zero() {
            let a = up(&up(&abs_up(&self.mid) * &self.rad) * 2u32);
            let c = up(self.rad.square_ref());
            rad = up(&rad + &up(&a + &c));
        }
        RealBall { mid, rad }
    }

    pub fn recip(&self) -> Self {
        RealBall::one(self.prec()).div_ball(self)
    }

    /// Evaluate a monotone function through the endpoints of the ball.
    fn monotone<F>(&self, increasing: bool, f: F) -> Self
    where
        F: Fn(&mut Float, Round) -> Ordering,
    {
        self.monotone_impl(increasing, true, f)
    }

    /// As [`monotone`](Self::monotone), for `f` made of several rounded steps.
    fn monotone_composite<F>(&self, increasing: bool, f: F) -> Self
    where
        F: Fn(&mut Float, Round) -> Ordering,
    {
        self.monotone_impl(increasing, false, f)
    }

    fn monotone_impl<F>(&self, increasing: bool, single_rounding: bool, f: F) -> Self
    where
        F: Fn(&mut Float, Round) -> Ordering,
    {
        let p = self.prec();
        let mut mid = self.mid.clone();
        let t = f(&mut mid, Round::Nearest);
        if self.rad.is_zero() && single_rounding {
            let rad = rounding_err(&mid, t);
            if mid.is_nan() {
                return RealBall::indeterminate(p);
            }
            return RealBall { mid, rad };
        }
        let (r_lo, r_hi) = if increasing {
            (Round::Down, Round::Up)
        } else {
            (Round::Up, Round::Down)
        };
        let mut lo = self.lower();
        f(&mut lo, r_lo);
        let mut hi = self.upper();
        f(&mut hi, r_hi);
        if lo.is_nan() || hi.is_nan() || mid.is_nan() {
            return RealBall::indeterminate(p);
        }
        let (lo, hi) = if increasing { (lo, hi) } else { (hi, lo) };
        let a = up(&hi - &mid);
        let b = up(&mid - &lo);
        let rad = if a > b { a } else { b };
        let rad = up(&rad + &rounding_err(&mid, t));
        RealBall { mid, rad }
    }

    pub fn exp(&self) -> Self {
        self.monotone(true, |x, r| x.exp_round(r))
    }

    /// Natural logarithm; indeterminate unless the ball is strictly positive.
    pub fn ln(&self) -> Self {
        if !self.is_positive() {
            return RealBall::indeterminate(self.prec());
        }
        self.monotone(true, |x, r| x.ln_round(r))
    }

    pub fn sqrt(&self) -> Self {
        if self.sign() == Some(Ordering::Less) || self.sign().is_none() && self.lower() < 0 {
            return RealBall::indeterminate(self.prec());
        }
        self.monotone(true, |x, r| x.sqrt_round(r))
    }

    /// `self^e` for a strictly positive base.
    pub fn pow(&self, e: &RealBall) -> Self {
        if !self.is_positive() {
            return RealBall::indeterminate(self.prec().max(e.prec()));
        }
        if e.is_exact() {
            let p = self.prec().max(e.prec());
            let base = if self.prec() < p { self.with_prec(p) } else { self.clone() };
            let ex = e.mid.clone();
            let increasing = ex >= 0;
            if ex.is_zero() {
                return RealBall::one(p);
            }
            // x^e is increasing in x for e > 0, decreasing for e < 0.
            return base.monotone(increasing, move |x, r| x.pow_assign_round(&ex, r));
        }
        self.ln().mul_ball(e).exp()
    }

    /// `self^(p/q)` for a strictly positive base, using exact roots for small `q`.
    pub fn pow_rational(&self, e: &Rational) -> Self {
        if *e.denom() == 1 && e.numer().cmp0() != Ordering::Less {
            if let Some(n) = e.numer().to_u32() {
                return self.pow_u(n);
            }
        }
        if !self.is_positive() {
            return RealBall::indeterminate(self.prec());
        }
        match (e.numer().to_i32(), e.denom().to_u32()) {
            (Some(p), Some(q)) if q <= 64 => {
                let k = p.unsigned_abs();
                let pos = self.monotone_composite(true, move |x, r| {
                    let t = x.root_round(q, r);
                    if k == 1 {
                        t
                    } else {
                        x.pow_assign_round(k, r)
                    }
                });
                if p < 0 {
                    pos.recip()
                } else {
                    pos
                }
            }
            _ => self.pow(&RealBall::from_rational(e, self.prec() + 32)),
        }
    }

    /// `self^n` for a nonnegative integer power.
    pub fn pow_u(&self, n: u32) -> Self {
        if n == 0 {
            return RealBall::one(self.prec());
        }
        if self.is_positive() || self.is_exact() && !self.mid.is_sign_negative() {
            return self.monotone(true, move |x, r| x.pow_assign_round(n, r));
        }
        let mut acc = RealBall::one(self.prec());
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_ball(&base);
            }
            base = base.sqr();
            k >>= 1;
        }
        acc
    }

    pub fn cos(&self) -> Self {
        let p = self.prec();
        let (mid, t) = Float::with_val_round(p, self.mid.cos_ref(), Round::Nearest);
        let rad = up(&self.rad + &rounding_err(&mid, t));
        RealBall { mid, rad }
    }

    pub fn sin(&self) -> Self {
        let p = self.prec();
        let (mid, t) = Float::with_val_round(p, self.mid.sin_ref(), Round::Nearest);
        let rad = up(&self.rad + &rounding_err(&mid, t));
        RealBall { mid, rad }
    }

    /// Fractional offset of the midpoint from its nearest integer, in [-1/2, 1/2].
    fn reduce_turns(&self) -> RealBall {
        let nearest = Float::with_val(self.prec(), self.mid.round_ref());
        let (mid, t) = Float::with_val_round(self.prec(), &self.mid - &nearest, Round::Nearest);
        let rad = up(&self.rad + &rounding_err(&mid, t));
        RealBall { mid, rad }
    }

    /// `cos(2π t)`, reducing `t` modulo 1 before scaling by 2π.
    pub fn cos_2pi(&self) -> Self {
        let reduced = self.reduce_turns();
        let angle = reduced.mul_ball(&RealBall::pi(self.prec())).mul_2si(1);
        angle.cos()
    }

    /// `sin(2π t)`, reducing `t` modulo 1 before scaling by 2π.
    pub fn sin_2pi(&self) -> Self {
        let reduced = self.reduce_turns();
        let angle = reduced.mul_ball(&RealBall::pi(self.prec())).mul_2si(1);
        angle.sin()
    }

    /// Ball hull of two balls.
    pub fn union(&self, o: &RealBall) -> Self {
        let p = self.prec().max(o.prec());
        let lo = {
            let (a, b) = (self.lower(), o.lower());
            if a < b { a } else { b }
        };
        let hi = {
            let (a, b) = (self.upper(), o.upper());
            if a > b { a } else { b }
        };
        interval_to_ball(&lo, &hi, p)
    }

    /// Ball containing `max(self, o)` pointwise.
    pub fn max(&self, o: &RealBall) -> Self {
        match self.cmp_ball(o) {
            Some(Ordering::Greater) | Some(Ordering::Equal) => self.clone(),
            Some(Ordering::Less) => o.clone(),
            None => {
                let p = self.prec().max(o.prec());
                let lo = {
                    let (a, b) = (self.lower(), o.lower());
                    if a > b { a } else { b }
                };
                let hi = {
                    let (a, b) = (self.upper(), o.upper());
                    if a > b { a } else { b }
                };
                interval_to_ball(&lo, &hi, p)
            }
        }
    }

    pub fn min(&self, o: &RealBall) -> Self {
        self.neg().max(&o.neg()).neg()
    }
}

/// Smallest convenient ball containing `[lo, hi]`.
pub(crate) fn interval_to_ball(lo: &Float, hi: &Float, prec: u32) -> RealBall {
    let (mid, _) = Float::with_val_round(prec, lo + hi, Round::Nearest);
    let mid = mid / 2u32;
    let a = up(hi - &mid);
    let b = up(&mid - lo);
    let rad = if a > b { a } else { b };
    RealBall { mid, rad }
}

impl fmt::Display for RealBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec() as f64) * std::f64::consts::LOG10_2).floor().clamp(6.0, 40.0) as usize;
        let m = self.mid.to_string_radix(10, Some(digits));
        if self.rad.is_zero() {
            write!(f, "{m}")
        } else {
            write!(f, "{m} +/- {:.3e}", self.rad.to_f64_round(Round::Up))
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $impl_fn:ident) => {
        impl<'a> $trait<&'a RealBall> for &'a RealBall {
            type Output = RealBall;
            fn $method(self, rhs: &'a RealBall) -> RealBall {
                self.$impl_fn(rhs)
            }
        }
        impl $trait<RealBall> for RealBall {
            type Output = RealBall;
            fn $method(self, rhs: RealBall) -> RealBall {
                self.$impl_fn(&rhs)
            }
        }
        impl<'a> $trait<&'a RealBall> for RealBall {
            type Output = RealBall;
            fn $method(self, rhs: &'a RealBall) -> RealBall {
                self.$impl_fn(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ball);
forward_binop!(Sub, sub, sub_ball);
forward_binop!(Mul, mul, mul_ball);
forward_binop!(Div, div, div_ball);

impl Neg for RealBall {
    type Output = RealBall;
    fn neg(self) -> RealBall {
        RealBall::neg(&self)
    }
}

impl Neg for &RealBall {
    type Output = RealBall;
    fn neg(self) -> RealBall {
        RealBall::neg(self)
    }
}
