use std::cmp::Ordering;
use std::fmt;

use rug::{Integer, Rational};

use super::surd::QuadSurd;
use super::RealBall;
use crate::error::{Error, Result};

/// A real parameter: exact in ℚ(√d), or a rational interval standing for a
/// user-supplied decimal whose trailing digits are uncertain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    Exact(QuadSurd),
    Interval { lo: Rational, hi: Rational },
}

impl Exponent {
    pub fn integer(v: i64) -> Self {
        Exponent::Exact(QuadSurd::from_i64(v))
    }

    pub fn rational(v: Rational) -> Self {
        Exponent::Exact(QuadSurd::rational(v))
    }

    pub fn as_exact(&self) -> Option<&QuadSurd> {
        match self {
            Exponent::Exact(s) => Some(s),
            Exponent::Interval { .. } => None,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.as_exact().and_then(QuadSurd::as_rational)
    }

    pub fn as_integer(&self) -> Option<Integer> {
        self.as_exact().and_then(QuadSurd::as_integer)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Exponent::Exact(_))
    }

    fn interval(&self) -> Result<(Rational, Rational)> {
        match self {
            Exponent::Interval { lo, hi } => Ok((lo.clone(), hi.clone())),
            Exponent::Exact(s) => match s.as_rational() {
                Some(r) => Ok((r.clone(), r.clone())),
                None => Err(Error::InvalidPair(
                    "cannot mix quadratic surds with decimal parameters".to_string(),
                )),
            },
        }
    }

    fn combine(
        &self,
        o: &Exponent,
        exact: impl Fn(&QuadSurd, &QuadSurd) -> Result<QuadSurd>,
        interval: impl Fn((Rational, Rational), (Rational, Rational)) -> Result<(Rational, Rational)>,
    ) -> Result<Exponent> {
        match (self, o) {
            (Exponent::Exact(a), Exponent::Exact(b)) => Ok(Exponent::Exact(exact(a, b)?)),
            _ => {
                let (lo, hi) = interval(self.interval()?, o.interval()?)?;
                Ok(Exponent::Interval { lo, hi })
            }
        }
    }

    pub fn add(&self, o: &Exponent) -> Result<Exponent> {
        self.combine(o, |a, b| a.add(b), |(a0, a1), (b0, b1)| Ok((a0 + b0, a1 + b1)))
    }

    pub fn sub(&self, o: &Exponent) -> Result<Exponent> {
        self.combine(o, |a, b| a.sub(b), |(a0, a1), (b0, b1)| Ok((a0 - b1, a1 - b0)))
    }

    pub fn mul(&self, o: &Exponent) -> Result<Exponent> {
        self.combine(
            o,
            |a, b| a.mul(b),
            |(a0, a1), (b0, b1)| {
                let c = [
                    Rational::from(&a0 * &b0),
                    Rational::from(&a0 * &b1),
                    Rational::from(&a1 * &b0),
                    Rational::from(&a1 * &b1),
                ];
                let lo = c.iter().min().cloned().unwrap_or_default();
                let hi = c.iter().max().cloned().unwrap_or_default();
                Ok((lo, hi))
            },
        )
    }

    pub fn div(&self, o: &Exponent) -> Result<Exponent> {
        self.combine(
            o,
            |a, b| a.div(b),
            |a, (b0, b1)| {
                if b0.cmp0() != b1.cmp0() || b0 == 0 {
                    return Err(Error::InvalidArgument("interval division by zero".to_string()));
                }
                let inv = (Rational::from(b1.recip_ref()), Rational::from(b0.recip_ref()));
                let c = [
                    Rational::from(&a.0 * &inv.0),
                    Rational::from(&a.0 * &inv.1),
                    Rational::from(&a.1 * &inv.0),
                    Rational::from(&a.1 * &inv.1),
                ];
                let lo = c.iter().min().cloned().unwrap_or_default();
                let hi = c.iter().max().cloned().unwrap_or_default();
                Ok((lo, hi))
            },
        )
    }

    pub fn add_int(&self, k: i64) -> Result<Exponent> {
        self.add(&Exponent::integer(k))
    }

    pub fn scale(&self, k: &Rational) -> Result<Exponent> {
        self.mul(&Exponent::rational(k.clone()))
    }

    pub fn recip(&self) -> Result<Exponent> {
        Exponent::integer(1).div(self)
    }

    /// Certified comparison: exact for surds, interval-separated otherwise.
    pub fn cmp_certified(&self, o: &Exponent) -> Result<Option<Ordering>> {
        if let (Exponent::Exact(a), Exponent::Exact(b)) = (self, o) {
            return Ok(Some(a.cmp_exact(b)?));
        }
        let (a0, a1) = self.interval()?;
        let (b0, b1) = o.interval()?;
        Ok(if a0 > b1 {
            Some(Ordering::Greater)
        } else if a1 < b0 {
            Some(Ordering::Less)
        } else if a0 == a1 && b0 == b1 && a0 == b0 {
            Some(Ordering::Equal)
        } else {
            None
        })
    }

    pub fn to_ball(&self, prec: u32) -> RealBall {
        match self {
            Exponent::Exact(s) => s.to_ball(prec),
            Exponent::Interval { lo, hi } => RealBall::from_rational_interval(lo, hi, prec),
        }
    }

    /// `base^self` for a positive base; rational exponents use exact roots.
    pub fn pow_of(&self, base: &RealBall) -> RealBall {
        match self.as_rational() {
            Some(q) => base.pow_rational(q),
            None => base.pow(&self.to_ball(base.prec() + 16)),
        }
    }

    /// `x^self` when it is rational, decided exactly; `None` otherwise.
    ///
    /// For irrational algebraic exponents and rational `x != 1` the power is
    /// transcendental, so `None` is then the exact answer.
    pub fn exact_power_of(&self, x: &Rational) -> Option<Rational> {
        if *x == 1 {
            return Some(Rational::from(1));
        }
        let q = self.as_rational()?;
        if x.cmp0() != Ordering::Greater {
            return None;
        }
        let k = q.denom().to_u32().filter(|&k| k <= 64)?;
        let p = q.numer().to_i32().filter(|p| p.unsigned_abs() <= 64)?;
        let ipow = |b: &Integer, e: u32| -> Integer {
            let mut acc = Integer::from(1);
            for _ in 0..e {
                acc *= b;
            }
            acc
        };
        let root = |n: &Integer| -> Option<Integer> {
            let r = super::integer_kth_root(n, k);
            (ipow(&r, k) == *n).then_some(r)
        };
        let num = root(x.numer())?;
        let den = root(x.denom())?;
        let base = Rational::from((num, den));
        let mag = p.unsigned_abs();
        let mut out = Rational::from(1);
        for _ in 0..mag {
            out *= &base;
        }
        Some(if p < 0 { out.recip() } else { out })
    }

    pub fn to_f64(&self) -> f64 {
        self.to_ball(64).to_f64()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Exact(s) => write!(f, "{s}"),
            Exponent::Interval { lo, hi } => {
                let mid = Rational::from(lo + hi) / 2u32;
                write!(f, "{}~", mid.to_f64())
            }
        }
    }
}

const MAX_DEPTH: usize = 32;
const MAX_LITERAL_DIGITS: usize = 40;
const MAX_DECIMAL_EXP: i64 = 400;

/// Parse an exponent description.
///
/// Accepted forms: integers and fractions (`2`, `3/2`), quadratic surd
/// expressions (`sqrt(2)`, `√2`, `(1+sqrt(5))/2`, `2*sqrt(3)-1`), and
/// decimals (`1.41421356`), the last taken as an interval of half-width one
/// unit in the final stated digit.
pub fn parse_exponent(text: &str) -> Result<Exponent> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty exponent".to_string()));
    }
    if s.contains('.') {
        let (value, ulp) = parse_decimal_parts(s)?;
        return Ok(Exponent::Interval {
            lo: Rational::from(&value - &ulp),
            hi: value + ulp,
        });
    }
    let mut p = SurdParser {
        chars: s.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
        depth: 0,
    };
    let v = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(Error::Parse(format!("unexpected input at offset {} in {s:?}", p.pos)));
    }
    Ok(Exponent::Exact(v))
}

struct SurdParser {
    chars: Vec<char>,
    pos: usize,
    depth: usize,
}

impl SurdParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(Error::Parse("expression nested too deeply".to_string()));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<QuadSurd> {
        self.enter()?;
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<QuadSurd> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?)?;
            } else if self.eat('/') {
                let d = self.factor()?;
                if d.signum() == Ordering::Equal {
                    return Err(Error::Parse("division by zero".to_string()));
                }
                acc = acc.div(&d)?;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<QuadSurd> {
        self.enter()?;
        let v = if self.eat('-') {
            self.factor()?.neg()
        } else if self.eat('+') {
            self.factor()?
        } else {
            self.atom()?
        };
        self.depth -= 1;
        Ok(v)
    }

    fn integer(&mut self) -> Result<Integer> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        if digits.is_empty() {
            return Err(Error::Parse(format!("expected integer at offset {start}")));
        }
        if digits.len() > MAX_LITERAL_DIGITS {
            return Err(Error::Parse("integer literal too long".to_string()));
        }
        Integer::from_str_radix(&digits, 10).map_err(|e| Error::Parse(e.to_string()))
    }

    fn atom(&mut self) -> Result<QuadSurd> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".to_string()));
                }
                Ok(v)
            }
            Some('√') => {
                self.pos += 1;
                let n = if self.peek() == Some('(') {
                    self.atom()?
                        .as_integer()
                        .ok_or_else(|| Error::Parse("sqrt of non-integer".to_string()))?
                } else {
                    self.integer()?
                };
                QuadSurd::new(Rational::new(), Rational::from(1), n)
            }
            Some('s') => {
                for c in "sqrt(".chars() {
                    if !self.eat(c) {
                        return Err(Error::Parse("expected sqrt(".to_string()));
                    }
                }
                let n = self.integer()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')' after sqrt".to_string()));
                }
                QuadSurd::new(Rational::new(), Rational::from(1), n)
            }
            Some(c) if c.is_ascii_digit() => Ok(QuadSurd::rational(Rational::from(self.integer()?))),
            Some(c) => Err(Error::Parse(format!("unexpected character {c:?}"))),
            None => Err(Error::Parse("unexpected end of input".to_string())),
        }
    }
}

/// Parse `[-]digits[.digits][e[-]digits]`; returns the exact value and one
/// unit in the last stated digit.
fn parse_decimal_parts(s: &str) -> Result<(Rational, Rational)> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    if exp.abs() > MAX_DECIMAL_EXP {
        return Err(Error::Parse(format!("exponent out of range in {s:?}")));
    }
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("malformed number {s:?}")));
    }
    if int_part.len() + frac_part.len() > 4 * MAX_LITERAL_DIGITS {
        return Err(Error::Parse("number literal too long".to_string()));
    }
    let digits = format!("{int_part}{frac_part}");
    let n = Integer::from_str_radix(if digits.is_empty() { "0" } else { &digits }, 10)
        .map_err(|e| Error::Parse(e.to_string()))?;
    let scale = exp - frac_part.len() as i64;
    use rug::ops::Pow;
    let pow: Integer = Integer::from(10).pow(scale.unsigned_abs() as u32);
    let (mut value, ulp) = if scale >= 0 {
        (Rational::from(n * &pow), Rational::from(pow))
    } else {
        (Rational::from((n, pow.clone())), Rational::from((1, pow)))
    };
    if neg {
        value = -value;
    }
    Ok((value, ulp))
}

/// Parse an exact rational: `100`, `-7/3`, `2.5`, `1e6`, `1.5e-3`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".to_string()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d == 0 {
            return Err(Error::Parse("zero denominator".to_string()));
        }
        return Ok(n / d);
    }
    Ok(parse_decimal_parts(s)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_surds() {
        assert_eq!(parse_exponent("2").unwrap().as_integer(), Some(Integer::from(2)));
        let g = parse_exponent("(1+sqrt(5))/2").unwrap();
        let b = g.to_ball(128);
        assert!((b.to_f64() - 1.618_033_988_749_895).abs() < 1e-15);
        let r = parse_exponent("√2").unwrap();
        assert!(!r.as_exact().unwrap().is_rational());
        assert_eq!(parse_exponent("3/2").unwrap().as_rational(), Some(&Rational::from((3, 2))));
    }

    #[test]
    fn decimal_is_an_interval() {
        let d = parse_exponent("1.414").unwrap();
        match d {
            Exponent::Interval { lo, hi } => {
                assert_eq!(lo, Rational::from((1413, 1000)));
                assert_eq!(hi, Rational::from((1415, 1000)));
            }
            _ => panic!("expected interval"),
        }
    }

    #[test]
    fn rational_forms() {
        assert_eq!(parse_rational("1e6").unwrap(), Rational::from(1_000_000));
        assert_eq!(parse_rational("2.5").unwrap(), Rational::from((5, 2)));
        assert_eq!(parse_rational("-7/3").unwrap(), Rational::from((-7, 3)));
        assert_eq!(parse_rational("1.5e-3").unwrap(), Rational::from((3, 2000)));
        assert!(parse_rational("1e99999").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "sqrt(", "sqrt(-2)", "2**", "((((", "1/0", "x"] {
            assert!(parse_exponent(s).is_err(), "{s}");
        }
    }
}
