use rug::{Integer, Rational};

use super::exponent::Exponent;
use super::roots::integer_kth_root;
use crate::error::{Error, Result};

fn floor_div(a: &Integer, b: &Integer) -> Integer {
    let (q, _) = a.clone().div_rem_floor(b.clone());
    q
}

/// `(P + √D)/Q` with `Q | D − P²`, for exact expansion of a quadratic irrational.
struct SurdState {
    p: Integer,
    q: Integer,
    d: Integer,
    sqrt_floor: Integer,
}

impl SurdState {
    fn new(alpha: &super::surd::QuadSurd) -> Self {
        let l = Integer::from(alpha.p().denom().lcm_ref(alpha.q().denom()));
        let a = Integer::from(alpha.p().numer() * &l) / alpha.p().denom();
        let b = Integer::from(alpha.q().numer() * &l) / alpha.q().denom();
        let d0 = Integer::from(b.square_ref()) * alpha.radicand();
        let (mut p, mut q) = if b.cmp0() == std::cmp::Ordering::Greater {
            (a, l)
        } else {
            (-a, -l)
        };
        let mut d = d0;
        let rem = &d - Integer::from(p.square_ref()) ;
        if !rem.is_divisible(&q) {
            let qa = Integer::from(q.abs_ref());
            p *= &qa;
            d *= Integer::from(q.square_ref());
            q *= qa;
        }
        let sqrt_floor = integer_kth_root(&d, 2);
        SurdState { p, q, d, sqrt_floor }
    }

    fn next_quotient(&mut self) -> Integer {
        let num = Integer::from(&self.p + &self.sqrt_floor);
        let a = if self.q.cmp0() == std::cmp::Ordering::Greater {
            floor_div(&num, &self.q)
        } else {
            let neg_q = Integer::from(-&self.q);
            -floor_div(&num, &neg_q) - 1u32
        };
        let p_next = Integer::from(&a * &self.q) - &self.p;
        let q_next = (&self.d - Integer::from(p_next.square_ref())) / &self.q;
        self.p = p_next;
        self.q = q_next;
        a
    }
}

/// The first `count` continued-fraction convergents `p/q` of an irrational `alpha`.
///
/// Quadratic surds are expanded exactly. A decimal parameter is expanded as
/// the interval it stands for, and fails with `PrecisionExhausted` once its
/// stated digits no longer pin down the next partial quotient.
pub fn cf_convergents(alpha: &Exponent, count: usize) -> Result<Vec<(Integer, Integer)>> {
    let mut quotients: Vec<Integer> = Vec::with_capacity(count);
    match alpha {
        Exponent::Exact(s) => {
            if s.is_rational() {
                return Err(Error::InvalidArgument(format!("{s} is rational")));
            }
            let mut st = SurdState::new(s);
            for _ in 0..count {
                quotients.push(st.next_quotient());
            }
        }
        Exponent::Interval { lo, hi } => {
            let (mut lo, mut hi) = (lo.clone(), hi.clone());
            for i in 0..count {
                let fl = Integer::from(lo.floor_ref());
                let fh = Integer::from(hi.floor_ref());
                if fl != fh || lo == fl {
                    return Err(Error::PrecisionExhausted {
                        bits: 0,
                        what: format!("decimal digits certify only {i} partial quotients"),
                    });
                }
                let nlo = Rational::from(&hi - &fl).recip();
                let nhi = Rational::from(&lo - &fl).recip();
                quotients.push(fl);
                lo = nlo;
                hi = nhi;
            }
        }
    }
    let mut out = Vec::with_capacity(count);
    let (mut p0, mut q0) = (Integer::from(1), Integer::new());
    let (mut p1, mut q1) = (Integer::new(), Integer::from(1));
    for a in quotients {
        let p = Integer::from(&a * &p0) + &p1;
        let q = Integer::from(&a * &q0) + &q1;
        p1 = std::mem::replace(&mut p0, p.clone());
        q1 = std::mem::replace(&mut q0, q.clone());
        out.push((p, q));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::parse_exponent;

    fn conv(text: &str, n: usize) -> Vec<(i64, i64)> {
        cf_convergents(&parse_exponent(text).unwrap(), n)
            .unwrap()
            .into_iter()
            .map(|(p, q)| (p.to_i64().unwrap(), q.to_i64().unwrap()))
            .collect()
    }

    #[test]
    fn sqrt_two_and_three() {
        assert_eq!(conv("sqrt(2)", 4), vec![(1, 1), (3, 2), (7, 5), (17, 12)]);
        assert_eq!(conv("sqrt(2)", 1), vec![(1, 1)]);
        assert_eq!(conv("sqrt(3)", 2), vec![(1, 1), (2, 1)]);
    }

    #[test]
    fn golden_ratio_and_negative_surds() {
        assert_eq!(conv("(1+sqrt(5))/2", 5), vec![(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]);
        // -sqrt(2) = [-2; 1, 1, 2, 2, ...]
        assert_eq!(conv("-sqrt(2)", 3), vec![(-2, 1), (-1, 1), (-3, 2)]);
        // 1/sqrt(2) = [0; 1, 2, 2, ...]
        assert_eq!(conv("1/sqrt(2)", 3), vec![(0, 1), (1, 1), (2, 3)]);
    }

    #[test]
    fn decimal_runs_out_of_digits() {
        let a = parse_exponent("1.41421356").unwrap();
        let c = cf_convergents(&a, 4).unwrap();
        assert_eq!(c.last().unwrap().1, 12);
        assert!(matches!(cf_convergents(&a, 40), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn rational_is_rejected() {
        assert!(cf_convergents(&parse_exponent("3/2").unwrap(), 2).is_err());
    }
}
