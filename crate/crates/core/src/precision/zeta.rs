use std::cmp::Ordering;

use rug::{Float, Integer, Rational};

use super::{interval_to_ball, PrecisionContext, RealBall};
use crate::error::{Error, Result};

/// Even Bernoulli numbers `B_2, B_4, …, B_{2k}` from the recurrence
/// `Σ_{j<=m} C(m+1, j) B_j = 0`.
fn bernoulli_even(k: usize) -> Vec<Rational> {
    let n = 2 * k;
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::from(1));
    for m in 1..=n {
        if m > 1 && m % 2 == 1 {
            b.push(Rational::new());
            continue;
        }
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (j, bj) in b.iter().enumerate() {
            if *bj != 0 {
                acc += Rational::from(bj * &binom);
            }
            binom *= (m + 1 - j) as u32;
            binom /= (j + 1) as u32;
        }
        b.push(-acc / (m as u32 + 1));
    }
    (1..=k).map(|i| b[2 * i].clone()).collect()
}

/// Upper bound for the Euler–Maclaurin remainder after `k` correction terms.
///
/// `|R| <= 4 (s)_{2k} / (2π)^{2k} · N^{1-s-2k} / (s + 2k - 1)` for real `s`.
fn remainder_bound(s: &Float, n: u64, k: usize, prec: u32) -> Float {
    let sb = RealBall::from_parts(s.clone(), Float::new(64));
    let mut rising = RealBall::one(prec);
    for i in 0..2 * k {
        rising = rising.mul_ball(&sb.add_i64(i as i64));
    }
    let two_pi = RealBall::pi(prec).mul_2si(1);
    let denom = two_pi.pow_u(2 * k as u32);
    let nb = RealBall::from_u64(n, prec);
    let npow = nb.pow(&sb.neg().add_i64(1 - 2 * k as i64));
    let tail = rising
        .mul_i64(4)
        .div_ball(&denom)
        .mul_ball(&npow)
        .div_ball(&sb.add_i64(2 * k as i64 - 1));
    tail.abs().upper()
}

/// `ζ(s)` for an exact real `s > 0`, `s != 1`, at working precision `prec`.
fn zeta_point(s: &Float, prec: u32, target: &Float) -> Option<RealBall> {
    let sb = RealBall::from_parts(Float::with_val(prec, s), Float::new(64));
    let mut n = (prec as u64).max(16);
    let mut k = (prec as usize / 8).max(4);
    let mut bound = remainder_bound(s, n, k, prec);
    for _ in 0..8 {
        if bound <= *target {
            break;
        }
        n *= 2;
        k += k / 2;
        bound = remainder_bound(s, n, k, prec);
    }
    if bound > *target {
        return None;
    }
    let neg_s = sb.neg();
    let mut sum = RealBall::zero(prec);
    for i in 1..n {
        sum = sum.add_ball(&RealBall::from_u64(i, prec).pow(&neg_s));
    }
    let nb = RealBall::from_u64(n, prec);
    let n_neg_s = nb.pow(&neg_s);
    // N^{1-s}/(s-1) + N^{-s}/2
    sum = sum.add_ball(&n_neg_s.mul_ball(&nb).div_ball(&sb.add_i64(-1)));
    sum = sum.add_ball(&n_neg_s.mul_2si(-1));
    let bern = bernoulli_even(k);
    let inv_n2 = nb.sqr().recip();
    // t_j = (s)_{2j-1} N^{-s-2j+1}
    let mut t = sb.mul_ball(&n_neg_s).div_ball(&nb);
    let mut fact = Integer::from(2);
    for (j, b2j) in bern.iter().enumerate() {
        let j = j as i64 + 1;
        let coeff = Rational::from(b2j / &fact);
        sum = sum.add_ball(&RealBall::from_rational(&coeff, prec).mul_ball(&t));
        t = t
            .mul_ball(&sb.add_i64(2 * j - 1))
            .mul_ball(&sb.add_i64(2 * j))
            .mul_ball(&inv_n2);
        fact *= (2 * j + 1) as u32;
        fact *= (2 * j + 2) as u32;
    }
    Some(sum.widen(&bound))
}

/// Riemann zeta at a real ball `s > 0` separated from the pole at 1.
///
/// The radius of the result is at most `2^-(bits-8) · max(1, |ζ(s)|)`, or
/// `PrecisionExhausted` is returned once the ladder reaches `max_bits`.
pub fn zeta_real(s: &RealBall, ctx: &PrecisionContext) -> Result<RealBall> {
    if !s.is_finite() {
        return Err(Error::InvalidArgument("zeta argument is not finite".into()));
    }
    if s.contains_f64(1.0) {
        return Err(Error::Pole);
    }
    if !s.is_positive() {
        return Err(Error::InvalidArgument(format!("zeta needs s > 0, got {s}")));
    }
    let out_prec = ctx.bits;
    let mut last = ctx.bits;
    for bits in ctx.ladder() {
        last = bits;
        let work = bits + 32;
        let mut target = Float::with_val(64, 1);
        target >>= bits as i32 - 8;
        let eval = |x: &Float| zeta_point(x, work, &target);
        let result = if s.is_exact() {
            eval(s.mid())
        } else {
            // ζ is decreasing on (0, 1) and on (1, ∞).
            match (eval(&s.upper()), eval(&s.lower())) {
                (Some(lo), Some(hi)) => Some(interval_to_ball(&lo.lower(), &hi.upper(), work)),
                _ => None,
            }
        };
        let Some(z) = result else { continue };
        if !s.is_exact() {
            // the input width is inherent; only the evaluation error is targeted
            return Ok(z);
        }
        let scale = {
            let m = Float::with_val(64, z.mid().abs_ref());
            if m > 1 {
                m
            } else {
                Float::with_val(64, 1)
            }
        };
        let limit = Float::with_val(64, &target * &scale);
        if z.rad().partial_cmp(&limit) != Some(Ordering::Greater) {
            return Ok(z.with_prec(out_prec.max(bits)));
        }
    }
    Err(Error::PrecisionExhausted {
        bits: last,
        what: format!("zeta({s}) to the requested radius"),
    })
}
