use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::coincidence::{quads_enumerate, EnumMode};
use crate::correlation::{near_pair_count, near_pair_count_quadratic, NearPairQuery};
use crate::counting::{count_hyperbola, count_naive, delta_eval, jumps_in_window, sieve_d};
use crate::moments::scan_range;
use crate::precision::{
    frac_decompose, kth_root_u64, parse_exponent, parse_rational, zeta_real, Lazy, RealBall,
};
use crate::{ExponentPair, PrecisionContext};

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

fn int_pair() -> impl Strategy<Value = (u32, u32)> {
    prop_oneof![Just((1, 2)), Just((1, 3)), Just((2, 3)), Just((1, 5)), Just((3, 4))]
}

fn pair_of(a: u32, b: u32) -> ExponentPair {
    ExponentPair::integer(a, b).unwrap()
}

fn q(n: u64, d: u64) -> Rational {
    Rational::from((n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hyperbola_matches_naive((a, b) in int_pair(), n in 1u64..200_000, d in 1u64..4) {
        let p = pair_of(a, b);
        let x = q(n, d);
        prop_assert_eq!(count_hyperbola(&p, &x, &ctx()).unwrap(), count_naive(&p, &x, &ctx()).unwrap());
    }

    #[test]
    fn irrational_hyperbola_matches_naive(n in 1u64..20_000, d in 1u64..8) {
        let p = ExponentPair::parse("1", "sqrt(2)", &ctx()).unwrap();
        let x = q(n, d);
        prop_assert_eq!(count_hyperbola(&p, &x, &ctx()).unwrap(), count_naive(&p, &x, &ctx()).unwrap());
    }

    #[test]
    fn sieve_prefix_sums_are_counts((a, b) in int_pair(), x in 1u64..5_000) {
        let p = pair_of(a, b);
        let d = sieve_d(&p, x).unwrap();
        let total: u64 = d.iter().map(|&v| v as u64).sum();
        prop_assert_eq!(Integer::from(total), count_naive(&p, &Rational::from(x), &ctx()).unwrap());
    }

    #[test]
    fn jump_multiplicities_match_count_increments((a, b) in int_pair(), t in 1u64..50_000, t0 in 1u64..2_000) {
        let p = pair_of(a, b);
        let (t, t0) = (Rational::from(t), Rational::from(t0.min(t)));
        let s = jumps_in_window(&p, &t, &t0, &ctx()).unwrap();
        let hi = count_naive(&p, &Rational::from(&t + &t0), &ctx()).unwrap();
        let lo = count_naive(&p, &t, &ctx()).unwrap();
        prop_assert_eq!(Integer::from(s.total_multiplicity()), hi - lo);
    }

    #[test]
    fn delta_is_count_minus_main((a, b) in int_pair(), n in 1u64..1_000_000, d in 1u64..5) {
        let p = pair_of(a, b);
        let r = delta_eval(&p, &q(n, d), &ctx()).unwrap();
        let back = r.delta.add_ball(&r.main);
        prop_assert!(back.contains_rational(&Rational::from(&r.d)));
        prop_assert!(r.delta.rad_f64() < 1e-30);
    }

    #[test]
    fn rational_text_round_trips(n in -1_000_000i64..1_000_000, d in 1i64..10_000) {
        let v = Rational::from((n, d));
        prop_assert_eq!(parse_rational(&v.to_string()).unwrap(), v.clone());
        let e = parse_exponent(&v.to_string()).unwrap();
        prop_assert_eq!(e.as_rational(), Some(&v));
    }

    #[test]
    fn decimal_text_is_exact(int in 0u64..100_000, frac in 0u64..1_000, exp in -3i32..4) {
        let text = format!("{int}.{frac:03}e{exp}");
        let mut want = Rational::from((int * 1000 + frac, 1000u64));
        if exp >= 0 {
            want *= Integer::from(10u32).pow(exp as u32);
        } else {
            want /= Integer::from(10u32).pow((-exp) as u32);
        }
        prop_assert_eq!(parse_rational(&text).unwrap(), want);
    }

    #[test]
    fn ball_ops_enclose_exact_results(a in -1e6f64..1e6, b in 1e-3f64..1e6) {
        let (ra, rb) = (Rational::from_f64(a).unwrap(), Rational::from_f64(b).unwrap());
        let (ba, bb) = (RealBall::from_f64(a, 64), RealBall::from_f64(b, 64));
        prop_assert!(ba.add_ball(&bb).contains_rational(&Rational::from(&ra + &rb)));
        prop_assert!(ba.sub_ball(&bb).contains_rational(&Rational::from(&ra - &rb)));
        prop_assert!(ba.mul_ball(&bb).contains_rational(&Rational::from(&ra * &rb)));
        prop_assert!(ba.div_ball(&bb).contains_rational(&Rational::from(&ra / &rb)));
        prop_assert!(bb.sqr().contains_rational(&Rational::from(&rb * &rb)));
    }

    #[test]
    fn frac_decompose_rationals(n in -100_000i64..100_000, d in 1i64..1_000) {
        let t = Rational::from((n, d));
        let f = frac_decompose(&Lazy::with_exact(|bits| RealBall::from_rational(&t, bits), Some(t.clone())), &ctx()).unwrap();
        prop_assert_eq!(f.floor_part.clone(), Integer::from(t.floor_ref()));
        let frac = Rational::from(&t - &f.floor_part);
        prop_assert!(f.frac_part.contains_rational(&frac));
        prop_assert!(f.psi.contains_rational(&(&frac - Rational::from((1, 2)))));
        let half = Rational::from((1, 2));
        prop_assert!(f.dist.cmp_rational(&half) != Some(std::cmp::Ordering::Greater));
    }

    #[test]
    fn kth_root_brackets(n in 1u64..u64::MAX, k in 2u32..8) {
        let r = kth_root_u64(n, k) as u128;
        prop_assert!(r.pow(k) <= n as u128);
        prop_assert!((r + 1).pow(k) > n as u128);
    }

    #[test]
    fn parametrized_quads_coincide((a, b) in prop_oneof![Just((1u32, 2u32)), Just((2, 3)), Just((1, 3))], bx in 1u64..80) {
        let p = pair_of(a, b);
        for qd in quads_enumerate(&p, bx, EnumMode::Parametrized, &ctx()).unwrap() {
            let lhs = Integer::from(qd.h1).pow(a) * Integer::from(qd.r1).pow(b);
            let rhs = Integer::from(qd.h2).pow(a) * Integer::from(qd.r2).pow(b);
            prop_assert_eq!(lhs, rhs);
            prop_assert!(qd.h1.max(qd.h2).max(qd.r1).max(qd.r2) <= bx);
        }
    }

    #[test]
    fn zeta_decreases_above_one(s in 1.05f64..8.0, ds in 0.01f64..2.0) {
        let c = ctx();
        let z1 = zeta_real(&RealBall::from_f64(s, 128), &c).unwrap();
        let z2 = zeta_real(&RealBall::from_f64(s + ds, 128), &c).unwrap();
        prop_assert_eq!(z1.cmp_ball(&z2), Some(std::cmp::Ordering::Greater));
        prop_assert!(z2.cmp_rational(&Rational::from(1)) == Some(std::cmp::Ordering::Greater));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scan_is_additive_and_cauchy_schwarz((a, b) in int_pair(), lo in 2u64..20_000, len in 2u64..4_000, cut in 1u64..1_000) {
        let p = pair_of(a, b);
        let (l, h) = (Rational::from(lo), Rational::from(lo + len));
        let m = Rational::from(lo + cut.min(len - 1));
        let whole = scan_range(&p, &l, &h, &ctx()).unwrap();
        let left = scan_range(&p, &l, &m, &ctx()).unwrap();
        let right = scan_range(&p, &m, &h, &ctx()).unwrap();
        prop_assert!(whole.int_delta.overlaps(&left.int_delta.add_ball(&right.int_delta)));
        prop_assert!(whole.int_delta_sq.overlaps(&left.int_delta_sq.add_ball(&right.int_delta_sq)));
        prop_assert!(whole.sign_changes >= left.sign_changes + right.sign_changes);
        prop_assert!(whole.sign_changes <= left.sign_changes + right.sign_changes + 1);
        let bound = whole.int_delta.sqr().div_i64(len as i64);
        prop_assert!(whole.int_delta_sq.upper() >= bound.lower());
    }

    #[test]
    fn near_pairs_match_quadratic_scan(
        mu in prop_oneof![Just("1/3"), Just("1"), Just("sqrt(2)"), Just("3/2")],
        nu in prop_oneof![Just("2/3"), Just("2"), Just("sqrt(3)"), Just("1/2")],
        h1 in 1u64..12, h2 in 1u64..12, r1 in 1u64..12, r2 in 1u64..12,
        delta in 0u64..200,
    ) {
        let query = NearPairQuery {
            mu: parse_exponent(mu).unwrap(),
            nu: parse_exponent(nu).unwrap(),
            h1: Rational::from(h1),
            h2: Rational::from(h2),
            r1: Rational::from(r1),
            r2: Rational::from(r2),
            delta: q(delta, 100),
        };
        prop_assert_eq!(near_pair_count(&query, &ctx()).unwrap(), near_pair_count_quadratic(&query, &ctx()).unwrap());
    }
}
