//! One test per acceptance criterion; each prints a single PASS/FAIL line.

use std::cmp::Ordering;
use std::io::Write;
use std::time::Instant;

use latmesh_core::coincidence::{quads_enumerate, sigma1_partial, validate_gab, CoincidenceQuad, EnumMode};
use latmesh_core::correlation::{fit_shape, near_pair_count, near_pair_count_quadratic, NearPairQuery};
use latmesh_core::counting::{count_hyperbola, count_naive, delta_eval, psi_sum_f};
use latmesh_core::moments::{short_windows, mean_value_check, scan_range, window_moments, Window, WindowMoment};
use latmesh_core::precision::{parse_exponent, Lazy, Roles};
use latmesh_core::sampling::{stream, uniform_f64, uniform_rational, uniform_u64};
use latmesh_core::voronoi::{bprocess_compare, psi_fourier_residual, PhaseSpec};
use latmesh_core::{ExponentPair, PrecisionContext, RealBall};
use rayon::prelude::*;
use rug::Rational;

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

fn int(a: u32, b: u32) -> ExponentPair {
    ExponentPair::integer(a, b).unwrap()
}

fn verdict(n: u32, pass: bool, started: Instant, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {n:>2} {tag}: {detail} ({:.1}s)\n", started.elapsed().as_secs_f64());
    // written to the handle directly so the line survives output capture
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(pass, "criterion {n} failed: {detail}");
}

/// Certified `x <= y`.
fn le(x: &RealBall, y: &RealBall) -> bool {
    matches!(x.cmp_ball(y), Some(Ordering::Less | Ordering::Equal)) || x.upper() <= y.lower()
}

#[test]
fn criterion_01_counting_oracle() {
    let t = Instant::now();
    let pairs = [(1, 2), (1, 3), (2, 3)];
    let mismatches: usize = pairs
        .iter()
        .map(|&(a, b)| {
            let p = int(a, b);
            (1..=100_000u64)
                .into_par_iter()
                .filter(|&x| {
                    let x = Rational::from(x);
                    count_hyperbola(&p, &x, &ctx()).unwrap() != count_naive(&p, &x, &ctx()).unwrap()
                })
                .count()
        })
        .sum();
    let secs = t.elapsed().as_secs_f64();
    verdict(
        1,
        mismatches == 0 && secs < 60.0,
        t,
        format!("{mismatches} mismatches over x <= 1e5 for (1,2), (1,3), (2,3)"),
    );
}

#[test]
fn criterion_02_voronoi_identity_at_100() {
    let t = Instant::now();
    // zeta(1/2) to 16 digits; zeta(2) = pi^2/6
    let zeta_half = -1.460_354_508_809_586_8;
    let zeta_two = std::f64::consts::PI.powi(2) / 6.0;
    let oracle = 153.0 - (zeta_two * 100.0 + zeta_half * 10.0);
    let r = delta_eval(&int(1, 2), &Rational::from(100), &ctx()).unwrap();
    let err = (r.delta.to_f64() - oracle).abs();
    verdict(
        2,
        r.d == 153 && err < 1e-3 && (oracle - 3.1101).abs() < 1e-3,
        t,
        format!("D = {}, delta = {:.6}, oracle {oracle:.6}, |diff| = {err:.2e}", r.d, r.delta.to_f64()),
    );
}

#[test]
fn criterion_03_psi_sum_representation() {
    let t = Instant::now();
    let p = int(1, 2);
    let mut rng = stream(3, 0);
    let decades = [(1_000u64, 10_000u64), (10_000, 100_000), (100_000, 1_000_000)];
    let mut maxima = [0.0f64; 3];
    for i in 0..1000 {
        let (lo, hi) = decades[i % 3];
        let x = uniform_rational(&mut rng, &Rational::from(lo), &Rational::from(hi));
        let d = delta_eval(&p, &x, &ctx()).unwrap().delta;
        let f = psi_sum_f(Roles::Ab, &p, &x, &ctx()).unwrap().add_ball(&psi_sum_f(Roles::Ba, &p, &x, &ctx()).unwrap());
        let resid = d.sub_ball(&f).abs();
        let k = decades.iter().position(|&(l, h)| x >= l && x < h).unwrap();
        maxima[k] = maxima[k].max(resid.upper().to_f64());
    }
    let overall = maxima.iter().cloned().fold(0.0, f64::max);
    let non_growing = maxima.windows(2).all(|w| w[1] <= w[0]);
    verdict(
        3,
        overall <= 4.0 && non_growing,
        t,
        format!("max residual {overall:.4}; per-decade maxima {maxima:.6?}"),
    );
}

#[test]
fn criterion_04_fourier_residual_bound() {
    let t = Instant::now();
    let mut violations = 0;
    for h in [10u64, 100] {
        for k in 0..997u64 {
            let u = Rational::from((k, 997u64));
            let lazy = Lazy::with_exact(|bits| RealBall::from_rational(&u, bits), Some(u.clone()));
            let (r, bound) = psi_fourier_residual(&lazy, h, &ctx()).unwrap();
            if !le(&r, &bound) {
                violations += 1;
            }
        }
    }
    verdict(4, violations == 0, t, format!("{violations} violations over u = k/997, H in {{10, 100}}"));
}

#[test]
fn criterion_05_bprocess() {
    let t = Instant::now();
    let mut rng = stream(5, 0);
    let betas = [Rational::from((1, 2)), Rational::from(1), Rational::from((3, 2)), Rational::from(2), Rational::from(3)];
    let mut worst = 0.0f64;
    let mut random_ok = true;
    for _ in 0..20 {
        let beta = betas[uniform_u64(&mut rng, 0, betas.len() as u64 - 1) as usize].clone();
        let amp = Rational::from_f64(uniform_f64(&mut rng, 1e3, 1e6).round()).unwrap();
        let m1 = uniform_u64(&mut rng, 10, 200);
        let m2 = m1 * uniform_u64(&mut rng, 2, 10);
        let spec = PhaseSpec::new(amp, beta, Rational::from(m1), Rational::from(m2)).unwrap();
        let r = bprocess_compare(&spec, &ctx()).unwrap();
        let scale = r.error_scale.to_f64() + r.boundary_scale.to_f64();
        let q = r.residual.to_f64() / scale;
        worst = worst.max(q);
        random_ok &= q <= 50.0;
    }
    let spec = PhaseSpec::new(Rational::from(100_000), Rational::from(2), Rational::from(100), Rational::from(1000)).unwrap();
    let fixed = bprocess_compare(&spec, &ctx()).unwrap().residual.to_f64();
    let secs = t.elapsed().as_secs_f64();
    verdict(
        5,
        random_ok && fixed <= 10.0 && secs < 60.0,
        t,
        format!("random phases: worst residual/scale {worst:.3} (limit 50); A=1e5, beta=2, (100,1000]: residual {fixed:.2} (limit 10)"),
    );
}

fn off_diagonal(p: &ExponentPair, bx: u64) -> Vec<(u64, u64, u64, u64)> {
    let mut v: Vec<_> = quads_enumerate(p, bx, EnumMode::Brute, &ctx())
        .unwrap()
        .iter()
        .filter(|q| !q.is_diagonal())
        .map(CoincidenceQuad::tuple)
        .collect();
    v.sort();
    v
}

#[test]
fn criterion_06_coincidence_oracle() {
    let t = Instant::now();
    let mut differing = Vec::new();
    for (a, b) in [(1, 2), (2, 3)] {
        let p = int(a, b);
        for bx in 1..=60u64 {
            let mut brute: Vec<_> = quads_enumerate(&p, bx, EnumMode::Brute, &ctx()).unwrap().iter().map(CoincidenceQuad::tuple).collect();
            let mut param: Vec<_> =
                quads_enumerate(&p, bx, EnumMode::Parametrized, &ctx()).unwrap().iter().map(CoincidenceQuad::tuple).collect();
            brute.sort();
            param.sort();
            if brute != param {
                differing.push(((a, b), bx));
            }
        }
    }
    let mut want = vec![(4, 1, 1, 2), (4, 2, 1, 4), (1, 2, 4, 1), (1, 4, 4, 2)];
    want.sort();
    let got = off_diagonal(&int(1, 2), 4);
    verdict(
        6,
        differing.is_empty() && got == want,
        t,
        format!("{} differing boxes; box-4 off-diagonal set {got:?}", differing.len()),
    );
}

#[test]
fn criterion_07_gab_closed_form() {
    let t = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for (a, b) in [(1, 2), (2, 3)] {
        let v = validate_gab(&int(a, b), &ctx()).unwrap();
        ok &= v.residual_decreasing && v.within_tail;
        let res: Vec<String> = v.rows.iter().map(|r| format!("{:.3}", r.2.to_f64())).collect();
        let last = v.rows.last().unwrap();
        detail.push(format!(
            "({a},{b}) G = {:.4}, residuals [{}], 2x tail at 1e4 = {:.3}",
            v.closed_form.to_f64(),
            res.join(", "),
            2.0 * last.3.to_f64()
        ));
    }
    verdict(7, ok, t, detail.join("; "));
}

#[test]
fn criterion_08_sigma1_decay() {
    let t = Instant::now();
    let p = int(1, 2);
    let e = 2.0 / 6.0;
    let vals: Vec<f64> = [2u64, 8, 32, 128]
        .iter()
        .map(|&h| {
            let s = sigma1_partial(Roles::Ab, &p, h, 10_000, &ctx()).unwrap().to_f64();
            s * (h as f64).powf(e) / (2.0 * h as f64).ln().powi(2)
        })
        .collect();
    let first = vals[0];
    let bounded = vals.iter().all(|&v| v <= 10.0 * first);
    let spread = vals.iter().cloned().fold(f64::MIN, f64::max) / vals.iter().cloned().fold(f64::MAX, f64::min);
    verdict(
        8,
        bounded,
        t,
        format!("normalized {vals:.4?}; all <= 10x the H=2 value; max/min spread {spread:.1}"),
    );
}

#[test]
fn criterion_09_near_pair_counting() {
    let t = Instant::now();
    let mut rng = stream(9, 0);
    let exps = ["1/3", "2/3", "1", "3/2", "sqrt(2)", "sqrt(3)"];
    let pick = |rng: &mut _| parse_exponent(exps[uniform_u64(rng, 0, exps.len() as u64 - 1) as usize]).unwrap();
    let mut mismatches = 0;
    for _ in 0..50 {
        let q = NearPairQuery {
            mu: pick(&mut rng),
            nu: pick(&mut rng),
            h1: Rational::from(uniform_u64(&mut rng, 1, 16)),
            h2: Rational::from(uniform_u64(&mut rng, 1, 16)),
            r1: Rational::from(uniform_u64(&mut rng, 1, 16)),
            r2: Rational::from(uniform_u64(&mut rng, 1, 16)),
            delta: Rational::from((uniform_u64(&mut rng, 0, 100), 100u64)),
        };
        if near_pair_count(&q, &ctx()).unwrap() != near_pair_count_quadratic(&q, &ctx()).unwrap() {
            mismatches += 1;
        }
    }
    let mut ratios = Vec::new();
    for h in [4u64, 8, 16, 32] {
        for d in [0u64, 1, 10, 100, 1000] {
            let q = NearPairQuery {
                mu: parse_exponent("1/3").unwrap(),
                nu: parse_exponent("2/3").unwrap(),
                h1: Rational::from(h),
                h2: Rational::from(h),
                r1: Rational::from(h),
                r2: Rational::from(h),
                delta: Rational::from((d, 1000u64)),
            };
            ratios.push(near_pair_count(&q, &ctx()).unwrap() as f64 / q.bound_shape());
        }
    }
    let fit = fit_shape(ratios);
    let worst = fit.ratios.iter().copied().fold(0.0, f64::max) / fit.c;
    verdict(
        9,
        mismatches == 0 && fit.ratios.len() == 20 && fit.covered,
        t,
        format!("{mismatches}/50 mismatches; fitted c = {:.4e}, max ratio/c = {worst:.2}, 20-query grid covered within 10x: {}", fit.c, fit.covered),
    );
}

fn moments(p: &ExponentPair, t: u64, c: &PrecisionContext) -> WindowMoment {
    let v = validate_gab(p, c).unwrap();
    let gab = v.certify(latmesh_core::coincidence::gab_closed_form(p, c).unwrap()).unwrap();
    let w = Window::new(Rational::from(t), Rational::from(t)).unwrap();
    window_moments(p, &w, &gab, c).unwrap()
}

#[test]
fn criterion_10_mean_square_integer_pair() {
    let t = Instant::now();
    let p = int(1, 2);
    let small = moments(&p, 10_000, &ctx()).ratio.to_f64();
    let big = moments(&p, 1_000_000, &ctx()).ratio.to_f64();
    let band = (0.75..=1.25).contains(&big);
    let trend = (big - 1.0).abs() < (small - 1.0).abs();
    verdict(
        10,
        band && trend && t.elapsed().as_secs_f64() < 300.0,
        t,
        format!("ratio {big:.4} at T=1e6 (band [0.75, 1.25]); {small:.4} at T=1e4; trend improving: {trend}"),
    );
}

#[test]
fn criterion_11_mean_square_irrational_pair() {
    let t = Instant::now();
    let c = PrecisionContext::new(256, 4096, 2).unwrap();
    let p = ExponentPair::parse("1", "sqrt(2)", &c).unwrap();
    let small = moments(&p, 10_000, &c).ratio.to_f64();
    let big = moments(&p, 100_000, &c).ratio.to_f64();
    let band = (0.6..=1.4).contains(&big);
    verdict(
        11,
        band && t.elapsed().as_secs_f64() < 600.0,
        t,
        format!(
            "ratio {big:.4} at T=1e5 (heuristic band [0.6, 1.4]); trend: {small:.4} at T=1e4 -> {big:.4} at T=1e5, |ratio-1| {} (informational)",
            if (big - 1.0).abs() < (small - 1.0).abs() { "shrinks" } else { "grows" }
        ),
    );
}

#[test]
fn criterion_12_mean_value() {
    let t = Instant::now();
    let p = int(1, 2);
    let (_, small) = mean_value_check(&p, &Rational::from(1_000), &ctx()).unwrap();
    let (_, big) = mean_value_check(&p, &Rational::from(1_000_000), &ctx()).unwrap();
    let (small, big) = (small.to_f64(), big.to_f64());
    let band = (0.7..=1.3).contains(&big);
    let trend = (big - 1.0).abs() < (small - 1.0).abs();
    verdict(
        12,
        band && trend,
        t,
        format!("ratio {big:.4} at T=1e6 (band [0.7, 1.3]); {small:.4} at T=1e3; trend improving: {trend}"),
    );
}

#[test]
fn criterion_13_sign_changes() {
    let t = Instant::now();
    let p = int(1, 2);
    let w = scan_range(&p, &Rational::from(100_000), &Rational::from(200_000), &ctx()).unwrap();
    let windows = short_windows(&p, &Rational::from(100_000), &ctx()).unwrap();
    let min = windows.iter().map(|w| w.2).min().unwrap_or(0);
    verdict(
        13,
        w.sign_changes >= 10 && !windows.is_empty() && min >= 1,
        t,
        format!(
            "{} sign changes on [1e5, 2e5]; {} short windows, fewest changes {min}",
            w.sign_changes,
            windows.len()
        ),
    );
}

fn moment_csv(m: &WindowMoment) -> String {
    let cells = [
        m.window.t.to_string(),
        m.window.t0.to_string(),
        format!("{:e}", m.int_delta.to_f64()),
        format!("{:e}", m.int_delta.rad_f64()),
        format!("{:e}", m.int_delta_sq.to_f64()),
        format!("{:e}", m.int_delta_sq.rad_f64()),
        format!("{:e}", m.predicted_main.to_f64()),
        format!("{:e}", m.ratio.to_f64()),
        m.sign_changes.to_string(),
        format!("{:e}", m.sup_abs_delta.to_f64()),
    ];
    cells.join(",")
}

#[test]
fn criterion_14_thread_determinism() {
    let t = Instant::now();
    let p = int(1, 2);
    let run = |n: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        pool.install(|| moment_csv(&moments(&p, 1_000_000, &ctx())))
    };
    let (one, eight) = (run(1), run(8));
    verdict(14, one == eight, t, format!("T=T0=1e6 rows at 1 and 8 threads identical: {}", one == eight));
}

#[test]
fn criterion_15_cauchy_schwarz() {
    let t = Instant::now();
    let c = ctx();
    let pairs = [int(1, 2), int(2, 3), int(1, 3), ExponentPair::parse("1", "sqrt(2)", &c).unwrap()];
    let mut checked = 0;
    let mut violations = 0;
    for p in &pairs {
        for tt in [100u64, 1_000, 10_000, 100_000] {
            for t0 in [tt / 10, tt] {
                let s = scan_range(p, &Rational::from(tt), &Rational::from(tt + t0), &c).unwrap();
                let bound = s.int_delta.sqr().div_i64(t0 as i64);
                checked += 1;
                if s.int_delta_sq.upper() < bound.lower() {
                    violations += 1;
                }
            }
        }
    }
    verdict(15, violations == 0, t, format!("{violations} violations over {checked} windows"));
}
