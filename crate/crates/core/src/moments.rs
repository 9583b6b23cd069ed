//! Window integrals of `Δ` and `Δ²`, `sup|Δ|` and sign changes, computed
//! piece by piece between consecutive jumps of `D`, plus the predicted
//! mean-square main term.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::{Integer, Rational};

use crate::coincidence::{GabResult, GabRoute};
use crate::counting::{collect_jumps, count_hyperbola, require_x, JumpPoint, MainTerm};
use crate::error::{Error, Result};
use crate::precision::{ExponentPair, PrecisionContext, RealBall};

/// Number of sub-windows a scan is split into, independent of thread count.
pub const SHARDS: u32 = 64;
/// Constant in the sign-change window length `c·T^{1−a/(b(a+b)(a+b−1))}·log⁴T`.
pub const SHORT_WINDOW_C: f64 = 2e-6;

/// `[T, T + T0]` with `0 < T0 <= T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub t: Rational,
    pub t0: Rational,
}

impl Window {
    pub fn new(t: Rational, t0: Rational) -> Result<Self> {
        require_x(&t)?;
        if t0.cmp0() != Ordering::Greater || t0 > t {
            return Err(Error::InvalidArgument(format!("need 0 < T0 <= T, got T = {t}, T0 = {t0}")));
        }
        Ok(Window { t, t0 })
    }

    pub fn end(&self) -> Rational {
        Rational::from(&self.t + &self.t0)
    }
}

/// Integrals and sign data of `Δ` over a range.
#[derive(Clone, Debug)]
pub struct RangeScan {
    pub lo: Rational,
    pub hi: Rational,
    pub int_delta: RealBall,
    pub int_delta_sq: RealBall,
    pub sup_abs_delta: RealBall,
    pub sign_changes: u64,
    pub change_locations: Vec<RealBall>,
    pub pieces: u64,
}

#[derive(Clone, Debug)]
pub struct WindowMoment {
    pub window: Window,
    pub int_delta: RealBall,
    pub int_delta_sq: RealBall,
    pub sup_abs_delta: RealBall,
    pub sign_changes: u64,
    pub change_locations: Vec<RealBall>,
    pub predicted_main: RealBall,
    pub ratio: RealBall,
}

/// A point where `D` may change, with whatever is needed to re-evaluate it.
#[derive(Clone, Debug)]
enum Point {
    Exact(Rational),
    Lattice { value: RealBall, h: u64, r: u64 },
}

impl Point {
    fn ball(&self, pair: &ExponentPair, bits: u32) -> RealBall {
        match self {
            Point::Exact(q) => RealBall::from_rational(q, bits),
            Point::Lattice { value, h, r } => {
                if value.prec() >= bits {
                    return value.clone();
                }
                let lh = pair.a().pow_of(&RealBall::from_u64(*h, bits));
                let lr = pair.b().pow_of(&RealBall::from_u64(*r, bits));
                lh.mul_ball(&lr)
            }
        }
    }
}

/// Powers and antiderivatives of the main term `m(x)`.
struct Kernel {
    main: MainTerm,
    /// `1/(1+1/a)`, `1/(1+1/b)`
    c1: [RealBall; 2],
    /// `1/(1+2/a)`, `2/(1+1/a+1/b)`, `1/(1+2/b)`
    c2: [RealBall; 3],
    z1z1: RealBall,
    z1z2: RealBall,
    z2z2: RealBall,
    f64s: (f64, f64, f64, f64),
}

/// `m(p)`, `∫_0^p m` and `∫_0^p m²`.
struct Eval {
    x: RealBall,
    m: RealBall,
    f1: RealBall,
    f2: RealBall,
}

impl Kernel {
    fn new(pair: &ExponentPair, ctx: &PrecisionContext) -> Result<Self> {
        let main = MainTerm::new(pair, &ctx.at_bits(ctx.bits + 32))?;
        let p = ctx.bits + 32;
        let (ia, ib) = (main.inv_a.to_ball(p), main.inv_b.to_ball(p));
        let one = RealBall::one(p);
        let c1 = [one.add_ball(&ia).recip(), one.add_ball(&ib).recip()];
        let c2 = [
            one.add_ball(&ia.mul_i64(2)).recip(),
            one.add_ball(&ia).add_ball(&ib).recip().mul_i64(2),
            one.add_ball(&ib.mul_i64(2)).recip(),
        ];
        let (z1, z2) = (main.z_ba.clone(), main.z_ab.clone());
        Ok(Kernel {
            c1,
            c2,
            z1z1: z1.sqr(),
            z1z2: z1.mul_ball(&z2),
            z2z2: z2.sqr(),
            f64s: (z1.to_f64(), z2.to_f64(), ia.to_f64(), ib.to_f64()),
            main,
        })
    }

    fn m(&self, x: &RealBall) -> RealBall {
        self.main.eval(x)
    }

    fn eval(&self, x: RealBall) -> Eval {
        let (p1, p2) = self.main.powers(&x);
        let m = self.main.z_ba.mul_ball(&p1).add_ball(&self.main.z_ab.mul_ball(&p2));
        let xp1 = x.mul_ball(&p1);
        let xp2 = x.mul_ball(&p2);
        let f1 = self.main.z_ba.mul_ball(&xp1).mul_ball(&self.c1[0]).add_ball(
            &self.main.z_ab.mul_ball(&xp2).mul_ball(&self.c1[1]),
        );
        let f2 = self
            .z1z1
            .mul_ball(&xp1.mul_ball(&p1))
            .mul_ball(&self.c2[0])
            .add_ball(&self.z1z2.mul_ball(&xp1.mul_ball(&p2)).mul_ball(&self.c2[1]))
            .add_ball(&self.z2z2.mul_ball(&xp2.mul_ball(&p2)).mul_ball(&self.c2[2]));
        Eval { x, m, f1, f2 }
    }

    /// Root of `m(x) = k` in `(lo, hi)` by Newton iteration in double precision.
    fn newton(&self, k: f64, lo: f64, hi: f64) -> f64 {
        let (z1, z2, ia, ib) = self.f64s;
        let mut x = 0.5 * (lo + hi);
        for _ in 0..60 {
            let f = z1 * x.powf(ia) + z2 * x.powf(ib) - k;
            let d = z1 * ia * x.powf(ia - 1.0) + z2 * ib * x.powf(ib - 1.0);
            let next = (x - f / d).clamp(lo, hi);
            if (next - x).abs() <= 1e-15 * x {
                return next;
            }
            x = next;
        }
        x
    }
}

/// Sign of `k − m(x)` at a point, escalating precision when undecided.
fn sign_at(pair: &ExponentPair, k: &Integer, pt: &Point, m: &RealBall, ctx: &PrecisionContext) -> Result<i8> {
    let conv = |o: Ordering| match o {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    };
    let v = RealBall::from_integer(k, m.prec()).sub_ball(m);
    if let Some(o) = v.sign() {
        return Ok(conv(o));
    }
    let mut last = ctx.bits;
    for bits in ctx.ladder().skip(1) {
        last = bits;
        let kb = Kernel::new(pair, &ctx.at_bits(bits))?;
        let x = pt.ball(pair, bits + 32);
        let v = RealBall::from_integer(k, bits + 32).sub_ball(&kb.m(&x));
        if let Some(o) = v.sign() {
            return Ok(conv(o));
        }
    }
    Err(Error::AmbiguousSign { bits: last })
}

/// Running state of the sign sequence `Δ(p+), Δ(q−), …` with zeros skipped.
#[derive(Clone, Debug, Default)]
struct Signs {
    first: Option<i8>,
    last: Option<i8>,
    changes: u64,
    locations: Vec<RealBall>,
}

impl Signs {
    fn push(&mut self, s: i8, at: impl FnOnce() -> RealBall) {
        if s == 0 {
            return;
        }
        match self.last {
            None => self.first = Some(s),
            Some(l) if l != s => {
                self.changes += 1;
                self.locations.push(at());
            }
            _ => {}
        }
        self.last = Some(s);
    }
}

struct Shard {
    int1: RealBall,
    int2: RealBall,
    sup: RealBall,
    signs: Signs,
    pieces: u64,
}

fn shard_scan(pair: &ExponentPair, kern: &Kernel, lo: &Rational, hi: &Rational, ctx: &PrecisionContext) -> Result<Shard> {
    let bits = ctx.bits + 32;
    let mut k = count_hyperbola(pair, lo, ctx)?;
    let jumps = collect_jumps(pair, lo, hi, ctx)?;
    let mut points: Vec<(Point, u32)> = Vec::with_capacity(jumps.len() + 2);
    points.push((Point::Exact(lo.clone()), 0));
    for j in jumps {
        let p = match j.u {
            JumpPoint::Exact(n) => Point::Exact(Rational::from(n)),
            JumpPoint::Ball { value, h, r } => Point::Lattice { value, h, r },
        };
        points.push((p, j.multiplicity));
    }
    let ends_on_jump = points.last().is_some_and(|(p, m)| {
        let b = p.ball(pair, bits);
        *m > 0 && b.is_exact() && b.contains_rational(hi)
    });
    if !ends_on_jump {
        points.push((Point::Exact(hi.clone()), 0));
    }
    let evals: Vec<Eval> = points.iter().map(|(p, _)| kern.eval(p.ball(pair, bits))).collect();
    let mut int1 = RealBall::zero(bits + 32);
    let mut int2 = RealBall::zero(bits + 32);
    let mut sup = RealBall::zero(bits);
    let mut signs = Signs::default();
    let mut pieces = 0u64;
    for i in 0..points.len() - 1 {
        let (p, q) = (&evals[i], &evals[i + 1]);
        let kb = RealBall::from_integer(&k, bits);
        let len = q.x.sub_ball(&p.x);
        let d1 = q.f1.sub_ball(&p.f1);
        let d2 = q.f2.sub_ball(&p.f2);
        int1 = int1.add_ball(&kb.mul_ball(&len).sub_ball(&d1));
        int2 = int2.add_ball(&kb.sqr().mul_ball(&len).sub_ball(&kb.mul_ball(&d1).mul_i64(2)).add_ball(&d2));
        let left = kb.sub_ball(&p.m);
        let right = kb.sub_ball(&q.m);
        sup = sup.max(&left.abs()).max(&right.abs());
        pieces += 1;
        let s_left = sign_at(pair, &k, &points[i].0, &p.m, ctx)?;
        let s_right = sign_at(pair, &k, &points[i + 1].0, &q.m, ctx)?;
        signs.push(s_left, || p.x.clone());
        signs.push(s_right, || interior_root(kern, &k, p, q));
        let mult = points[i + 1].1;
        if mult > 0 {
            k += mult;
            let after = RealBall::from_integer(&k, bits).sub_ball(&q.m);
            sup = sup.max(&after.abs());
            let s_after = sign_at(pair, &k, &points[i + 1].0, &q.m, ctx)?;
            signs.push(s_after, || q.x.clone());
        }
    }
    Ok(Shard {
        int1,
        int2,
        sup,
        signs,
        pieces,
    })
}

/// Enclosure of the zero of `k − m(x)` inside a piece where `Δ` goes from
/// positive to negative; the whole piece if a tight bracket cannot be certified.
fn interior_root(kern: &Kernel, k: &Integer, p: &Eval, q: &Eval) -> RealBall {
    let hull = p.x.union(&q.x);
    let (lo, hi) = (p.x.to_f64(), q.x.to_f64());
    let x = kern.newton(k.to_f64(), lo, hi);
    let eps = (x * 1e-12).max(1e-12);
    let (Some(a), Some(b)) = (Rational::from_f64(x - eps), Rational::from_f64(x + eps)) else {
        return hull;
    };
    let bits = p.x.prec();
    let (ab, bb) = (RealBall::from_rational(&a, bits), RealBall::from_rational(&b, bits));
    let kb = RealBall::from_integer(k, bits);
    let ok = p.x.cmp_ball(&ab) == Some(Ordering::Less)
        && bb.cmp_ball(&q.x) == Some(Ordering::Less)
        && kb.sub_ball(&kern.m(&ab)).sign() == Some(Ordering::Greater)
        && kb.sub_ball(&kern.m(&bb)).sign() == Some(Ordering::Less);
    if ok {
        RealBall::from_rational_interval(&a, &b, bits)
    } else {
        hull
    }
}

/// Exact piecewise integration of `Δ` and `Δ²` over `[lo, hi]`, `1 <= lo < hi`.
///
/// The range is cut into [`SHARDS`] equal parts processed in parallel and
/// merged in order, so results do not depend on the thread count.
pub fn scan_range(pair: &ExponentPair, lo: &Rational, hi: &Rational, ctx: &PrecisionContext) -> Result<RangeScan> {
    require_x(lo)?;
    if hi <= lo {
        return Err(Error::InvalidArgument(format!("empty range [{lo}, {hi}]")));
    }
    let kern = Kernel::new(pair, ctx)?;
    let width = Rational::from(hi - lo);
    let cuts: Vec<Rational> = (0..=SHARDS)
        .map(|i| {
            if i == SHARDS {
                hi.clone()
            } else {
                lo + Rational::from(&width * i) / SHARDS
            }
        })
        .collect();
    let shards: Vec<Result<Shard>> = (0..SHARDS as usize)
        .into_par_iter()
        .map(|i| shard_scan(pair, &kern, &cuts[i], &cuts[i + 1], ctx))
        .collect();
    let bits = ctx.bits + 64;
    let mut int1 = RealBall::zero(bits);
    let mut int2 = RealBall::zero(bits);
    let mut sup = RealBall::zero(ctx.bits);
    let mut signs = Signs::default();
    let mut pieces = 0;
    for (i, s) in shards.into_iter().enumerate() {
        let s = s?;
        int1 = int1.add_ball(&s.int1);
        int2 = int2.add_ball(&s.int2);
        sup = sup.max(&s.sup);
        pieces += s.pieces;
        if let Some(f) = s.signs.first {
            let cut = cuts[i].clone();
            signs.push(f, || RealBall::from_rational(&cut, ctx.bits));
            signs.changes += s.signs.changes;
            signs.locations.extend(s.signs.locations);
            signs.last = s.signs.last;
        }
    }
    Ok(RangeScan {
        lo: lo.clone(),
        hi: hi.clone(),
        int_delta: int1.with_prec(ctx.bits),
        int_delta_sq: int2.with_prec(ctx.bits),
        sup_abs_delta: sup,
        sign_changes: signs.changes,
        change_locations: signs.locations,
        pieces,
    })
}

/// `c1²/(2π²)·G·∫_T^{T+T0} x^{1/(a+b)} dx`.
pub fn predicted_main(pair: &ExponentPair, window: &Window, gab: &GabResult, bits: u32) -> RealBall {
    let coef = pair.mean_square_coefficient(bits);
    let e = pair.theta().add_int(1).expect("finite");
    let lo = e.pow_of(&RealBall::from_rational(&window.t, bits));
    let hi = e.pow_of(&RealBall::from_rational(&window.end(), bits));
    coef.mul_ball(&gab.value).mul_ball(&hi.sub_ball(&lo)).div_ball(&e.to_ball(bits))
}

fn require_gab(gab: &GabResult) -> Result<()> {
    if gab.route == GabRoute::ClosedForm && !gab.validated {
        return Err(Error::GabNotValidated);
    }
    Ok(())
}

/// Integrals over `[T, T + T0]` and their ratio to the predicted main term.
pub fn window_moments(pair: &ExponentPair, window: &Window, gab: &GabResult, ctx: &PrecisionContext) -> Result<WindowMoment> {
    require_gab(gab)?;
    let scan = scan_range(pair, &window.t, &window.end(), ctx)?;
    let predicted_main = predicted_main(pair, window, gab, ctx.bits);
    let ratio = scan.int_delta_sq.div_ball(&predicted_main);
    Ok(WindowMoment {
        window: window.clone(),
        int_delta: scan.int_delta,
        int_delta_sq: scan.int_delta_sq,
        sup_abs_delta: scan.sup_abs_delta,
        sign_changes: scan.sign_changes,
        change_locations: scan.change_locations,
        predicted_main,
        ratio,
    })
}

/// `∫_1^T Δ dx` and its ratio to `T/4`.
pub fn mean_value_check(pair: &ExponentPair, t: &Rational, ctx: &PrecisionContext) -> Result<(RealBall, RealBall)> {
    if *t < 2 {
        return Err(Error::InvalidArgument(format!("T must be >= 2, got {t}")));
    }
    let scan = scan_range(pair, &Rational::from(1), t, ctx)?;
    let quarter = RealBall::from_rational(&Rational::from(t / 4u32), ctx.bits);
    let ratio = scan.int_delta.div_ball(&quarter);
    Ok((scan.int_delta, ratio))
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub rows: Vec<WindowMoment>,
    /// Least-squares slope of `log sup|Δ|` against `log T`.
    pub sup_exponent: Option<f64>,
}

/// One window `[T, 2T]` per entry of `ts`.
pub fn convergence_report(pair: &ExponentPair, ts: &[Rational], gab: &GabResult, ctx: &PrecisionContext) -> Result<ConvergenceReport> {
    if ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("T list must be increasing".into()));
    }
    let mut rows = Vec::with_capacity(ts.len());
    for t in ts {
        let w = Window::new(t.clone(), t.clone())?;
        rows.push(window_moments(pair, &w, gab, ctx)?);
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.window.t.to_f64().ln(), r.sup_abs_delta.to_f64().ln()))
        .collect();
    Ok(ConvergenceReport {
        sup_exponent: slope(&pts),
        rows,
    })
}

/// Least-squares slope, `None` for fewer than two distinct abscissae.
pub fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `SHORT_WINDOW_C·T^{1−a/(b(a+b)(a+b−1))}·log⁴T`.
pub fn short_window_length(pair: &ExponentPair, t: f64) -> f64 {
    let (a, b) = (pair.a().to_f64(), pair.b().to_f64());
    let e = 1.0 - a / (b * (a + b) * (a + b - 1.0));
    SHORT_WINDOW_C * t.powf(e) * t.ln().powi(4)
}

/// Sign-change counts for consecutive windows of [`short_window_length`] tiling
/// `[T, 2T]`; a shorter final window is dropped.
pub fn short_windows(pair: &ExponentPair, t: &Rational, ctx: &PrecisionContext) -> Result<Vec<(Rational, Rational, u64)>> {
    require_x(t)?;
    let len = short_window_length(pair, t.to_f64());
    let len = Rational::from_f64(len.floor().max(1.0)).expect("finite");
    let end = Rational::from(t * 2u32);
    let mut out = Vec::new();
    let mut lo = t.clone();
    loop {
        let hi = Rational::from(&lo + &len);
        if hi > end {
            break;
        }
        let s = scan_range(pair, &lo, &hi, ctx)?;
        out.push((lo.clone(), hi.clone(), s.sign_changes));
        lo = hi;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coincidence::{gab_closed_form, validate_gab};
    use crate::counting::sieve_d;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    fn delta_f64(d: u64, x: f64) -> f64 {
        let (z1, z2) = (1.644_934_066_848_226_4, -1.460_354_508_809_586_8);
        d as f64 - z1 * x - z2 * x.sqrt()
    }

    #[test]
    fn one_piece_window() {
        let p = ExponentPair::integer(1, 2).unwrap();
        // no jumps in (21/2, 43/4]: 11 > 10.75
        let lo = Rational::from((21, 2));
        let hi = Rational::from((43, 4));
        let s = scan_range(&p, &lo, &hi, &ctx()).unwrap();
        let k = 13.0f64;
        let f = |x: f64| {
            let (z1, z2) = (1.644_934_066_848_226_4f64, -1.460_354_508_809_586_8f64);
            k * k * x - 2.0 * k * (z1 * x * x / 2.0 + z2 * x.powf(1.5) / 1.5)
                + z1 * z1 * x.powi(3) / 3.0
                + 2.0 * z1 * z2 * x.powf(2.5) / 2.5
                + z2 * z2 * x * x / 2.0
        };
        assert!((s.int_delta_sq.to_f64() - (f(10.75) - f(10.5))).abs() < 1e-9);
    }

    #[test]
    fn mean_value_at_two() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let (i, _) = mean_value_check(&p, &q(2), &ctx()).unwrap();
        let (z1, z2) = (1.644_934_066_848_226_4f64, -1.460_354_508_809_586_8f64);
        let want = 1.0 - z1 * 1.5 - z2 * (2.0 * 2f64.powf(1.5) / 3.0 - 2.0 / 3.0);
        assert!((i.to_f64() - want).abs() < 1e-12);
    }

    #[test]
    fn quadrature_oracle() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let s = scan_range(&p, &q(1), &q(100), &ctx()).unwrap();
        let d = sieve_d(&p, 100).unwrap();
        // Gauss–Legendre on each [n, n+1)
        let nodes = [
            (-0.906_179_845_938_664, 0.236_926_885_056_189),
            (-0.538_469_310_105_683, 0.478_628_670_499_366),
            (0.0, 0.568_888_888_888_889),
            (0.538_469_310_105_683, 0.478_628_670_499_366),
            (0.906_179_845_938_664, 0.236_926_885_056_189),
        ];
        let (mut i1, mut i2, mut cum) = (0.0, 0.0, 0u64);
        for n in 1..100u64 {
            cum += d[n as usize] as u64;
            for &(t, w) in &nodes {
                let x = n as f64 + 0.5 + 0.5 * t;
                let v = delta_f64(cum, x);
                i1 += 0.5 * w * v;
                i2 += 0.5 * w * v * v;
            }
        }
        assert!((s.int_delta.to_f64() - i1).abs() < 1e-3);
        assert!((s.int_delta_sq.to_f64() - i2).abs() < 1e-3 * i2);
    }

    #[test]
    fn additivity() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let whole = scan_range(&p, &q(1000), &q(2000), &ctx()).unwrap();
        let a = scan_range(&p, &q(1000), &Rational::from((2701, 2)), &ctx()).unwrap();
        let b = scan_range(&p, &Rational::from((2701, 2)), &q(2000), &ctx()).unwrap();
        assert!(whole.int_delta.overlaps(&a.int_delta.add_ball(&b.int_delta)));
        assert!(whole.int_delta_sq.overlaps(&a.int_delta_sq.add_ball(&b.int_delta_sq)));
        assert!(whole.sign_changes >= a.sign_changes + b.sign_changes);
        assert!(whole.sign_changes <= a.sign_changes + b.sign_changes + 1);
    }

    #[test]
    fn sign_changes_are_sound() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let s = scan_range(&p, &q(1000), &q(3000), &ctx()).unwrap();
        assert!(s.sign_changes > 5);
        let d = sieve_d(&p, 3000).unwrap();
        let mut cum = vec![0u64; 3001];
        for n in 1..=3000 {
            cum[n] = cum[n - 1] + d[n] as u64;
        }
        let locs: Vec<f64> = s.change_locations.iter().map(RealBall::to_f64).collect();
        for w in locs.windows(2) {
            assert!(w[0] < w[1]);
            let probes: Vec<f64> = (1..=5)
                .map(|k| {
                    let x = w[0] + (w[1] - w[0]) * k as f64 / 6.0;
                    delta_f64(cum[x.floor() as usize], x)
                })
                .collect();
            assert!(probes.iter().all(|v| *v > 0.0) || probes.iter().all(|v| *v < 0.0), "{probes:?}");
        }
    }

    #[test]
    fn unvalidated_closed_form_is_refused() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let g = gab_closed_form(&p, &ctx()).unwrap();
        let w = Window::new(q(100), q(100)).unwrap();
        assert_eq!(window_moments(&p, &w, &g, &ctx()).unwrap_err(), Error::GabNotValidated);
        let v = validate_gab(&p, &ctx()).unwrap();
        let g = v.certify(g).unwrap();
        let m = window_moments(&p, &w, &g, &ctx()).unwrap();
        assert!(m.ratio.is_positive());
        assert!(Window::new(q(10), q(11)).is_err());
    }

    #[test]
    fn irrational_pair_scan() {
        let p = ExponentPair::parse("1", "sqrt(2)", &ctx()).unwrap();
        let s = scan_range(&p, &q(100), &q(200), &ctx()).unwrap();
        assert!(s.pieces > 100);
        let t0 = s.int_delta.to_f64() / 100.0;
        assert!(t0.abs() < 10.0);
        let cs = s.int_delta_sq.to_f64();
        assert!(cs >= s.int_delta.to_f64().powi(2) / 100.0);
    }

    #[test]
    fn short_window_length_value() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let l = short_window_length(&p, 1e5);
        assert!((l - 1346.0).abs() < 2.0, "{l}");
    }
}
