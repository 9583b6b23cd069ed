//! Off-diagonal statistics: the gap `η`, near-pair counts, the weighted sum
//! `Σ₂`, minimum gaps between monomial values, and the Roth probe.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::{
    cf_convergents, frac_decompose, integer_kth_root, Exponent, ExponentPair, Lazy, PrecisionContext, RealBall, Roles,
};

/// Largest product of the four box widths in a near-pair query.
pub const NEAR_PAIR_MAX_VOLUME: u64 = 100_000_000;
/// Largest `H·R` in `Σ₂`.
pub const SIGMA2_MAX_VALUES: u64 = 100_000;
/// Largest `M²` in a gap scan.
pub const GAP_MAX_VALUES: u64 = 10_000_000;
/// Largest `H` in the Roth probe.
pub const ROTH_MAX_H: u64 = 10_000_000;
/// Every `n` up to this bound is evaluated directly in the Roth probe.
pub const ROTH_SCAN: u64 = 2048;

const REL: f64 = 16.0 * f64::EPSILON;

/// Certified values of `h^μ r^ν`.
#[derive(Clone, Debug)]
pub struct Monomial {
    mu: Exponent,
    nu: Exponent,
    mu_f: f64,
    nu_f: f64,
    mu_err: f64,
    nu_err: f64,
}

impl Monomial {
    pub fn new(mu: Exponent, nu: Exponent) -> Self {
        let m = mu.to_ball(128);
        let n = nu.to_ball(128);
        Monomial {
            mu_f: m.to_f64(),
            nu_f: n.to_f64(),
            mu_err: m.rad_f64() + m.to_f64().abs() * REL,
            nu_err: n.rad_f64() + n.to_f64().abs() * REL,
            mu,
            nu,
        }
    }

    pub fn mu(&self) -> &Exponent {
        &self.mu
    }

    pub fn nu(&self) -> &Exponent {
        &self.nu
    }

    /// Double precision value and a bound on its relative error.
    pub fn approx(&self, h: u64, r: u64) -> (f64, f64) {
        let lh = (h as f64).ln();
        let lr = (r as f64).ln();
        let l = self.mu_f * lh + self.nu_f * lr;
        let err = self.mu_err * lh + self.nu_err * lr + (l.abs() + 4.0) * REL;
        (l.exp(), 2.0 * err)
    }

    pub fn exact(&self, h: u64, r: u64) -> Option<Rational> {
        if let Some(v) = self.exact_combined(h, r) {
            return Some(v);
        }
        let a = self.mu.exact_power_of(&Rational::from(h))?;
        let b = self.nu.exact_power_of(&Rational::from(r))?;
        Some(a * b)
    }

    /// `(h^{μL} r^{νL})^{1/L}` for rational exponents with common denominator `L`,
    /// when that root is rational.
    fn exact_combined(&self, h: u64, r: u64) -> Option<Rational> {
        let (m, n) = (self.mu.as_rational()?, self.nu.as_rational()?);
        let l = Integer::from(m.denom().lcm_ref(n.denom()));
        let root = l.to_u32().filter(|&l| l <= 64)?;
        let em = Rational::from(m * &l).numer().to_i32()?;
        let en = Rational::from(n * &l).numer().to_i32()?;
        let v = int_power(h, em)? * int_power(r, en)?;
        let exact_root = |z: &Integer| {
            let k = integer_kth_root(z, root);
            (Integer::from(&k).pow(root) == *z).then_some(k)
        };
        let num = exact_root(v.numer())?;
        let den = exact_root(v.denom())?;
        Some(Rational::from((num, den)))
    }

    pub fn ball(&self, h: u64, r: u64, bits: u32) -> RealBall {
        if let Some(q) = self.exact(h, r) {
            return RealBall::from_rational(&q, bits);
        }
        let f = |e: &Exponent, n: u64| {
            if n == 1 {
                RealBall::one(bits)
            } else {
                e.pow_of(&RealBall::from_u64(n, bits))
            }
        };
        f(&self.mu, h).mul_ball(&f(&self.nu, r))
    }

    /// Exact decision of `v(p) = v(q)` when the exponents allow one.
    pub fn equal_exact(&self, p: (u64, u64), q: (u64, u64)) -> Option<bool> {
        if p == q {
            return Some(true);
        }
        if let (Some(x), Some(y)) = (self.exact(p.0, p.1), self.exact(q.0, q.1)) {
            return Some(x == y);
        }
        if let (Some(m), Some(n)) = (self.mu.as_rational(), self.nu.as_rational()) {
            // raise both sides to the common denominator
            let l = Integer::from(m.denom().lcm_ref(n.denom()));
            let em = Rational::from(m * &l).numer().to_i32()?;
            let en = Rational::from(n * &l).numer().to_i32()?;
            return Some(int_power(p.0, em)? * int_power(p.1, en)? == int_power(q.0, em)? * int_power(q.1, en)?);
        }
        // h^μ r^ν = (h r^{ν/μ})^μ, so only the ratio matters
        let ratio = self.nu.div(&self.mu).ok()?;
        let s = ratio.as_exact()?;
        match s.as_rational() {
            None => Some(false),
            Some(rho) => {
                let et = rho.denom().to_i32()?;
                let es = rho.numer().to_i32()?;
                Some(int_power(p.0, et)? * int_power(p.1, es)? == int_power(q.0, et)? * int_power(q.1, es)?)
            }
        }
    }
}

/// `b^e` as an exact rational, refused for `|e| > 4096`.
fn int_power(b: u64, e: i32) -> Option<Rational> {
    if e.unsigned_abs() > 4096 {
        return None;
    }
    let v = Rational::from(Integer::from(b).pow(e.unsigned_abs()));
    Some(if e < 0 { v.recip() } else { v })
}

fn pair_monomial(roles: Roles, pair: &ExponentPair) -> Monomial {
    let re = pair.roles(roles);
    let theta = pair.theta();
    Monomial::new(re.a.mul(theta).expect("finite"), re.b.mul(theta).expect("finite"))
}

/// `η = (h1^a r1^b)^{1/(a+b)} − (h2^a r2^b)^{1/(a+b)}`; exact zero when the
/// two lattice values coincide.
pub fn eta_gap(pair: &ExponentPair, h1: u64, r1: u64, h2: u64, r2: u64, ctx: &PrecisionContext) -> Result<RealBall> {
    if [h1, r1, h2, r2].contains(&0) {
        return Err(Error::InvalidArgument("coordinates must be >= 1".into()));
    }
    let m = pair_monomial(Roles::Ab, pair);
    if m.equal_exact((h1, r1), (h2, r2)) == Some(true) {
        return Ok(RealBall::zero(ctx.bits));
    }
    Ok(m.ball(h1, r1, ctx.bits).sub_ball(&m.ball(h2, r2, ctx.bits)))
}

/// Certified `|v(p) − v(q)|` against `δ`.
fn cmp_gap(m: &Monomial, p: (u64, u64), q: (u64, u64), delta: &Rational, ctx: &PrecisionContext) -> Result<Ordering> {
    if let (Some(x), Some(y)) = (m.exact(p.0, p.1), m.exact(q.0, q.1)) {
        return Ok(Rational::from(&x - &y).abs().cmp(delta));
    }
    if delta.cmp0() == Ordering::Equal {
        if let Some(eq) = m.equal_exact(p, q) {
            return Ok(if eq { Ordering::Equal } else { Ordering::Greater });
        }
    }
    let mut last = ctx.bits;
    for bits in ctx.ladder() {
        last = bits;
        let d = m.ball(p.0, p.1, bits).sub_ball(&m.ball(q.0, q.1, bits)).abs();
        if let Some(o) = d.cmp_rational(delta) {
            return Ok(o);
        }
    }
    Err(Error::AmbiguousTie { bits: last })
}

/// Dyadic boxes `h_i ∈ (H_i, 2H_i]`, `r_i ∈ (R_i, 2R_i]` and a proximity `δ`.
#[derive(Clone, Debug)]
pub struct NearPairQuery {
    pub mu: Exponent,
    pub nu: Exponent,
    pub h1: Rational,
    pub h2: Rational,
    pub r1: Rational,
    pub r2: Rational,
    pub delta: Rational,
}

fn dyadic(anchor: &Rational) -> Result<(u64, u64)> {
    if *anchor < 0.5 {
        return Err(Error::InvalidArgument(format!("box anchor {anchor} < 1/2")));
    }
    let lo = Integer::from(anchor.floor_ref()) + 1u32;
    let hi = Integer::from(Rational::from(anchor * 2u32).floor_ref());
    let conv = |v: Integer| v.to_u64().ok_or_else(|| Error::guard("u64_range", format!("{anchor}")));
    Ok((conv(lo)?, conv(hi)?))
}

impl NearPairQuery {
    fn ranges(&self) -> Result<[(u64, u64); 4]> {
        Ok([dyadic(&self.h1)?, dyadic(&self.r1)?, dyadic(&self.h2)?, dyadic(&self.r2)?])
    }

    fn check(&self) -> Result<[(u64, u64); 4]> {
        if self.delta.cmp0() == Ordering::Less {
            return Err(Error::InvalidArgument("delta must be >= 0".into()));
        }
        let zero = |e: &Exponent| e.as_rational().is_some_and(|q| q.cmp0() == Ordering::Equal);
        if zero(&self.mu) || zero(&self.nu) {
            return Err(Error::InvalidArgument("mu and nu must be nonzero".into()));
        }
        let r = self.ranges()?;
        let vol = r
            .iter()
            .map(|(lo, hi)| (hi + 1).saturating_sub(*lo) as u128)
            .product::<u128>();
        if vol > NEAR_PAIR_MAX_VOLUME as u128 {
            return Err(Error::guard("near_pair_volume", format!("volume {vol} > {NEAR_PAIR_MAX_VOLUME}")));
        }
        Ok(r)
    }

    /// `δ(H1H2)^{1−μ/2}(R1R2)^{1−ν/2} + (H1H2R1R2)^{1/2}·log²(2 + H1H2R1R2)`
    pub fn bound_shape(&self) -> f64 {
        let (h, r) = (self.h1.to_f64() * self.h2.to_f64(), self.r1.to_f64() * self.r2.to_f64());
        let (mu, nu) = (self.mu.to_f64(), self.nu.to_f64());
        let p = h * r;
        self.delta.to_f64() * h.powf(1.0 - mu / 2.0) * r.powf(1.0 - nu / 2.0) + p.sqrt() * (2.0 + p).ln().powi(2)
    }
}

fn box_values(m: &Monomial, h: (u64, u64), r: (u64, u64)) -> Vec<(f64, f64, u64, u64)> {
    let mut v: Vec<(f64, f64, u64, u64)> = (h.0..=h.1)
        .into_par_iter()
        .flat_map_iter(|hh| {
            (r.0..=r.1).map(move |rr| {
                let (x, e) = m.approx(hh, rr);
                (x, e * x, hh, rr)
            })
        })
        .collect();
    v.par_sort_by(|a, b| a.0.total_cmp(&b.0).then((a.2, a.3).cmp(&(b.2, b.3))));
    v
}

/// `#{quadruples in the boxes : |h1^μ r1^ν − h2^μ r2^ν| <= δ}` by sorting the
/// second box and sweeping a window around each value of the first.
pub fn near_pair_count(query: &NearPairQuery, ctx: &PrecisionContext) -> Result<u64> {
    let [h1, r1, h2, r2] = query.check()?;
    let m = Monomial::new(query.mu.clone(), query.nu.clone());
    let a = box_values(&m, h1, r1);
    let b = box_values(&m, h2, r2);
    if a.is_empty() || b.is_empty() {
        return Ok(0);
    }
    let delta = query.delta.to_f64();
    let max_err = b.iter().map(|v| v.1).fold(0.0, f64::max);
    let counts: Vec<Result<u64>> = a
        .par_iter()
        .map(|&(x, ex, h, r)| {
            let slack = ex + max_err + (x.abs() + delta) * REL + 1e-300;
            let lo = b.partition_point(|v| v.0 < x - delta - slack);
            let hi = b.partition_point(|v| v.0 <= x + delta + slack);
            let mut n = 0u64;
            for &(y, ey, hh, rr) in &b[lo..hi] {
                let d = (x - y).abs();
                let tol = ex + ey + (x.abs() + y.abs()) * REL;
                if d + tol < delta {
                    n += 1;
                } else if d - tol > delta {
                    continue;
                } else if cmp_gap(&m, (h, r), (hh, rr), &query.delta, ctx)? != Ordering::Greater {
                    n += 1;
                }
            }
            Ok(n)
        })
        .collect();
    counts.into_iter().sum()
}

/// The same count by testing every pair.
pub fn near_pair_count_quadratic(query: &NearPairQuery, ctx: &PrecisionContext) -> Result<u64> {
    let [h1, r1, h2, r2] = query.check()?;
    let m = Monomial::new(query.mu.clone(), query.nu.clone());
    let mut n = 0;
    for ha in h1.0..=h1.1 {
        for ra in r1.0..=r1.1 {
            for hb in h2.0..=h2.1 {
                for rb in r2.0..=r2.1 {
                    if cmp_gap(&m, (ha, ra), (hb, rb), &query.delta, ctx)? != Ordering::Greater {
                        n += 1;
                    }
                }
            }
        }
    }
    Ok(n)
}

/// A single constant fitted to count/shape ratios over a query grid.
#[derive(Clone, Debug)]
pub struct ShapeFit {
    /// Median of the ratios.
    pub c: f64,
    pub ratios: Vec<f64>,
    /// Every ratio is at most `10·c`.
    pub covered: bool,
}

pub fn fit_shape(ratios: Vec<f64>) -> ShapeFit {
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let c = if sorted.is_empty() { 0.0 } else { sorted[sorted.len() / 2] };
    let covered = c > 0.0 && ratios.iter().all(|&r| r <= 10.0 * c);
    ShapeFit { c, ratios, covered }
}

/// Upper end `ρ` of `v1/v2` under `|v1 − v2| < (1/10)·sqrt(v1 v2)`, padded.
fn band_ratio() -> f64 {
    let s = (0.1 + (0.01f64 + 4.0).sqrt()) / 2.0;
    s * s * (1.0 + 1e-9)
}

/// `Σ₂(T; H, R)`: the sum over ordered pairs of distinct lattice values with
/// `h_i <= H`, `r_i <= R` and `0 < |η| < (1/10)(v1 v2)^{1/2}` of
/// `(h1h2)^{-e_h}(r1r2)^{-e_r}·min(T^{1/(a+b)}, 1/|η|)`.
pub fn sigma2_eval(roles: Roles, pair: &ExponentPair, t: &Rational, h: u64, r: u64, ctx: &PrecisionContext) -> Result<RealBall> {
    if *t < 10 {
        return Err(Error::InvalidArgument(format!("T must be >= 10, got {t}")));
    }
    if h == 0 || r == 0 {
        return Err(Error::InvalidArgument("H and R must be >= 1".into()));
    }
    if (h as u128) * (r as u128) > SIGMA2_MAX_VALUES as u128 {
        return Err(Error::guard("sigma2_values", format!("H·R = {} > {SIGMA2_MAX_VALUES}", h * r)));
    }
    let p = ctx.bits;
    let m = pair_monomial(roles, pair);
    let re = pair.roles(roles);
    let neg = Rational::from(-1);
    let (neh, ner) = (re.e_h.scale(&neg)?, re.e_r.scale(&neg)?);
    let vals = box_values(&m, (1, h), (1, r));
    let balls: Vec<(RealBall, RealBall, RealBall)> = vals
        .par_iter()
        .map(|&(_, _, hh, rr)| {
            let v = m.ball(hh, rr, p);
            let w = neh
                .pow_of(&RealBall::from_u64(hh, p))
                .mul_ball(&ner.pow_of(&RealBall::from_u64(rr, p)));
            (v.clone(), v.sqrt(), w)
        })
        .collect();
    let cap = pair.theta().pow_of(&RealBall::from_rational(t, p));
    let rho = band_ratio();
    let tenth = RealBall::from_rational(&Rational::from((1, 10)), p);
    let rows: Vec<Result<RealBall>> = (0..vals.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = RealBall::zero(p + 32);
            let (x, ex, hi, ri) = vals[i];
            for j in i + 1..vals.len() {
                let (y, ey, hj, rj) = vals[j];
                if y > x * rho + ex + ey {
                    break;
                }
                if m.equal_exact((hi, ri), (hj, rj)) == Some(true) {
                    continue;
                }
                let (inside, eta) = band_member(&m, &balls, (i, hi, ri), (j, hj, rj), &tenth, ctx)?;
                if !inside {
                    continue;
                }
                let damp = cap.min(&eta.abs().recip());
                acc = acc.add_ball(&balls[i].2.mul_ball(&balls[j].2).mul_ball(&damp));
            }
            Ok(acc)
        })
        .collect();
    let mut total = RealBall::zero(p + 32);
    for row in rows {
        total = total.add_ball(&row?);
    }
    Ok(total.mul_i64(2))
}

/// Decide `|η| < (1/10)(v1 v2)^{1/2}` and return `η`.
fn band_member(
    m: &Monomial,
    balls: &[(RealBall, RealBall, RealBall)],
    (i, hi, ri): (usize, u64, u64),
    (j, hj, rj): (usize, u64, u64),
    tenth: &RealBall,
    ctx: &PrecisionContext,
) -> Result<(bool, RealBall)> {
    let test = |vi: &RealBall, si: &RealBall, vj: &RealBall, sj: &RealBall| {
        let eta = vi.sub_ball(vj);
        let bound = tenth.mul_ball(&si.mul_ball(sj));
        (eta.abs().cmp_ball(&bound), eta)
    };
    let (o, eta) = test(&balls[i].0, &balls[i].1, &balls[j].0, &balls[j].1);
    if let Some(o) = o {
        if eta.sign().is_some() {
            return Ok((o == Ordering::Less, eta));
        }
    }
    let mut last = ctx.bits;
    for bits in ctx.ladder().skip(1) {
        last = bits;
        let (vi, vj) = (m.ball(hi, ri, bits), m.ball(hj, rj, bits));
        let (o, eta) = test(&vi, &vi.sqrt(), &vj, &vj.sqrt());
        if let (Some(o), Some(_)) = (o, eta.sign()) {
            return Ok((o == Ordering::Less, eta));
        }
    }
    Err(Error::AmbiguousTie { bits: last })
}

/// Which values a gap scan compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapMetric {
    /// `h^α r^β`
    Raw,
    /// `(h^α r^β)^{1/(α+β)}`
    Eta,
}

#[derive(Clone, Debug)]
pub struct GapReport {
    pub m: u64,
    pub metric: GapMetric,
    pub min_gap: RealBall,
    pub witness: (u64, u64, u64, u64),
    /// `C` in `min_gap = exp{−C (log M)² log log M}`, for `M >= 3`.
    pub fitted_c: Option<RealBall>,
}

/// Smallest nonzero gap between values `h^α r^β` (or their η transform)
/// over `h, r <= M`.
pub fn min_gap(alpha: &Exponent, beta: &Exponent, m: u64, metric: GapMetric, ctx: &PrecisionContext) -> Result<GapReport> {
    if m < 2 {
        return Err(Error::InvalidArgument("M must be >= 2 for a nonzero gap".into()));
    }
    if (m as u128) * (m as u128) > GAP_MAX_VALUES as u128 {
        return Err(Error::guard("gap_values", format!("M² = {} > {GAP_MAX_VALUES}", m * m)));
    }
    let mono = match metric {
        GapMetric::Raw => Monomial::new(alpha.clone(), beta.clone()),
        GapMetric::Eta => {
            let s = alpha.add(beta)?;
            Monomial::new(alpha.div(&s)?, beta.div(&s)?)
        }
    };
    let vals = box_values(&mono, (1, m), (1, m));
    // smallest clearly nonzero double precision gap
    let mut g0 = f64::INFINITY;
    for w in vals.windows(2) {
        let d = w[1].0 - w[0].0;
        if d > 4.0 * (w[0].1 + w[1].1) {
            g0 = g0.min(d);
        }
    }
    // certify every adjacent pair that could beat g0, run by run
    let mut best: Option<(RealBall, (u64, u64, u64, u64))> = None;
    let mut i = 0;
    while i + 1 < vals.len() {
        let near = |k: usize| vals[k + 1].0 - vals[k].0 <= g0 + 8.0 * (vals[k].1 + vals[k + 1].1);
        if !near(i) {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < vals.len() && near(i) {
            i += 1;
        }
        let run = &vals[start..=i];
        let cands = certify_run(&mono, run, ctx)?;
        for (gap, w) in cands {
            let better = match &best {
                None => true,
                Some((b, _)) => gap.cmp_ball(b) == Some(Ordering::Less),
            };
            if better {
                best = Some((gap, w));
            }
        }
    }
    let (min_gap, witness) = best.ok_or_else(|| Error::InvalidArgument("no nonzero gaps".into()))?;
    let fitted_c = (m >= 3).then(|| {
        let p = min_gap.prec();
        let lm = RealBall::from_u64(m, p).ln();
        min_gap.ln().neg().div_ball(&lm.sqr().mul_ball(&lm.ln()))
    });
    Ok(GapReport {
        m,
        metric,
        min_gap,
        witness,
        fitted_c,
    })
}

type Gap = (RealBall, (u64, u64, u64, u64));

/// Exact order of a run of nearly equal values, then its nonzero adjacent gaps.
fn certify_run(m: &Monomial, run: &[(f64, f64, u64, u64)], ctx: &PrecisionContext) -> Result<Vec<Gap>> {
    let mut last = ctx.bits;
    for bits in ctx.ladder() {
        last = bits;
        let mut items: Vec<(RealBall, u64, u64)> = run.iter().map(|v| (m.ball(v.2, v.3, bits), v.2, v.3)).collect();
        let mut ok = true;
        items.sort_by(|a, b| a.0.mid().partial_cmp(b.0.mid()).unwrap_or(Ordering::Equal));
        // group exact ties, then require strict separation between groups
        let mut groups: Vec<(RealBall, u64, u64)> = Vec::new();
        for it in items {
            if let Some(prev) = groups.last() {
                if m.equal_exact((prev.1, prev.2), (it.1, it.2)) == Some(true) {
                    continue;
                }
                if prev.0.cmp_ball(&it.0) != Some(Ordering::Less) {
                    ok = false;
                    break;
                }
            }
            groups.push(it);
        }
        if !ok {
            continue;
        }
        return Ok(groups
            .windows(2)
            .map(|w| (w[1].0.sub_ball(&w[0].0), (w[1].1, w[1].2, w[0].1, w[0].2)))
            .collect());
    }
    Err(Error::PrecisionExhausted {
        bits: last,
        what: "separating adjacent monomial values".into(),
    })
}

#[derive(Clone, Debug)]
pub struct RothReport {
    /// `(n, n·‖nα‖)` at each new running minimum.
    pub records: Vec<(u64, RealBall)>,
    /// Convergent denominators up to `H`.
    pub denominators: Vec<u64>,
    /// `(n, n^{1.1}·‖nα‖)` minimising the ε = 0.1 probe.
    pub probe: (u64, RealBall),
}

fn n_dist(alpha: &Exponent, n: u64, ctx: &PrecisionContext) -> Result<RealBall> {
    let t = Lazy::new(|bits| alpha.to_ball(bits + 16).mul_ball(&RealBall::from_u64(n, bits + 16)));
    Ok(frac_decompose(&t, ctx)?.dist)
}

/// Running minima of `n·‖nα‖` for `n <= H` and the minimum of `n^{1.1}‖nα‖`.
///
/// Values below 1/2 only occur at convergent denominators, so the candidates
/// are those plus a direct scan of small `n`.
pub fn roth_quality(alpha: &Exponent, h: u64, ctx: &PrecisionContext) -> Result<RothReport> {
    if h == 0 || h > ROTH_MAX_H {
        return Err(Error::InvalidArgument(format!("H must lie in [1, {ROTH_MAX_H}]")));
    }
    let mut count = 8;
    let denominators = loop {
        let conv = cf_convergents(alpha, count)?;
        let qs: Vec<u64> = conv.iter().filter_map(|(_, q)| q.to_u64()).collect();
        if qs.len() < conv.len() || qs.last().is_some_and(|&q| q > h) {
            break qs.into_iter().filter(|&q| q <= h).collect::<Vec<_>>();
        }
        count *= 2;
    };
    let mut cands: Vec<u64> = (1..=h.min(ROTH_SCAN)).collect();
    for &q in &denominators {
        for n in q.saturating_sub(2)..=q + 2 {
            if n >= 1 && n <= h {
                cands.push(n);
            }
        }
    }
    cands.sort_unstable();
    cands.dedup();
    let p = ctx.bits;
    let vals: Vec<Result<(u64, RealBall)>> = cands.par_iter().map(|&n| Ok((n, n_dist(alpha, n, ctx)?))).collect();
    let eps = Rational::from((11, 10));
    let mut records: Vec<(u64, RealBall)> = Vec::new();
    let mut probe: Option<(u64, RealBall)> = None;
    for v in vals {
        let (n, d) = v?;
        let nb = RealBall::from_u64(n, p);
        let q = nb.mul_ball(&d);
        let e = nb.pow_rational(&eps).mul_ball(&d);
        let lower = records.last().is_none_or(|(_, b)| q.cmp_ball(b) == Some(Ordering::Less));
        if lower {
            records.push((n, q));
        }
        if probe.as_ref().is_none_or(|(_, b)| e.cmp_ball(b) == Some(Ordering::Less)) {
            probe = Some((n, e));
        }
    }
    Ok(RothReport {
        records,
        denominators,
        probe: probe.expect("n = 1 is always a candidate"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::parse_exponent;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn eta_examples() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let z = eta_gap(&p, 4, 1, 1, 2, &ctx()).unwrap();
        assert!(z.is_exact() && z.contains_f64(0.0));
        let e = eta_gap(&p, 1, 1, 2, 1, &ctx()).unwrap();
        assert!((e.to_f64() - (1.0 - 2f64.cbrt())).abs() < 1e-15);
        assert!(eta_gap(&p, 7, 3, 7, 3, &ctx()).unwrap().contains_f64(0.0));
    }

    fn query(mu: &str, nu: &str, a: i64, b: i64, delta: Rational) -> NearPairQuery {
        NearPairQuery {
            mu: parse_exponent(mu).unwrap(),
            nu: parse_exponent(nu).unwrap(),
            h1: Rational::from(a),
            h2: Rational::from(a),
            r1: Rational::from(b),
            r2: Rational::from(b),
            delta,
        }
    }

    #[test]
    fn near_pairs_small() {
        let q = query("1", "1", 1, 1, Rational::new());
        assert_eq!(near_pair_count(&q, &ctx()).unwrap(), 1);
        let q = query("1", "1", 4, 4, Rational::from(1000));
        assert_eq!(near_pair_count(&q, &ctx()).unwrap(), 16 * 16);
        let q = query("1/3", "2/3", 16, 16, Rational::from((1, 100)));
        assert_eq!(
            near_pair_count(&q, &ctx()).unwrap(),
            near_pair_count_quadratic(&q, &ctx()).unwrap()
        );
        // integer exponents hit |x − y| = δ exactly
        let q = query("1", "2", 3, 2, Rational::from(5));
        assert_eq!(
            near_pair_count(&q, &ctx()).unwrap(),
            near_pair_count_quadratic(&q, &ctx()).unwrap()
        );
    }

    #[test]
    fn sigma2_matches_double_loop() {
        let p = ExponentPair::integer(1, 2).unwrap();
        assert!(sigma2_eval(Roles::Ab, &p, &Rational::from(1000), 1, 1, &ctx()).unwrap().contains_f64(0.0));
        let t = Rational::from(1000);
        let got = sigma2_eval(Roles::Ab, &p, &t, 8, 8, &ctx()).unwrap();
        let mut want = 0.0;
        let v = |h: f64, r: f64| (h * r * r).cbrt();
        for h1 in 1..=8 {
            for r1 in 1..=8 {
                for h2 in 1..=8 {
                    for r2 in 1..=8 {
                        if h1 * r1 * r1 == h2 * r2 * r2 {
                            continue;
                        }
                        let (a, b) = (v(h1 as f64, r1 as f64), v(h2 as f64, r2 as f64));
                        let eta = (a - b).abs();
                        if eta < 0.1 * (a * b).sqrt() {
                            let w = ((h1 * h2) as f64).powf(-5.0 / 6.0) * ((r1 * r2) as f64).powf(-2.0 / 3.0);
                            want += w * (1000f64.cbrt()).min(1.0 / eta);
                        }
                    }
                }
            }
        }
        assert!((got.to_f64() - want).abs() < 1e-9 * want.max(1.0), "{} vs {want}", got.to_f64());
    }

    #[test]
    fn gap_examples() {
        let one = parse_exponent("1").unwrap();
        let two = parse_exponent("2").unwrap();
        let r = min_gap(&one, &two, 2, GapMetric::Raw, &ctx()).unwrap();
        assert!(r.min_gap.contains_f64(1.0));
        let e = min_gap(&one, &two, 2, GapMetric::Eta, &ctx()).unwrap();
        assert!((e.min_gap.to_f64() - (2f64.cbrt() - 1.0)).abs() < 1e-15);
        assert!(min_gap(&one, &two, 1, GapMetric::Raw, &ctx()).is_err());
        let s2 = parse_exponent("sqrt(2)").unwrap();
        let g = min_gap(&one, &s2, 50, GapMetric::Raw, &ctx().at_bits(512)).unwrap();
        assert!(g.min_gap.is_positive() && g.fitted_c.is_some());
        let (h1, r1, h2, r2) = g.witness;
        let v = |h: u64, r: u64| (h as f64) * (r as f64).powf(2f64.sqrt());
        assert!(((v(h1, r1) - v(h2, r2)) - g.min_gap.to_f64()).abs() < 1e-6 * v(h1, r1));
    }

    #[test]
    fn gap_matches_sorted_oracle() {
        let one = parse_exponent("1").unwrap();
        let s2 = parse_exponent("sqrt(2)").unwrap();
        let g = min_gap(&one, &s2, 20, GapMetric::Raw, &ctx()).unwrap();
        let mut v: Vec<f64> = (1..=20u64)
            .flat_map(|h| (1..=20u64).map(move |r| h as f64 * (r as f64).powf(2f64.sqrt())))
            .collect();
        v.sort_by(f64::total_cmp);
        let want = v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        assert!((g.min_gap.to_f64() - want).abs() < 1e-9);
    }

    #[test]
    fn roth_sqrt2() {
        let a = parse_exponent("sqrt(2)").unwrap();
        let r = roth_quality(&a, 100_000, &ctx()).unwrap();
        assert_eq!(r.records[0].0, 1);
        let two = r.records.iter().find(|(n, _)| *n == 2).unwrap();
        assert!((two.1.to_f64() - 2.0 * (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
        for (n, q) in &r.records {
            assert!(q.to_f64() >= 0.2);
            assert!(*n == 1 || r.denominators.contains(n));
        }
    }
}
