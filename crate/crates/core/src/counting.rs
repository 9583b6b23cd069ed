//! Exact lattice counts `D_{a,b}(x)`, the main term, `Δ_{a,b}(x)`, the
//! multiplicity sieve `d_{a,b}`, jump enumeration and the ψ-sums `f(a,b;x)`.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::{
    frac_decompose, kth_root_u64, pow_u128, zeta_real, Exponent, ExponentPair, FracDecomposition,
    Lazy, PairKind, PrecisionContext, RealBall, RoleExponents, Roles,
};
use crate::sampling;

/// Largest `x` accepted by [`count_naive`].
pub const NAIVE_MAX_X: u64 = 10_000_000;
/// Largest sieve length (one `u32` counter per entry).
pub const SIEVE_MAX: u64 = 125_000_000;
/// Largest number of jumps enumerated in one window.
pub const JUMP_MAX: u64 = 125_000_000;

/// `D(x)`, the main term and `Δ(x) = D(x) − main(x)` at a point.
#[derive(Clone, Debug)]
pub struct CountResult {
    pub x: Rational,
    pub d: Integer,
    pub main: RealBall,
    pub delta: RealBall,
}

/// `ζ(b/a) x^{1/a} + ζ(a/b) x^{1/b}` with the zeta values computed once.
#[derive(Clone, Debug)]
pub struct MainTerm {
    /// `ζ(b/a)`
    pub z_ba: RealBall,
    /// `ζ(a/b)`
    pub z_ab: RealBall,
    /// `1/a`
    pub inv_a: Exponent,
    /// `1/b`
    pub inv_b: Exponent,
    pub bits: u32,
}

impl MainTerm {
    pub fn new(pair: &ExponentPair, ctx: &PrecisionContext) -> Result<Self> {
        let bits = ctx.bits;
        let z_ba = zeta_real(&pair.b_over_a().to_ball(bits + 32), ctx)?;
        let z_ab = zeta_real(&pair.a_over_b().to_ball(bits + 32), ctx)?;
        Ok(MainTerm {
            z_ba,
            z_ab,
            inv_a: pair.a().recip()?,
            inv_b: pair.b().recip()?,
            bits,
        })
    }

    /// `(x^{1/a}, x^{1/b})`
    pub fn powers(&self, x: &RealBall) -> (RealBall, RealBall) {
        (self.inv_a.pow_of(x), self.inv_b.pow_of(x))
    }

    pub fn eval(&self, x: &RealBall) -> RealBall {
        let (p1, p2) = self.powers(x);
        self.z_ba.mul_ball(&p1).add_ball(&self.z_ab.mul_ball(&p2))
    }
}

pub(crate) fn require_x(x: &Rational) -> Result<()> {
    if *x < 1 {
        return Err(Error::InvalidArgument(format!("x must be >= 1, got {x}")));
    }
    Ok(())
}

fn floor_u64(x: &Rational) -> Result<u64> {
    Integer::from(x.floor_ref())
        .to_u64()
        .ok_or_else(|| Error::guard("u64_range", format!("{x} exceeds 2^64")))
}

/// Certified comparisons of `h^a r^b` against rationals, with a double
/// precision prefilter and ball arithmetic on the precision ladder behind it.
#[derive(Clone, Debug)]
pub(crate) struct LatticeValues {
    pub roles: RoleExponents,
    a_f: f64,
    b_f: f64,
    a_err: f64,
    b_err: f64,
}

const F64_REL: f64 = 4.0 * f64::EPSILON;

impl LatticeValues {
    pub fn new(roles: RoleExponents) -> Self {
        let a = roles.a.to_ball(128);
        let b = roles.b.to_ball(128);
        let a_f = a.to_f64();
        let b_f = b.to_f64();
        LatticeValues {
            a_err: a.rad_f64() + a_f.abs() * F64_REL,
            b_err: b.rad_f64() + b_f.abs() * F64_REL,
            a_f,
            b_f,
            roles,
        }
    }

    /// `ln(h^a r^b)` in double precision with a rigorous-margin error bound.
    pub fn ln_value(&self, h: u64, r: u64) -> (f64, f64) {
        let lh = (h as f64).ln();
        let lr = (r as f64).ln();
        let v = self.a_f * lh + self.b_f * lr;
        let err = self.a_err * lh + self.b_err * lr + (self.a_f * lh).abs() * F64_REL
            + (self.b_f * lr).abs() * F64_REL
            + v.abs() * F64_REL;
        (v, 4.0 * err + 1e-300)
    }

    /// `h^a r^b` exactly, when it is rational.
    pub fn exact(&self, h: u64, r: u64) -> Option<Rational> {
        let fh = self.roles.a.exact_power_of(&Rational::from(h))?;
        let fr = self.roles.b.exact_power_of(&Rational::from(r))?;
        Some(fh * fr)
    }

    pub fn ball(&self, h: u64, r: u64, bits: u32) -> RealBall {
        if let Some(q) = self.exact(h, r) {
            return RealBall::from_rational(&q, bits);
        }
        let fh = if h == 1 {
            RealBall::one(bits)
        } else {
            self.roles.a.pow_of(&RealBall::from_u64(h, bits))
        };
        let fr = if r == 1 {
            RealBall::one(bits)
        } else {
            self.roles.b.pow_of(&RealBall::from_u64(r, bits))
        };
        fh.mul_ball(&fr)
    }

    /// Certified `h^a r^b` versus `x`.
    pub fn cmp_to(&self, h: u64, r: u64, x: &Rational, ln_x: f64, ctx: &PrecisionContext) -> Result<Ordering> {
        let (v, err) = self.ln_value(h, r);
        let tol = err + ln_x.abs() * F64_REL + 1e-15;
        if v - ln_x > tol {
            return Ok(Ordering::Greater);
        }
        if ln_x - v > tol {
            return Ok(Ordering::Less);
        }
        if let Some(q) = self.exact(h, r) {
            return Ok(q.cmp(x));
        }
        let mut last = ctx.bits;
        for bits in ctx.ladder() {
            last = bits;
            if let Some(o) = self.ball(h, r, bits).cmp_rational(x) {
                return Ok(o);
            }
        }
        Err(Error::AmbiguousBoundary { bits: last })
    }

    /// Certified order of two lattice values.
    pub fn cmp_pair(&self, p: (u64, u64), q: (u64, u64), ctx: &PrecisionContext) -> Result<Ordering> {
        if p == q {
            return Ok(Ordering::Equal);
        }
        let (v1, e1) = self.ln_value(p.0, p.1);
        let (v2, e2) = self.ln_value(q.0, q.1);
        if v1 - v2 > e1 + e2 {
            return Ok(Ordering::Greater);
        }
        if v2 - v1 > e1 + e2 {
            return Ok(Ordering::Less);
        }
        if let (Some(x), Some(y)) = (self.exact(p.0, p.1), self.exact(q.0, q.1)) {
            return Ok(x.cmp(&y));
        }
        let mut last = ctx.bits;
        for bits in ctx.ladder() {
            last = bits;
            if let Some(o) = self.ball(p.0, p.1, bits).cmp_ball(&self.ball(q.0, q.1, bits)) {
                return Ok(o);
            }
        }
        Err(Error::AmbiguousOrder { bits: last })
    }
}

/// `#{(h, r) >= 1 : h^a r^b <= x}` by a direct double loop.
pub fn count_naive(pair: &ExponentPair, x: &Rational, ctx: &PrecisionContext) -> Result<Integer> {
    require_x(x)?;
    if *x > NAIVE_MAX_X {
        return Err(Error::guard("count_naive_x", format!("x = {x} exceeds {NAIVE_MAX_X}")));
    }
    if let Some((a, b)) = pair.integer_exponents() {
        let n = floor_u64(x)?;
        let mut count: u64 = 0;
        let mut r: u64 = 1;
        while let Some(rb) = r.checked_pow(b).filter(|&rb| rb <= n) {
            let lim = n / rb;
            let mut h: u64 = 1;
            while h.checked_pow(a).is_some_and(|ha| ha <= lim) {
                count += 1;
                h += 1;
            }
            r += 1;
        }
        return Ok(Integer::from(count));
    }
    let lv = LatticeValues::new(pair.roles(Roles::Ab));
    let ln_x = x.to_f64().ln();
    let mut count: u64 = 0;
    let mut r: u64 = 1;
    while lv.cmp_to(1, r, x, ln_x, ctx)? != Ordering::Greater {
        let mut h: u64 = 1;
        while lv.cmp_to(h, r, x, ln_x, ctx)? != Ordering::Greater {
            count += 1;
            h += 1;
        }
        r += 1;
    }
    Ok(Integer::from(count))
}

pub(crate) fn boundary_error(e: Error) -> Error {
    match e {
        Error::AmbiguousFloor { bits } => Error::AmbiguousBoundary { bits },
        other => other,
    }
}

/// Certified decomposition of `(x / m^b)^{1/a}` for the given roles.
pub(crate) fn split_term(
    roles: &RoleExponents,
    inv_a: &Exponent,
    x: &Rational,
    m: u64,
    ctx: &PrecisionContext,
) -> Result<FracDecomposition> {
    let exact = roles
        .b
        .exact_power_of(&Rational::from(m))
        .and_then(|mb| inv_a.exact_power_of(&(x / mb)));
    let t = Lazy::with_exact(
        |bits: u32| {
            let mb = roles.b.pow_of(&RealBall::from_u64(m, bits + 16));
            let y = RealBall::from_rational(x, bits + 16).div_ball(&mb);
            inv_a.pow_of(&y)
        },
        exact,
    );
    frac_decompose(&t, ctx)
}

/// `floor(x^{1/(a+b)})`, certified.
pub(crate) fn balance_point(pair: &ExponentPair, x: &Rational, ctx: &PrecisionContext) -> Result<u64> {
    if let Some((a, b)) = pair.integer_exponents() {
        return Ok(kth_root_u64(floor_u64(x)?, a + b));
    }
    let theta = pair.theta();
    let t = Lazy::with_exact(
        |bits: u32| theta.pow_of(&RealBall::from_rational(x, bits + 16)),
        theta.exact_power_of(x),
    );
    let d = frac_decompose(&t, ctx).map_err(boundary_error)?;
    d.floor_part
        .to_u64()
        .ok_or_else(|| Error::guard("u64_range", "balance point exceeds 2^64"))
}

/// `D(x)` by the hyperbola method split at `x^{1/(a+b)}`.
pub fn count_hyperbola(pair: &ExponentPair, x: &Rational, ctx: &PrecisionContext) -> Result<Integer> {
    require_x(x)?;
    let s = balance_point(pair, x, ctx)?;
    if let Some((a, b)) = pair.integer_exponents() {
        let n = floor_u64(x)?;
        let mut total: u128 = 0;
        for r in 1..=s {
            let rb = pow_u128(r, b).expect("r^b <= n");
            total += kth_root_u64((n as u128 / rb) as u64, a) as u128;
        }
        for h in 1..=s {
            let ha = pow_u128(h, a).expect("h^a <= n");
            total += kth_root_u64((n as u128 / ha) as u64, b) as u128;
        }
        return Ok(Integer::from(total) - Integer::from(s) * s);
    }
    let mut total = Integer::new();
    for roles in [Roles::Ab, Roles::Ba] {
        let re = pair.roles(roles);
        let inv_a = re.a.recip()?;
        for m in 1..=s {
            let d = split_term(&re, &inv_a, x, m, ctx).map_err(boundary_error)?;
            total += d.floor_part;
        }
    }
    Ok(total - Integer::from(s) * s)
}

/// `Δ(x) = D(x) − ζ(b/a)x^{1/a} − ζ(a/b)x^{1/b}`.
pub fn delta_eval(pair: &ExponentPair, x: &Rational, ctx: &PrecisionContext) -> Result<CountResult> {
    let main = MainTerm::new(pair, ctx)?;
    delta_eval_with(&main, pair, x, ctx)
}

/// [`delta_eval`] with a precomputed main term.
pub fn delta_eval_with(main: &MainTerm, pair: &ExponentPair, x: &Rational, ctx: &PrecisionContext) -> Result<CountResult> {
    let d = count_hyperbola(pair, x, ctx)?;
    let m = main.eval(&RealBall::from_rational(x, main.bits + 16));
    let delta = RealBall::from_integer(&d, main.bits + 16).sub_ball(&m);
    Ok(CountResult {
        x: x.clone(),
        d,
        main: m,
        delta,
    })
}

/// `d[n] = #{(h, r) : h^a r^b = n}` for `0 <= n <= X` (`d[0] = 0`).
pub fn sieve_d(pair: &ExponentPair, x_max: u64) -> Result<Vec<u32>> {
    let (a, b) = pair.integer_exponents().ok_or_else(|| {
        Error::InvalidArgument("the multiplicity sieve needs an integer pair".into())
    })?;
    if x_max > SIEVE_MAX {
        return Err(Error::guard("sieve_memory", format!("X = {x_max} exceeds {SIEVE_MAX}")));
    }
    let mut d = vec![0u32; x_max as usize + 1];
    let n = x_max as u128;
    let mut h = 1u64;
    while let Some(ha) = pow_u128(h, a).filter(|&v| v <= n) {
        let mut r = 1u64;
        while let Some(v) = pow_u128(r, b).and_then(|rb| rb.checked_mul(ha)).filter(|&v| v <= n) {
            d[v as usize] += 1;
            r += 1;
        }
        h += 1;
    }
    Ok(d)
}

/// Abscissa of a jump of `D`.
#[derive(Clone, Debug)]
pub enum JumpPoint {
    /// Integer pairs jump only at integers.
    Exact(u64),
    /// Irrational pairs: the value `h^a r^b` as a ball.
    Ball { value: RealBall, h: u64, r: u64 },
}

impl JumpPoint {
    pub fn to_ball(&self, bits: u32) -> RealBall {
        match self {
            JumpPoint::Exact(n) => RealBall::from_u64(*n, bits),
            JumpPoint::Ball { value, .. } => value.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            JumpPoint::Exact(n) => *n as f64,
            JumpPoint::Ball { value, .. } => value.to_f64(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Jump {
    pub u: JumpPoint,
    pub multiplicity: u32,
}

/// All jumps of `D` in `(T, T + T0]`, increasing.
#[derive(Clone, Debug)]
pub struct JumpStream {
    pub t: Rational,
    pub t0: Rational,
    pub jumps: Vec<Jump>,
}

impl JumpStream {
    pub fn total_multiplicity(&self) -> u64 {
        self.jumps.iter().map(|j| j.multiplicity as u64).sum()
    }
}

/// Jumps of `D` in `(T, T + T0]` with multiplicities.
pub fn jumps_in_window(pair: &ExponentPair, t: &Rational, t0: &Rational, ctx: &PrecisionContext) -> Result<JumpStream> {
    require_x(t)?;
    if t0.cmp0() != Ordering::Greater || t0 > t {
        return Err(Error::InvalidArgument(format!("need 0 < T0 <= T, got T = {t}, T0 = {t0}")));
    }
    let hi = Rational::from(t + t0);
    let jumps = collect_jumps(pair, t, &hi, ctx)?;
    Ok(JumpStream {
        t: t.clone(),
        t0: t0.clone(),
        jumps,
    })
}

/// Jumps in `(lo, hi]` for any `1 <= lo < hi`.
pub(crate) fn collect_jumps(pair: &ExponentPair, lo: &Rational, hi: &Rational, ctx: &PrecisionContext) -> Result<Vec<Jump>> {
    if let Some((a, b)) = pair.integer_exponents() {
        let l = floor_u64(lo)?;
        let h_top = floor_u64(hi)?;
        if h_top - l > JUMP_MAX {
            return Err(Error::guard("jump_window", format!("window holds more than {JUMP_MAX} integers")));
        }
        let mut counts = vec![0u32; (h_top - l) as usize];
        let mut r = 1u64;
        while let Some(rb) = pow_u128(r, b).filter(|&v| v <= h_top as u128) {
            let h_lo = kth_root_u64((l as u128 / rb) as u64, a) + 1;
            let h_hi = kth_root_u64((h_top as u128 / rb) as u64, a);
            for h in h_lo..=h_hi {
                let v = pow_u128(h, a).expect("h^a <= hi") * rb;
                counts[(v - l as u128 - 1) as usize] += 1;
            }
            r += 1;
        }
        return Ok(counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| Jump {
                u: JumpPoint::Exact(l + 1 + i as u64),
                multiplicity: c,
            })
            .collect());
    }
    let lv = LatticeValues::new(pair.roles(Roles::Ab));
    let ln_lo = lo.to_f64().ln();
    let ln_hi = hi.to_f64().ln();
    let a_f = lv.roles.a.to_f64();
    let b_f = lv.roles.b.to_f64();
    let r_max = (hi.to_f64().ln() / b_f).exp().floor() as u64 + 1;
    let rows: Vec<Result<Vec<(u64, u64)>>> = (1..=r_max)
        .into_par_iter()
        .map(|r| {
            let mut row = Vec::new();
            if lv.cmp_to(1, r, hi, ln_hi, ctx)? == Ordering::Greater {
                return Ok(row);
            }
            let rb_ln = b_f * (r as f64).ln();
            let est_lo = ((ln_lo - rb_ln) / a_f).exp();
            let mut h = (est_lo.floor() as u64).saturating_sub(1).max(1);
            while h > 1 && lv.cmp_to(h, r, lo, ln_lo, ctx)? == Ordering::Greater {
                h -= 1;
            }
            loop {
                if lv.cmp_to(h, r, hi, ln_hi, ctx)? == Ordering::Greater {
                    break;
                }
                if lv.cmp_to(h, r, lo, ln_lo, ctx)? == Ordering::Greater {
                    row.push((h, r));
                }
                h += 1;
            }
            Ok(row)
        })
        .collect();
    let mut pts: Vec<(u64, u64)> = Vec::new();
    for row in rows {
        pts.extend(row?);
        if pts.len() as u64 > JUMP_MAX {
            return Err(Error::guard("jump_window", format!("more than {JUMP_MAX} jumps")));
        }
    }
    let mut keyed: Vec<(f64, u64, u64)> = pts.iter().map(|&(h, r)| (lv.ln_value(h, r).0, h, r)).collect();
    keyed.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    // certify the order of neighbours whose double-precision keys are close
    let mut i = 1;
    while i < keyed.len() {
        let p = (keyed[i - 1].1, keyed[i - 1].2);
        let q = (keyed[i].1, keyed[i].2);
        match lv.cmp_pair(p, q, ctx)? {
            Ordering::Less => i += 1,
            Ordering::Greater => {
                keyed.swap(i - 1, i);
                i = i.saturating_sub(1).max(1);
            }
            Ordering::Equal => {
                return Err(Error::AmbiguousOrder { bits: ctx.max_bits });
            }
        }
    }
    let bits = ctx.bits;
    Ok(keyed
        .par_iter()
        .map(|&(_, h, r)| Jump {
            u: JumpPoint::Ball {
                value: lv.ball(h, r, bits + 16),
                h,
                r,
            },
            multiplicity: 1,
        })
        .collect())
}

/// `f(a,b;x) = −Σ_{m <= x^{1/(a+b)}} ψ(x^{1/a} / m^{b/a})`, or the `(b,a)` variant.
pub fn psi_sum_f(roles: Roles, pair: &ExponentPair, x: &Rational, ctx: &PrecisionContext) -> Result<RealBall> {
    require_x(x)?;
    let s = balance_point(pair, x, ctx)?;
    let re = pair.roles(roles);
    let inv_a = re.a.recip()?;
    let mut acc = RealBall::zero(ctx.bits + 16);
    for m in 1..=s {
        let d = split_term(&re, &inv_a, x, m, ctx)?;
        acc = acc.sub_ball(&d.psi);
    }
    Ok(acc)
}

/// Sample points in `[lo, hi)` kept away from the jumps of `D`.
///
/// Integer pairs use `n + 1/2`; irrational pairs take the midpoint between
/// the two jumps that enclose a uniform draw.
pub fn jump_avoiding_points(
    pair: &ExponentPair,
    lo: &Rational,
    hi: &Rational,
    count: usize,
    seed: u64,
    ctx: &PrecisionContext,
) -> Result<Vec<Rational>> {
    require_x(lo)?;
    let mut rng = sampling::stream(seed, 0x6a75_6d70);
    let mut out = Vec::with_capacity(count);
    if pair.kind() == PairKind::IntegerCoprime {
        let l = floor_u64(lo)?;
        let h = floor_u64(hi)?.max(l + 1);
        for _ in 0..count {
            let n = sampling::uniform_u64(&mut rng, l, h);
            out.push(Rational::from(n) + Rational::from((1, 2)));
        }
        return Ok(out);
    }
    for _ in 0..count {
        let y = sampling::uniform_rational(&mut rng, lo, hi);
        let mut w = Rational::from((1, 4));
        loop {
            let left = Rational::from(&y - &w).max(Rational::from(1));
            let right = Rational::from(&y + &w);
            let jumps = collect_jumps(pair, &left, &right, ctx)?;
            let below = jumps.iter().rposition(|j| {
                matches!(&j.u, JumpPoint::Ball { value, .. } if value.cmp_rational(&y) != Some(Ordering::Greater))
            });
            let (l_mid, r_mid) = match below {
                Some(i) if i + 1 < jumps.len() => (jumps[i].u.to_ball(ctx.bits), jumps[i + 1].u.to_ball(ctx.bits)),
                None if left == 1 && !jumps.is_empty() => (RealBall::one(ctx.bits), jumps[0].u.to_ball(ctx.bits)),
                _ => {
                    w *= 2;
                    continue;
                }
            };
            let mid = l_mid.add_ball(&r_mid).mul_2si(-1);
            let q = mid.mid().to_rational().expect("finite midpoint");
            out.push(q);
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    #[test]
    fn small_counts() {
        let p = ExponentPair::integer(1, 2).unwrap();
        assert_eq!(count_naive(&p, &q(10), &ctx()).unwrap(), 13);
        assert_eq!(count_naive(&p, &q(1), &ctx()).unwrap(), 1);
        assert_eq!(count_naive(&p, &q(100), &ctx()).unwrap(), 153);
        assert_eq!(count_hyperbola(&p, &q(100), &ctx()).unwrap(), 153);
        assert_eq!(count_hyperbola(&p, &q(1), &ctx()).unwrap(), 1);
        let p23 = ExponentPair::integer(2, 3).unwrap();
        let x = q(100_000);
        assert_eq!(count_hyperbola(&p23, &x, &ctx()).unwrap(), count_naive(&p23, &x, &ctx()).unwrap());
    }

    #[test]
    fn sieve_small() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let d = sieve_d(&p, 16).unwrap();
        assert_eq!(d[16], 3);
        assert_eq!(d[1], 1);
        let total: u64 = d.iter().map(|&v| v as u64).sum();
        assert_eq!(Integer::from(total), count_naive(&p, &q(16), &ctx()).unwrap());
    }

    #[test]
    fn jumps_small_window() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let s = jumps_in_window(&p, &q(8), &q(4), &ctx()).unwrap();
        let got: Vec<(u64, u32)> = s
            .jumps
            .iter()
            .map(|j| match j.u {
                JumpPoint::Exact(n) => (n, j.multiplicity),
                _ => unreachable!(),
            })
            .collect();
        // 9 = 9·1² = 1·3² and 12 = 12·1² = 3·2²
        assert_eq!(got, vec![(9, 2), (10, 1), (11, 1), (12, 2)]);
        let diff = count_naive(&p, &q(12), &ctx()).unwrap() - count_naive(&p, &q(8), &ctx()).unwrap();
        assert_eq!(Integer::from(s.total_multiplicity()), diff);
        let e = jumps_in_window(&p, &q(1), &Rational::from((1, 2)), &ctx()).unwrap();
        assert!(e.jumps.is_empty());
    }

    #[test]
    fn delta_at_one_hundred() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let r = delta_eval(&p, &q(100), &ctx()).unwrap();
        assert_eq!(r.d, 153);
        assert!((r.delta.to_f64() - 3.1101).abs() < 1e-3);
        let r1 = delta_eval(&p, &q(1), &ctx()).unwrap();
        assert!((r1.delta.to_f64() - 0.8154).abs() < 1e-3);
    }

    #[test]
    fn psi_sum_at_one() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let f = psi_sum_f(Roles::Ab, &p, &q(1), &ctx()).unwrap();
        assert!(f.contains_f64(0.5) && f.is_exact());
    }

    #[test]
    fn irrational_pair_counts_agree() {
        let p = ExponentPair::parse("1", "sqrt(2)", &ctx()).unwrap();
        for x in [1i64, 2, 10, 57, 1000] {
            let x = q(x);
            assert_eq!(count_hyperbola(&p, &x, &ctx()).unwrap(), count_naive(&p, &x, &ctx()).unwrap());
        }
        let s = jumps_in_window(&p, &q(10), &q(1), &ctx()).unwrap();
        let diff = count_naive(&p, &q(11), &ctx()).unwrap() - count_naive(&p, &q(10), &ctx()).unwrap();
        assert_eq!(Integer::from(s.total_multiplicity()), diff);
    }
}
