//! Coincidence quadruples `h1^a r1^b = h2^a r2^b`, truncations of `G_{a,b}`
//! and of its tail `Σ₁`, and the closed form of `G_{a,b}`.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::{
    pow_u128, zeta_real, Exponent, ExponentPair, PrecisionContext, RealBall, RoleExponents, Roles,
};

/// Largest box accepted by the brute-force enumerator.
pub const BRUTE_MAX_BOX: u64 = 500;
/// Largest box accepted by the parametrized enumerator and the partial sums.
pub const PARAM_MAX_BOX: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumMode {
    Brute,
    Parametrized,
}

/// `h1 = g t^b, h2 = g s^b, r1 = m s^a, r2 = m t^a` with `gcd(s, t) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuadParam {
    pub g: u64,
    pub m: u64,
    pub s: u64,
    pub t: u64,
}

#[derive(Clone, Debug)]
pub struct CoincidenceQuad {
    pub h1: u64,
    pub r1: u64,
    pub h2: u64,
    pub r2: u64,
    pub weight: RealBall,
    pub param: Option<QuadParam>,
}

impl CoincidenceQuad {
    pub fn tuple(&self) -> (u64, u64, u64, u64) {
        (self.h1, self.r1, self.h2, self.r2)
    }

    pub fn is_diagonal(&self) -> bool {
        self.h1 == self.h2 && self.r1 == self.r2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GabRoute {
    ClosedForm,
    PartialSum,
}

impl GabRoute {
    pub fn as_str(self) -> &'static str {
        match self {
            GabRoute::ClosedForm => "closed_form",
            GabRoute::PartialSum => "partial_sum",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GabResult {
    pub value: RealBall,
    pub route: GabRoute,
    pub r#box: Option<u64>,
    /// Empirical `c·box^{-a/(2(a+b))}·log²(2·box)`; not a rigorous bound.
    pub tail_bound: Option<RealBall>,
    /// Set once a [`GabValidation`] for the pair has passed.
    pub validated: bool,
    /// Off-diagonal terms were dropped because `a/b` is irrational.
    pub diagonal_only: bool,
}

fn weight(re: &RoleExponents, h1: u64, r1: u64, h2: u64, r2: u64, bits: u32) -> RealBall {
    let hh = RealBall::from_integer(&(Integer::from(h1) * h2), bits);
    let rr = RealBall::from_integer(&(Integer::from(r1) * r2), bits);
    let neg = Rational::from(-1);
    let eh = re.e_h.scale(&neg).expect("finite exponent");
    let er = re.e_r.scale(&neg).expect("finite exponent");
    eh.pow_of(&hh).mul_ball(&er.pow_of(&rr))
}

fn check_box(r#box: u64, limit: u64) -> Result<()> {
    if r#box == 0 {
        return Err(Error::InvalidArgument("box must be >= 1".into()));
    }
    if r#box > limit {
        return Err(Error::BoxTooLarge { size: r#box, limit });
    }
    Ok(())
}

fn diagonal(re: &RoleExponents, r#box: u64, bits: u32) -> Vec<CoincidenceQuad> {
    (1..=r#box)
        .into_par_iter()
        .flat_map_iter(|h| {
            (1..=r#box).map(move |r| CoincidenceQuad {
                h1: h,
                r1: r,
                h2: h,
                r2: r,
                weight: weight(re, h, r, h, r, bits),
                param: None,
            })
        })
        .collect()
}

fn brute(a: u32, b: u32, re: &RoleExponents, r#box: u64, bits: u32) -> Vec<CoincidenceQuad> {
    let mut values: Vec<(Integer, u64, u64)> = (1..=r#box)
        .into_par_iter()
        .flat_map_iter(|h| {
            let ha = Integer::from(Integer::u_pow_u(h as u32, a));
            (1..=r#box).map(move |r| ((&ha * Integer::from(Integer::u_pow_u(r as u32, b))), h, r))
        })
        .collect();
    values.par_sort();
    let mut out = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let mut j = i + 1;
        while j < values.len() && values[j].0 == values[i].0 {
            j += 1;
        }
        for p in &values[i..j] {
            for q in &values[i..j] {
                out.push((p.1, p.2, q.1, q.2));
            }
        }
        i = j;
    }
    out.sort_unstable();
    out.into_par_iter()
        .map(|(h1, r1, h2, r2)| CoincidenceQuad {
            h1,
            r1,
            h2,
            r2,
            weight: weight(re, h1, r1, h2, r2, bits),
            param: None,
        })
        .collect()
}

/// Largest `M` with `M^a <= box` and `M^b <= box`.
fn max_base(a: u32, b: u32, r#box: u64) -> u64 {
    let k = a.max(b);
    crate::precision::kth_root_u64(r#box, k)
}

fn coprime_pairs(limit: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for s in 1..=limit {
        for t in 1..=limit {
            if gcd(s, t) == 1 {
                out.push((s, t));
            }
        }
    }
    out
}

fn pw(x: u64, e: u32) -> u128 {
    pow_u128(x, e).unwrap_or(u128::MAX)
}

fn gcd(mut x: u64, mut y: u64) -> u64 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

fn parametrized(a: u32, b: u32, re: &RoleExponents, r#box: u64, bits: u32) -> Vec<CoincidenceQuad> {
    let pairs = coprime_pairs(max_base(a, b, r#box));
    let mut raw: Vec<(u64, u64, u64, u64, QuadParam)> = pairs
        .par_iter()
        .flat_map_iter(|&(s, t)| {
            let big = s.max(t);
            let g_max = (r#box as u128 / pw(big, b)) as u64;
            let m_max = (r#box as u128 / pw(big, a)) as u64;
            let (sb, tb) = (pw(s, b) as u64, pw(t, b) as u64);
            let (sa, ta) = (pw(s, a) as u64, pw(t, a) as u64);
            (1..=g_max).flat_map(move |g| {
                (1..=m_max).map(move |m| (g * tb, m * sa, g * sb, m * ta, QuadParam { g, m, s, t }))
            })
        })
        .collect();
    raw.par_sort_unstable();
    raw.into_par_iter()
        .map(|(h1, r1, h2, r2, p)| CoincidenceQuad {
            h1,
            r1,
            h2,
            r2,
            weight: weight(re, h1, r1, h2, r2, bits),
            param: Some(p),
        })
        .collect()
}

/// All quadruples with every coordinate at most `box`, sorted by tuple.
///
/// Pairs with `a/b` irrational only have diagonal coincidences, so both modes
/// return the diagonal for them.
pub fn quads_enumerate(pair: &ExponentPair, r#box: u64, mode: EnumMode, ctx: &PrecisionContext) -> Result<Vec<CoincidenceQuad>> {
    quads_enumerate_roles(Roles::Ab, pair, r#box, mode, ctx)
}

pub fn quads_enumerate_roles(
    roles: Roles,
    pair: &ExponentPair,
    r#box: u64,
    mode: EnumMode,
    ctx: &PrecisionContext,
) -> Result<Vec<CoincidenceQuad>> {
    let limit = match mode {
        EnumMode::Brute => BRUTE_MAX_BOX,
        EnumMode::Parametrized => PARAM_MAX_BOX,
    };
    check_box(r#box, limit)?;
    if mode == EnumMode::Parametrized && r#box > 10_000 {
        return Err(Error::guard("quad_list", format!("box {box} would materialise too many quadruples")));
    }
    let re = pair.roles(roles);
    let bits = ctx.bits;
    Ok(match (re.ints, mode) {
        (None, _) => diagonal(&re, r#box, bits),
        (Some((a, b)), EnumMode::Brute) => brute(a, b, &re, r#box, bits),
        (Some((a, b)), EnumMode::Parametrized) => parametrized(a, b, &re, r#box, bits),
    })
}

/// Prefix sums `P(n) = Σ_{k<=n} k^{-σ}` for `n <= len`.
fn prefix(sigma: &Exponent, len: u64, bits: u32) -> Vec<RealBall> {
    let neg = sigma.scale(&Rational::from(-1)).expect("finite exponent");
    let terms: Vec<RealBall> = (1..=len)
        .into_par_iter()
        .map(|k| neg.pow_of(&RealBall::from_u64(k, bits)))
        .collect();
    let mut out = Vec::with_capacity(len as usize + 1);
    let mut acc = RealBall::zero(bits + 32);
    out.push(acc.clone());
    for t in terms {
        acc = acc.add_ball(&t);
        out.push(acc.clone());
    }
    out
}

struct Factored {
    p1: Vec<RealBall>,
    p2: Vec<RealBall>,
    /// `(s, t, (st)^{-κ})` for coprime pairs within the largest box.
    pairs: Vec<(u64, u64, RealBall)>,
    ints: Option<(u32, u32)>,
}

impl Factored {
    fn new(re: &RoleExponents, kappa: &Exponent, r#box: u64, bits: u32) -> Self {
        let two = Rational::from(2);
        let p1 = prefix(&re.e_h.scale(&two).expect("finite"), r#box, bits);
        let p2 = prefix(&re.e_r.scale(&two).expect("finite"), r#box, bits);
        let neg_k = kappa.scale(&Rational::from(-1)).expect("finite");
        let pairs = match re.ints {
            Some((a, b)) => coprime_pairs(max_base(a, b, r#box))
                .into_par_iter()
                .map(|(s, t)| {
                    let st = RealBall::from_integer(&(Integer::from(s) * t), bits);
                    (s, t, neg_k.pow_of(&st))
                })
                .collect(),
            None => vec![(1, 1, RealBall::one(bits))],
        };
        Factored { p1, p2, pairs, ints: re.ints }
    }

    /// Σ over quadruples within `box` with `h1 > h_min`.
    fn sum(&self, r#box: u64, h_min: u64) -> RealBall {
        let mut acc = RealBall::zero(self.p1[0].prec());
        for (s, t, w) in &self.pairs {
            let (a, b) = self.ints.unwrap_or((1, 1));
            let big = (*s).max(*t);
            let mb = pw(big, b);
            let ma = pw(big, a);
            if mb > r#box as u128 || ma > r#box as u128 {
                continue;
            }
            let g_max = (r#box as u128 / mb) as usize;
            let m_max = (r#box as u128 / ma) as usize;
            // h1 = g t^b > h_min
            let g_min = (h_min as u128 / pw(*t, b)).min(g_max as u128) as usize;
            if g_min >= g_max {
                continue;
            }
            let gs = self.p1[g_max].sub_ball(&self.p1[g_min]);
            acc = acc.add_ball(&w.mul_ball(&gs).mul_ball(&self.p2[m_max]));
        }
        acc
    }
}

fn tail_shape(pair: &ExponentPair, r#box: u64, bits: u32) -> RealBall {
    let b = RealBall::from_u64(r#box, bits);
    let e = pair
        .a()
        .div(&pair.sum().scale(&Rational::from(-2)).expect("finite"))
        .expect("nonzero");
    let l = RealBall::from_u64(2 * r#box, bits).ln();
    e.pow_of(&b).mul_ball(&l.sqr())
}

/// Truncation of `G_{a,b}` to quadruples with all coordinates at most `box`.
///
/// `tail_bound` is `c·box^{-a/(2(a+b))}·log²(2·box)` with `c` fitted so the
/// shape reproduces the increment from `box/10` to `box`.
pub fn gab_partial(pair: &ExponentPair, r#box: u64, ctx: &PrecisionContext) -> Result<GabResult> {
    check_box(r#box, PARAM_MAX_BOX)?;
    let re = pair.roles(Roles::Ab);
    let f = Factored::new(&re, pair.kappa(), r#box, ctx.bits);
    let value = f.sum(r#box, 0);
    let tail_bound = (r#box >= 10).then(|| {
        let prev = f.sum(r#box / 10, 0);
        let c = value.sub_ball(&prev).div_ball(&tail_shape(pair, r#box, ctx.bits));
        c.mul_ball(&tail_shape(pair, r#box, ctx.bits))
    });
    Ok(GabResult {
        value,
        route: GabRoute::PartialSum,
        r#box: Some(r#box),
        tail_bound,
        validated: false,
        diagonal_only: re.ints.is_none(),
    })
}

/// `Σ₁(H)` restricted to coordinates at most `box`: the quadruples with
/// `h1 > H`. With [`Roles::Ba`] the roles of `(a, h)` and `(b, r)` swap.
pub fn sigma1_partial(roles: Roles, pair: &ExponentPair, h: u64, r#box: u64, ctx: &PrecisionContext) -> Result<RealBall> {
    check_box(r#box, PARAM_MAX_BOX)?;
    if h == 0 || r#box < h {
        return Err(Error::InvalidArgument(format!("need 1 <= H <= box, got H={h}, box={box}")));
    }
    let re = pair.roles(roles);
    let f = Factored::new(&re, pair.kappa(), r#box, ctx.bits);
    Ok(f.sum(r#box, h))
}

/// `ζ(σ₁)ζ(σ₂)ζ(κ)²/ζ(2κ)` for integer pairs and `ζ(σ₁)ζ(σ₂)` otherwise.
///
/// The result is unvalidated until passed through [`GabValidation::certify`].
pub fn gab_closed_form(pair: &ExponentPair, ctx: &PrecisionContext) -> Result<GabResult> {
    let w = ctx.bits + 16;
    let inner = ctx.at_bits(w);
    let z = |e: &Exponent| zeta_real(&e.to_ball(w + 16), &inner);
    let mut value = z(&pair.sigma1())?.mul_ball(&z(&pair.sigma2())?);
    let diagonal_only = pair.integer_exponents().is_none();
    if !diagonal_only {
        let k = z(pair.kappa())?;
        let k2 = z(&pair.kappa().scale(&Rational::from(2))?)?;
        value = value.mul_ball(&k.sqr()).div_ball(&k2);
    }
    Ok(GabResult {
        value: value.with_prec(ctx.bits),
        route: GabRoute::ClosedForm,
        r#box: None,
        tail_bound: None,
        validated: false,
        diagonal_only,
    })
}

/// Boxes used to validate the closed form against the partial sums.
pub const VALIDATION_BOXES: [u64; 3] = [100, 1_000, 10_000];
/// Enumerations are compared for every box up to this size.
pub const VALIDATION_ENUM_BOX: u64 = 60;

/// Evidence that the closed form agrees with the truncated series.
#[derive(Clone, Debug)]
pub struct GabValidation {
    pub label: String,
    pub closed_form: RealBall,
    /// `(box, partial, |closed − partial|, fitted tail)`
    pub rows: Vec<(u64, RealBall, RealBall, RealBall)>,
    pub enumeration_box: u64,
    pub enumeration_agrees: bool,
    pub partial_below_closed: bool,
    pub residual_decreasing: bool,
    pub within_tail: bool,
}

impl GabValidation {
    pub fn passed(&self) -> bool {
        self.enumeration_agrees && self.partial_below_closed && self.residual_decreasing && self.within_tail
    }

    /// Mark `result` as validated, or refuse with `GabNotValidated`.
    pub fn certify(&self, mut result: GabResult) -> Result<GabResult> {
        if !self.passed() {
            return Err(Error::GabNotValidated);
        }
        result.validated = true;
        Ok(result)
    }
}

/// Compare brute and parametrized enumeration for every box up to
/// `VALIDATION_ENUM_BOX`, then the closed form against `VALIDATION_BOXES`.
pub fn validate_gab(pair: &ExponentPair, ctx: &PrecisionContext) -> Result<GabValidation> {
    let enumeration_agrees = if pair.integer_exponents().is_some() {
        let all_b = quads_enumerate(pair, VALIDATION_ENUM_BOX, EnumMode::Brute, ctx)?;
        let all_p = quads_enumerate(pair, VALIDATION_ENUM_BOX, EnumMode::Parametrized, ctx)?;
        (1..=VALIDATION_ENUM_BOX).all(|bx| {
            let within = |q: &&CoincidenceQuad| q.h1.max(q.h2).max(q.r1).max(q.r2) <= bx;
            let lhs: Vec<_> = all_b.iter().filter(within).map(CoincidenceQuad::tuple).collect();
            let rhs: Vec<_> = all_p.iter().filter(within).map(CoincidenceQuad::tuple).collect();
            lhs == rhs
        })
    } else {
        true
    };
    let closed = gab_closed_form(pair, ctx)?.value;
    let mut rows = Vec::new();
    for &bx in &VALIDATION_BOXES {
        let p = gab_partial(pair, bx, ctx)?;
        let resid = closed.sub_ball(&p.value).abs();
        rows.push((bx, p.value, resid, p.tail_bound.expect("box >= 10")));
    }
    let partial_below_closed = rows
        .iter()
        .all(|(_, p, _, _)| p.cmp_ball(&closed) == Some(Ordering::Less));
    let residual_decreasing = rows
        .windows(2)
        .all(|w| w[1].2.cmp_ball(&w[0].2) == Some(Ordering::Less));
    let last = rows.last().expect("nonempty");
    let within_tail = last.2.cmp_ball(&last.3.mul_i64(2)) == Some(Ordering::Less);
    Ok(GabValidation {
        label: pair.label(),
        closed_form: closed,
        rows,
        enumeration_box: VALIDATION_ENUM_BOX,
        enumeration_agrees,
        partial_below_closed,
        residual_decreasing,
        within_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn off_diagonal(pair: &ExponentPair, bx: u64, mode: EnumMode) -> Vec<(u64, u64, u64, u64)> {
        quads_enumerate(pair, bx, mode, &ctx())
            .unwrap()
            .iter()
            .filter(|q| !q.is_diagonal())
            .map(CoincidenceQuad::tuple)
            .collect()
    }

    #[test]
    fn box_four_list() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let want = vec![(1, 2, 4, 1), (1, 4, 4, 2), (4, 1, 1, 2), (4, 2, 1, 4)];
        assert_eq!(off_diagonal(&p, 4, EnumMode::Brute), want);
        assert_eq!(off_diagonal(&p, 4, EnumMode::Parametrized), want);
        let one = quads_enumerate(&p, 1, EnumMode::Brute, &ctx()).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].weight.contains_f64(1.0));
    }

    #[test]
    fn param_example() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let q = quads_enumerate(&p, 4, EnumMode::Parametrized, &ctx()).unwrap();
        let hit = q.iter().find(|q| q.tuple() == (4, 1, 1, 2)).unwrap();
        assert_eq!(hit.param, Some(QuadParam { g: 1, m: 1, s: 1, t: 2 }));
    }

    #[test]
    fn brute_guard() {
        let p = ExponentPair::integer(1, 2).unwrap();
        assert!(matches!(
            quads_enumerate(&p, 501, EnumMode::Brute, &ctx()),
            Err(Error::BoxTooLarge { .. })
        ));
    }

    #[test]
    fn partial_box_four() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let g = gab_partial(&p, 4, &ctx()).unwrap();
        let h: f64 = (1..=4).map(|h| (h as f64).powf(-5.0 / 3.0)).sum();
        let r: f64 = (1..=4).map(|r| (r as f64).powf(-4.0 / 3.0)).sum();
        let want = h * r + 2.0 * 4f64.powf(-5.0 / 6.0) * (2f64.powf(-2.0 / 3.0) + 8f64.powf(-2.0 / 3.0));
        assert!((g.value.to_f64() - want).abs() < 1e-12);
        let direct: RealBall = quads_enumerate(&p, 4, EnumMode::Brute, &ctx())
            .unwrap()
            .iter()
            .fold(RealBall::zero(192), |acc, q| acc.add_ball(&q.weight));
        assert!(direct.overlaps(&g.value));
        assert!(gab_partial(&p, 1, &ctx()).unwrap().value.contains_f64(1.0));
    }

    #[test]
    fn sigma1_is_a_subset() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let s = sigma1_partial(Roles::Ab, &p, 4, 1000, &ctx()).unwrap();
        let g = gab_partial(&p, 1000, &ctx()).unwrap();
        assert!(s.is_positive());
        assert_eq!(s.cmp_ball(&g.value), Some(Ordering::Less));
        let z = sigma1_partial(Roles::Ab, &p, 50, 50, &ctx()).unwrap();
        assert!(z.contains_f64(0.0));
        // direct filter over the enumerated list
        let q = quads_enumerate(&p, 60, EnumMode::Brute, &ctx()).unwrap();
        let want = q
            .iter()
            .filter(|q| q.h1 > 7)
            .fold(RealBall::zero(192), |acc, q| acc.add_ball(&q.weight));
        assert!(want.overlaps(&sigma1_partial(Roles::Ab, &p, 7, 60, &ctx()).unwrap()));
        let want_r = q
            .iter()
            .filter(|q| q.r1 > 7)
            .fold(RealBall::zero(192), |acc, q| acc.add_ball(&q.weight));
        assert!(want_r.overlaps(&sigma1_partial(Roles::Ba, &p, 7, 60, &ctx()).unwrap()));
    }

    #[test]
    fn closed_form_integer_and_irrational() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let g = gab_closed_form(&p, &ctx()).unwrap();
        assert!(g.value.to_f64() > 1.0);
        let part = gab_partial(&p, 1000, &ctx()).unwrap();
        assert_eq!(part.value.cmp_ball(&g.value), Some(Ordering::Less));
        let q = ExponentPair::parse("1", "sqrt(2)", &ctx()).unwrap();
        let gq = gab_closed_form(&q, &ctx()).unwrap();
        assert!(gq.diagonal_only && gq.value.to_f64() > 1.0);
        let d = gab_partial(&q, 1000, &ctx()).unwrap();
        assert_eq!(d.value.cmp_ball(&gq.value), Some(Ordering::Less));
    }
}
