//! The truncated Voronoi expansion `Δ*(x, H)`, the `G(a,b;x)` sum, and
//! numeric checks of the ψ Fourier truncation and the B-process.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::{Integer, Rational};

use crate::counting::{balance_point, require_x, split_term};
use crate::error::{Error, Result};
use crate::precision::{
    frac_decompose, Approximable, Exponent, ExponentPair, PrecisionContext, RealBall, Roles,
};

/// Default cap on the number of `(h, r)` terms in `Δ*`.
pub const DEFAULT_TERM_CAP: u64 = 50_000_000;
/// Largest number of summands in a direct exponential sum.
pub const BPROCESS_MAX_TERMS: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VoronoiParams {
    pub h: u64,
    pub term_cap: u64,
}

impl VoronoiParams {
    pub fn new(h: u64, term_cap: u64) -> Result<Self> {
        if h < 2 {
            return Err(Error::InvalidArgument(format!("H must be >= 2, got {h}")));
        }
        Ok(VoronoiParams { h, term_cap })
    }

    pub fn with_h(h: u64) -> Result<Self> {
        Self::new(h, DEFAULT_TERM_CAP)
    }
}

/// `floor(e · H)`, certified.
fn scaled_limit(e: &Exponent, h: u64, ctx: &PrecisionContext) -> Result<u64> {
    let scaled = e.scale(&Rational::from(h))?;
    let exact = scaled.as_rational().cloned();
    let t = crate::precision::Lazy::with_exact(|bits| scaled.to_ball(bits), exact);
    let d = frac_decompose(&t, ctx)?;
    Ok(d.floor_part.to_u64().unwrap_or(0))
}

/// `Δ*(x, H) = (c1/π) x^{1/(2(a+b))} Σ_{h<=aH} Σ_{r<=bH} h^{-e_h} r^{-e_r}
/// cos(2π c2 x^{1/(a+b)} (h^a r^b)^{1/(a+b)} − π/4)`.
///
/// Rows are summed in parallel and merged in increasing `h`, so the midpoint
/// does not depend on the thread count.
pub fn delta_star(pair: &ExponentPair, x: &Rational, params: &VoronoiParams, ctx: &PrecisionContext) -> Result<RealBall> {
    require_x(x)?;
    let h_max = scaled_limit(pair.a(), params.h, ctx)?;
    let r_max = scaled_limit(pair.b(), params.h, ctx)?;
    let terms = h_max.saturating_mul(r_max);
    if terms > params.term_cap {
        return Err(Error::guard(
            "voronoi_term_cap",
            format!("{h_max}·{r_max} terms exceed {}", params.term_cap),
        ));
    }
    let p = ctx.bits;
    let acc_p = p + 32;
    if terms == 0 {
        return Ok(RealBall::zero(p));
    }
    let k = pair.constants(p + 16);
    let theta = pair.theta();
    let xb = RealBall::from_rational(x, p + 16);
    let freq = k.c2.mul_ball(&theta.pow_of(&xb));
    let amp = k
        .c1
        .div_ball(&RealBall::pi(p + 16))
        .mul_ball(&theta.scale(&Rational::from((1, 2)))?.pow_of(&xb));
    let a_theta = pair.a().mul(theta)?;
    let b_theta = pair.b().mul(theta)?;
    let neg_eh = pair.e_h().scale(&Rational::from(-1))?;
    let neg_er = pair.e_r().scale(&Rational::from(-1))?;
    let eighth = RealBall::from_rational(&Rational::from((1, 8)), p);
    let cols: Vec<(RealBall, RealBall)> = (1..=r_max)
        .into_par_iter()
        .map(|r| {
            let rb = RealBall::from_u64(r, p);
            (b_theta.pow_of(&rb), neg_er.pow_of(&rb))
        })
        .collect();
    let rows: Vec<RealBall> = (1..=h_max)
        .into_par_iter()
        .map(|h| {
            let hb = RealBall::from_u64(h, p);
            let fh = freq.mul_ball(&a_theta.pow_of(&hb));
            let wh = neg_eh.pow_of(&hb);
            let mut row = RealBall::zero(acc_p);
            for (fr, wr) in &cols {
                let turns = fh.mul_ball(fr).sub_ball(&eighth);
                row = row.add_ball(&wr.mul_ball(&turns.cos_2pi()));
            }
            row.mul_ball(&wh)
        })
        .collect();
    let mut total = RealBall::zero(acc_p);
    for row in &rows {
        total = total.add_ball(row);
    }
    Ok(total.mul_ball(&amp))
}

/// `Σ_{m <= x^{1/(a+b)}} min(1, 1/(H ‖x^{1/a} / m^{b/a}‖))`, with terms at
/// integers counted as 1.
pub fn g_term(roles: Roles, pair: &ExponentPair, x: &Rational, h: u64, ctx: &PrecisionContext) -> Result<RealBall> {
    require_x(x)?;
    if h < 2 {
        return Err(Error::InvalidArgument(format!("H must be >= 2, got {h}")));
    }
    let s = balance_point(pair, x, ctx)?;
    let re = pair.roles(roles);
    let inv_a = re.a.recip()?;
    let p = ctx.bits;
    let one = RealBall::one(p);
    let mut acc = RealBall::zero(p + 16);
    for m in 1..=s {
        let d = split_term(&re, &inv_a, x, m, ctx)?;
        let term = if d.dist.is_exact() && d.dist.sign() == Some(Ordering::Equal) {
            one.clone()
        } else {
            one.min(&d.dist.mul_ball(&RealBall::from_u64(h, p)).recip())
        };
        acc = acc.add_ball(&term);
    }
    Ok(acc)
}

/// `|ψ(u) + Σ_{1<=|h|<=H} e(hu)/(2πih)|` together with `min(1, 2/(H‖u‖))`.
pub fn psi_fourier_residual<A: Approximable + ?Sized>(u: &A, h: u64, ctx: &PrecisionContext) -> Result<(RealBall, RealBall)> {
    if h < 2 {
        return Err(Error::InvalidArgument(format!("H must be >= 2, got {h}")));
    }
    let d = frac_decompose(u, ctx)?;
    let p = ctx.bits;
    let pi = RealBall::pi(p);
    // the ± h terms pair up into sin(2πhu)/(πh); reduce u mod 1 first
    let frac = match u.exact() {
        Some(q) => {
            let f = Rational::from(&q - Integer::from(q.floor_ref()));
            Some(f)
        }
        None => None,
    };
    let mut sum = RealBall::zero(p + 16);
    for k in 1..=h {
        let arg = match &frac {
            Some(f) => {
                let t = Rational::from(f * k);
                let t = Rational::from(&t - Integer::from(t.floor_ref()));
                RealBall::from_rational(&t, p + 16)
            }
            None => d.frac_part.mul_ball(&RealBall::from_u64(k, p)),
        };
        sum = sum.add_ball(&arg.sin_2pi().div_ball(&pi.mul_ball(&RealBall::from_u64(k, p))));
    }
    let residual = d.psi.add_ball(&sum).abs();
    let bound = if d.dist.is_exact() && d.dist.sign() == Some(Ordering::Equal) {
        RealBall::one(p)
    } else {
        RealBall::one(p).min(&RealBall::from_i64(2, p).div_ball(&d.dist.mul_ball(&RealBall::from_u64(h, p))))
    };
    Ok((residual, bound))
}

/// A complex number as a pair of real balls.
#[derive(Clone, Debug)]
pub struct ComplexBall {
    pub re: RealBall,
    pub im: RealBall,
}

impl ComplexBall {
    pub fn zero(prec: u32) -> Self {
        ComplexBall {
            re: RealBall::zero(prec),
            im: RealBall::zero(prec),
        }
    }

    /// `scale · e(turns)`
    pub fn polar_turns(scale: &RealBall, turns: &RealBall) -> Self {
        ComplexBall {
            re: scale.mul_ball(&turns.cos_2pi()),
            im: scale.mul_ball(&turns.sin_2pi()),
        }
    }

    pub fn add(&self, o: &ComplexBall) -> Self {
        ComplexBall {
            re: self.re.add_ball(&o.re),
            im: self.im.add_ball(&o.im),
        }
    }

    pub fn sub(&self, o: &ComplexBall) -> Self {
        ComplexBall {
            re: self.re.sub_ball(&o.re),
            im: self.im.sub_ball(&o.im),
        }
    }

    pub fn abs(&self) -> RealBall {
        self.re.sqr().add_ball(&self.im.sqr()).sqrt()
    }
}

/// The monomial phase `f(m) = −A m^{−β}` summed over `m1 < m <= m2`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpec {
    pub amplitude: Rational,
    pub beta: Rational,
    pub m1: Rational,
    pub m2: Rational,
}

/// Scales and derivative ratios of a phase.
#[derive(Clone, Debug)]
pub struct PhaseDiagnostics {
    /// `f'(m2)`
    pub u_min: RealBall,
    /// `f'(m1)`
    pub u_max: RealBall,
    /// `1/sqrt(|f''(m1) f''(m2)|)`, so `|f''| ≍ 1/R` on the range.
    pub r_scale: RealBall,
    /// `m1`; `|β_k| <= C_k / U^{k-2}` holds with this choice.
    pub u_scale: RealBall,
    /// `β_k = f^{(k)}/f''` for `k = 3, 4, 5` at `m1`.
    pub beta_k: [RealBall; 3],
    /// `|3β_4 − 5β_3²|` at `m1`.
    pub nondegeneracy: RealBall,
}

#[derive(Clone, Debug)]
pub struct StationaryPoint {
    pub u: i64,
    pub n_u: RealBall,
    pub b_u: Rational,
}

#[derive(Clone, Debug)]
pub struct BTransformResult {
    pub direct: ComplexBall,
    pub transformed: ComplexBall,
    pub residual: RealBall,
    pub stationary_points: Vec<StationaryPoint>,
    pub diagnostics: PhaseDiagnostics,
    /// `log(2 + (m2−m1)/R) + (m2−m1+R)/U`
    pub error_scale: RealBall,
    /// `min(√R, max(1/⟨u_min⟩, 1/⟨u_max⟩))`
    pub boundary_scale: RealBall,
    /// No integer lies in `[u_min, u_max]`; `transformed` is then zero.
    pub no_stationary_points: bool,
}

impl PhaseSpec {
    pub fn new(amplitude: Rational, beta: Rational, m1: Rational, m2: Rational) -> Result<Self> {
        if amplitude.cmp0() != Ordering::Greater || beta.cmp0() != Ordering::Greater {
            return Err(Error::InvalidArgument("A and beta must be positive".into()));
        }
        if m1 < 1 || m2 <= m1 {
            return Err(Error::InvalidArgument(format!("need 1 <= m1 < m2, got ({m1}, {m2}]")));
        }
        Ok(PhaseSpec {
            amplitude,
            beta,
            m1,
            m2,
        })
    }

    fn pow_m(&self, m: &RealBall, e: &Rational) -> RealBall {
        m.pow_rational(e)
    }

    /// `f^{(k)}(m)` for `k <= 5`.
    fn derivative(&self, k: u32, m: &RealBall) -> RealBall {
        let p = m.prec();
        let beta = RealBall::from_rational(&self.beta, p);
        let mut coeff = RealBall::from_rational(&self.amplitude, p).neg();
        for j in 0..k {
            // d/dm m^{-β-j} = -(β+j) m^{-β-j-1}
            coeff = coeff.mul_ball(&beta.add_i64(j as i64)).neg();
        }
        let e = Rational::from(-&self.beta) - k;
        coeff.mul_ball(&self.pow_m(m, &e))
    }

    /// `f'(m)` exactly, when rational.
    fn derivative_exact(&self, m: &Rational) -> Option<Rational> {
        let e = Exponent::rational(Rational::from(-&self.beta) - 1u32);
        let pw = e.exact_power_of(m)?;
        Some(pw * &self.amplitude * &self.beta)
    }

    pub fn diagnostics(&self, bits: u32) -> PhaseDiagnostics {
        let m1 = RealBall::from_rational(&self.m1, bits);
        let m2 = RealBall::from_rational(&self.m2, bits);
        let f2a = self.derivative(2, &m1);
        let f2b = self.derivative(2, &m2);
        let r_scale = f2a.mul_ball(&f2b).abs().sqrt().recip();
        let beta_k = [
            self.derivative(3, &m1).div_ball(&f2a),
            self.derivative(4, &m1).div_ball(&f2a),
            self.derivative(5, &m1).div_ball(&f2a),
        ];
        let nondegeneracy = beta_k[1].mul_i64(3).sub_ball(&beta_k[0].sqr().mul_i64(5)).abs();
        PhaseDiagnostics {
            u_min: self.derivative(1, &m2),
            u_max: self.derivative(1, &m1),
            r_scale,
            u_scale: m1,
            beta_k,
            nondegeneracy,
        }
    }
}

/// Certified floor/ceiling information for a derivative endpoint.
fn endpoint(spec: &PhaseSpec, m: &Rational, ctx: &PrecisionContext) -> Result<(Option<Integer>, RealBall)> {
    if let Some(q) = spec.derivative_exact(m) {
        let int = (*q.denom() == 1).then(|| q.numer().clone());
        return Ok((int, RealBall::from_rational(&q, ctx.bits)));
    }
    let mut last = ctx.bits;
    for bits in ctx.ladder() {
        last = bits;
        let v = spec.derivative(1, &RealBall::from_rational(m, bits));
        if v.floor_certified().is_some() {
            return Ok((None, v));
        }
    }
    Err(Error::AmbiguousBoundary { bits: last })
}

/// `⟨t⟩`: `‖t‖` off the integers, `u_max − u_min` at an integer.
fn bracket(t: &RealBall, is_int: bool, width: &RealBall) -> RealBall {
    if is_int {
        return width.clone();
    }
    let fl = t.floor_certified().expect("certified by endpoint()");
    let f = t.sub_ball(&RealBall::from_integer(&fl, t.prec()));
    f.min(&RealBall::one(t.prec()).sub_ball(&f))
}

/// Compare `Σ_{m1<m<=m2} e(f(m))` with its stationary-phase transform
/// `Σ_u b_u e(f(n_u) − u n_u + 1/8)/sqrt(f''(n_u))`, where `sqrt(f'') = i sqrt|f''|`.
pub fn bprocess_compare(spec: &PhaseSpec, ctx: &PrecisionContext) -> Result<BTransformResult> {
    let p = ctx.bits;
    let lo = Integer::from(spec.m1.floor_ref()) + 1u32;
    let hi = Integer::from(spec.m2.floor_ref());
    let n_terms = if hi >= lo { Integer::from(&hi - &lo) + 1u32 } else { Integer::new() };
    if n_terms > BPROCESS_MAX_TERMS {
        return Err(Error::guard("bprocess_terms", format!("{n_terms} terms exceed {BPROCESS_MAX_TERMS}")));
    }
    let lo = lo.to_u64().unwrap_or(1);
    let hi = hi.to_u64().unwrap_or(0);
    let diagnostics = spec.diagnostics(p);
    let one = RealBall::one(p);
    let direct_terms: Vec<ComplexBall> = (lo..=hi)
        .into_par_iter()
        .map(|m| {
            let f = spec.derivative(0, &RealBall::from_u64(m, p));
            ComplexBall::polar_turns(&one, &f)
        })
        .collect();
    let mut direct = ComplexBall::zero(p + 16);
    for t in &direct_terms {
        direct = direct.add(t);
    }
    let (max_int, u_max) = endpoint(spec, &spec.m1, ctx)?;
    let (min_int, u_min) = endpoint(spec, &spec.m2, ctx)?;
    let u_first = match &min_int {
        Some(n) => n.clone(),
        None => u_min.floor_certified().expect("certified") + 1u32,
    };
    let u_last = match &max_int {
        Some(n) => n.clone(),
        None => u_max.floor_certified().expect("certified"),
    };
    let mut stationary_points = Vec::new();
    let mut transformed = ComplexBall::zero(p + 16);
    if u_first <= u_last {
        let count = Integer::from(&u_last - &u_first) + 1u32;
        if count > BPROCESS_MAX_TERMS {
            return Err(Error::guard("bprocess_terms", format!("{count} stationary points")));
        }
        let (u0, u1) = (
            u_first.to_i64().expect("bounded"),
            u_last.to_i64().expect("bounded"),
        );
        let a_beta = RealBall::from_rational(&Rational::from(&spec.amplitude * &spec.beta), p);
        let inv = Rational::from(&spec.beta + 1u32).recip();
        let pts: Vec<(StationaryPoint, ComplexBall)> = (u0..=u1)
            .into_par_iter()
            .map(|u| {
                let ub = RealBall::from_i64(u, p);
                let n_u = a_beta.div_ball(&ub).pow_rational(&inv);
                let f = spec.derivative(0, &n_u);
                let f2 = spec.derivative(2, &n_u).abs();
                let endpoint_hit = (Some(u) == min_int.as_ref().and_then(Integer::to_i64))
                    || (Some(u) == max_int.as_ref().and_then(Integer::to_i64));
                let b_u = if endpoint_hit { Rational::from((1, 2)) } else { Rational::from(1) };
                let eighth = RealBall::from_rational(&Rational::from((1, 8)), p);
                let turns = f.sub_ball(&ub.mul_ball(&n_u)).sub_ball(&eighth);
                let scale = RealBall::from_rational(&b_u, p).div_ball(&f2.sqrt());
                let term = ComplexBall::polar_turns(&scale, &turns);
                (StationaryPoint { u, n_u, b_u }, term)
            })
            .collect();
        for (sp, term) in pts {
            transformed = transformed.add(&term);
            stationary_points.push(sp);
        }
    }
    let no_stationary_points = stationary_points.is_empty();
    let residual = direct.sub(&transformed).abs();
    let len = RealBall::from_rational(&Rational::from(&spec.m2 - &spec.m1), p);
    let r = &diagnostics.r_scale;
    let error_scale = len
        .div_ball(r)
        .add_i64(2)
        .ln()
        .add_ball(&len.add_ball(r).div_ball(&diagnostics.u_scale));
    let width = u_max.sub_ball(&u_min);
    let b_min = bracket(&u_min, min_int.is_some(), &width);
    let b_max = bracket(&u_max, max_int.is_some(), &width);
    let boundary_scale = r.sqrt().min(&b_min.recip().max(&b_max.recip()));
    Ok(BTransformResult {
        direct,
        transformed,
        residual,
        stationary_points,
        diagnostics,
        error_scale,
        boundary_scale,
        no_stationary_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn single_term_instantiation() {
        // aH = 2, bH = 4 for H = 2 is the smallest case; compare the (1,1) term by hand
        let p = ExponentPair::integer(1, 2).unwrap();
        let x = Rational::from(1000);
        let k = p.constants(192);
        let xf = 1000f64;
        let want11 = k.c1.to_f64() / std::f64::consts::PI
            * xf.powf(1.0 / 6.0)
            * (2.0 * std::f64::consts::PI * k.c2.to_f64() * xf.powf(1.0 / 3.0) - std::f64::consts::FRAC_PI_4).cos();
        let full = delta_star(&p, &x, &VoronoiParams::with_h(2).unwrap(), &ctx()).unwrap();
        let mut rest = 0.0;
        for h in 1..=2u32 {
            for r in 1..=4u32 {
                if h == 1 && r == 1 {
                    continue;
                }
                let v = (h as f64) * (r as f64).powi(2);
                rest += k.c1.to_f64() / std::f64::consts::PI
                    * xf.powf(1.0 / 6.0)
                    * (h as f64).powf(-5.0 / 6.0)
                    * (r as f64).powf(-2.0 / 3.0)
                    * (2.0 * std::f64::consts::PI * k.c2.to_f64() * (xf * v).powf(1.0 / 3.0)
                        - std::f64::consts::FRAC_PI_4)
                        .cos();
            }
        }
        assert!((full.to_f64() - want11 - rest).abs() < 1e-9);
    }

    #[test]
    fn fourier_residual_examples() {
        let (r, b) = psi_fourier_residual(&Rational::from((1, 2)), 10, &ctx()).unwrap();
        assert!(r.contains_f64(0.0) && r.rad_f64() < 1e-40);
        assert!(b.contains_rational(&Rational::from((2, 5))));
        let (r, b) = psi_fourier_residual(&Rational::from(0), 10, &ctx()).unwrap();
        assert!(r.contains_f64(0.5) && b.contains_f64(1.0));
        let (r, b) = psi_fourier_residual(&Rational::from((1, 3)), 10, &ctx()).unwrap();
        assert!(b.contains_rational(&Rational::from((3, 5))));
        assert!(r.cmp_ball(&b) == Some(Ordering::Less));
    }

    #[test]
    fn g_term_examples() {
        let p = ExponentPair::integer(1, 2).unwrap();
        let g = g_term(Roles::Ab, &p, &Rational::from(1), 5, &ctx()).unwrap();
        assert!(g.contains_f64(1.0));
        let x = Rational::from(10_000);
        let vals: Vec<f64> = [100u64, 1000, 10_000]
            .iter()
            .map(|&h| g_term(Roles::Ab, &p, &x, h, &ctx()).unwrap().to_f64())
            .collect();
        assert!(vals[0] >= vals[1] && vals[1] >= vals[2]);
        assert!(vals[0] <= 10_000f64.powf(1.0 / 3.0));
    }

    #[test]
    fn bprocess_empty_range() {
        let s = PhaseSpec::new(Rational::from(1000), Rational::from(1), Rational::from((101, 100)), Rational::from((3, 2))).unwrap();
        let r = bprocess_compare(&s, &ctx()).unwrap();
        assert!(r.direct.re.contains_f64(0.0) && r.direct.im.contains_f64(0.0));
    }

    #[test]
    fn bprocess_with_stationary_points() {
        // f'(m) = 2·10^6 m^-3 ranges over [0.002, 2000] on (10, 1000]
        let s = PhaseSpec::new(Rational::from(1_000_000), Rational::from(2), Rational::from(10), Rational::from(1000)).unwrap();
        let r = bprocess_compare(&s, &ctx()).unwrap();
        assert_eq!(r.stationary_points.len(), 2000);
        assert_eq!(r.stationary_points[0].b_u, Rational::from(1));
        assert_eq!(r.stationary_points[1999].b_u, Rational::from((1, 2)));
        let scale = r.error_scale.to_f64() + r.boundary_scale.to_f64();
        assert!(r.residual.to_f64() < 50.0 * scale, "residual {} scale {}", r.residual, scale);
    }
}
