//! One function per subcommand, each filling a [`Table`].

use std::path::{Path, PathBuf};

use latmesh_core::coincidence::{
    gab_closed_form, gab_partial, quads_enumerate, sigma1_partial, validate_gab, EnumMode, GabResult, GabValidation,
};
use latmesh_core::correlation::{min_gap, near_pair_count, roth_quality, sigma2_eval, GapMetric, NearPairQuery};
use latmesh_core::counting::{count_hyperbola, delta_eval, jump_avoiding_points};
use latmesh_core::moments::{
    convergence_report, short_window_length, short_windows, mean_value_check, scan_range, window_moments, Window,
    WindowMoment,
};
use latmesh_core::precision::{parse_exponent, parse_rational, Exponent, Roles};
use latmesh_core::voronoi::{bprocess_compare, delta_star, g_term, PhaseSpec, VoronoiParams, DEFAULT_TERM_CAP};
use latmesh_core::{ExponentPair, PairKind, PrecisionContext};
use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{ball_cells, fmt_f64, fmt_rational, Plot, Table};

pub const SUBCOMMANDS: [&str; 16] = [
    "count",
    "delta",
    "voronoi",
    "gterm",
    "quads",
    "gab",
    "sigma1",
    "sigma2",
    "nearpairs",
    "mingap",
    "roth",
    "bproc",
    "moments",
    "meanvalue",
    "signchanges",
    "report",
];

pub const MOMENT_COLUMNS: [&str; 10] = [
    "T",
    "T0",
    "int_delta",
    "int_delta_err",
    "int_delta_sq",
    "int_delta_sq_err",
    "predicted",
    "ratio",
    "sign_changes",
    "sup_abs_delta",
];

/// Exact CSV header for each subcommand.
pub fn columns(sub: &str) -> &'static [&'static str] {
    match sub {
        "count" => &["x", "D"],
        "delta" => &["x", "D", "main", "main_err", "delta", "delta_err"],
        "voronoi" => &["H", "points", "rms_residual", "rms_residual_err", "max_residual", "max_residual_err"],
        "gterm" => &["roles", "x", "H", "g", "g_err"],
        "quads" => &["h1", "r1", "h2", "r2", "weight", "weight_err"],
        "gab" => &["route", "box", "value", "value_err", "tail_bound"],
        "sigma1" => &["roles", "H", "box", "sigma1", "sigma1_err"],
        "sigma2" => &["roles", "T", "H", "R", "sigma2", "sigma2_err"],
        "nearpairs" => &["H1", "H2", "R1", "R2", "delta", "count", "bound_shape"],
        "mingap" => &["M", "metric", "min_gap", "min_gap_err", "h1", "r1", "h2", "r2", "fitted_c", "fitted_c_err"],
        "roth" => &["kind", "n", "value", "value_err"],
        "bproc" => &["A", "beta", "m1", "m2", "direct_re", "direct_im", "trans_re", "trans_im", "residual"],
        "moments" | "report" => &MOMENT_COLUMNS,
        "meanvalue" => &["T", "int_delta", "int_delta_err", "ratio", "ratio_err"],
        "signchanges" => &["lo", "hi", "sign_changes"],
        _ => &[],
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    prec: PrecisionContext,
}

impl Ctx<'_> {
    fn pair(&self) -> Result<ExponentPair, CliError> {
        let (a, b) = (self.req_str(&self.cfg.a, "a")?, self.req_str(&self.cfg.b, "b")?);
        Ok(ExponentPair::parse(a, b, &self.prec)?)
    }

    fn req_str<'s>(&self, v: &'s Option<String>, name: &str) -> Result<&'s str, CliError> {
        v.as_deref().ok_or_else(|| CliError::validation(format!("missing parameter {name:?}")))
    }

    fn req<T: Copy>(&self, v: Option<T>, name: &str) -> Result<T, CliError> {
        v.ok_or_else(|| CliError::validation(format!("missing parameter {name:?}")))
    }

    fn rational(&self, v: &Option<String>, name: &str) -> Result<Rational, CliError> {
        Ok(parse_rational(self.req_str(v, name)?)?)
    }

    fn exponent(&self, v: &Option<String>, name: &str) -> Result<Exponent, CliError> {
        Ok(parse_exponent(self.req_str(v, name)?)?)
    }

    fn roles(&self) -> Result<Roles, CliError> {
        match self.cfg.roles.as_deref().unwrap_or("ab") {
            "ab" => Ok(Roles::Ab),
            "ba" => Ok(Roles::Ba),
            other => Err(CliError::validation(format!("roles must be ab or ba, got {other:?}"))),
        }
    }

    fn xs(&self) -> Result<Vec<Rational>, CliError> {
        let mut out = Vec::new();
        if let Some(x) = &self.cfg.x {
            out.push(parse_rational(x)?);
        }
        for x in self.cfg.x_list.iter().flatten() {
            out.push(parse_rational(x)?);
        }
        Ok(out)
    }

    fn t_list(&self) -> Result<Vec<Rational>, CliError> {
        self.cfg
            .t_list
            .iter()
            .flatten()
            .map(|t| parse_rational(t).map_err(CliError::from))
            .collect()
    }

    fn seed(&self) -> u64 {
        self.cfg.seed.unwrap_or(0)
    }
}

fn pair_warnings(pair: &ExponentPair, table: &mut Table) {
    if pair.kind() == PairKind::Decimal {
        table.warn(format!(
            "irrationality of a/b for {} is asserted by the user, not certified",
            pair.label()
        ));
    }
}

/// Run `sub` under `cfg` and return its rows.
pub fn dispatch(sub: &str, cfg: &RunConfig) -> Result<Table, CliError> {
    let c = Ctx {
        cfg,
        prec: cfg.precision()?,
    };
    let mut table = Table::new(columns(sub));
    match sub {
        "count" => count(&c, &mut table)?,
        "delta" => delta(&c, &mut table)?,
        "voronoi" => voronoi(&c, &mut table)?,
        "gterm" => gterm(&c, &mut table)?,
        "quads" => quads(&c, &mut table)?,
        "gab" => gab(&c, &mut table)?,
        "sigma1" => sigma1(&c, &mut table)?,
        "sigma2" => sigma2(&c, &mut table)?,
        "nearpairs" => nearpairs(&c, &mut table)?,
        "mingap" => mingap(&c, &mut table)?,
        "roth" => roth(&c, &mut table)?,
        "bproc" => bproc(&c, &mut table)?,
        "moments" => moments(&c, &mut table)?,
        "meanvalue" => meanvalue(&c, &mut table)?,
        "signchanges" => signchanges(&c, &mut table)?,
        "report" => report(&c, &mut table)?,
        other => return Err(CliError::validation(format!("unknown subcommand {other:?}"))),
    }
    Ok(table)
}

fn count(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let pair = c.pair()?;
    pair_warnings(&pair, t);
    for x in c.xs()? {
        let d = count_hyperbola(&pair, &x, &c.prec)?;
        t.push(vec![fmt_rational(&x), d.to_string()]);
    }
    Ok(())
}

fn delta(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let pair = c.pair()?;
    pair_warnings(&pair, t);
    for x in c.xs()? {
        let r = delta_eval(&pair, &x, &c.prec)?;
        let [m, me] = ball_cells(&r.main);
        let [d, de] = ball_cells(&r.delta);
        t.push(vec![fmt_rational(&x), r.d.to_string(), m, me, d, de]);
    }
    t.plot = Some(Plot::DeltaTrace);
    Ok(())
}

fn voronoi(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let pair = c.pair()?;
    pair_warnings(&pair, t);
    let x = c.rational(&c.cfg.x, "x")?;
    let mut hs: Vec<u64> = c.cfg.h.into_iter().chain(c.cfg.h_list.iter().flatten().copied()).collect();
    if hs.is_empty() {
        hs = vec![10, 100, 1000];
    }
    let points = match c.cfg.samples {
        Some(n) => jump_avoiding_points(&pair, &x, &Rational::from(&x * 2u32), n, c.seed(), &c.prec)?,
        None => vec![x],
    };
    let deltas = points
        .iter()
        .map(|p| delta_eval(&pair, p, &c.prec).map(|r| r.delta))
        .collect::<Result<Vec<_>, _>>()?;
    let cap = c.cfg.term_cap.unwrap_or(DEFAULT_TERM_CAP);
    for h in hs {
        let params = VoronoiParams::new(h, cap)?;
        let (mut sq, mut max, mut err) = (0.0f64, 0.0f64, 0.0f64);
        for (p, d) in points.iter().zip(&deltas) {
            let r = d.sub_ball(&delta_star(&pair, p, &params, &c.prec)?);
            let v = r.to_f64().abs();
            sq += v * v;
            max = max.max(v);
            err = err.max(r.rad_f64());
        }
        let rms = (sq / points.len().max(1) as f64).sqrt();
        t.push(vec![
            h.to_string(),
            points.len().to_string(),
            fmt_f64(rms),
            fmt_f64(err),
            fmt_f64(max),
            fmt_f64(err),
        ]);
    }
    t.plot = Some(Plot::RmsVsH);
    Ok(())
}

fn gterm(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let pair = c.pair()?;
    let roles = c.roles()?;
    let x = c.rational(&c.cfg.x, "x")?;
    let h = c.req(c.cfg.h, "H")?;
    let g = g_term(roles, &pair, &x, h, &c.prec)?;
    let [v, e] = ball_cells(&g);
    t.push(vec![roles_str(roles).into(), fmt_rational(&x), h.to_string(), v, e]);
    Ok(())
}

fn roles_str(r: Roles) -> &'static str {
    match r {
        Roles::Ab => "ab",
        Roles::Ba => "ba",
    }
}

fn quads(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let pair = c.pair()?;
    pair_warnings(&pair, t);
    let mode = match c.cfg.mode.as_deref().unwrap_or("param") {
        "brute" => EnumMode::Brute,
        "param" => EnumMode::Parametrized,
        other => return Err(CliError::validation(format!("mode must be brute or param, got {other:?}"))),
    };
    let bx = c.req(c.cfg.box_size, "box")?;
    let qs = quads_enumerate(&pair, bx, mode, &c.prec)?;
    for q in &qs {
        let [w, we] = ball_cells(&q.weight);
        t.push(vec![q.h1.to_string(), q.r1.to_string(), q.h2.to_string(), q.r2.to_string(), w, we]);
    }
    if pair.kind().irrational_ratio() {
        t.warn("a/b irrational: only diagonal quadruples exist");
    }
    Ok(())
}

/// Persisted outcome of a closed-form validation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationRecord {
    pub label: String,
    pub passed: bool,
    pub closed_form: f64,
    pub closed_form_err: f64,
    /// `(box, partial, partial radius, residual, fitted tail)`
    pub rows: Vec<(u64, f64, f64, f64, f64)>,
    pub enumeration_box: u64,
    pub enumeration_agrees: bool,
    pub partial_below_closed: bool,
    pub residual_decreasing: bool,
    pub within_tail: bool,
}

impl ValidationRecord {
    fn from_validation(v: &GabValidation) -> Self {
        ValidationRecord {
            label: v.label.clone(),
            passed: v.passed(),
            closed_form: v.closed_form.to_f64(),
            closed_form_err: v.closed_form.rad_f64(),
            rows: v
                .rows
                .iter()
                .map(|(b, p, r, tl)| (*b, p.to_f64(), p.rad_f64(), r.to_f64(), tl.to_f64()))
                .collect(),
            enumeration_box: v.enumeration_box,
            enumeration_agrees: v.enumeration_agrees,
            partial_below_closed: v.partial_below_closed,
            residual_decreasing: v.residual_decreasing,
            within_tail: v.within_tail,
        }
    }
}

pub fn validation_path(dir: &Path, pair: &ExponentPair) -> PathBuf {
    let slug: String = pair
        .label()
        .chars()
        .map(|ch| if ch.is_ascii_alphanumeric() { ch } else { '_' })
        .collect();
    dir.join(format!("gab-validation-{}.json", slug.trim_matches('_')))
}

fn load_record(dir: &Path, pair: &ExponentPair) -> Option<ValidationRecord> {
    let text = std::fs::read_to_string(validation_path(dir, pair)).ok()?;
    let rec: ValidationRecord = serde_json::from_str(&text).ok()?;
    (rec.label == pair.label()).then_some(rec)
}

fn run_validation(c: &Ctx, pair: &ExponentPair) -> Result<ValidationRecord, CliError> {
    let v = validate_gab(pair, &c.prec)?;
    let rec = ValidationRecord::from_validation(&v);
    let dir = c.cfg.output_dir();
    std::fs::create_dir_all(&dir)?;
    std::fs::write(
        validation_path(&dir, pair),
        serde_json::to_string_pretty(&rec).map_err(CliError::internal)?,
    )?;
    Ok(rec)
}

fn certified_closed(c: &Ctx, pair: &ExponentPair, rec: &ValidationRecord) -> Result<GabResult, CliError> {
    if !rec.passed {
        return Err(latmesh_core::Error::GabNotValidated.into());
    }
    let mut g = gab_closed_form(pair, &c.prec)?;
    g.validated = true;
    Ok(g)
}

fn gab_row(g: &GabResult) -> Vec<String> {
    let [v, e] = ball_cells(&g.value);
    vec![
        g.route.as_str().into(),
        g.r#box.map(|b| b.to_string()).unwrap_or_default(),
        v,
        e,
        g.tail_bound.as_ref().map(|b| fmt_f64(b.to_f64())).unwrap_or_default(),
    ]
}

fn gab(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let pair = c.pair()?;
    pair_warnings(&pair, t);
    if c.cfg.validate == Some(true) {
        let rec = run_validation(c, &pair)?;
        for &(bx, p, pe, _, tail) in &rec.rows {
            t.push(vec!["partial_sum".into(), bx.to_string(), fmt_f64(p), fmt_f64(pe), fmt_f64(tail)]);
        }
        t.extra.insert(
            "validation".into(),
            serde_json::to_value(&rec).map_err(CliError::internal)?,
        );
        if !rec.passed {
            return Err(latmesh_core::Error::GabNotValidated.into());
        }
    }
    match c.cfg.route.as_deref().unwrap_or("closed") {
        "closed" => {
            let g = match load_record(&c.cfg.output_dir(), &pair) {
                Some(rec) => certified_closed(c, &pair, &rec)?,
                None if c.cfg.require_validation == Some(true) => {
                    return Err(latmesh_core::Error::GabNotValidated.into());
                }
                None => {
                    t.warn("closed form not validated; run gab --validate first");
                    gab_closed_form(&pair, &c.prec)?
                }
            };
            t.push(gab_row(&g));
        }
        "partial" => {
            let g = gab_partial(&pair, c.cfg.box_size.unwrap_or(10_000), &c.prec)?;
            t.warn("tail_bound is an empirical fit, not a rigorous bound");
            t.push(gab_row(&g));
        }
        other => return Err(CliError::validation(format!("route must be closed or partial, got {other:?}"))),
    }
    Ok(())
}

/// Validated closed form when available, else the partial sum with a warning.
fn gab_for_moments(c: &Ctx, pair: &ExponentPair, t: &mut Table) -> Result<GabResult, CliError> {
    let rec = match load_record(&c.cfg.output_dir(), pair) {
        Some(r) => r,
        None => run_validation(c, pair)?,
    };
    if rec.passed {
        return certified_closed(c, pair, &rec);
    }
    let bx = c.cfg.box_size.unwrap_or(10_000);
    t.warn(format!("closed form failed validation; using the partial sum at box {bx}"));
    Ok(gab_partial(pair, bx, &c.prec)?)
}

fn sigma1(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let pair = c.pair()?;
    let roles = c.roles()?;
    let (h, bx) = (c.req(c.cfg.h, "H")?, c.req(c.cfg.box_size, "box")?);
    let s = sigma1_partial(roles, &pair, h, bx, &c.prec)?;
    let [v, e] = ball_cells(&s);
    t.push(vec![roles_str(roles).into(), h.to_string(), bx.to_string(), v, e]);
    Ok(())
}

fn sigma2(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let pair = c.pair()?;
    let roles = c.roles()?;
    let tt = c.rational(&c.cfg.t, "T")?;
    let (h, r) = (c.req(c.cfg.h, "H")?, c.req(c.cfg.r, "R")?);
    let s = sigma2_eval(roles, &pair, &tt, h, r, &c.prec)?;
    let [v, e] = ball_cells(&s);
    t.push(vec![roles_str(roles).into(), fmt_rational(&tt), h.to_string(), r.to_string(), v, e]);
    Ok(())
}

fn nearpairs(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let cfg = c.cfg;
    let q = NearPairQuery {
        mu: c.exponent(&cfg.mu, "mu")?,
        nu: c.exponent(&cfg.nu, "nu")?,
        h1: c.rational(&cfg.h1, "H1")?,
        h2: c.rational(&cfg.h2, "H2")?,
        r1: c.rational(&cfg.r1, "R1")?,
        r2: c.rational(&cfg.r2, "R2")?,
        delta: c.rational(&cfg.delta, "delta")?,
    };
    let n = near_pair_count(&q, &c.prec)?;
    t.push(vec![
        fmt_rational(&q.h1),
        fmt_rational(&q.h2),
        fmt_rational(&q.r1),
        fmt_rational(&q.r2),
        fmt_rational(&q.delta),
        n.to_string(),
        fmt_f64(q.bound_shape()),
    ]);
    Ok(())
}

fn mingap(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let alpha = c.exponent(&c.cfg.a, "a")?;
    let beta = c.exponent(&c.cfg.b, "b")?;
    let m = c.req(c.cfg.m, "M")?;
    let metric = match c.cfg.metric.as_deref().unwrap_or("raw") {
        "raw" => GapMetric::Raw,
        "eta" => GapMetric::Eta,
        other => return Err(CliError::validation(format!("metric must be raw or eta, got {other:?}"))),
    };
    let g = min_gap(&alpha, &beta, m, metric, &c.prec)?;
    let [v, e] = ball_cells(&g.min_gap);
    let (fc, fe) = match &g.fitted_c {
        Some(b) => {
            let [x, y] = ball_cells(b);
            (x, y)
        }
        None => (String::new(), String::new()),
    };
    let (h1, r1, h2, r2) = g.witness;
    let name = if metric == GapMetric::Raw { "raw" } else { "eta" };
    t.push(vec![
        m.to_string(),
        name.into(),
        v,
        e,
        h1.to_string(),
        r1.to_string(),
        h2.to_string(),
        r2.to_string(),
        fc,
        fe,
    ]);
    if g.fitted_c.is_some() {
        t.warn("fitted_c is a single-point fit, not a bound");
    }
    Ok(())
}

fn roth(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let alpha = c.exponent(&c.cfg.alpha, "alpha")?;
    let h = c.req(c.cfg.h, "H")?;
    let r = roth_quality(&alpha, h, &c.prec)?;
    for (n, v) in &r.records {
        let [m, e] = ball_cells(v);
        t.push(vec!["record".into(), n.to_string(), m, e]);
    }
    let [m, e] = ball_cells(&r.probe.1);
    t.push(vec!["probe".into(), r.probe.0.to_string(), m, e]);
    t.extra.insert("denominators".into(), serde_json::json!(r.denominators));
    Ok(())
}

fn bproc(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let cfg = c.cfg;
    let spec = PhaseSpec::new(
        c.rational(&cfg.amplitude, "A")?,
        c.rational(&cfg.beta, "beta")?,
        c.rational(&cfg.m1, "m1")?,
        c.rational(&cfg.m2, "m2")?,
    )?;
    let r = bprocess_compare(&spec, &c.prec)?;
    t.push(vec![
        fmt_rational(&spec.amplitude),
        fmt_rational(&spec.beta),
        fmt_rational(&spec.m1),
        fmt_rational(&spec.m2),
        fmt_f64(r.direct.re.to_f64()),
        fmt_f64(r.direct.im.to_f64()),
        fmt_f64(r.transformed.re.to_f64()),
        fmt_f64(r.transformed.im.to_f64()),
        fmt_f64(r.residual.to_f64()),
    ]);
    t.extra.insert("error_scale".into(), serde_json::json!(r.error_scale.to_f64()));
    t.extra.insert("boundary_scale".into(), serde_json::json!(r.boundary_scale.to_f64()));
    t.extra.insert("stationary_points".into(), serde_json::json!(r.stationary_points.len()));
    Ok(())
}

fn moment_row(m: &WindowMoment) -> Vec<String> {
    let [i, ie] = ball_cells(&m.int_delta);
    let [s, se] = ball_cells(&m.int_delta_sq);
    vec![
        fmt_rational(&m.window.t),
        fmt_rational(&m.window.t0),
        i,
        ie,
        s,
        se,
        fmt_f64(m.predicted_main.to_f64()),
        fmt_f64(m.ratio.to_f64()),
        m.sign_changes.to_string(),
        fmt_f64(m.sup_abs_delta.to_f64()),
    ]
}

fn moments(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let pair = c.pair()?;
    pair_warnings(&pair, t);
    let mut ts = c.t_list()?;
    if let Some(tt) = &c.cfg.t {
        ts.insert(0, parse_rational(tt)?);
    }
    if ts.is_empty() {
        return Err(CliError::validation("moments: missing parameter \"T\""));
    }
    let t0 = c.cfg.t0.as_deref().map(parse_rational).transpose()?;
    let gab = gab_for_moments(c, &pair, t)?;
    for tt in ts {
        let w = Window::new(tt.clone(), t0.clone().unwrap_or(tt))?;
        t.push(moment_row(&window_moments(&pair, &w, &gab, &c.prec)?));
    }
    t.plot = Some(Plot::RatioVsT);
    Ok(())
}

fn meanvalue(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let pair = c.pair()?;
    let tt = c.rational(&c.cfg.t, "T")?;
    let (i, r) = mean_value_check(&pair, &tt, &c.prec)?;
    let [iv, ie] = ball_cells(&i);
    let [rv, re] = ball_cells(&r);
    t.push(vec![fmt_rational(&tt), iv, ie, rv, re]);
    Ok(())
}

fn signchanges(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let pair = c.pair()?;
    let tt = c.rational(&c.cfg.t, "T")?;
    if c.cfg.short_windows == Some(true) {
        t.extra.insert(
            "short_window_length".into(),
            serde_json::json!(short_window_length(&pair, tt.to_f64())),
        );
        for (lo, hi, n) in short_windows(&pair, &tt, &c.prec)? {
            t.push(vec![fmt_rational(&lo), fmt_rational(&hi), n.to_string()]);
        }
    } else {
        let t0 = match &c.cfg.t0 {
            Some(s) => parse_rational(s)?,
            None => tt.clone(),
        };
        let w = Window::new(tt, t0)?;
        let s = scan_range(&pair, &w.t, &w.end(), &c.prec)?;
        t.push(vec![fmt_rational(&s.lo), fmt_rational(&s.hi), s.sign_changes.to_string()]);
    }
    Ok(())
}

fn report(c: &Ctx, t: &mut Table) -> Result<(), CliError> {
    let pair = c.pair()?;
    pair_warnings(&pair, t);
    let ts = c.t_list()?;
    let gab = gab_for_moments(c, &pair, t)?;
    let r = convergence_report(&pair, &ts, &gab, &c.prec)?;
    for m in &r.rows {
        t.push(moment_row(m));
    }
    t.extra.insert("sup_exponent".into(), serde_json::json!(r.sup_exponent));
    if r.sup_exponent.is_some() {
        t.warn("sup_exponent is a least-squares fit over the listed T");
    }
    t.plot = Some(Plot::RatioVsT);
    Ok(())
}
