//! Command execution: each command first resolves all of its settings (so
//! configuration errors surface before any computation), then runs.

use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use whodge::discrete::{assemble, WeightedComplex};
use whodge::fields::{FlatDomain, ScalarField};
use whodge::identity::{
    check_bochner, check_boundary_split, check_cartan, check_commutator, check_contraction, check_green,
    check_green_laplacian, check_pohozhaev, check_reilly, check_scalar_bochner, check_wedge_codiff,
    check_wedge_interior, IdentityReport,
};
use whodge::mesh::{generate, Shape};
use whodge::random::Sampler;
use whodge::spectra::{
    check_theorem, coexact_spectrum, convergence_sweep, exact_spectrum, full_spectrum, lp_check, richardson,
    steklov_spectrum, sweep_csv, Embedding, EmbeddingData, SpectraError, SpectrumResult, SteklovOptions,
    TheoremCase, TheoremCheck, TheoremConfig, TheoremDomain, DUALITY_TOL, RESIDUAL_TOL,
};

use crate::config::{ConfigError, Settings};

/// Everything a command produces.
pub struct Outcome {
    pub results: Vec<Value>,
    pub pass: bool,
    pub csv: String,
}

impl Outcome {
    fn new(csv_header: &str) -> Self {
        Outcome { results: Vec::new(), pass: true, csv: format!("{csv_header}\n") }
    }

    fn push<T: Serialize>(&mut self, item: &T, pass: bool) {
        self.results.push(serde_json::to_value(item).expect("report values serialize"));
        self.pass &= pass;
    }

    /// A computation error counts as a failed check.
    fn error(&mut self, context: &str, e: impl std::fmt::Display) {
        self.results.push(json!({ "context": context, "error": e.to_string(), "pass": false }));
        self.pass = false;
    }

    fn row(&mut self, line: String) {
        self.csv.push_str(&line);
        self.csv.push('\n');
    }
}

/// A resolved command, ready to run.
pub enum Plan {
    Identities(IdentitiesPlan),
    Spectrum(SpectrumPlan),
    Steklov(SteklovPlan),
    Theorem(TheoremPlan),
    Lp(LpPlan),
    Convergence(ConvergencePlan),
}

pub struct Resolved {
    pub plan: Plan,
    pub seed: u64,
    pub dump_matrices: Option<PathBuf>,
}

pub fn resolve(s: &mut Settings) -> Result<Resolved, ConfigError> {
    let seed = s.u64("seed", 1)?;
    let plan = match s.command() {
        "identities" => Plan::Identities(IdentitiesPlan::resolve(s, seed)?),
        "spectrum" => Plan::Spectrum(SpectrumPlan::resolve(s)?),
        "steklov" => Plan::Steklov(SteklovPlan::resolve(s)?),
        "theorem" => Plan::Theorem(TheoremPlan::resolve(s, seed)?),
        "lp" => Plan::Lp(LpPlan::resolve(s)?),
        "convergence" => Plan::Convergence(ConvergencePlan::resolve(s)?),
        other => return Err(s.error("command", format!("unknown command '{other}'"))),
    };
    let dump_matrices = s.output("dump_matrices").map(PathBuf::from);
    if dump_matrices.is_some() && !matches!(plan, Plan::Spectrum(_) | Plan::Steklov(_)) {
        return Err(s.error("dump_matrices", "matrix dumps are available for spectrum and steklov only"));
    }
    Ok(Resolved { plan, seed, dump_matrices })
}

pub fn execute(r: &Resolved) -> Outcome {
    match &r.plan {
        Plan::Identities(p) => p.run(),
        Plan::Spectrum(p) => p.run(r.dump_matrices.as_deref()),
        Plan::Steklov(p) => p.run(r.dump_matrices.as_deref()),
        Plan::Theorem(p) => p.run(),
        Plan::Lp(p) => p.run(),
        Plan::Convergence(p) => p.run(),
    }
}

fn positive(s: &Settings, key: &str, v: usize) -> Result<usize, ConfigError> {
    if v == 0 {
        return Err(s.error(key, "must be at least 1"));
    }
    Ok(v)
}

fn quad_order(s: &mut Settings, default: usize) -> Result<usize, ConfigError> {
    let order = s.usize("order", default)?;
    positive(s, "order", order)
}

// ---------------------------------------------------------------- identities

pub struct IdentitiesPlan {
    domain: FlatDomain,
    p: usize,
    weight: ScalarField,
    potential: ScalarField,
    order: usize,
    poly_degree: usize,
    samples: usize,
    tol: Option<f64>,
    seed: u64,
}

fn flat_domain(name: &str) -> Option<FlatDomain> {
    Some(match name {
        "ball2" => FlatDomain::ball(1.0, 2),
        "ball3" => FlatDomain::ball(1.0, 3),
        "annulus2" => FlatDomain::annulus(0.5, 1.0, 2),
        "annulus3" => FlatDomain::annulus(0.5, 1.0, 3),
        _ => return None,
    })
}

impl IdentitiesPlan {
    fn resolve(s: &mut Settings, seed: u64) -> Result<Self, ConfigError> {
        let name = s.string("domain", Some("ball3"))?;
        let domain = flat_domain(&name)
            .ok_or_else(|| s.error("domain", format!("unknown domain '{name}' (ball2, ball3, annulus2, annulus3)")))?;
        let p = s.usize("p", 1)?;
        if p > domain.dim() {
            return Err(s.error("p", format!("degree {p} exceeds dimension {}", domain.dim())));
        }
        let weight = s.field("weight", "0")?;
        let potential = s.field("potential", "1")?;
        for (key, f) in [("weight", &weight), ("potential", &potential)] {
            if f.min_dim() > domain.dim() {
                return Err(s.error(key, format!("uses a coordinate beyond x{}", domain.dim())));
            }
        }
        let order = quad_order(s, 12)?;
        let poly_degree = s.usize("poly_degree", 2)?;
        let samples = s.usize("samples", 100)?;
        let samples = positive(s, "samples", samples)?;
        let tol = s.opt_f64("tol")?;
        Ok(IdentitiesPlan { domain, p, weight, potential, order, poly_degree, samples, tol, seed })
    }

    fn run(&self) -> Outcome {
        let mut out = Outcome::new(IdentityReport::CSV_HEADER);
        let dim = self.domain.dim();
        let (p, f, v) = (self.p, &self.weight, &self.potential);
        let mut rng = Sampler::new(self.seed);
        let w = rng.form(p, dim, self.poly_degree);
        let psi = (p < dim).then(|| rng.form(p + 1, dim, self.poly_degree));
        let field = rng.vector_field(dim, 1);
        let g = rng.polynomial(dim, 2);
        let points = rng.points(&self.domain, self.samples);
        let mut boundary = Vec::new();
        let radii: Vec<f64> = match self.domain {
            FlatDomain::Annulus { inner, outer, .. } => vec![inner, outer],
            _ => vec![1.0],
        };
        for i in 0..self.samples.min(50) {
            boundary.push(rng.sphere_point(dim, radii[i % radii.len()], 0.2));
        }

        let mut checks: Vec<(&str, Result<IdentityReport, String>)> = Vec::new();
        let mut add = |name: &'static str, r: Result<IdentityReport, whodge::ops::OpError>| {
            checks.push((name, r.map_err(|e| e.to_string())));
        };
        add("bochner", check_bochner(&w, f, &points));
        add("scalar_bochner", check_scalar_bochner(&w, f, &points));
        add("cartan", check_cartan(&w, f, &points));
        add("commutator", check_commutator(&g, &w, f, &points));
        if p >= 1 {
            add("contraction", check_contraction(&w, &field, &points));
        }
        if p < dim {
            add("wedge_interior", check_wedge_interior(v, &w, f, &points));
            add("wedge_codiff", check_wedge_codiff(v, &w, f, &points));
        }
        if let Some(psi) = &psi {
            add("green", check_green(&w, psi, f, &self.domain, self.order));
            add("pohozhaev", check_pohozhaev(&w, &field, f, &self.domain, self.order));
        }
        add("green_laplacian", check_green_laplacian(&w, f, &self.domain, self.order));
        add("reilly", check_reilly(&w, f, v, &self.domain, self.order));
        if p >= 1 {
            add("boundary_split", check_boundary_split(&w, f, &self.domain, &boundary));
        }
        for (name, r) in checks {
            match r {
                Ok(mut rep) => {
                    if let Some(t) = self.tol {
                        rep = rep.with_tolerance(t);
                    }
                    rep = rep.with_seed(Some(self.seed));
                    out.row(rep.csv_row());
                    let pass = rep.pass;
                    out.push(&rep, pass);
                }
                Err(e) => out.error(name, e),
            }
        }
        out
    }
}

// ------------------------------------------------------------------ spectra

/// Coarsest meshes that a bare shape name plus `level` refines.
fn base_shape(name: &str) -> Option<Shape> {
    Some(match name {
        "interval" => Shape::Interval { segments: 8 },
        "circle" => Shape::Circle { segments: 8 },
        "disc" => Shape::Disc { level: 0 },
        "ball3" => Shape::Ball3 { level: 0 },
        "icosphere" => Shape::Icosphere { level: 0 },
        "flat_torus" => Shape::flat_torus(8, 8),
        _ => return None,
    })
}

/// `shape = icosphere` with `level = 3`, or an explicit `shape = circle(256)`.
fn resolve_shape(s: &mut Settings) -> Result<Shape, ConfigError> {
    let text = s.string("shape", None)?;
    if let Some(base) = base_shape(text.trim()) {
        let level = s.usize("level", 2)?;
        return Ok(whodge::spectra::refined_shape(&base, level));
    }
    let shape: Shape = text.parse().map_err(|e| s.error("shape", format!("{e}")))?;
    if s.is_set("level") {
        return Err(s.error("level", "level cannot be combined with an explicit shape size"));
    }
    s.usize("level", 0)?;
    Ok(shape)
}

fn shape_is_closed(shape: &Shape) -> bool {
    matches!(shape, Shape::Circle { .. } | Shape::Icosphere { .. } | Shape::FlatTorus { .. })
}

fn shape_dim(shape: &Shape) -> usize {
    match shape {
        Shape::Interval { .. } | Shape::Circle { .. } => 1,
        Shape::Disc { .. } | Shape::Icosphere { .. } | Shape::FlatTorus { .. } => 2,
        Shape::Ball3 { .. } => 3,
    }
}

fn check_weight_dim(s: &Settings, weight: &ScalarField, shape: &Shape) -> Result<(), ConfigError> {
    let ambient = match shape {
        Shape::Icosphere { .. } => 3,
        other => shape_dim(other),
    };
    if weight.min_dim() > ambient {
        return Err(s.error("weight", format!("uses a coordinate beyond x{ambient}")));
    }
    Ok(())
}

fn build(shape: &Shape, weight: &ScalarField, order: usize) -> Result<WeightedComplex, String> {
    let mesh = generate(shape).map_err(|e| e.to_string())?;
    assemble(&mesh, weight, order).map_err(|e| e.to_string())
}

fn dump(out: &mut Outcome, wc: &WeightedComplex, dir: Option<&std::path::Path>) {
    if let Some(dir) = dir {
        if let Err(e) = wc.dump_matrices(dir) {
            out.error("dump_matrices", e);
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Coexact,
    Exact,
    Full,
}

pub struct SpectrumPlan {
    shape: Shape,
    kind: Kind,
    p: usize,
    k: usize,
    weight: ScalarField,
    order: usize,
    tol: f64,
}

const EIGEN_CSV: &str = "index,eigenvalue,residual";

fn eigen_rows(out: &mut Outcome, values: &[f64], residuals: &[f64]) {
    for (i, (v, r)) in values.iter().zip(residuals).enumerate() {
        out.row(format!("{},{v:e},{r:e}", i + 1));
    }
}

/// Serialized spectrum plus its tolerance verdict.
fn with_verdict<T: Serialize>(item: &T, tol: f64, pass: bool) -> Value {
    let mut v = serde_json::to_value(item).expect("report values serialize");
    if let Value::Object(m) = &mut v {
        m.insert("tolerance".into(), json!(tol));
        m.insert("pass".into(), json!(pass));
    }
    v
}

fn spectrum_pass(r: &SpectrumResult, tol: f64) -> bool {
    !r.eigenvalues.is_empty() && r.residuals.iter().all(|x| *x <= tol)
}

impl SpectrumPlan {
    fn resolve(s: &mut Settings) -> Result<Self, ConfigError> {
        let shape = resolve_shape(s)?;
        let kind = match s.string("kind", Some("coexact"))?.as_str() {
            "coexact" => Kind::Coexact,
            "exact" => Kind::Exact,
            "full" => Kind::Full,
            other => return Err(s.error("kind", format!("unknown spectrum kind '{other}' (coexact, exact, full)"))),
        };
        if kind != Kind::Full && !shape_is_closed(&shape) {
            return Err(s.error("shape", format!("{shape} has boundary; exact and co-exact spectra need a closed mesh")));
        }
        let top = shape_dim(&shape);
        let p = s.usize("p", 0)?;
        let valid = match kind {
            Kind::Coexact => p < top,
            Kind::Exact => p >= 1 && p <= top,
            Kind::Full => p <= top,
        };
        if !valid {
            return Err(s.error("p", format!("degree {p} has no such spectrum on a {top}-dimensional mesh")));
        }
        let k = s.usize("k", 4)?;
        let k = positive(s, "k", k)?;
        let weight = s.field("weight", "0")?;
        check_weight_dim(s, &weight, &shape)?;
        let order = quad_order(s, 4)?;
        let tol = s.f64("tol", RESIDUAL_TOL)?;
        Ok(SpectrumPlan { shape, kind, p, k, weight, order, tol })
    }

    fn run(&self, dump_dir: Option<&std::path::Path>) -> Outcome {
        let mut out = Outcome::new(EIGEN_CSV);
        let wc = match build(&self.shape, &self.weight, self.order) {
            Ok(wc) => wc,
            Err(e) => {
                out.error("assemble", e);
                return out;
            }
        };
        dump(&mut out, &wc, dump_dir);
        match self.kind {
            Kind::Coexact | Kind::Full => {
                let r = if self.kind == Kind::Coexact {
                    coexact_spectrum(&wc, self.p, self.k)
                } else {
                    full_spectrum(&wc, self.p, self.k)
                };
                match r {
                    Ok(r) => {
                        let pass = spectrum_pass(&r, self.tol);
                        eigen_rows(&mut out, &r.eigenvalues, &r.residuals);
                        out.results.push(with_verdict(&r, self.tol, pass));
                        out.pass &= pass;
                    }
                    Err(e) => out.error("spectrum", e),
                }
            }
            Kind::Exact => {
                let n = wc.complex().count(self.p);
                match exact_spectrum(&wc, self.p, self.k, n <= 2000) {
                    Ok(r) => {
                        let agree = r.max_rel_diff.is_none_or(|d| d <= DUALITY_TOL);
                        let pass = spectrum_pass(&r.via_duality, self.tol) && agree;
                        eigen_rows(&mut out, &r.via_duality.eigenvalues, &r.via_duality.residuals);
                        out.results.push(with_verdict(&r, self.tol, pass));
                        out.pass &= pass;
                    }
                    Err(e) => out.error("spectrum", e),
                }
            }
        }
        out
    }
}

pub struct SteklovPlan {
    shape: Shape,
    p: usize,
    k: usize,
    weight: ScalarField,
    order: usize,
    include_harmonic: bool,
    tol: f64,
}

impl SteklovPlan {
    fn resolve(s: &mut Settings) -> Result<Self, ConfigError> {
        let shape = resolve_shape(s)?;
        if shape_is_closed(&shape) {
            return Err(s.error("shape", format!("{shape} has no boundary")));
        }
        let top = shape_dim(&shape);
        let p = s.usize("p", 0)?;
        if p + 1 > top {
            return Err(s.error("p", format!("degree {p} needs p + 1 ≤ {top}")));
        }
        let k = s.usize("k", 4)?;
        let k = positive(s, "k", k)?;
        let weight = s.field("weight", "0")?;
        check_weight_dim(s, &weight, &shape)?;
        let order = quad_order(s, 4)?;
        let include_harmonic = s.bool("include_harmonic", true)?;
        let tol = s.f64("tol", RESIDUAL_TOL)?;
        Ok(SteklovPlan { shape, p, k, weight, order, include_harmonic, tol })
    }

    fn run(&self, dump_dir: Option<&std::path::Path>) -> Outcome {
        let mut out = Outcome::new(EIGEN_CSV);
        let wc = match build(&self.shape, &self.weight, self.order) {
            Ok(wc) => wc,
            Err(e) => {
                out.error("assemble", e);
                return out;
            }
        };
        dump(&mut out, &wc, dump_dir);
        match steklov_spectrum(&wc, self.p, self.k, SteklovOptions { include_harmonic: self.include_harmonic }) {
            Ok(r) => {
                let pass = !r.eigenvalues.is_empty() && r.residuals.iter().all(|x| *x <= self.tol);
                eigen_rows(&mut out, &r.eigenvalues, &r.residuals);
                out.results.push(with_verdict(&r, self.tol, pass));
                out.pass &= pass;
            }
            Err(e) => out.error("steklov", e),
        }
        out
    }
}

// ----------------------------------------------------------------- theorems

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

const CHECK_CSV: &str = "theorem_id,label,computed,bound,margin,tol_rel,pass";

fn check_rows(out: &mut Outcome, c: &TheoremCheck) {
    for d in &c.details {
        let pass = d.margin >= -c.tol_rel * d.bound.abs();
        out.row(format!(
            "{},{},{:e},{:e},{:e},{:e},{}",
            c.theorem_id,
            csv_quote(&d.label),
            d.computed, d.bound, d.margin, c.tol_rel, pass
        ));
    }
}

/// Theorem outcomes; a violated hypothesis is reported with its constants
/// and counts as a failed check.
fn push_check(out: &mut Outcome, id: &str, r: Result<TheoremCheck, SpectraError>) {
    match r {
        Ok(c) => {
            check_rows(out, &c);
            let pass = c.pass;
            out.push(&c, pass);
        }
        Err(SpectraError::HypothesisViolated { theorem, reason, constants }) => {
            out.results.push(json!({
                "theorem_id": theorem,
                "status": "hypothesis_violated",
                "reason": reason,
                "constants": constants,
                "pass": false,
            }));
            out.pass = false;
        }
        Err(e) => out.error(id, e),
    }
}

pub struct TheoremPlan {
    case: TheoremCase,
    cfg: TheoremConfig,
}

impl TheoremPlan {
    fn resolve(s: &mut Settings, seed: u64) -> Result<Self, ConfigError> {
        let case_text = s.string("case", None)?;
        let case: TheoremCase = case_text
            .parse()
            .map_err(|_| s.error("case", format!("unknown case '{case_text}' (thm1.2, thm1.3, thm1.5, thm1.6)")))?;
        let dom_text = s.string("domain", Some("ball3"))?;
        let domain: TheoremDomain =
            dom_text.parse().map_err(|_| s.error("domain", format!("unknown domain '{dom_text}' (ball3, annulus3)")))?;
        let d = TheoremConfig::default();
        let level = s.usize("level", d.level)?;
        let p = s.usize("p", d.p)?;
        if p > 3 {
            return Err(s.error("p", "degree exceeds the dimension 3"));
        }
        let weight = s.field("weight", "0")?;
        let potential = s.field("potential", "1")?;
        for (key, f) in [("weight", &weight), ("potential", &potential)] {
            if f.min_dim() > 3 {
                return Err(s.error(key, "uses a coordinate beyond x3"));
            }
        }
        let k = s.usize("k", d.k)?;
        let k = positive(s, "k", k)?;
        let quad_order = quad_order(s, d.quad_order)?;
        let tol_rel = s.f64("tol_rel", d.tol_rel)?;
        let samples = s.usize("samples", d.samples)?;
        let samples = positive(s, "samples", samples)?;
        let include_harmonic = s.bool("include_harmonic", d.include_harmonic)?;
        let cfg =
            TheoremConfig { domain, level, p, weight, potential, k, quad_order, tol_rel, seed, samples, include_harmonic };
        Ok(TheoremPlan { case, cfg })
    }

    fn run(&self) -> Outcome {
        let mut out = Outcome::new(CHECK_CSV);
        push_check(&mut out, self.case.id(), check_theorem(self.case, &self.cfg));
        out
    }
}

pub struct LpPlan {
    emb: EmbeddingData,
    p: usize,
    js: Vec<usize>,
    resolution: usize,
}

impl LpPlan {
    fn resolve(s: &mut Settings) -> Result<Self, ConfigError> {
        let text = s.string("embedding", None)?;
        let embedding: Embedding = text.parse().map_err(|e| s.error("embedding", format!("{e}")))?;
        let weight = s.field("weight", "0")?;
        let emb = EmbeddingData::new(embedding, weight).map_err(|e| s.error("embedding", format!("{e}")))?;
        let p = s.usize("p", 1)?;
        if p > emb.dim() {
            return Err(s.error("p", format!("degree {p} exceeds the dimension {}", emb.dim())));
        }
        let js = s.usize_list("j", &[1])?;
        if js.contains(&0) {
            return Err(s.error("j", "eigenvalue indices start at 1"));
        }
        let default_res = match emb.embedding() {
            Embedding::Circle { .. } => 256,
            Embedding::CliffordTorus { .. } => 16,
            Embedding::Sphere2 { .. } => 3,
        };
        let resolution = s.usize("resolution", default_res)?;
        let resolution = positive(s, "resolution", resolution)?;
        Ok(LpPlan { emb, p, js, resolution })
    }

    fn run(&self) -> Outcome {
        let mut out = Outcome::new(CHECK_CSV);
        for &j in &self.js {
            push_check(&mut out, "thm1.7", lp_check(&self.emb, self.p, j, self.resolution));
        }
        out
    }
}

// -------------------------------------------------------------- convergence

pub struct ConvergencePlan {
    base: Shape,
    levels: Vec<usize>,
    p: usize,
    k: usize,
    weight: ScalarField,
    order: usize,
    expect: Option<f64>,
    tol_rel: f64,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    base: String,
    p: usize,
    rows: &'a [whodge::spectra::SweepRow],
    /// Second-order extrapolation of λ_1 from the two finest levels.
    richardson_lambda_1: Option<f64>,
    expect: Option<f64>,
    rel_error: Option<f64>,
    tol_rel: f64,
    pass: bool,
}

impl ConvergencePlan {
    fn resolve(s: &mut Settings) -> Result<Self, ConfigError> {
        let text = s.string("shape", None)?;
        let base = match base_shape(text.trim()) {
            Some(b) => b,
            None => text.parse().map_err(|e| s.error("shape", format!("{e}")))?,
        };
        let levels = s.usize_list("levels", &[0, 1, 2])?;
        let top = shape_dim(&base);
        let p = s.usize("p", 0)?;
        if p >= top {
            return Err(s.error("p", format!("degree {p} needs p < {top}")));
        }
        let k = s.usize("k", 4)?;
        let k = positive(s, "k", k)?;
        let weight = s.field("weight", "0")?;
        check_weight_dim(s, &weight, &base)?;
        let order = quad_order(s, 4)?;
        let expect = s.opt_f64("expect")?;
        let tol_rel = s.f64("tol_rel", 0.005)?;
        Ok(ConvergencePlan { base, levels, p, k, weight, order, expect, tol_rel })
    }

    fn run(&self) -> Outcome {
        let rows = match convergence_sweep(&self.base, &self.levels, self.p, self.k, &self.weight, self.order) {
            Ok(rows) => rows,
            Err(e) => {
                let mut out = Outcome::new(&whodge::spectra::csv_header(self.k));
                out.error("convergence", e);
                return out;
            }
        };
        let n = rows.len();
        let first = |r: &whodge::spectra::SweepRow| r.eigenvalues.first().copied();
        let extrapolated = if n >= 2 {
            match (first(&rows[n - 2]), first(&rows[n - 1])) {
                (Some(a), Some(b)) => Some(richardson(rows[n - 2].h, a, rows[n - 1].h, b, 2.0)),
                _ => None,
            }
        } else {
            None
        };
        let best = extrapolated.or_else(|| rows.last().and_then(first));
        let rel_error = self.expect.zip(best).map(|(e, v)| (v - e).abs() / e.abs().max(f64::MIN_POSITIVE));
        let finite = rows.iter().all(|r| !r.eigenvalues.is_empty() && r.eigenvalues.iter().all(|v| v.is_finite()));
        let pass = finite && rel_error.is_none_or(|e| e <= self.tol_rel) && (self.expect.is_none() || best.is_some());
        let report = SweepReport {
            base: self.base.to_string(),
            p: self.p,
            rows: &rows,
            richardson_lambda_1: extrapolated,
            expect: self.expect,
            rel_error,
            tol_rel: self.tol_rel,
            pass,
        };
        let mut out = Outcome { results: Vec::new(), pass: true, csv: sweep_csv(&rows, self.k) };
        out.push(&report, pass);
        out
    }
}
