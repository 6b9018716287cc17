//! Eigenvalue inequalities on flat domains with round boundary: the
//! boundary exact-spectrum bound, the cohomology vanishing criterion and the
//! two Steklov bounds.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use faer::Mat;
use serde::Serialize;

use crate::discrete::assemble;
use crate::fields::{FlatDomain, ScalarField};
use crate::linalg::eig_sym;
use crate::mesh::{betti, boundary_complex, generate, shell3, Shape, SimplicialComplex};
use crate::random::Sampler;

use super::hodge::{coexact_spectrum, exact_spectrum};
use super::steklov::{steklov_spectrum, SteklovOptions};
use super::{mesh_descriptor, CheckDetail, Constant, SpectraError, TheoremCheck};

/// Default relative slack allowed below the bound.
pub const DEFAULT_TOL_REL: f64 = 0.02;
/// Tolerance for sampled curvature hypotheses (W ≥ 0).
const HYPOTHESIS_TOL: f64 = 1e-10;
/// Matrices above this size skip the direct exact-subspace cross-check.
const CROSS_CHECK_LIMIT: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TheoremCase {
    /// λ'_{1,p}(∂M) ≥ σ_p[σ_{n−p+1} + inf f_N].
    #[serde(rename = "thm1.2")]
    BoundaryExact,
    /// σ_p(∂M) > sup (ln V)_N ⇒ b_p(M) = 0.
    #[serde(rename = "thm1.3")]
    CohomologyVanishing,
    /// σ(∂M) ≥ (p+1)c.
    #[serde(rename = "thm1.5")]
    SteklovLower,
    /// σ_k ≤ λ_k / ((n−p)c − sup|∇f|).
    #[serde(rename = "thm1.6")]
    SteklovUpper,
}

impl TheoremCase {
    pub fn id(&self) -> &'static str {
        match self {
            TheoremCase::BoundaryExact => "thm1.2",
            TheoremCase::CohomologyVanishing => "thm1.3",
            TheoremCase::SteklovLower => "thm1.5",
            TheoremCase::SteklovUpper => "thm1.6",
        }
    }
}

impl fmt::Display for TheoremCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TheoremCase {
    type Err = SpectraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "thm1.2" => Ok(TheoremCase::BoundaryExact),
            "thm1.3" => Ok(TheoremCase::CohomologyVanishing),
            "thm1.5" => Ok(TheoremCase::SteklovLower),
            "thm1.6" => Ok(TheoremCase::SteklovUpper),
            other => Err(SpectraError::UnsupportedDomain(format!("unknown theorem case '{other}'"))),
        }
    }
}

/// Domains the checks run on: the unit ball and the shell 0.5 ≤ |x| ≤ 1 in R³.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremDomain {
    Ball3,
    Annulus3,
}

impl fmt::Display for TheoremDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoremDomain::Ball3 => "ball3",
            TheoremDomain::Annulus3 => "annulus3",
        })
    }
}

impl FromStr for TheoremDomain {
    type Err = SpectraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ball3" => Ok(TheoremDomain::Ball3),
            "annulus3" => Ok(TheoremDomain::Annulus3),
            other => Err(SpectraError::UnsupportedDomain(other.to_string())),
        }
    }
}

impl TheoremDomain {
    pub fn flat(&self) -> FlatDomain {
        match self {
            TheoremDomain::Ball3 => FlatDomain::ball(1.0, 3),
            TheoremDomain::Annulus3 => FlatDomain::annulus(0.5, 1.0, 3),
        }
    }

    /// Tetrahedral mesh; the shell uses level + 1 prism layers.
    pub fn mesh(&self, level: usize) -> Result<SimplicialComplex, SpectraError> {
        Ok(match self {
            TheoremDomain::Ball3 => generate(&Shape::Ball3 { level })?,
            TheoremDomain::Annulus3 => shell3(level, 0.5, 1.0, level + 1)?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct TheoremConfig {
    pub domain: TheoremDomain,
    pub level: usize,
    pub p: usize,
    pub weight: ScalarField,
    pub potential: ScalarField,
    /// Number of eigenvalues compared by the Steklov upper bound.
    pub k: usize,
    pub quad_order: usize,
    pub tol_rel: f64,
    pub seed: u64,
    /// Seeded points for sampled hypotheses and constants.
    pub samples: usize,
    pub include_harmonic: bool,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        TheoremConfig {
            domain: TheoremDomain::Ball3,
            level: 2,
            p: 1,
            weight: ScalarField::zero(),
            potential: ScalarField::one(),
            k: 5,
            quad_order: 4,
            tol_rel: DEFAULT_TOL_REL,
            seed: 1,
            samples: 200,
            include_harmonic: true,
        }
    }
}

/// σ_p(∂M): sum of the p smallest principal curvatures, minimized over the
/// boundary components (analytic).
pub fn sigma_p(domain: &FlatDomain, p: usize) -> Constant {
    let comps = domain.boundary_components();
    let v = (0..comps.len())
        .map(|c| {
            let mut k = domain.principal_curvatures(c);
            k.sort_by(f64::total_cmp);
            k.iter().take(p).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    Constant::analytic(v)
}

/// Smallest principal curvature over the boundary (analytic).
fn min_curvature(domain: &FlatDomain) -> Constant {
    let comps = domain.boundary_components();
    let v = (0..comps.len())
        .flat_map(|c| domain.principal_curvatures(c))
        .fold(f64::INFINITY, f64::min);
    Constant::analytic(v)
}

/// Seeded boundary points: boundary quadrature nodes plus random points on
/// each spherical component.
fn boundary_points(domain: &FlatDomain, samples: usize, seed: u64) -> Result<Vec<Vec<f64>>, SpectraError> {
    let mut pts = domain.quad_boundary(8)?.rule.points.clone();
    let mut s = Sampler::new(seed);
    for comp in domain.boundary_components() {
        if let crate::fields::BoundaryComponent::Sphere { radius, .. } = comp {
            for _ in 0..samples {
                pts.push(s.sphere_point(domain.dim(), radius, 0.0));
            }
        }
    }
    Ok(pts)
}

fn normal_derivative_values(
    domain: &FlatDomain,
    g: &ScalarField,
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>, SpectraError> {
    boundary_points(domain, samples, seed)?
        .iter()
        .map(|x| {
            let frame = domain.boundary_frame(x)?;
            let j = g.jet(x)?;
            Ok(j.grad().iter().zip(&frame.normal).map(|(a, b)| a * b).sum())
        })
        .collect()
}

/// inf f_N over the boundary with N the inner normal (sampled).
pub fn inf_normal_derivative(domain: &FlatDomain, f: &ScalarField, samples: usize, seed: u64) -> Result<Constant, SpectraError> {
    let v = normal_derivative_values(domain, f, samples, seed)?.into_iter().fold(f64::INFINITY, f64::min);
    Ok(Constant::sampled(v))
}

/// Seeded interior points plus the boundary sample points.
fn domain_points(domain: &FlatDomain, samples: usize, seed: u64) -> Result<Vec<Vec<f64>>, SpectraError> {
    let mut pts = Sampler::new(seed).points(domain, samples);
    pts.extend(boundary_points(domain, samples / 4, seed.wrapping_add(1))?);
    Ok(pts)
}

fn sorted_eigenvalues(m: &[Vec<f64>]) -> Result<Vec<f64>, SpectraError> {
    let n = m.len();
    let mat = Mat::from_fn(n, n, |i, j| 0.5 * (m[i][j] + m[j][i]));
    Ok(eig_sym(&mat)?.values)
}

/// min over samples of the smallest eigenvalue of W_{f,V}^{[q]} on a flat
/// domain: sum of the q smallest eigenvalues of ∇²f + V⁻¹∇²V plus
/// V⁻¹Δ_f V. With V = 1 this is W_f^{[q]}.
fn min_weitzenbock(
    domain: &FlatDomain,
    f: &ScalarField,
    v: &ScalarField,
    q: usize,
    samples: usize,
    seed: u64,
) -> Result<Constant, SpectraError> {
    let dim = domain.dim();
    let mut worst = f64::INFINITY;
    for x in domain_points(domain, samples, seed)? {
        let fj = f.jet(&x)?;
        let vj = v.jet(&x)?;
        if vj.value() <= 0.0 {
            return Err(SpectraError::HypothesisViolated {
                theorem: "thm1.3".into(),
                reason: format!("V = {} is not positive at {x:?}", vj.value()),
                constants: BTreeMap::new(),
            });
        }
        let t: Vec<Vec<f64>> =
            (0..dim).map(|a| (0..dim).map(|b| fj.hess(a, b) + vj.hess(a, b) / vj.value()).collect()).collect();
        let ev = sorted_eigenvalues(&t)?;
        let delta_f_v = vj.laplacian() + fj.grad().iter().zip(vj.grad()).map(|(a, b)| a * b).sum::<f64>();
        worst = worst.min(ev.iter().take(q).sum::<f64>() + delta_f_v / vj.value());
    }
    Ok(Constant::sampled(worst))
}

fn sup_gradient(domain: &FlatDomain, f: &ScalarField, samples: usize, seed: u64) -> Result<Constant, SpectraError> {
    let mut sup = 0.0f64;
    for x in domain_points(domain, samples, seed)? {
        sup = sup.max(f.jet(&x)?.grad().iter().map(|a| a * a).sum::<f64>().sqrt());
    }
    Ok(Constant::sampled(sup))
}

fn violated(case: TheoremCase, reason: String, constants: &BTreeMap<String, Constant>) -> SpectraError {
    SpectraError::HypothesisViolated { theorem: case.id().into(), reason, constants: constants.clone() }
}

/// Run one theorem check. Hypotheses are verified first; a failed
/// hypothesis is returned as `HypothesisViolated` with its constants.
pub fn check_theorem(case: TheoremCase, cfg: &TheoremConfig) -> Result<TheoremCheck, SpectraError> {
    let domain = cfg.domain.flat();
    let n = domain.dim() - 1;
    let p = cfg.p;
    let mut c = BTreeMap::new();
    match case {
        TheoremCase::BoundaryExact => {
            if p == 0 || p > n {
                return Err(SpectraError::InvalidDegree { p, top: n });
            }
            let sp = sigma_p(&domain, p);
            let sq = sigma_p(&domain, n - p + 1);
            let inf_fn = inf_normal_derivative(&domain, &cfg.weight, cfg.samples, cfg.seed)?;
            let w = min_weitzenbock(&domain, &cfg.weight, &ScalarField::one(), p, cfg.samples, cfg.seed)?;
            c.insert("sigma_p".into(), sp.clone());
            c.insert("sigma_n_minus_p_plus_1".into(), sq.clone());
            c.insert("inf_f_N".into(), inf_fn.clone());
            c.insert("min_W_f".into(), w.clone());
            if w.value < -HYPOTHESIS_TOL {
                return Err(violated(case, format!("W_f^[{p}] has eigenvalue {} < 0", w.value), &c));
            }
            if sp.value <= 0.0 {
                return Err(violated(case, format!("sigma_p = {} is not positive", sp.value), &c));
            }
            if sq.value + inf_fn.value <= 0.0 {
                return Err(violated(case, format!("sigma_(n-p+1) + inf f_N = {} is not positive", sq.value + inf_fn.value), &c));
            }
            let bound = sp.value * (sq.value + inf_fn.value);
            // The boundary sphere is meshed directly; the weight is evaluated
            // at the radial projection onto the unit sphere.
            let sphere = generate(&Shape::Icosphere { level: cfg.level })?;
            let r = ScalarField::r2().sqrt();
            let proj: Vec<ScalarField> = (0..3).map(|i| ScalarField::coord(i) / r.clone()).collect();
            let bw = cfg.weight.substitute(&proj);
            let bwc = assemble(&sphere, &bw, cfg.quad_order)?;
            let cross = bwc.count(p) <= CROSS_CHECK_LIMIT;
            let ex = exact_spectrum(&bwc, p, 1, cross)?;
            let computed = ex.via_duality.first().ok_or(SpectraError::EmptySpectrum)?;
            if let Some(d) = ex.max_rel_diff {
                c.insert("duality_cross_check_rel_diff".into(), Constant::computed(d));
            }
            let detail = CheckDetail { label: format!("lambda'_1,{p}"), computed, bound, margin: computed - bound };
            TheoremCheck::from_details(case.id(), c, vec![detail], cfg.tol_rel, mesh_descriptor(&sphere), cfg.weight.to_string())
        }
        TheoremCase::CohomologyVanishing => {
            if p > n + 1 {
                return Err(SpectraError::InvalidDegree { p, top: n + 1 });
            }
            let sp = sigma_p(&domain, p);
            let ln_v = cfg.potential.ln();
            let sup_lnv = Constant::sampled(
                normal_derivative_values(&domain, &ln_v, cfg.samples, cfg.seed)?.into_iter().fold(f64::NEG_INFINITY, f64::max),
            );
            let w = min_weitzenbock(&domain, &cfg.weight, &cfg.potential, p, cfg.samples, cfg.seed)?;
            c.insert("sigma_p".into(), sp.clone());
            c.insert("sup_lnV_N".into(), sup_lnv.clone());
            c.insert("min_W_fV".into(), w.clone());
            if w.value < -HYPOTHESIS_TOL {
                return Err(violated(case, format!("W_(f,V)^[{p}] has eigenvalue {} < 0", w.value), &c));
            }
            if sp.value <= sup_lnv.value {
                return Err(violated(case, format!("sigma_p = {} does not exceed sup (ln V)_N = {}", sp.value, sup_lnv.value), &c));
            }
            let mesh = cfg.domain.mesh(cfg.level)?;
            let b = betti(&mesh);
            let bp = b.get(p).copied().unwrap_or(0) as f64;
            c.insert("betti_p".into(), Constant::computed(bp));
            // Inequality form: 0 ≥ b_p, margin = −b_p.
            let detail = CheckDetail { label: format!("b_{p}"), computed: bp, bound: 0.0, margin: -bp };
            let mut check = TheoremCheck::from_details(case.id(), c, vec![detail], cfg.tol_rel, mesh_descriptor(&mesh), cfg.weight.to_string())?;
            check.pass = bp == 0.0;
            Ok(check)
        }
        TheoremCase::SteklovLower | TheoremCase::SteklovUpper => {
            let upper = case == TheoremCase::SteklovUpper;
            let max_p = if upper { n.saturating_sub(1) } else { n };
            if p == 0 || p > max_p {
                return Err(SpectraError::InvalidDegree { p, top: max_p });
            }
            let cmin = min_curvature(&domain);
            let w = min_weitzenbock(&domain, &cfg.weight, &ScalarField::one(), p + 1, cfg.samples, cfg.seed)?;
            c.insert("c".into(), cmin.clone());
            c.insert("min_W_f_p_plus_1".into(), w.clone());
            // Flat domains have zero sectional curvature.
            c.insert("min_sectional".into(), Constant::analytic(0.0));
            if w.value < -HYPOTHESIS_TOL {
                return Err(violated(case, format!("W_f^[{}] has eigenvalue {} < 0", p + 1, w.value), &c));
            }
            if cmin.value <= 0.0 {
                return Err(violated(case, format!("principal curvatures bounded by c = {} <= 0", cmin.value), &c));
            }
            let mesh = cfg.domain.mesh(cfg.level)?;
            let wc = assemble(&mesh, &cfg.weight, cfg.quad_order)?;
            let opts = SteklovOptions { include_harmonic: cfg.include_harmonic };
            if !upper {
                let st = steklov_spectrum(&wc, p, st_count(cfg.k), opts)?;
                let sigma = st.first_nonzero().ok_or(SpectraError::EmptySpectrum)?;
                let bound = (p + 1) as f64 * cmin.value;
                c.insert("zero_modes".into(), Constant::computed(st.zero_modes as f64));
                let detail = CheckDetail { label: "sigma_first_nonzero".into(), computed: sigma, bound, margin: sigma - bound };
                return TheoremCheck::from_details(case.id(), c, vec![detail], cfg.tol_rel, mesh_descriptor(&mesh), cfg.weight.to_string());
            }
            let sup_grad = sup_gradient(&domain, &cfg.weight, cfg.samples, cfg.seed)?;
            c.insert("sup_grad_f".into(), sup_grad.clone());
            let denom = (n - p) as f64 * cmin.value - sup_grad.value;
            if denom <= 0.0 {
                return Err(violated(case, format!("(n-p)c - sup|grad f| = {denom} is not positive"), &c));
            }
            let factor = 1.0 / denom;
            c.insert("factor".into(), Constant::computed(factor));
            let st = steklov_spectrum(&wc, p, cfg.k, opts)?;
            let lam = boundary_coclosed_spectrum(&mesh, &cfg.weight, cfg.quad_order, p, cfg.k, cfg.include_harmonic)?;
            let count = cfg.k.min(st.eigenvalues.len()).min(lam.len());
            if count == 0 {
                return Err(SpectraError::EmptySpectrum);
            }
            let details = (0..count)
                .map(|i| {
                    let bound = factor * lam[i];
                    let sigma = st.eigenvalues[i];
                    CheckDetail { label: format!("k={}", i + 1), computed: sigma, bound, margin: bound - sigma }
                })
                .collect();
            TheoremCheck::from_details(case.id(), c, details, cfg.tol_rel, mesh_descriptor(&mesh), cfg.weight.to_string())
        }
    }
}

fn st_count(k: usize) -> usize {
    k.max(1) + 8
}

/// Weighted Hodge eigenvalues on co-closed boundary p-forms: the harmonic
/// zeros (when included) followed by the co-exact spectrum.
fn boundary_coclosed_spectrum(
    mesh: &SimplicialComplex,
    weight: &ScalarField,
    quad_order: usize,
    p: usize,
    k: usize,
    include_harmonic: bool,
) -> Result<Vec<f64>, SpectraError> {
    let bm = boundary_complex(mesh)?;
    if bm.is_empty() {
        return Err(SpectraError::NoBoundary);
    }
    let bwc = assemble(&bm.boundary, weight, quad_order)?;
    let mut out = Vec::new();
    if include_harmonic {
        out.extend(std::iter::repeat(0.0).take(bwc.harmonic_dim(p)?));
    }
    out.extend(coexact_spectrum(&bwc, p, k)?.eigenvalues);
    out.truncate(k);
    Ok(out)
}
