//! Closed submanifolds of Euclidean space given by chart parametrizations:
//! circles, Clifford-type tori and the round 2-sphere.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::fields::{canonical, Mask, ScalarField};
use crate::mesh::{generate, periodic_segment, Shape, SimplicialComplex};
use crate::ops::ChartForm;
use crate::random::Sampler;

use super::SpectraError;

/// Supported embeddings. Circle and torus charts are arc-length charts, so
/// the chart metric is the identity; the sphere uses colatitude/azimuth.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Embedding {
    /// Circle of radius R in R².
    Circle { radius: f64 },
    /// S¹(r1) × S¹(r2) in R⁴.
    CliffordTorus { r1: f64, r2: f64 },
    /// Round 2-sphere in R³.
    Sphere2 { radius: f64 },
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Embedding::Circle { radius } => write!(f, "circle({radius:?})"),
            Embedding::CliffordTorus { r1, r2 } => write!(f, "clifford_torus({r1:?},{r2:?})"),
            Embedding::Sphere2 { radius } => write!(f, "sphere2({radius:?})"),
        }
    }
}

impl FromStr for Embedding {
    type Err = SpectraError;

    /// `circle`, `circle(R)`, `clifford_torus`, `clifford_torus(r1,r2)`,
    /// `sphere2`, `sphere2(R)`. The default torus radii are 1/√2.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SpectraError::UnsupportedEmbedding(s.to_string());
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], &s[i + 1..s.len() - 1]),
            None => (s, ""),
            _ => return Err(bad()),
        };
        let nums: Vec<f64> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',').map(|a| a.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_, _>>()?
        };
        let e = match (name.trim(), nums.as_slice()) {
            ("circle", []) => Embedding::Circle { radius: 1.0 },
            ("circle", [r]) => Embedding::Circle { radius: *r },
            ("clifford_torus" | "torus", []) => {
                Embedding::CliffordTorus { r1: std::f64::consts::FRAC_1_SQRT_2, r2: std::f64::consts::FRAC_1_SQRT_2 }
            }
            ("clifford_torus" | "torus", [a, b]) => Embedding::CliffordTorus { r1: *a, r2: *b },
            ("sphere2" | "s2", []) => Embedding::Sphere2 { radius: 1.0 },
            ("sphere2" | "s2", [r]) => Embedding::Sphere2 { radius: *r },
            _ => return Err(bad()),
        };
        Ok(e)
    }
}

/// Embedding fields X_1..X_M over chart coordinates plus the ambient weight.
#[derive(Clone, Debug)]
pub struct EmbeddingData {
    embedding: Embedding,
    coords: Vec<ScalarField>,
    weight: ScalarField,
    chart_weight: ScalarField,
}

/// Embedding-induced geometry at one chart point.
#[derive(Clone, Debug)]
pub struct ChartGeometry {
    /// X(u).
    pub point: Vec<f64>,
    /// ∂_iX.
    pub tangents: Vec<Vec<f64>>,
    /// ∂_i∂_jX.
    pub second: Vec<Vec<Vec<f64>>>,
    pub metric: Vec<Vec<f64>>,
    pub inverse: Vec<Vec<f64>>,
    /// Γ^k_ij stored as christoffel[k][i][j].
    pub christoffel: Vec<Vec<Vec<f64>>>,
    /// Mean curvature vector (1/m) tr II.
    pub mean_curvature: Vec<f64>,
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inverse_small(g: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    match g.len() {
        1 => (g[0][0].abs() > 1e-14).then(|| vec![vec![1.0 / g[0][0]]]),
        2 => {
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            let scale = g[0][0].abs().max(g[1][1].abs());
            (det.abs() > 1e-14 * scale * scale).then(|| {
                vec![vec![g[1][1] / det, -g[0][1] / det], vec![-g[1][0] / det, g[0][0] / det]]
            })
        }
        _ => None,
    }
}

impl EmbeddingData {
    pub fn new(embedding: Embedding, weight: ScalarField) -> Result<Self, SpectraError> {
        let bad = |why: &str| SpectraError::UnsupportedEmbedding(format!("{embedding}: {why}"));
        let u = ScalarField::coord(0);
        let c = |v: f64| ScalarField::constant(v);
        let coords = match embedding {
            Embedding::Circle { radius } => {
                if !(radius > 0.0) {
                    return Err(bad("radius must be positive"));
                }
                let t = u / c(radius);
                vec![c(radius) * t.cos(), c(radius) * t.sin()]
            }
            Embedding::CliffordTorus { r1, r2 } => {
                if !(r1 > 0.0 && r2 > 0.0) {
                    return Err(bad("radii must be positive"));
                }
                let a = u / c(r1);
                let b = ScalarField::coord(1) / c(r2);
                vec![c(r1) * a.cos(), c(r1) * a.sin(), c(r2) * b.cos(), c(r2) * b.sin()]
            }
            Embedding::Sphere2 { radius } => {
                if radius != 1.0 {
                    return Err(bad("only the unit sphere is supported"));
                }
                let phi = ScalarField::coord(1);
                vec![u.sin() * phi.cos(), u.sin() * phi.sin(), u.cos()]
            }
        };
        if weight.min_dim() > coords.len() {
            return Err(bad("weight uses more coordinates than the ambient space has"));
        }
        let chart_weight = weight.substitute(&coords);
        Ok(EmbeddingData { embedding, coords, weight, chart_weight })
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn coords(&self) -> &[ScalarField] {
        &self.coords
    }

    pub fn weight(&self) -> &ScalarField {
        &self.weight
    }

    /// f∘X over chart coordinates.
    pub fn chart_weight(&self) -> &ScalarField {
        &self.chart_weight
    }

    /// Intrinsic dimension m.
    pub fn dim(&self) -> usize {
        match self.embedding {
            Embedding::Circle { .. } => 1,
            _ => 2,
        }
    }

    /// Ambient dimension M.
    pub fn ambient_dim(&self) -> usize {
        self.coords.len()
    }

    /// Closed-form |H|².
    pub fn mean_curvature_sq(&self) -> f64 {
        match self.embedding {
            Embedding::Circle { radius } | Embedding::Sphere2 { radius } => 1.0 / (radius * radius),
            Embedding::CliffordTorus { r1, r2 } => (1.0 / (r1 * r1) + 1.0 / (r2 * r2)) / 4.0,
        }
    }

    /// c with W^{[p]} = c·Id on p-forms, where a closed form is known.
    pub fn weitzenbock_scalar(&self, p: usize) -> Result<f64, SpectraError> {
        let m = self.dim();
        if p > m {
            return Err(SpectraError::InvalidDegree { p, top: m });
        }
        match (&self.embedding, p) {
            (Embedding::Circle { .. } | Embedding::CliffordTorus { .. }, _) => Ok(0.0),
            (Embedding::Sphere2 { .. }, 0) => Ok(0.0),
            (Embedding::Sphere2 { radius }, 1) => Ok((m as f64 - 1.0) / (radius * radius)),
            (e, p) => Err(SpectraError::CurvatureUnavailable(format!("W^[{p}] on {e}"))),
        }
    }

    /// Chart periods for the periodic chart meshes; `None` for the sphere,
    /// whose mesh lives in ambient space.
    pub fn periods(&self) -> Option<Vec<f64>> {
        match self.embedding {
            Embedding::Circle { radius } => Some(vec![TAU * radius]),
            Embedding::CliffordTorus { r1, r2 } => Some(vec![TAU * r1, TAU * r2]),
            Embedding::Sphere2 { .. } => None,
        }
    }

    /// Discretization of M: `resolution` segments per circle (squared for the
    /// torus grid) or the icosphere level.
    pub fn mesh(&self, resolution: usize) -> Result<SimplicialComplex, SpectraError> {
        Ok(match self.embedding {
            Embedding::Circle { radius } => periodic_segment(resolution, TAU * radius)?,
            Embedding::CliffordTorus { r1, r2 } => generate(&Shape::FlatTorus {
                nx: resolution,
                ny: resolution,
                lx: TAU * r1,
                ly: TAU * r2,
            })?,
            Embedding::Sphere2 { .. } => generate(&Shape::Icosphere { level: resolution })?,
        })
    }

    /// Weight on the mesh returned by [`EmbeddingData::mesh`]: f∘X on chart
    /// meshes, f at the radial projection on the sphere.
    pub fn mesh_weight(&self) -> ScalarField {
        match self.embedding {
            Embedding::Sphere2 { .. } => {
                let r = ScalarField::r2().sqrt();
                let proj: Vec<ScalarField> = (0..3).map(|i| ScalarField::coord(i) / r.clone()).collect();
                self.weight.substitute(&proj)
            }
            _ => self.chart_weight.clone(),
        }
    }

    /// Seeded chart points; sphere points stay 0.2 away from the poles.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut s = Sampler::new(seed);
        (0..count)
            .map(|_| match &self.embedding {
                Embedding::Sphere2 { .. } => vec![s.uniform(0.2, PI - 0.2), s.uniform(0.0, TAU)],
                _ => self.periods().unwrap().iter().map(|l| s.uniform(0.0, *l)).collect(),
            })
            .collect()
    }

    pub fn geometry(&self, u: &[f64]) -> Result<ChartGeometry, SpectraError> {
        let m = self.dim();
        let big = self.ambient_dim();
        let jets = self.coords.iter().map(|x| x.jet(u)).collect::<Result<Vec<_>, _>>()?;
        let point: Vec<f64> = jets.iter().map(|j| j.value()).collect();
        let tangents: Vec<Vec<f64>> = (0..m).map(|i| jets.iter().map(|j| j.d(i)).collect()).collect();
        let second: Vec<Vec<Vec<f64>>> =
            (0..m).map(|i| (0..m).map(|k| jets.iter().map(|j| j.hess(i, k)).collect()).collect()).collect();
        let metric: Vec<Vec<f64>> =
            (0..m).map(|i| (0..m).map(|k| dotv(&tangents[i], &tangents[k])).collect()).collect();
        let inverse = inverse_small(&metric).ok_or_else(|| {
            SpectraError::UnsupportedEmbedding(format!("{}: chart metric degenerate at {u:?}", self.embedding))
        })?;
        let mut christoffel = vec![vec![vec![0.0; m]; m]; m];
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    christoffel[k][i][j] = (0..m).map(|l| inverse[k][l] * dotv(&second[i][j], &tangents[l])).sum();
                }
            }
        }
        let mut mean_curvature = vec![0.0; big];
        for i in 0..m {
            for j in 0..m {
                for a in 0..big {
                    let normal_part =
                        second[i][j][a] - (0..m).map(|k| christoffel[k][i][j] * tangents[k][a]).sum::<f64>();
                    mean_curvature[a] += inverse[i][j] * normal_part / m as f64;
                }
            }
        }
        Ok(ChartGeometry { point, tangents, second, metric, inverse, christoffel, mean_curvature })
    }

    /// Residual of m²|H|² + |∇f|² = |m H_f − ∇̄f|² at a chart point, with
    /// H_f = H + (1/m)(∇̄f)^⊥. The left side uses the closed-form |H|² and
    /// the chart gradient of f∘X; the right side uses the jet-computed H and
    /// the ambient gradient.
    pub fn rewrite_residual(&self, u: &[f64]) -> Result<f64, SpectraError> {
        let g = self.geometry(u)?;
        let m = self.dim();
        let lhs = (m * m) as f64 * self.mean_curvature_sq() + self.chart_grad_sq(&g, u)?;
        let grad = self.weight.jet(&g.point)?.grad().to_vec();
        let tangential = self.tangential(&g, &grad);
        let rhs: f64 = (0..self.ambient_dim())
            .map(|a| {
                let perp = grad[a] - tangential[a];
                let hf = g.mean_curvature[a] + perp / m as f64;
                let v = m as f64 * hf - grad[a];
                v * v
            })
            .sum();
        Ok((lhs - rhs).abs() / lhs.abs().max(1.0))
    }

    /// |∇(f∘X)|² in the chart metric.
    fn chart_grad_sq(&self, g: &ChartGeometry, u: &[f64]) -> Result<f64, SpectraError> {
        let fj = self.chart_weight.jet(u)?;
        let m = self.dim();
        Ok((0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| g.inverse[i][j] * fj.d(i) * fj.d(j)).sum())
    }

    /// Tangential projection of an ambient vector.
    fn tangential(&self, g: &ChartGeometry, v: &[f64]) -> Vec<f64> {
        let m = self.dim();
        let mut out = vec![0.0; self.ambient_dim()];
        for i in 0..m {
            for j in 0..m {
                let c = g.inverse[i][j] * dotv(v, &g.tangents[j]);
                for (a, o) in out.iter_mut().enumerate() {
                    *o += c * g.tangents[i][a];
                }
            }
        }
        out
    }
}

/// Maximum residuals of the trace identities over the sample points.
#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub embedding: String,
    pub weight: String,
    pub points: usize,
    /// Σ_l (Δ_f X_l)² against m²|H|² + |∇f|².
    pub laplacian_residual: f64,
    /// Σ_l |∇X_l|² against m.
    pub gradient_residual: f64,
    /// Σ_l |∇_{∇X_l} ω|² against |∇ω|².
    pub covariant_residual: f64,
    /// m²|H|² + |∇f|² against |m H_f − ∇̄f|².
    pub rewrite_residual: f64,
    pub max_residual: f64,
}

fn tuples(m: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..p {
        out = out.into_iter().flat_map(|t| (0..m).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out
}

/// Chart components ω_J and ∂_kω_J of a coordinate-basis form.
fn form_jet(omega: &ChartForm, u: &[f64]) -> Result<(Vec<(Mask, f64)>, Vec<(Mask, Vec<f64>)>), SpectraError> {
    let mut vals = Vec::new();
    let mut grads = Vec::new();
    for (mask, c) in &omega.components {
        let j = c.jet(u)?;
        vals.push((*mask, j.value()));
        grads.push((*mask, j.grad().to_vec()));
    }
    Ok((vals, grads))
}

/// Evaluate all three trace identities and the H_f rewrite at each chart
/// point. `omega` is given in the coordinate basis du^J.
pub fn trace_identities(
    emb: &EmbeddingData,
    omega: &ChartForm,
    points: &[Vec<f64>],
) -> Result<TraceReport, SpectraError> {
    let m = emb.dim();
    let p = omega.degree;
    if omega.dim != m {
        return Err(SpectraError::InvalidDegree { p, top: m });
    }
    let pf: f64 = (1..=p).map(|i| i as f64).product();
    let all = tuples(m, p);
    let (mut lap, mut grd, mut cov, mut rew) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for u in points {
        let g = emb.geometry(u)?;
        let fj = emb.chart_weight.jet(u)?;
        let jets = emb.coords.iter().map(|x| x.jet(u)).collect::<Result<Vec<_>, _>>()?;

        // Δ_f X_l = −g^{ij}(∂_ijX_l − Γ^k_ij ∂_kX_l) + g^{ij} ∂_i f ∂_j X_l.
        let mut sum_sq = 0.0;
        let mut sum_grad = 0.0;
        for xl in &jets {
            let mut v = 0.0;
            let mut gr = 0.0;
            for i in 0..m {
                for j in 0..m {
                    let hess = xl.hess(i, j) - (0..m).map(|k| g.christoffel[k][i][j] * xl.d(k)).sum::<f64>();
                    v += g.inverse[i][j] * (fj.d(i) * xl.d(j) - hess);
                    gr += g.inverse[i][j] * xl.d(i) * xl.d(j);
                }
            }
            sum_sq += v * v;
            sum_grad += gr;
        }
        let expect = (m * m) as f64 * emb.mean_curvature_sq() + emb.chart_grad_sq(&g, u)?;
        lap = lap.max((sum_sq - expect).abs() / expect.abs().max(1.0));
        grd = grd.max((sum_grad - m as f64).abs());

        // ∇_kω_J = ∂_kω_J − Σ_s Γ^r_{k j_s} ω_{J[s→r]} over all index tuples.
        let (vals, grads) = form_jet(omega, u)?;
        let comp = |t: &[usize]| -> f64 {
            match canonical(t) {
                Some((mk, s)) => vals.iter().find(|(mm, _)| *mm == mk).map_or(0.0, |(_, v)| s * v),
                None => 0.0,
            }
        };
        let dcomp = |t: &[usize], k: usize| -> f64 {
            match canonical(t) {
                Some((mk, s)) => grads.iter().find(|(mm, _)| *mm == mk).map_or(0.0, |(_, v)| s * v[k]),
                None => 0.0,
            }
        };
        let nabla: Vec<Vec<f64>> = (0..m)
            .map(|k| {
                all.iter()
                    .map(|t| {
                        let mut v = dcomp(t, k);
                        for s in 0..t.len() {
                            for r in 0..m {
                                let mut tr = t.clone();
                                tr[s] = r;
                                v -= g.christoffel[r][k][t[s]] * comp(&tr);
                            }
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        // ⟨α, β⟩ for p-tensors stored over all tuples, with the 1/p! form norm.
        let pair = |a: &[f64], b: &[f64]| -> f64 {
            let mut acc = 0.0;
            for (x, tj) in all.iter().enumerate() {
                for (y, tb) in all.iter().enumerate() {
                    let w: f64 = tj.iter().zip(tb).map(|(&i, &j)| g.inverse[i][j]).product();
                    acc += w * a[x] * b[y];
                }
            }
            acc / pf
        };
        let full: f64 = (0..m).flat_map(|k| (0..m).map(move |a| (k, a))).map(|(k, a)| g.inverse[k][a] * pair(&nabla[k], &nabla[a])).sum();
        let mut along = 0.0;
        for xl in &jets {
            let vk: Vec<f64> = (0..m).map(|k| (0..m).map(|i| g.inverse[k][i] * xl.d(i)).sum()).collect();
            let dir: Vec<f64> = (0..all.len()).map(|x| (0..m).map(|k| vk[k] * nabla[k][x]).sum()).collect();
            along += pair(&dir, &dir);
        }
        cov = cov.max((along - full).abs() / full.abs().max(1.0));
        rew = rew.max(emb.rewrite_residual(u)?);
    }
    Ok(TraceReport {
        embedding: emb.embedding.to_string(),
        weight: emb.weight.to_string(),
        points: points.len(),
        laplacian_residual: lap,
        gradient_residual: grd,
        covariant_residual: cov,
        rewrite_residual: rew,
        max_residual: lap.max(grd).max(cov).max(rew),
    })
}
