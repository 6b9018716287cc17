//! Universal bound on sums of consecutive weighted Hodge eigenvalues of a
//! closed submanifold of Euclidean space.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use crate::discrete::{assemble, CellGeometry};
use crate::fields::simplex_rule;

use super::embedding::{Embedding, EmbeddingData};
use super::hodge::full_spectrum;
use super::{mesh_descriptor, CheckDetail, Constant, SpectraError, TheoremCheck, DEFAULT_TOL_REL};

/// Per-cell quadrature order for the right-hand-side integral.
pub const LP_QUAD_ORDER: usize = 8;
/// Assembly order for the mass matrices.
const ASSEMBLY_ORDER: usize = 8;
/// Grid points per chart direction used for sup Δ_f f.
const SUP_GRID: usize = 96;
/// Points at which the H_f rewrite is checked.
const REWRITE_POINTS: usize = 32;
/// Pointwise tolerance for the H_f rewrite.
pub const REWRITE_TOL: f64 = 1e-9;

/// Intrinsic weight quantities at one mesh point.
struct WeightTerms {
    value: f64,
    grad_sq: f64,
    /// Hess_M f in mesh coordinates (chart or ambient).
    hess: Vec<Vec<f64>>,
    /// Tangent projector in mesh coordinates.
    projector: Vec<Vec<f64>>,
    delta_f_f: f64,
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// Chart meshes are isometric charts, so chart components are orthonormal.
/// On the sphere the mesh point is projected radially and the ambient
/// formulas Hess_M f = P ∇̄²f P − ⟨x̂, ∇̄f⟩ P apply.
fn weight_terms(emb: &EmbeddingData, y: &[f64]) -> Result<WeightTerms, SpectraError> {
    let m = emb.dim();
    match emb.embedding() {
        Embedding::Sphere2 { .. } => {
            let r = y.iter().map(|a| a * a).sum::<f64>().sqrt();
            let x: Vec<f64> = y.iter().map(|a| a / r).collect();
            let j = emb.weight().jet(&x)?;
            let gb = j.grad().to_vec();
            let proj: Vec<Vec<f64>> =
                (0..3).map(|a| (0..3).map(|b| if a == b { 1.0 } else { 0.0 } - x[a] * x[b]).collect()).collect();
            let gt: Vec<f64> = (0..3).map(|a| (0..3).map(|b| proj[a][b] * gb[b]).sum()).collect();
            let radial: f64 = (0..3).map(|a| x[a] * gb[a]).sum();
            let hb = j.hessian();
            let mut hess = vec![vec![0.0; 3]; 3];
            for a in 0..3 {
                for b in 0..3 {
                    let mut acc = 0.0;
                    for c in 0..3 {
                        for d in 0..3 {
                            acc += proj[a][c] * hb[c][d] * proj[d][b];
                        }
                    }
                    hess[a][b] = acc - radial * proj[a][b];
                }
            }
            let grad_sq: f64 = gt.iter().map(|v| v * v).sum();
            let trace: f64 = (0..3).map(|a| hess[a][a]).sum();
            Ok(WeightTerms { value: j.value(), grad_sq, hess, projector: proj, delta_f_f: -trace + grad_sq })
        }
        _ => {
            let periods = emb.periods().unwrap();
            let u: Vec<f64> = y.iter().zip(&periods).map(|(a, l)| a.rem_euclid(*l)).collect();
            let g = emb.geometry(&u)?;
            let j = emb.chart_weight().jet(&u)?;
            let mut hess = vec![vec![0.0; m]; m];
            let mut grad_sq = 0.0;
            let mut lap = 0.0;
            for a in 0..m {
                for b in 0..m {
                    hess[a][b] = j.hess(a, b) - (0..m).map(|k| g.christoffel[k][a][b] * j.d(k)).sum::<f64>();
                    grad_sq += g.inverse[a][b] * j.d(a) * j.d(b);
                }
            }
            for a in 0..m {
                for b in 0..m {
                    lap += g.inverse[a][b] * hess[a][b];
                }
            }
            Ok(WeightTerms { value: j.value(), grad_sq, hess, projector: identity(m), delta_f_f: -lap + grad_sq })
        }
    }
}

/// Mesh-coordinate points covering M for the sampled sup Δ_f f.
fn sup_points(emb: &EmbeddingData) -> Vec<Vec<f64>> {
    match emb.embedding() {
        Embedding::Sphere2 { .. } => {
            let mut out = Vec::new();
            for i in 0..SUP_GRID {
                let th = PI * (i as f64 + 0.5) / SUP_GRID as f64;
                for k in 0..2 * SUP_GRID {
                    let ph = TAU * k as f64 / (2 * SUP_GRID) as f64;
                    out.push(vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
                }
            }
            out
        }
        _ => {
            let periods = emb.periods().unwrap();
            let mut out = vec![Vec::new()];
            for l in periods {
                out = out
                    .into_iter()
                    .flat_map(|t| (0..SUP_GRID).map(move |i| [t.clone(), vec![l * i as f64 / SUP_GRID as f64]].concat()))
                    .collect();
            }
            out
        }
    }
}

/// Check Σ_{l=1}^m λ_{j+l} ≤ (m+4)λ_j + 2 sup Δ_f f
/// + ∫[(m²|H|² + |∇f|²)|ω_j|² − 4⟨W_f ω_j, ω_j⟩] e^{−f}.
///
/// Eigenvalues are 1-indexed and include zero modes; ω_j is the discrete
/// eigenform, mass-orthonormal. `resolution` is passed to
/// [`EmbeddingData::mesh`]. The margin is RHS − LHS.
pub fn lp_check(emb: &EmbeddingData, p: usize, j: usize, resolution: usize) -> Result<TheoremCheck, SpectraError> {
    let m = emb.dim();
    if j == 0 {
        return Err(SpectraError::InvalidDegree { p: j, top: m });
    }
    let w_scalar = emb.weitzenbock_scalar(p)?;
    let mesh = emb.mesh(resolution)?;
    let wc = assemble(&mesh, &emb.mesh_weight(), ASSEMBLY_ORDER)?;
    let spec = full_spectrum(&wc, p, j + m)?;
    if spec.eigenvalues.len() < j + m {
        return Err(SpectraError::EmptySpectrum);
    }
    let lam = &spec.eigenvalues;
    let omega = &spec.vectors[j - 1];

    let h2 = emb.mean_curvature_sq();
    let top = mesh.top_dim();
    let rule = simplex_rule(top, LP_QUAD_ORDER);
    let mut integral = 0.0;
    let mut norm_check = 0.0;
    for (cell, t) in mesh.simplices(top).iter().enumerate() {
        let geom = CellGeometry::new(mesh.simplex_coords(t))
            .map_err(|volume| SpectraError::SolveFailure(format!("degenerate cell {cell} (volume {volume:e})")))?;
        for (bary, w) in &rule {
            let y = geom.point(bary);
            let terms = weight_terms(emb, &y)?;
            let form = wc.reconstruct_in_cell(p, omega, cell, bary)?;
            let n = form.dim();
            let mut curv = terms.hess.clone();
            for a in 0..n {
                for b in 0..n {
                    curv[a][b] += w_scalar * terms.projector[a][b];
                }
            }
            let wf = form.induced(&curv).dot(&form);
            let norm2 = form.norm2();
            let dmu = w * geom.volume * (-terms.value).exp();
            integral += ((m * m) as f64 * h2 + terms.grad_sq) * norm2 * dmu - 4.0 * wf * dmu;
            norm_check += norm2 * dmu;
        }
    }

    let mut sup = f64::NEG_INFINITY;
    for y in sup_points(emb) {
        sup = sup.max(weight_terms(emb, &y)?.delta_f_f);
    }
    let lhs: f64 = lam[j..j + m].iter().sum();
    let rhs = (m + 4) as f64 * lam[j - 1] + 2.0 * sup + integral;

    let rewrite = emb
        .sample_points(REWRITE_POINTS, 7)
        .iter()
        .map(|u| emb.rewrite_residual(u))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let mut constants = BTreeMap::new();
    constants.insert("m".to_string(), Constant::analytic(m as f64));
    constants.insert("mean_curvature_sq".to_string(), Constant::analytic(h2));
    constants.insert("weitzenbock".to_string(), Constant::analytic(w_scalar));
    constants.insert("sup_delta_f_f".to_string(), Constant::sampled(sup));
    constants.insert("lambda_j".to_string(), Constant::computed(lam[j - 1]));
    constants.insert("rhs_integral".to_string(), Constant::computed(integral));
    constants.insert("eigenform_norm".to_string(), Constant::computed(norm_check));
    constants.insert("rewrite_residual".to_string(), Constant::computed(rewrite));
    let detail = CheckDetail { label: format!("p={p} j={j}"), computed: lhs, bound: rhs, margin: rhs - lhs };
    let mut check = TheoremCheck::from_details(
        "thm1.7",
        constants,
        vec![detail],
        DEFAULT_TOL_REL,
        mesh_descriptor(&mesh),
        emb.weight().to_string(),
    )?;
    check.pass &= rewrite <= REWRITE_TOL;
    Ok(check)
}
