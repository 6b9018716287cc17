//! Per-cell Whitney form geometry: barycentric gradients, weighted
//! barycentric moments, local mass blocks, interpolation and evaluation.

use crate::fields::{simplex_rule, FieldError, PFormField, ScalarField};
use crate::mesh::SimplicialComplex;
use crate::ops::{det, FormValue};

use super::DiscreteError;

pub(crate) const MIN_VOLUME: f64 = 1e-14;

/// Affine geometry of one simplex in ambient (or chart) coordinates.
#[derive(Clone, Debug)]
pub struct CellGeometry {
    pub coords: Vec<Vec<f64>>,
    pub volume: f64,
    /// ∇λ_i as ambient vectors, i = 0..=k.
    pub grads: Vec<Vec<f64>>,
}

impl CellGeometry {
    /// Fails with the (near-zero) volume for degenerate simplices.
    pub fn new(coords: Vec<Vec<f64>>) -> Result<Self, f64> {
        let k = coords.len() - 1;
        let dim = coords[0].len();
        let edges: Vec<Vec<f64>> = (1..=k).map(|i| (0..dim).map(|a| coords[i][a] - coords[0][a]).collect()).collect();
        let gram: Vec<Vec<f64>> = edges.iter().map(|u| edges.iter().map(|v| dotv(u, v)).collect()).collect();
        let g = det(&gram);
        let kfact: f64 = (1..=k).map(|i| i as f64).product();
        let volume = g.max(0.0).sqrt() / kfact;
        if volume < MIN_VOLUME && k > 0 {
            return Err(volume);
        }
        let inv = small_inverse(&gram).ok_or(volume)?;
        let mut grads = vec![vec![0.0; dim]; k + 1];
        for i in 0..k {
            for j in 0..k {
                for a in 0..dim {
                    grads[i + 1][a] += inv[i][j] * edges[j][a];
                }
            }
        }
        for a in 0..dim {
            grads[0][a] = -(1..=k).map(|i| grads[i][a]).sum::<f64>();
        }
        Ok(CellGeometry { coords, volume: if k == 0 { 1.0 } else { volume }, grads })
    }

    pub fn top_dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn point(&self, bary: &[f64]) -> Vec<f64> {
        let dim = self.coords[0].len();
        (0..dim).map(|a| bary.iter().zip(&self.coords).map(|(b, x)| b * x[a]).sum()).collect()
    }

    pub fn grad_gram(&self) -> Vec<Vec<f64>> {
        self.grads.iter().map(|u| self.grads.iter().map(|v| dotv(u, v)).collect()).collect()
    }

    /// Φ[a][b] = ∫ λ_a λ_b e^{−f} over the cell.
    pub fn weighted_moments(
        &self,
        weight: &ScalarField,
        order: usize,
        periods: Option<&[f64]>,
    ) -> Result<Vec<Vec<f64>>, FieldError> {
        let k = self.top_dim();
        let mut phi = vec![vec![0.0; k + 1]; k + 1];
        if let Some(c) = weight.as_const() {
            let rule = reference_moments(k, order);
            let s = self.volume * (-c).exp();
            for a in 0..=k {
                for b in 0..=k {
                    phi[a][b] = s * rule[a][b];
                }
            }
            return Ok(phi);
        }
        for (bary, w) in simplex_rule(k, order) {
            let x = wrap(self.point(&bary), periods);
            let wq = w * self.volume * (-weight.value(&x)?).exp();
            for a in 0..=k {
                for b in 0..=k {
                    phi[a][b] += wq * bary[a] * bary[b];
                }
            }
        }
        Ok(phi)
    }

    /// Local Whitney mass block for p-forms; rows/columns follow
    /// `local_faces(k, p)`.
    pub fn whitney_mass(&self, p: usize, phi: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let faces = local_faces(self.top_dim(), p);
        let gg = self.grad_gram();
        let pf: f64 = (1..=p).map(|i| i as f64).product();
        let mut out = vec![vec![0.0; faces.len()]; faces.len()];
        for (i, s) in faces.iter().enumerate() {
            for (j, t) in faces.iter().enumerate().skip(i) {
                let mut acc = 0.0;
                for (js, &a) in s.iter().enumerate() {
                    let sr: Vec<usize> = without(s, js);
                    for (jt, &b) in t.iter().enumerate() {
                        let tr: Vec<usize> = without(t, jt);
                        let m: Vec<Vec<f64>> = sr.iter().map(|&u| tr.iter().map(|&v| gg[u][v]).collect()).collect();
                        let sign = if (js + jt) % 2 == 0 { 1.0 } else { -1.0 };
                        acc += sign * det(&m) * phi[a][b];
                    }
                }
                out[i][j] = pf * pf * acc;
                out[j][i] = out[i][j];
            }
        }
        out
    }

    /// Whitney form of the local face `face` at barycentric point `bary`.
    pub fn whitney_form(&self, face: &[usize], bary: &[f64]) -> FormValue {
        let dim = self.coords[0].len();
        let p = face.len() - 1;
        let pf: f64 = (1..=p).map(|i| i as f64).product();
        let mut out = FormValue::zero(p, dim);
        for j in 0..face.len() {
            let mut acc = FormValue::scalar(dim, 1.0);
            for &u in without(face, j).iter().rev() {
                acc = FormValue::wedge_one(&FormValue::covector(&self.grads[u]), &acc);
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            out = out + acc * (sign * pf * bary[face[j]]);
        }
        out
    }
}

/// All (p+1)-subsets of 0..=k in lexicographic order.
pub fn local_faces(k: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=k {
            if k + 1 - i < left {
                break;
            }
            cur.push(i);
            rec(i + 1, k, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= k {
        rec(0, k, p + 1, &mut Vec::new(), &mut out);
    }
    out
}

/// ∫_σ ω over an oriented p-simplex given by its vertex coordinates.
pub fn simplex_integral(
    field: &PFormField,
    coords: &[Vec<f64>],
    order: usize,
    periods: Option<&[f64]>,
) -> Result<f64, FieldError> {
    let p = coords.len() - 1;
    let dim = coords[0].len();
    let geom = CellGeometry { coords: coords.to_vec(), volume: 1.0, grads: vec![] };
    if p == 0 {
        let x = wrap(coords[0].clone(), periods);
        return field.component(&[]).value(&x);
    }
    let edges: Vec<Vec<f64>> = (1..=p).map(|i| (0..dim).map(|a| coords[i][a] - coords[0][a]).collect()).collect();
    let comps: Vec<(Vec<usize>, f64, &ScalarField)> = field
        .components()
        .map(|(m, c)| {
            let idx = crate::fields::mask_indices(m);
            let minor: Vec<Vec<f64>> = edges.iter().map(|e| idx.iter().map(|&a| e[a]).collect()).collect();
            (idx, det(&minor), c)
        })
        .collect();
    let pf: f64 = (1..=p).map(|i| i as f64).product();
    let mut acc = 0.0;
    for (bary, w) in simplex_rule(p, order) {
        let x = wrap(geom.point(&bary), periods);
        let mut v = 0.0;
        for (_, minor, c) in &comps {
            if *minor != 0.0 {
                v += minor * c.value(&x)?;
            }
        }
        acc += w * v;
    }
    Ok(acc / pf)
}

pub(crate) fn cell_geometry(k: &SimplicialComplex, cell: usize) -> Result<CellGeometry, DiscreteError> {
    let t = &k.simplices(k.top_dim())[cell];
    CellGeometry::new(k.simplex_coords(t)).map_err(|volume| DiscreteError::SingularCell { cell, volume })
}

fn reference_moments(k: usize, order: usize) -> Vec<Vec<f64>> {
    let mut phi = vec![vec![0.0; k + 1]; k + 1];
    for (bary, w) in simplex_rule(k, order) {
        for a in 0..=k {
            for b in 0..=k {
                phi[a][b] += w * bary[a] * bary[b];
            }
        }
    }
    phi
}

pub(crate) fn wrap(mut x: Vec<f64>, periods: Option<&[f64]>) -> Vec<f64> {
    if let Some(per) = periods {
        for (a, l) in per.iter().enumerate() {
            x[a] = x[a].rem_euclid(*l);
        }
    }
    x
}

fn without(s: &[usize], j: usize) -> Vec<usize> {
    s.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| *v).collect()
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gauss-Jordan inverse with partial pivoting for the small Gram matrices.
fn small_inverse(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, piv);
        inv.swap(c, piv);
        let d = a[c][c];
        for j in 0..n {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                if f != 0.0 {
                    for j in 0..n {
                        a[r][j] -= f * a[c][j];
                        inv[r][j] -= f * inv[c][j];
                    }
                }
            }
        }
    }
    Some(inv)
}
