//! Intrinsic calculus on round circles and 2-spheres in angle charts.

use std::collections::BTreeMap;

use crate::fields::{canonical, mask_indices, masks_of_degree, Jet2, Mask, PFormField, ScalarField};

use super::flat::{d, FormJet1};
use super::value::FormValue;
use super::OpError;

/// Points closer than this (in colatitude) to a pole are rejected.
pub const POLE_EXCLUSION: f64 = 1e-3;

/// Angle chart on the sphere of radius R in R^{dim+1}: θ on S¹, and
/// (θ colatitude, φ azimuth) on S².
#[derive(Clone, Debug, PartialEq)]
pub struct SphereChart {
    pub dim: usize,
    pub radius: f64,
}

/// A form on the chart domain with coefficient fields in chart coordinates
/// (coordinate basis du^J).
#[derive(Clone, Debug)]
pub struct ChartForm {
    pub degree: usize,
    pub dim: usize,
    pub components: BTreeMap<Mask, ScalarField>,
}

impl ChartForm {
    pub fn zero(degree: usize, dim: usize) -> Self {
        ChartForm { degree, dim, components: BTreeMap::new() }
    }

    pub fn with(mut self, indices: &[usize], c: ScalarField) -> Self {
        if let Some((m, s)) = canonical(indices) {
            let c = if s < 0.0 { -c } else { c };
            let cur = self.components.remove(&m).unwrap_or_else(ScalarField::zero);
            self.components.insert(m, cur + c);
        }
        self
    }

    fn jets(&self, u: &[f64]) -> Result<BTreeMap<Mask, Jet2>, OpError> {
        self.components.iter().map(|(m, c)| Ok((*m, c.jet(u)?))).collect()
    }

    /// Coordinate-basis coefficient values at u.
    pub fn values(&self, u: &[f64]) -> Result<FormValue, OpError> {
        let mut w = FormValue::zero(self.degree, self.dim);
        for (m, c) in &self.components {
            w.set_mask(*m, c.value(u)?);
        }
        Ok(w)
    }
}

/// d^{∂M}η and δ_f^{∂M}η in the orthonormal chart frame.
#[derive(Clone, Debug)]
pub struct ChartCalculus {
    pub d: Option<FormValue>,
    pub delta_f: Option<FormValue>,
}

fn det_expr(m: &[Vec<ScalarField>]) -> ScalarField {
    match m.len() {
        0 => ScalarField::one(),
        1 => m[0][0].clone(),
        2 => m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone(),
        _ => {
            // Cofactor expansion along the first row.
            let n = m.len();
            (0..n).fold(ScalarField::zero(), |acc, j| {
                let minor: Vec<Vec<ScalarField>> =
                    (1..n).map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c].clone()).collect()).collect();
                let t = m[0][j].clone() * det_expr(&minor);
                if j % 2 == 0 {
                    acc + t
                } else {
                    acc - t
                }
            })
        }
    }
}

impl SphereChart {
    pub fn new(dim: usize, radius: f64) -> Result<Self, OpError> {
        if !(1..=2).contains(&dim) {
            return Err(OpError::UnsupportedChart(dim));
        }
        Ok(SphereChart { dim, radius })
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim + 1
    }

    /// Embedding X(u) as fields in chart coordinates.
    pub fn embedding(&self) -> Vec<ScalarField> {
        let r = ScalarField::constant(self.radius);
        let t = ScalarField::coord(0);
        match self.dim {
            1 => vec![r.clone() * t.cos(), r * t.sin()],
            _ => {
                let p = ScalarField::coord(1);
                vec![
                    r.clone() * t.sin() * p.cos(),
                    r.clone() * t.sin() * p.sin(),
                    r * t.cos(),
                ]
            }
        }
    }

    /// Diagonal metric coefficients g_jj.
    pub fn metric(&self) -> Vec<ScalarField> {
        let r2 = ScalarField::constant(self.radius * self.radius);
        match self.dim {
            1 => vec![r2],
            _ => {
                let s = ScalarField::coord(0).sin();
                vec![r2.clone(), r2 * s.clone() * s]
            }
        }
    }

    /// Chart coordinates of an ambient point on the sphere.
    pub fn coords_of(&self, x: &[f64]) -> Result<Vec<f64>, OpError> {
        match self.dim {
            1 => Ok(vec![x[1].atan2(x[0])]),
            _ => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
                if theta < POLE_EXCLUSION || std::f64::consts::PI - theta < POLE_EXCLUSION {
                    return Err(OpError::PoleProximity(x.to_vec()));
                }
                Ok(vec![theta, x[1].atan2(x[0])])
            }
        }
    }

    /// Orthonormal frame scale factors h_j = √g_jj at u.
    pub fn scales(&self, u: &[f64]) -> Vec<f64> {
        match self.dim {
            1 => vec![self.radius],
            _ => vec![self.radius, self.radius * u[0].sin()],
        }
    }

    /// Ambient orthonormal tangent frame t_j = ∂_jX / h_j at u.
    pub fn frame(&self, u: &[f64]) -> Result<Vec<Vec<f64>>, OpError> {
        let x = self.embedding();
        let h = self.scales(u);
        (0..self.dim)
            .map(|j| x.iter().map(|c| Ok(c.jet(u)?.d(j) / h[j])).collect::<Result<Vec<f64>, OpError>>())
            .collect()
    }

    /// Christoffel symbols Γ^k_{ij} of the round metric at u.
    pub fn christoffel(&self, u: &[f64]) -> Result<Vec<Vec<Vec<f64>>>, OpError> {
        let n = self.dim;
        let g: Vec<Jet2> = self.metric().iter().map(|c| c.jet(u)).collect::<Result<_, _>>()?;
        let mut gam = vec![vec![vec![0.0; n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    // Diagonal metric: Γ^k_ij = ½ g^kk (∂_i g_kj + ∂_j g_ki − ∂_k g_ij).
                    let dgkj = if k == j { g[k].d(i) } else { 0.0 };
                    let dgki = if k == i { g[k].d(j) } else { 0.0 };
                    let dgij = if i == j { g[i].d(k) } else { 0.0 };
                    gam[k][i][j] = 0.5 / g[k].value() * (dgkj + dgki - dgij);
                }
            }
        }
        Ok(gam)
    }

    /// J*ω as a chart form: (J*ω)_J = Σ_I ω_I(X(u)) det(∂X^I/∂u^J).
    pub fn pullback(&self, w: &PFormField) -> ChartForm {
        assert_eq!(w.dim(), self.ambient_dim());
        let x = self.embedding();
        let dx: Vec<Vec<ScalarField>> = x.iter().map(|c| (0..self.dim).map(|j| c.derivative(j)).collect()).collect();
        let p = w.degree();
        let mut out = ChartForm::zero(p, self.dim);
        if p > self.dim {
            return out;
        }
        for jm in masks_of_degree(self.dim, p) {
            let jidx = mask_indices(jm);
            let mut acc = ScalarField::zero();
            for (im, c) in w.components() {
                let iidx = mask_indices(im);
                let minor: Vec<Vec<ScalarField>> =
                    iidx.iter().map(|&a| jidx.iter().map(|&b| dx[a][b].clone()).collect()).collect();
                acc = acc + c.substitute(&x) * det_expr(&minor);
            }
            out.components.insert(jm, acc);
        }
        out
    }

    /// The inner normal as ambient fields: −x/R for the outer boundary of a
    /// ball, +x/R for the inner boundary of an annulus.
    pub fn normal_fields(&self, outer: bool) -> Vec<ScalarField> {
        let s = if outer { -1.0 / self.radius } else { 1.0 / self.radius };
        (0..self.ambient_dim()).map(|a| ScalarField::constant(s) * ScalarField::coord(a)).collect()
    }

    /// Convert coordinate-basis coefficients at u to the orthonormal frame.
    pub fn to_frame(&self, w: &FormValue, u: &[f64]) -> FormValue {
        let h = self.scales(u);
        let mut out = *w;
        for m in w.masks() {
            let s: f64 = mask_indices(m).iter().map(|&j| h[j]).product();
            out.set_mask(m, w.get_mask(m) / s);
        }
        out
    }

    /// d^{∂M}η and δ_f^{∂M}η at u, with f the ambient weight restricted to
    /// the sphere.
    pub fn calculus(&self, eta: &ChartForm, f: &ScalarField, u: &[f64]) -> Result<ChartCalculus, OpError> {
        let n = self.dim;
        let p = eta.degree;
        if n == 2 && (u[0] < POLE_EXCLUSION || std::f64::consts::PI - u[0] < POLE_EXCLUSION) {
            return Err(OpError::PoleProximity(u.to_vec()));
        }
        let jets = eta.jets(u)?;
        let get = |m: Mask| jets.get(&m).copied().unwrap_or_else(|| Jet2::constant(n, 0.0));
        let mut value = FormValue::zero(p, n);
        let mut grad = vec![FormValue::zero(p, n); n];
        for m in value.masks() {
            let j = get(m);
            value.set_mask(m, j.value());
            for a in 0..n {
                grad[a].set_mask(m, j.d(a));
            }
        }
        let dval = (p < n).then(|| self.to_frame(&d(&FormJet1 { value, grad }), u));

        let delta = if p == 0 {
            None
        } else {
            let g: Vec<Jet2> = self.metric().iter().map(|c| c.jet(u)).collect::<Result<_, _>>()?;
            let ginv: Vec<Jet2> = g.iter().map(|j| j.recip().expect("degenerate metric")).collect();
            let sqrt_g = g.iter().fold(Jet2::constant(n, 1.0), |acc, j| acc * j.sqrt().expect("degenerate metric"));
            let ft = f.substitute(&self.embedding()).jet(u)?;
            let mut out = FormValue::zero(p - 1, n);
            for km in masks_of_degree(n, p - 1) {
                let kidx = mask_indices(km);
                let raise_k = kidx.iter().fold(Jet2::constant(n, 1.0), |acc, &k| acc * ginv[k]);
                let mut div = 0.0;
                let mut weight = 0.0;
                for i in 0..n {
                    let mut idx = vec![i];
                    idx.extend(&kidx);
                    let Some((m, s)) = canonical(&idx) else { continue };
                    let comp = get(m).scale(s);
                    let upper = sqrt_g * ginv[i] * raise_k * comp;
                    div += upper.d(i);
                    weight += ginv[i].value() * ft.d(i) * comp.value();
                }
                let lower: f64 = kidx.iter().map(|&k| g[k].value()).product();
                let raised = -div / sqrt_g.value();
                out.set_mask(km, lower * raised + weight);
            }
            Some(self.to_frame(&out, u))
        };
        Ok(ChartCalculus { d: dval, delta_f: delta })
    }
}

impl ChartForm {
    /// Coefficients in the orthonormal frame at u.
    pub fn frame_values(&self, chart: &SphereChart, u: &[f64]) -> Result<FormValue, OpError> {
        Ok(chart.to_frame(&self.values(u)?, u))
    }
}

/// Interior product i_F ω as a form field, F given by ambient component fields.
pub fn interior_field(w: &PFormField, field: &[ScalarField]) -> PFormField {
    let p = w.degree();
    let dim = w.dim();
    let mut out = PFormField::zero(p - 1, dim);
    for jm in masks_of_degree(dim, p - 1) {
        let jidx = mask_indices(jm);
        for (a, fa) in field.iter().enumerate() {
            let mut idx = vec![a];
            idx.extend(&jidx);
            let c = w.component(&idx);
            if !c.is_zero() {
                out = out.with(&jidx, fa.clone() * c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_sin_dtheta() {
        let chart = SphereChart::new(1, 1.0).unwrap();
        let eta = ChartForm::zero(1, 1).with(&[0], ScalarField::coord(0).sin());
        let t = 0.7;
        let c = chart.calculus(&eta, &ScalarField::zero(), &[t]).unwrap();
        assert!((c.delta_f.unwrap().get(&[]) + t.cos()).abs() < 1e-15);
        let harmonic = ChartForm::zero(1, 1).with(&[0], ScalarField::one());
        let c = chart.calculus(&harmonic, &ScalarField::zero(), &[t]).unwrap();
        assert_eq!(c.delta_f.unwrap().get(&[]), 0.0);
    }

    #[test]
    fn pullback_of_dz_on_sphere() {
        // J*dz = −R sinθ dθ; frame component −sinθ.
        let chart = SphereChart::new(2, 2.0).unwrap();
        let w = PFormField::zero(1, 3).with(&[2], ScalarField::one());
        let u = [0.9, 0.3];
        let v = chart.pullback(&w).frame_values(&chart, &u).unwrap();
        assert!((v.get(&[0]) + 0.9f64.sin()).abs() < 1e-15);
        assert!(v.get(&[1]).abs() < 1e-15);
        assert!(matches!(chart.coords_of(&[0.0, 0.0, 2.0]), Err(OpError::PoleProximity(_))));
    }
}
