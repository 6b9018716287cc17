use serde::Serialize;

use super::quadrature::{box_rule, shell_rule, sphere_rule, QuadratureRule};
use super::FieldError;

/// Flat domains in R^D with exactly known boundary geometry. Balls and
/// annuli are centered at the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlatDomain {
    Ball { radius: f64, dim: usize },
    Annulus { inner: f64, outer: f64, dim: usize },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryComponent {
    /// Round sphere |x| = radius. `outer` spheres have inner normal −x/R and
    /// curvature +1/R; inner spheres of an annulus have normal +x/r and
    /// curvature −1/r.
    Sphere { radius: f64, outer: bool },
    /// Face x_axis = value; `upper` faces have inner normal −e_axis.
    Face { axis: usize, value: f64, upper: bool },
}

/// Geometry of the boundary at one point: inner unit normal, an orthonormal
/// tangent frame which is also a principal frame, and the principal
/// curvatures along that frame.
#[derive(Clone, Debug)]
pub struct BoundaryFrame {
    pub component: usize,
    pub normal: Vec<f64>,
    pub tangents: Vec<Vec<f64>>,
    pub curvatures: Vec<f64>,
}

impl BoundaryFrame {
    /// Boundary dimension n.
    pub fn n(&self) -> usize {
        self.tangents.len()
    }

    /// Mean curvature H = (1/n) Σ η_i.
    pub fn mean_curvature(&self) -> f64 {
        if self.curvatures.is_empty() {
            return 0.0;
        }
        self.curvatures.iter().sum::<f64>() / self.curvatures.len() as f64
    }

    /// Replace the tangent frame (e.g. by a chart frame). Only valid on
    /// umbilic components, where every orthonormal frame is principal.
    pub fn with_tangents(mut self, tangents: Vec<Vec<f64>>) -> Self {
        assert_eq!(tangents.len(), self.tangents.len());
        let k = self.curvatures[0];
        assert!(self.curvatures.iter().all(|c| (c - k).abs() < 1e-14), "frame swap needs an umbilic boundary");
        self.tangents = tangents;
        self
    }
}

/// A boundary quadrature rule with the inner normal and component id per point.
#[derive(Clone, Debug)]
pub struct BoundaryRule {
    pub rule: QuadratureRule,
    pub normals: Vec<Vec<f64>>,
    pub components: Vec<usize>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Tangent frame by Gram–Schmidt of e_1, e_2, … against the normal, skipping
/// candidates that are nearly dependent.
pub fn tangent_frame(normal: &[f64]) -> Vec<Vec<f64>> {
    let dim = normal.len();
    let mut basis: Vec<Vec<f64>> = vec![normal.to_vec()];
    let mut out = Vec::new();
    for a in 0..dim {
        if out.len() == dim - 1 {
            break;
        }
        let mut v = vec![0.0; dim];
        v[a] = 1.0;
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let nv = norm(&v);
        if nv > 0.5 {
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v.clone());
            out.push(v);
        }
    }
    assert_eq!(out.len(), dim - 1, "tangent frame construction failed");
    out
}

const ON_BOUNDARY_TOL: f64 = 1e-9;

impl FlatDomain {
    pub fn ball(radius: f64, dim: usize) -> Self {
        FlatDomain::Ball { radius, dim }
    }

    pub fn annulus(inner: f64, outer: f64, dim: usize) -> Self {
        FlatDomain::Annulus { inner, outer, dim }
    }

    pub fn dim(&self) -> usize {
        match self {
            FlatDomain::Ball { dim, .. } | FlatDomain::Annulus { dim, .. } => *dim,
            FlatDomain::Box { lo, .. } => lo.len(),
        }
    }

    /// Short label, e.g. `ball(R=1,D=3)`.
    pub fn descriptor(&self) -> String {
        match self {
            FlatDomain::Ball { radius, dim } => format!("ball(R={radius},D={dim})"),
            FlatDomain::Annulus { inner, outer, dim } => format!("annulus(r={inner},R={outer},D={dim})"),
            FlatDomain::Box { lo, hi } => format!("box(lo={lo:?},hi={hi:?})"),
        }
    }

    pub fn boundary_components(&self) -> Vec<BoundaryComponent> {
        match self {
            FlatDomain::Ball { radius, .. } => vec![BoundaryComponent::Sphere { radius: *radius, outer: true }],
            FlatDomain::Annulus { inner, outer, .. } => vec![
                BoundaryComponent::Sphere { radius: *outer, outer: true },
                BoundaryComponent::Sphere { radius: *inner, outer: false },
            ],
            FlatDomain::Box { lo, hi } => (0..lo.len())
                .flat_map(|a| {
                    [
                        BoundaryComponent::Face { axis: a, value: lo[a], upper: false },
                        BoundaryComponent::Face { axis: a, value: hi[a], upper: true },
                    ]
                })
                .collect(),
        }
    }

    fn check_dim(&self) -> Result<(), FieldError> {
        let d = self.dim();
        if !(1..=3).contains(&d) {
            return Err(FieldError::UnsupportedDimension(d));
        }
        Ok(())
    }

    /// Interior quadrature rule.
    pub fn quad_domain(&self, order: usize) -> Result<QuadratureRule, FieldError> {
        self.check_dim()?;
        match self {
            FlatDomain::Ball { radius, dim } => shell_rule(*dim, 0.0, *radius, order),
            FlatDomain::Annulus { inner, outer, dim } => shell_rule(*dim, *inner, *outer, order),
            FlatDomain::Box { lo, hi } => box_rule(lo, hi, order),
        }
    }

    /// Boundary quadrature rule with normals.
    pub fn quad_boundary(&self, order: usize) -> Result<BoundaryRule, FieldError> {
        self.check_dim()?;
        let dim = self.dim();
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut normals = Vec::new();
        let mut components = Vec::new();
        for (ci, comp) in self.boundary_components().iter().enumerate() {
            let part = match comp {
                BoundaryComponent::Sphere { radius, .. } => sphere_rule(dim, *radius, order)?,
                BoundaryComponent::Face { axis, value, .. } => {
                    let FlatDomain::Box { lo, hi } = self else { unreachable!() };
                    let (l, h): (Vec<f64>, Vec<f64>) =
                        (0..dim).filter(|&a| a != *axis).map(|a| (lo[a], hi[a])).unzip();
                    let face = if l.is_empty() {
                        QuadratureRule { dim: 0, points: vec![vec![]], weights: vec![1.0], exactness_degree: order }
                    } else {
                        box_rule(&l, &h, order)?
                    };
                    let pts = face
                        .points
                        .iter()
                        .map(|p| {
                            let mut q = p.clone();
                            q.insert(*axis, *value);
                            q
                        })
                        .collect();
                    QuadratureRule { dim, points: pts, weights: face.weights, exactness_degree: order }
                }
            };
            for (p, w) in part.points.into_iter().zip(part.weights) {
                normals.push(self.component_normal(comp, &p));
                components.push(ci);
                points.push(p);
                weights.push(w);
            }
        }
        Ok(BoundaryRule { rule: QuadratureRule { dim, points, weights, exactness_degree: order }, normals, components })
    }

    fn component_normal(&self, comp: &BoundaryComponent, x: &[f64]) -> Vec<f64> {
        match comp {
            BoundaryComponent::Sphere { outer, .. } => {
                let r = norm(x);
                let s = if *outer { -1.0 / r } else { 1.0 / r };
                x.iter().map(|c| c * s).collect()
            }
            BoundaryComponent::Face { axis, upper, .. } => {
                let mut n = vec![0.0; x.len()];
                n[*axis] = if *upper { -1.0 } else { 1.0 };
                n
            }
        }
    }

    fn component_curvature(comp: &BoundaryComponent) -> f64 {
        match comp {
            BoundaryComponent::Sphere { radius, outer } => {
                if *outer {
                    1.0 / radius
                } else {
                    -1.0 / radius
                }
            }
            BoundaryComponent::Face { .. } => 0.0,
        }
    }

    /// Which boundary component contains x, if any.
    pub fn locate(&self, x: &[f64]) -> Result<usize, FieldError> {
        if x.len() != self.dim() {
            return Err(FieldError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let r = norm(x);
        for (ci, comp) in self.boundary_components().iter().enumerate() {
            let hit = match comp {
                BoundaryComponent::Sphere { radius, .. } => (r - radius).abs() <= ON_BOUNDARY_TOL * radius.max(1.0),
                BoundaryComponent::Face { axis, value, .. } => {
                    let FlatDomain::Box { lo, hi } = self else { unreachable!() };
                    (x[*axis] - value).abs() <= ON_BOUNDARY_TOL
                        && (0..x.len()).all(|a| x[a] >= lo[a] - ON_BOUNDARY_TOL && x[a] <= hi[a] + ON_BOUNDARY_TOL)
                }
            };
            if hit {
                return Ok(ci);
            }
        }
        Err(FieldError::NotOnBoundary(x.to_vec()))
    }

    /// Normal, principal tangent frame and curvatures at a boundary point.
    pub fn boundary_frame(&self, x: &[f64]) -> Result<BoundaryFrame, FieldError> {
        let ci = self.locate(x)?;
        let comp = &self.boundary_components()[ci];
        let normal = self.component_normal(comp, x);
        let tangents = tangent_frame(&normal);
        let k = Self::component_curvature(comp);
        Ok(BoundaryFrame { component: ci, normal, curvatures: vec![k; tangents.len()], tangents })
    }

    /// Principal curvatures (sorted) of boundary component `ci`.
    pub fn principal_curvatures(&self, ci: usize) -> Vec<f64> {
        let comps = self.boundary_components();
        vec![Self::component_curvature(&comps[ci]); self.dim() - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn basic_measures() {
        let b2 = FlatDomain::ball(1.0, 2).quad_domain(4).unwrap();
        assert!((b2.integrate(|_| 1.0) - PI).abs() < 1e-13);
        let s2 = FlatDomain::ball(1.0, 3).quad_boundary(4).unwrap().rule;
        assert!((s2.integrate(|_| 1.0) - 4.0 * PI).abs() < 1e-13);
        assert!((s2.integrate(|x| x[0] * x[0]) - 4.0 * PI / 3.0).abs() < 1e-13);
        let b3 = FlatDomain::ball(1.0, 3).quad_domain(4).unwrap();
        assert!((b3.integrate(|x| x[0] * x[0]) - 4.0 * PI / 15.0).abs() < 1e-13);
    }

    #[test]
    fn inner_normal_signs() {
        let a = FlatDomain::annulus(0.5, 1.0, 2);
        let outer = a.boundary_frame(&[1.0, 0.0]).unwrap();
        assert_eq!(outer.normal, vec![-1.0, 0.0]);
        assert_eq!(outer.curvatures, vec![1.0]);
        let inner = a.boundary_frame(&[0.0, 0.5]).unwrap();
        assert_eq!(inner.normal, vec![0.0, 1.0]);
        assert_eq!(inner.curvatures, vec![-2.0]);
        assert!(matches!(a.boundary_frame(&[0.7, 0.0]), Err(FieldError::NotOnBoundary(_))));
    }

    #[test]
    fn box_boundary_area() {
        let b = FlatDomain::Box { lo: vec![0.0, 0.0, 0.0], hi: vec![1.0, 2.0, 3.0] };
        let r = b.quad_boundary(2).unwrap();
        assert!((r.rule.integrate(|_| 1.0) - 22.0).abs() < 1e-13);
    }
}
