use serde::Serialize;

use crate::fields::{BoundaryFrame, FlatDomain, Jet2, PFormField, ScalarField};

use super::flat::FormJet2;
use super::value::FormValue;
use super::OpError;

/// Boundary quantities of ω at a boundary point, in the principal tangent
/// frame of the domain.
#[derive(Clone, Debug)]
pub struct BoundaryValues {
    pub frame: BoundaryFrame,
    /// J*ω, an n-dimensional p-form.
    pub j_star: FormValue,
    /// i_Nω restricted to the tangent frame; None for 0-forms.
    pub i_n: Option<FormValue>,
    /// S^{[p]}(J*ω).
    pub s_j: FormValue,
    /// S^{[p−1]}(i_Nω).
    pub s_i: Option<FormValue>,
    pub h: f64,
    /// n·H_f = nH + f_N (kept as a product so n = 0 needs no division).
    pub n_h_f: f64,
    pub f_n: f64,
    pub v_n: Option<f64>,
}

impl BoundaryValues {
    /// H_f = H + f_N / n; undefined for n = 0.
    pub fn h_f(&self) -> Option<f64> {
        let n = self.frame.n();
        (n > 0).then(|| self.n_h_f / n as f64)
    }
}

fn diag(c: &[f64]) -> Vec<Vec<f64>> {
    (0..c.len()).map(|i| (0..c.len()).map(|j| if i == j { c[i] } else { 0.0 }).collect()).collect()
}

/// Shape operator action S^{[p]} on an n-dimensional form in the principal frame.
pub fn shape_action(frame: &BoundaryFrame, w: &FormValue) -> FormValue {
    w.induced(&diag(&frame.curvatures))
}

pub(crate) fn boundary_values_at(
    value: &FormValue,
    frame: BoundaryFrame,
    f: &Jet2,
    v: Option<&Jet2>,
) -> BoundaryValues {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let n = frame.n();
    let j_star = value.restrict(&frame.tangents);
    let i_n = (value.degree() > 0).then(|| value.interior(&frame.normal).restrict(&frame.tangents));
    let s_j = shape_action(&frame, &j_star);
    let s_i = i_n.as_ref().map(|w| shape_action(&frame, w));
    let h = frame.mean_curvature();
    let f_n = dot(f.grad(), &frame.normal);
    let v_n = v.map(|v| dot(v.grad(), &frame.normal));
    BoundaryValues { n_h_f: n as f64 * h + f_n, frame, j_star, i_n, s_j, s_i, h, f_n, v_n }
}

/// J*ω, i_Nω, shape actions and weighted mean curvature at boundary point x.
pub fn boundary_ops(
    w: &PFormField,
    f: &ScalarField,
    v: Option<&ScalarField>,
    domain: &FlatDomain,
    x: &[f64],
) -> Result<BoundaryValues, OpError> {
    let frame = domain.boundary_frame(x)?;
    let j = FormJet2::of(w, x)?;
    let fj = f.jet(x)?;
    let vj = v.map(|v| v.jet(x)).transpose()?;
    Ok(boundary_values_at(&j.value, frame, &fj, vj.as_ref()))
}

/// B_f(ω, ω) computed by both boundary expressions.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BfPair {
    /// ⟨S^{[p]}J*ω, J*ω⟩ + nH_f|i_Nω|² − ⟨S^{[p−1]}i_Nω, i_Nω⟩.
    pub via_mean_curvature: f64,
    /// ⟨S^{[p]}J*ω, J*ω⟩ + ⟨S^{[n+1−p]}J*(*ω), J*(*ω)⟩ + f_N|i_Nω|².
    pub via_star: f64,
}

pub(crate) fn b_f_at(value: &FormValue, bv: &BoundaryValues) -> BfPair {
    let tangential = bv.s_j.dot(&bv.j_star);
    let (normal_sq, s_normal) = match (&bv.i_n, &bv.s_i) {
        (Some(i), Some(si)) => (i.norm2(), si.dot(i)),
        _ => (0.0, 0.0),
    };
    let via_mean_curvature = tangential + bv.n_h_f * normal_sq - s_normal;
    let star = value.hodge_star().restrict(&bv.frame.tangents);
    let via_star = tangential + shape_action(&bv.frame, &star).dot(&star) + bv.f_n * normal_sq;
    BfPair { via_mean_curvature, via_star }
}

/// B_f(ω, ω) at boundary point x, both ways.
pub fn b_f_form(w: &PFormField, f: &ScalarField, domain: &FlatDomain, x: &[f64]) -> Result<BfPair, OpError> {
    let bv = boundary_ops(w, f, None, domain, x)?;
    let value = FormJet2::of(w, x)?.value;
    Ok(b_f_at(&value, &bv))
}

/// Intrinsic Hodge star on an n-dimensional form in an oriented orthonormal frame.
pub fn star_identity_residual(curvatures: &[f64], w: &FormValue) -> f64 {
    let n = curvatures.len();
    let s = diag(curvatures);
    let h: f64 = curvatures.iter().sum::<f64>() / n as f64;
    let lhs = w.induced(&s).hodge_star() + w.hodge_star().induced(&s);
    let rhs = w.hodge_star() * (n as f64 * h);
    (lhs - rhs).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dz_at_north_pole() {
        let w = PFormField::zero(1, 3).with(&[2], ScalarField::one());
        let b = FlatDomain::ball(1.0, 3);
        let bv = boundary_ops(&w, &ScalarField::zero(), None, &b, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(bv.i_n.unwrap().get(&[]), -1.0);
        assert_eq!(bv.j_star.max_abs(), 0.0);
        let pair = b_f_form(&w, &ScalarField::zero(), &b, &[0.0, 0.0, 1.0]).unwrap();
        assert!((pair.via_mean_curvature - 2.0).abs() < 1e-15);
        assert!((pair.via_star - 2.0).abs() < 1e-15);
    }

    #[test]
    fn radial_weight_normal_derivative() {
        let f = ScalarField::constant(0.3) * ScalarField::r2() / ScalarField::constant(2.0);
        let w = PFormField::scalar(3, ScalarField::one());
        let x = [0.6, 0.0, 0.8];
        let bv = boundary_ops(&w, &f, None, &FlatDomain::ball(1.0, 3), &x).unwrap();
        assert!((bv.f_n + 0.3).abs() < 1e-15);
        assert_eq!(bv.h, 1.0);
    }

    #[test]
    fn star_identity_on_diagonal_shape() {
        let k = [0.3, -1.2, 2.0];
        for p in 0..=3 {
            let v: Vec<f64> = (0..crate::fields::binomial(3, p)).map(|i| (i as f64 + 1.0).sin()).collect();
            assert!(star_identity_residual(&k, &FormValue::from_vec(p, 3, &v)) < 1e-14);
        }
    }
}
