//! Pointwise exterior calculus: d, δ_f, ∇, Δ_f^H, the rough Laplacian,
//! Weitzenböck actions, boundary operators and sphere-chart calculus.
//!
//! Sign conventions: Δu = −Σ∂²u, Δ_f u = Δu + ⟨∇f,∇u⟩, δ_f = δ + i_{∇f},
//! N is the inner normal, S(X) = −∇_X N, f_N = ⟨∇f, N⟩.

mod boundary;
mod chart;
pub mod flat;
mod value;

pub use boundary::{b_f_form, boundary_ops, shape_action, star_identity_residual, BfPair, BoundaryValues};
pub(crate) use boundary::{b_f_at, boundary_values_at};
pub use chart::{interior_field, ChartCalculus, ChartForm, SphereChart, POLE_EXCLUSION};
pub use flat::{FormJet1, FormJet2};
pub use value::{det, FormValue};

use crate::fields::{FieldError, PFormField, ScalarField};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("operator needs {needs}, form has degree {degree} in dimension {dim}")]
    DegreeError { degree: usize, dim: usize, needs: &'static str },
    #[error("potential V = {0} is not positive")]
    NonpositiveV(f64),
    #[error("point {0:?} too close to a chart pole")]
    PoleProximity(Vec<f64>),
    #[error("no chart calculus for dimension {0}")]
    UnsupportedChart(usize),
}

/// ∇ω: ω_{I,A} = ∂_A ω_I, one form per direction A.
#[derive(Clone, Debug)]
pub struct CovariantDerivativeValue {
    pub by_direction: Vec<FormValue>,
}

impl CovariantDerivativeValue {
    pub fn norm2(&self) -> f64 {
        self.by_direction.iter().map(|w| w.norm2()).sum()
    }

    /// ω_{I,A} for an increasing multi-index I given as indices.
    pub fn get(&self, indices: &[usize], a: usize) -> f64 {
        self.by_direction[a].get(indices)
    }
}

pub fn d_form(w: &PFormField, x: &[f64]) -> Result<FormValue, OpError> {
    if w.degree() >= w.dim() {
        return Err(OpError::DegreeError { degree: w.degree(), dim: w.dim(), needs: "p < D" });
    }
    Ok(flat::d(&FormJet2::of(w, x)?.first()))
}

pub fn delta_f_form(w: &PFormField, f: &ScalarField, x: &[f64]) -> Result<FormValue, OpError> {
    if w.degree() == 0 {
        return Err(OpError::DegreeError { degree: 0, dim: w.dim(), needs: "p ≥ 1" });
    }
    let fj = f.jet(x)?;
    Ok(flat::codiff(&FormJet2::of(w, x)?.first(), fj.grad()))
}

pub fn nabla_form(w: &PFormField, x: &[f64]) -> Result<CovariantDerivativeValue, OpError> {
    Ok(CovariantDerivativeValue { by_direction: FormJet2::of(w, x)?.grad })
}

pub fn weighted_hodge_laplacian(w: &PFormField, f: &ScalarField, x: &[f64]) -> Result<FormValue, OpError> {
    Ok(flat::hodge_laplacian(&FormJet2::of(w, x)?, &f.jet(x)?))
}

pub fn rough_laplacian_f(w: &PFormField, f: &ScalarField, x: &[f64]) -> Result<FormValue, OpError> {
    Ok(flat::rough_laplacian(&FormJet2::of(w, x)?, &f.jet(x)?))
}

/// W_f^{[p]}ω = (∇²f)^{[p]}ω on flat domains.
pub fn weitzenbock_f(w: &PFormField, f: &ScalarField, x: &[f64]) -> Result<FormValue, OpError> {
    Ok(flat::hessian_action(&f.jet(x)?, &FormJet2::of(w, x)?.value))
}

/// W_{f,V}^{[p]}ω = W_f^{[p]}ω + V⁻¹[(Δ_fV)ω + (∇²V)^{[p]}ω].
pub fn weitzenbock_fv(
    w: &PFormField,
    f: &ScalarField,
    v: &ScalarField,
    x: &[f64],
) -> Result<FormValue, OpError> {
    let value = FormJet2::of(w, x)?.value;
    weitzenbock_fv_at(&value, &f.jet(x)?, &v.jet(x)?)
}

pub(crate) fn weitzenbock_fv_at(
    value: &FormValue,
    f: &crate::fields::Jet2,
    v: &crate::fields::Jet2,
) -> Result<FormValue, OpError> {
    if v.value() <= 0.0 {
        return Err(OpError::NonpositiveV(v.value()));
    }
    let delta_f_v = v.laplacian() + f.grad().iter().zip(v.grad()).map(|(a, b)| a * b).sum::<f64>();
    let extra = (*value * delta_f_v + flat::hessian_action(v, value)) * (1.0 / v.value());
    Ok(flat::hessian_action(f, value) + extra)
}

/// d^{∂M}η and δ_f^{∂M}η for a chart form at chart point u.
pub fn chart_boundary_calculus(
    chart: &SphereChart,
    eta: &ChartForm,
    f: &ScalarField,
    u: &[f64],
) -> Result<ChartCalculus, OpError> {
    chart.calculus(eta, f, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::parse_field;

    fn form1(dim: usize, comps: &[&str]) -> PFormField {
        comps
            .iter()
            .enumerate()
            .fold(PFormField::zero(1, dim), |w, (i, s)| w.with(&[i], parse_field(s).unwrap()))
    }

    #[test]
    fn spec_examples() {
        let x = [0.4, -1.3];
        let w = PFormField::zero(1, 2).with(&[1], parse_field("x1").unwrap());
        assert_eq!(d_form(&w, &x).unwrap().get(&[0, 1]), 1.0);
        assert_eq!(nabla_form(&w, &x).unwrap().norm2(), 1.0);

        let w = form1(2, &["x1", "x2"]);
        assert_eq!(delta_f_form(&w, &ScalarField::zero(), &x).unwrap().get(&[]), -2.0);

        let w = form1(2, &["1", "0"]);
        let f = parse_field("r2/2").unwrap();
        assert!((delta_f_form(&w, &f, &x).unwrap().get(&[]) - 0.4).abs() < 1e-15);

        let w = PFormField::zero(1, 2).with(&[1], parse_field("x1*x1").unwrap());
        let r = rough_laplacian_f(&w, &ScalarField::zero(), &x).unwrap();
        assert_eq!(r.get(&[1]), -2.0);

        let f = parse_field("x1^2").unwrap();
        let w = form1(2, &["1", "1"]);
        let h = weitzenbock_f(&w, &f, &x).unwrap();
        assert_eq!((h.get(&[0]), h.get(&[1])), (2.0, 0.0));

        let u = parse_field("sin(x1)*x2").unwrap();
        let lap = weighted_hodge_laplacian(&PFormField::scalar(2, u), &ScalarField::zero(), &x).unwrap();
        assert!((lap.get(&[]) - 0.4f64.sin() * -1.3).abs() < 1e-15);
    }

    #[test]
    fn degree_errors() {
        let top = PFormField::zero(2, 2);
        assert!(matches!(d_form(&top, &[0.0, 0.0]), Err(OpError::DegreeError { .. })));
        let s = PFormField::scalar(2, ScalarField::one());
        assert!(matches!(delta_f_form(&s, &ScalarField::zero(), &[0.0, 0.0]), Err(OpError::DegreeError { .. })));
        let v = parse_field("x1").unwrap();
        assert!(matches!(
            weitzenbock_fv(&s, &ScalarField::zero(), &v, &[-1.0, 0.0]),
            Err(OpError::NonpositiveV(_))
        ));
    }

    #[test]
    fn radial_hessian_scales_by_degree() {
        let f = parse_field("r2/2").unwrap();
        let w = PFormField::zero(2, 3)
            .with(&[0, 1], parse_field("x3").unwrap())
            .with(&[1, 2], parse_field("1").unwrap());
        let x = [0.1, 0.2, 0.3];
        let got = weitzenbock_f(&w, &f, &x).unwrap();
        let want = FormJet2::of(&w, &x).unwrap().value * 2.0;
        assert!((got - want).max_abs() < 1e-15);
    }
}
