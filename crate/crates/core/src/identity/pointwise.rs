use crate::fields::{Jet2, PFormField, ScalarField};
use crate::ops::flat::{self, FormJet1, FormJet2};
use crate::ops::{FormValue, OpError};

use super::report::{IdentityReport, TOL_GENERAL, TOL_POLYNOMIAL};

pub(crate) fn form_is_polynomial(w: &PFormField) -> bool {
    w.components().all(|(_, c)| c.is_polynomial())
}

fn default_tol(polynomial: bool) -> f64 {
    if polynomial {
        TOL_POLYNOMIAL
    } else {
        TOL_GENERAL
    }
}

/// Max-norm report over sample points of a pointwise identity lhs(x) = rhs(x).
fn pointwise(
    id: &str,
    points: &[Vec<f64>],
    polynomial: bool,
    mut sides: impl FnMut(&[f64]) -> Result<(FormValue, FormValue), OpError>,
) -> Result<IdentityReport, OpError> {
    let (mut l, mut r, mut res) = (0f64, 0f64, 0f64);
    for x in points {
        let (a, b) = sides(x)?;
        l = l.max(a.max_abs());
        r = r.max(b.max_abs());
        res = res.max((a - b).max_abs());
    }
    let dim = points.first().map_or(0, |p| p.len());
    let mut rep = IdentityReport::new(id, &format!("R^{dim}"), l, r, res).with_tolerance(default_tol(polynomial));
    rep.points = points.len();
    Ok(rep)
}

/// First jets of the components of ∇f, read off the 2-jet of f.
fn gradient_jets(f: &Jet2) -> Vec<Jet2> {
    let dim = f.dim();
    let zero = vec![vec![0.0; dim]; dim];
    (0..dim)
        .map(|a| {
            let row: Vec<f64> = (0..dim).map(|b| f.hess(a, b)).collect();
            Jet2::from_parts(f.d(a), &row, &zero)
        })
        .collect()
}

/// Δ_f^H ω = ∇_f^*∇ω + (∇²f)^{[p]}ω on flat space.
pub fn check_bochner(w: &PFormField, f: &ScalarField, points: &[Vec<f64>]) -> Result<IdentityReport, OpError> {
    pointwise("bochner", points, form_is_polynomial(w) && f.is_polynomial(), |x| {
        let j = FormJet2::of(w, x)?;
        let fj = f.jet(x)?;
        let lhs = flat::hodge_laplacian(&j, &fj);
        let rhs = flat::rough_laplacian(&j, &fj) + flat::hessian_action(&fj, &j.value);
        Ok((lhs, rhs))
    })
}

/// ½Δ_f|ω|² = ⟨Δ_f^Hω, ω⟩ − ⟨W_fω, ω⟩ − |∇ω|².
pub fn check_scalar_bochner(w: &PFormField, f: &ScalarField, points: &[Vec<f64>]) -> Result<IdentityReport, OpError> {
    pointwise("scalar_bochner", points, form_is_polynomial(w) && f.is_polynomial(), |x| {
        let dim = x.len();
        let jets = w.jets(x)?;
        let fj = f.jet(x)?;
        let j = FormJet2::of(w, x)?;
        let sq = j.value.masks().iter().fold(Jet2::constant(dim, 0.0), |acc, &m| acc + jets[m as usize] * jets[m as usize]);
        let grad_dot: f64 = fj.grad().iter().zip(sq.grad()).map(|(a, b)| a * b).sum();
        let lhs = 0.5 * (sq.laplacian() + grad_dot);
        let rhs = flat::hodge_laplacian(&j, &fj).dot(&j.value)
            - flat::hessian_action(&fj, &j.value).dot(&j.value)
            - flat::nabla_norm2(&j.first());
        Ok((FormValue::scalar(dim, lhs), FormValue::scalar(dim, rhs)))
    })
}

/// [Δ_f^H, G]ω = (Δ_fG)ω − 2∇_{∇G}ω.
pub fn check_commutator(
    g: &ScalarField,
    w: &PFormField,
    f: &ScalarField,
    points: &[Vec<f64>],
) -> Result<IdentityReport, OpError> {
    let poly = g.is_polynomial() && form_is_polynomial(w) && f.is_polynomial();
    pointwise("commutator", points, poly, |x| {
        let j = FormJet2::of(w, x)?;
        let fj = f.jet(x)?;
        let gj = g.jet(x)?;
        let lhs = flat::hodge_laplacian(&j.scaled_by(&gj), &fj) - flat::hodge_laplacian(&j, &fj) * gj.value();
        let delta_f_g = gj.laplacian() + fj.grad().iter().zip(gj.grad()).map(|(a, b)| a * b).sum::<f64>();
        let rhs = j.value * delta_f_g - j.first().along(gj.grad()) * 2.0;
        Ok((lhs, rhs))
    })
}

/// d i_{∇f} + i_{∇f} d = ∇_{∇f} + (∇²f)^{[p]}.
pub fn check_cartan(w: &PFormField, f: &ScalarField, points: &[Vec<f64>]) -> Result<IdentityReport, OpError> {
    let (p, dim) = (w.degree(), w.dim());
    pointwise("cartan", points, form_is_polynomial(w) && f.is_polynomial(), |x| {
        let j = FormJet2::of(w, x)?;
        let fj = f.jet(x)?;
        let mut lhs = FormValue::zero(p, dim);
        if p > 0 {
            lhs = lhs + flat::d(&flat::interior_jet(&j, &gradient_jets(&fj)));
        }
        if p < dim {
            lhs = lhs + flat::d(&j.first()).interior(fj.grad());
        }
        let rhs = j.first().along(fj.grad()) + flat::hessian_action(&fj, &j.value);
        Ok((lhs, rhs))
    })
}

/// d(i_Fω) = −i_F dω + ∇_Fω + (∇F)ω, with ∇F acting as a derivation.
pub fn check_contraction(w: &PFormField, field: &[ScalarField], points: &[Vec<f64>]) -> Result<IdentityReport, OpError> {
    let (p, dim) = (w.degree(), w.dim());
    if p == 0 {
        return Err(OpError::DegreeError { degree: p, dim, needs: "p ≥ 1" });
    }
    let poly = form_is_polynomial(w) && field.iter().all(|c| c.is_polynomial());
    pointwise("contraction", points, poly, |x| {
        let j = FormJet2::of(w, x)?;
        let fj: Vec<Jet2> = field.iter().map(|c| c.jet(x)).collect::<Result<_, _>>()?;
        let fv: Vec<f64> = fj.iter().map(|c| c.value()).collect();
        let lhs = flat::d(&flat::interior_jet(&j, &fj));
        // T e_i = Σ_b ∂_i F_b e_b.
        let t: Vec<Vec<f64>> = (0..dim).map(|b| (0..dim).map(|i| fj[b].d(i)).collect()).collect();
        let mut rhs = j.first().along(&fv) + j.value.induced(&t);
        if p < dim {
            rhs = rhs - flat::d(&j.first()).interior(&fv);
        }
        Ok((lhs, rhs))
    })
}

fn wedge_guard(w: &PFormField) -> Result<(), OpError> {
    if w.degree() >= w.dim() {
        return Err(OpError::DegreeError { degree: w.degree(), dim: w.dim(), needs: "p < D" });
    }
    Ok(())
}

/// i_{∇f}(dV∧ω) = ⟨∇V,∇f⟩ω − dV∧i_{∇f}ω.
pub fn check_wedge_interior(
    v: &ScalarField,
    w: &PFormField,
    f: &ScalarField,
    points: &[Vec<f64>],
) -> Result<IdentityReport, OpError> {
    wedge_guard(w)?;
    let poly = v.is_polynomial() && form_is_polynomial(w) && f.is_polynomial();
    pointwise("wedge_interior", points, poly, |x| {
        let j = FormJet2::of(w, x)?;
        let (fj, vj) = (f.jet(x)?, v.jet(x)?);
        let dv = FormValue::covector(vj.grad());
        let lhs = FormValue::wedge_one(&dv, &j.value).interior(fj.grad());
        let gg: f64 = vj.grad().iter().zip(fj.grad()).map(|(a, b)| a * b).sum();
        let mut rhs = j.value * gg;
        if w.degree() > 0 {
            rhs = rhs - FormValue::wedge_one(&dv, &j.value.interior(fj.grad()));
        }
        Ok((lhs, rhs))
    })
}

/// δ_f(dV∧ω) = (Δ_fV)ω − ∇_{∇V}ω + (∇²V)^{[p]}ω − dV∧δ_fω.
pub fn check_wedge_codiff(
    v: &ScalarField,
    w: &PFormField,
    f: &ScalarField,
    points: &[Vec<f64>],
) -> Result<IdentityReport, OpError> {
    wedge_guard(w)?;
    let poly = v.is_polynomial() && form_is_polynomial(w) && f.is_polynomial();
    pointwise("wedge_codiff", points, poly, |x| {
        let j = FormJet2::of(w, x)?;
        let (fj, vj) = (f.jet(x)?, v.jet(x)?);
        let lhs = flat::codiff(&flat::dv_wedge_jet(&vj, &j), fj.grad());
        let delta_f_v = vj.laplacian() + vj.grad().iter().zip(fj.grad()).map(|(a, b)| a * b).sum::<f64>();
        let first: FormJet1 = j.first();
        let mut rhs = j.value * delta_f_v - first.along(vj.grad()) + flat::hessian_action(&vj, &j.value);
        if w.degree() > 0 {
            let dv = FormValue::covector(vj.grad());
            rhs = rhs - FormValue::wedge_one(&dv, &flat::codiff(&first, fj.grad()));
        }
        Ok((lhs, rhs))
    })
}
