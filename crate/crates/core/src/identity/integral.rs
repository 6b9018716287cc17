use crate::fields::{pairwise_sum, BoundaryComponent, FlatDomain, Jet2, PFormField, QuadratureRule, ScalarField};
use crate::ops::flat::{self, FormJet2};
use crate::ops::{b_f_at, boundary_values_at, weitzenbock_fv_at, ChartForm, FormValue, OpError, SphereChart};

use super::pointwise::form_is_polynomial;
use super::report::{IdentityReport, TOL_GENERAL, TOL_POLYNOMIAL};

/// Σ w_i g(x_i) e^{−f(x_i)} with pairwise summation.
pub(crate) fn weighted_sum(
    rule: &QuadratureRule,
    f: &ScalarField,
    mut g: impl FnMut(&[f64]) -> Result<f64, OpError>,
) -> Result<f64, OpError> {
    let mut terms = Vec::with_capacity(rule.len());
    for (x, w) in rule.points.iter().zip(&rule.weights) {
        terms.push(w * g(x)? * (-f.value(x)?).exp());
    }
    Ok(pairwise_sum(&terms))
}

fn finish(
    id: &str,
    domain: &FlatDomain,
    orders: (usize, usize),
    nodes: usize,
    lhs: f64,
    rhs: f64,
    polynomial: bool,
) -> IdentityReport {
    let tol = if polynomial { TOL_POLYNOMIAL } else { TOL_GENERAL };
    let mut r = IdentityReport::new(id, &domain.descriptor(), lhs, rhs, (lhs - rhs).abs()).with_tolerance(tol);
    r.quadrature_orders = vec![orders.0, orders.1];
    r.points = nodes;
    r
}

fn rules(domain: &FlatDomain, order: usize) -> Result<(QuadratureRule, QuadratureRule), OpError> {
    Ok((domain.quad_domain(order)?, domain.quad_boundary(order)?.rule))
}

fn dvalue(j: &FormJet2) -> Option<FormValue> {
    (j.degree() < j.dim()).then(|| flat::d(&j.first()))
}

/// ∫⟨dω, ψ⟩e^{−f} = ∫⟨ω, δ_fψ⟩e^{−f} − ∮⟨J*ω, i_Nψ⟩e^{−f}.
pub fn check_green(
    w: &PFormField,
    psi: &PFormField,
    f: &ScalarField,
    domain: &FlatDomain,
    order: usize,
) -> Result<IdentityReport, OpError> {
    let (p, dim) = (w.degree(), w.dim());
    if psi.degree() != p + 1 || psi.dim() != dim {
        return Err(OpError::DegreeError { degree: psi.degree(), dim, needs: "deg ψ = deg ω + 1" });
    }
    let (vol, bdy) = rules(domain, order)?;
    let lhs = weighted_sum(&vol, f, |x| {
        let dw = flat::d(&FormJet2::of(w, x)?.first());
        Ok(dw.dot(&FormJet2::of(psi, x)?.value))
    })?;
    let interior = weighted_sum(&vol, f, |x| {
        let fj = f.jet(x)?;
        let dpsi = flat::codiff(&FormJet2::of(psi, x)?.first(), fj.grad());
        Ok(FormJet2::of(w, x)?.value.dot(&dpsi))
    })?;
    let boundary = weighted_sum(&bdy, f, |x| {
        let frame = domain.boundary_frame(x)?;
        let jw = FormJet2::of(w, x)?.value.restrict(&frame.tangents);
        let ip = FormJet2::of(psi, x)?.value.interior(&frame.normal).restrict(&frame.tangents);
        Ok(jw.dot(&ip))
    })?;
    let rhs = interior - boundary;
    let poly = form_is_polynomial(w) && form_is_polynomial(psi) && f.is_polynomial();
    Ok(finish("green", domain, (order, order), vol.len() + bdy.len(), lhs, rhs, poly)
        .with_term("interior", interior)
        .with_term("boundary", boundary))
}

/// ∫(|dω|² + |δ_fω|²)e^{−f} = ∫⟨Δ_f^Hω, ω⟩e^{−f} + ∮[⟨i_Nω, J*δ_fω⟩ − ⟨J*ω, i_Ndω⟩]e^{−f}.
pub fn check_green_laplacian(
    w: &PFormField,
    f: &ScalarField,
    domain: &FlatDomain,
    order: usize,
) -> Result<IdentityReport, OpError> {
    let p = w.degree();
    let (vol, bdy) = rules(domain, order)?;
    let lhs = weighted_sum(&vol, f, |x| {
        let j = FormJet2::of(w, x)?;
        let fj = f.jet(x)?;
        let d2 = dvalue(&j).map_or(0.0, |d| d.norm2());
        let c2 = if p > 0 { flat::codiff(&j.first(), fj.grad()).norm2() } else { 0.0 };
        Ok(d2 + c2)
    })?;
    let interior = weighted_sum(&vol, f, |x| {
        let j = FormJet2::of(w, x)?;
        Ok(flat::hodge_laplacian(&j, &f.jet(x)?).dot(&j.value))
    })?;
    let boundary = weighted_sum(&bdy, f, |x| {
        let frame = domain.boundary_frame(x)?;
        let j = FormJet2::of(w, x)?;
        let fj = f.jet(x)?;
        let mut s = 0.0;
        if p > 0 {
            let i_n = j.value.interior(&frame.normal).restrict(&frame.tangents);
            let jd = flat::codiff(&j.first(), fj.grad()).restrict(&frame.tangents);
            s += i_n.dot(&jd);
        }
        if let Some(dw) = dvalue(&j) {
            let jw = j.value.restrict(&frame.tangents);
            s -= jw.dot(&dw.interior(&frame.normal).restrict(&frame.tangents));
        }
        Ok(s)
    })?;
    let rhs = interior + boundary;
    let poly = form_is_polynomial(w) && f.is_polynomial();
    Ok(finish("green_laplacian", domain, (order, order), vol.len() + bdy.len(), lhs, rhs, poly)
        .with_term("interior", interior)
        .with_term("boundary", boundary))
}

/// ∫|dω|² div_f(F) e^{−f} = 2∫(⟨∇F(dω), dω⟩ − ⟨i_F dω, δ_f dω⟩)e^{−f}
///   + ∮(−|dω|²⟨F, N⟩ + 2⟨J* i_F dω, i_N dω⟩)e^{−f},
/// with div_f F = Σ ∂_A F_A − ⟨∇f, F⟩.
pub fn check_pohozhaev(
    w: &PFormField,
    field: &[ScalarField],
    f: &ScalarField,
    domain: &FlatDomain,
    order: usize,
) -> Result<IdentityReport, OpError> {
    let dim = w.dim();
    if w.degree() >= dim {
        return Err(OpError::DegreeError { degree: w.degree(), dim, needs: "p < D" });
    }
    let (vol, bdy) = rules(domain, order)?;
    let jets = |x: &[f64]| -> Result<Vec<Jet2>, OpError> { Ok(field.iter().map(|c| c.jet(x)).collect::<Result<_, _>>()?) };
    let lhs = weighted_sum(&vol, f, |x| {
        let dw = flat::d(&FormJet2::of(w, x)?.first());
        let fj = f.jet(x)?;
        let fv = jets(x)?;
        let div: f64 = (0..dim).map(|a| fv[a].d(a) - fj.d(a) * fv[a].value()).sum();
        Ok(dw.norm2() * div)
    })?;
    let interior = weighted_sum(&vol, f, |x| {
        let j = FormJet2::of(w, x)?;
        let fj = f.jet(x)?;
        let fv = jets(x)?;
        let dj = flat::d_jet(&j);
        let t: Vec<Vec<f64>> = (0..dim).map(|b| (0..dim).map(|i| fv[b].d(i)).collect()).collect();
        let vals: Vec<f64> = fv.iter().map(|c| c.value()).collect();
        let codiff = flat::codiff(&dj, fj.grad());
        Ok(2.0 * (dj.value.induced(&t).dot(&dj.value) - dj.value.interior(&vals).dot(&codiff)))
    })?;
    let boundary = weighted_sum(&bdy, f, |x| {
        let frame = domain.boundary_frame(x)?;
        let dw = flat::d(&FormJet2::of(w, x)?.first());
        let vals: Vec<f64> = jets(x)?.iter().map(|c| c.value()).collect();
        let fn_: f64 = vals.iter().zip(&frame.normal).map(|(a, b)| a * b).sum();
        let ji = dw.interior(&vals).restrict(&frame.tangents);
        let idw = dw.interior(&frame.normal).restrict(&frame.tangents);
        Ok(-dw.norm2() * fn_ + 2.0 * ji.dot(&idw))
    })?;
    let rhs = interior + boundary;
    let poly = form_is_polynomial(w) && f.is_polynomial() && field.iter().all(|c| c.is_polynomial());
    Ok(finish("pohozhaev", domain, (order, order), vol.len() + bdy.len(), lhs, rhs, poly)
        .with_term("interior", interior)
        .with_term("boundary", boundary))
}

/// Angle chart of each round boundary component, with J*ω pulled back.
pub(crate) struct ChartedBoundary {
    pub charts: Vec<Option<(SphereChart, ChartForm)>>,
}

impl ChartedBoundary {
    pub fn new(domain: &FlatDomain, w: &PFormField) -> Result<Self, OpError> {
        let n = domain.dim() - 1;
        let charts = domain
            .boundary_components()
            .iter()
            .map(|c| match c {
                BoundaryComponent::Sphere { radius, .. } if n >= 1 => {
                    let chart = SphereChart::new(n, *radius)?;
                    let eta = chart.pullback(w);
                    Ok(Some((chart, eta)))
                }
                BoundaryComponent::Sphere { .. } => Ok(None),
                BoundaryComponent::Face { .. } => Err(OpError::UnsupportedChart(n)),
            })
            .collect::<Result<_, OpError>>()?;
        Ok(ChartedBoundary { charts })
    }
}

/// Weighted Reilly formula, B_f evaluated both ways:
/// ∫V(|δ_fω|² + |dω|² − |∇ω|²)e^{−f}
///   = ∫[−2⟨ω, i_{∇V}dω⟩ + V⟨W_{f,V}ω, ω⟩]e^{−f}
///   + ∮[−V_N|J*ω|² + 2V⟨δ_f^{∂M}J*ω, i_Nω⟩ + V·B_f(ω, ω)]e^{−f}.
pub fn check_reilly(
    w: &PFormField,
    f: &ScalarField,
    v: &ScalarField,
    domain: &FlatDomain,
    order: usize,
) -> Result<IdentityReport, OpError> {
    let (p, dim) = (w.degree(), w.dim());
    let n = dim - 1;
    let (vol, bdy) = rules(domain, order)?;
    let charts = ChartedBoundary::new(domain, w)?;
    let vpos = |x: &[f64]| -> Result<Jet2, OpError> {
        let vj = v.jet(x)?;
        if vj.value() <= 0.0 {
            return Err(OpError::NonpositiveV(vj.value()));
        }
        Ok(vj)
    };

    let lhs = weighted_sum(&vol, f, |x| {
        let j = FormJet2::of(w, x)?;
        let fj = f.jet(x)?;
        let c2 = if p > 0 { flat::codiff(&j.first(), fj.grad()).norm2() } else { 0.0 };
        let d2 = dvalue(&j).map_or(0.0, |d| d.norm2());
        Ok(vpos(x)?.value() * (c2 + d2 - flat::nabla_norm2(&j.first())))
    })?;
    let cross = weighted_sum(&vol, f, |x| {
        let j = FormJet2::of(w, x)?;
        let vj = vpos(x)?;
        Ok(dvalue(&j).map_or(0.0, |d| -2.0 * j.value.dot(&d.interior(vj.grad()))))
    })?;
    let curvature = weighted_sum(&vol, f, |x| {
        let j = FormJet2::of(w, x)?;
        let vj = vpos(x)?;
        Ok(vj.value() * weitzenbock_fv_at(&j.value, &f.jet(x)?, &vj)?.dot(&j.value))
    })?;
    let normal_v = weighted_sum(&bdy, f, |x| {
        let frame = domain.boundary_frame(x)?;
        let vj = vpos(x)?;
        let vn: f64 = vj.grad().iter().zip(&frame.normal).map(|(a, b)| a * b).sum();
        Ok(-vn * FormJet2::of(w, x)?.value.restrict(&frame.tangents).norm2())
    })?;
    let tangential = weighted_sum(&bdy, f, |x| {
        if p == 0 || p > n {
            return Ok(0.0);
        }
        let frame = domain.boundary_frame(x)?;
        let Some((chart, eta)) = &charts.charts[frame.component] else { return Ok(0.0) };
        let u = chart.coords_of(x)?;
        let delta = chart.calculus(eta, f, &u)?.delta_f.expect("p ≥ 1");
        let frame = frame.with_tangents(chart.frame(&u)?);
        let i_n = FormJet2::of(w, x)?.value.interior(&frame.normal).restrict(&frame.tangents);
        Ok(2.0 * vpos(x)?.value() * delta.dot(&i_n))
    })?;
    let mut bf = [0.0; 2];
    for (k, slot) in bf.iter_mut().enumerate() {
        *slot = weighted_sum(&bdy, f, |x| {
            let frame = domain.boundary_frame(x)?;
            let value = FormJet2::of(w, x)?.value;
            let bv = boundary_values_at(&value, frame, &f.jet(x)?, None);
            let pair = b_f_at(&value, &bv);
            Ok(vpos(x)?.value() * if k == 0 { pair.via_mean_curvature } else { pair.via_star })
        })?;
    }
    let common = cross + curvature + normal_v + tangential;
    let (rhs, rhs_star) = (common + bf[0], common + bf[1]);
    let poly = form_is_polynomial(w) && f.is_polynomial() && v.is_polynomial();
    let mut rep = finish("reilly", domain, (order, order), vol.len() + bdy.len(), lhs, rhs, poly);
    let worst = (lhs - rhs).abs().max((lhs - rhs_star).abs());
    rep.abs_residual = worst;
    rep.rel_residual = worst / 1f64.max(lhs.abs()).max(rhs.abs()).max(rhs_star.abs());
    rep.pass = rep.rel_residual <= rep.tolerance;
    Ok(rep
        .with_term("interior_cross", cross)
        .with_term("interior_curvature", curvature)
        .with_term("boundary_normal_v", normal_v)
        .with_term("boundary_tangential", tangential)
        .with_term("boundary_b_f_mean_curvature", bf[0])
        .with_term("boundary_b_f_star", bf[1])
        .with_term("rhs_via_star", rhs_star))
}
