use crate::fields::{canonical, mask_indices, masks_of_degree, FlatDomain, PFormField, ScalarField};
use crate::ops::flat::{self, FormJet2};
use crate::ops::{boundary_values_at, interior_field, ChartForm, FormValue, OpError, SphereChart};

use super::integral::ChartedBoundary;
use super::pointwise::form_is_polynomial;
use super::report::{IdentityReport, TOL_GENERAL, TOL_POLYNOMIAL};

/// Step of the finite-difference chart oracle.
pub const FD_STEP: f64 = 1e-4;

/// Closed-form embedding and coordinate tangent vectors ∂_jX of a round
/// sphere chart, written out independently of the expression trees.
fn embed(chart: &SphereChart, u: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let r = chart.radius;
    match chart.dim {
        1 => {
            let (s, c) = u[0].sin_cos();
            (vec![r * c, r * s], vec![vec![-r * s, r * c]])
        }
        _ => {
            let (st, ct) = u[0].sin_cos();
            let (sp, cp) = u[1].sin_cos();
            (
                vec![r * st * cp, r * st * sp, r * ct],
                vec![vec![r * ct * cp, r * ct * sp, -r * st], vec![-r * st * sp, r * st * cp, 0.0]],
            )
        }
    }
}

fn metric_diag(chart: &SphereChart, u: &[f64]) -> Vec<f64> {
    let r2 = chart.radius * chart.radius;
    match chart.dim {
        1 => vec![r2],
        _ => vec![r2, r2 * u[0].sin().powi(2)],
    }
}

fn d4(g: &dyn Fn(&[f64]) -> Result<f64, OpError>, u: &[f64], i: usize, h: f64) -> Result<f64, OpError> {
    let at = |s: f64| -> Result<f64, OpError> {
        let mut v = u.to_vec();
        v[i] += s * h;
        g(&v)
    };
    Ok((-at(2.0)? + 8.0 * at(1.0)? - 8.0 * at(-1.0)? + at(-2.0)?) / (12.0 * h))
}

/// Finite-difference d and δ_f of the pullback of `w` (or of i_N w when
/// `normal_sign` is given, N = sign·X/R) in the orthonormal chart frame.
pub fn fd_chart_calculus(
    chart: &SphereChart,
    w: &PFormField,
    normal_sign: Option<f64>,
    f: &ScalarField,
    u: &[f64],
    h: f64,
) -> Result<(Option<FormValue>, Option<FormValue>), OpError> {
    let n = chart.dim;
    let comps: Vec<(u8, ScalarField)> = w.components().map(|(m, c)| (m, c.clone())).collect();
    let ambient_value = |x: &[f64]| -> Result<FormValue, OpError> {
        let mut v = FormValue::zero(w.degree(), w.dim());
        for (m, c) in &comps {
            v.set_mask(*m, c.value(x)?);
        }
        Ok(match normal_sign {
            Some(s) => v.interior(&x.iter().map(|t| s * t / chart.radius).collect::<Vec<_>>()),
            None => v,
        })
    };
    let q = w.degree() - usize::from(normal_sign.is_some());
    // Coordinate component η_J(u).
    let eta = |jm: u8, u: &[f64]| -> Result<f64, OpError> {
        let (x, dx) = embed(chart, u);
        let vecs: Vec<Vec<f64>> = mask_indices(jm).iter().map(|&j| dx[j].clone()).collect();
        Ok(ambient_value(&x)?.eval_on(&vecs))
    };
    let scale = |m: u8, u: &[f64]| -> f64 {
        let g = metric_diag(chart, u);
        mask_indices(m).iter().map(|&j| g[j].sqrt()).product()
    };
    if q > n {
        return Ok((None, None));
    }
    let d = if q < n {
        let mut out = FormValue::zero(q + 1, n);
        for im in masks_of_degree(n, q + 1) {
            let idx = mask_indices(im);
            let mut s = 0.0;
            for (alpha, &i) in idx.iter().enumerate() {
                let mut rest = idx.clone();
                rest.remove(alpha);
                let rm = crate::fields::mask_of(&rest);
                let sign = if alpha % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * d4(&|v: &[f64]| eta(rm, v), u, i, h)?;
            }
            out.set_mask(im, s / scale(im, u));
        }
        Some(out)
    } else {
        None
    };
    let delta = if q > 0 {
        let sqrt_g = |v: &[f64]| metric_diag(chart, v).iter().product::<f64>().sqrt();
        let ft = |v: &[f64]| -> Result<f64, OpError> { Ok(f.value(&embed(chart, v).0)?) };
        let g = metric_diag(chart, u);
        let mut out = FormValue::zero(q - 1, n);
        for km in masks_of_degree(n, q - 1) {
            let kidx = mask_indices(km);
            let mut div = 0.0;
            let mut weight = 0.0;
            for i in 0..n {
                let mut idx = vec![i];
                idx.extend(&kidx);
                let Some((m, s)) = canonical(&idx) else { continue };
                let upper = |v: &[f64]| -> Result<f64, OpError> {
                    let gv = metric_diag(chart, v);
                    let raise: f64 = kidx.iter().map(|&k| 1.0 / gv[k]).product();
                    Ok(sqrt_g(v) / gv[i] * raise * s * eta(m, v)?)
                };
                div += d4(&upper, u, i, h)?;
                weight += d4(&ft, u, i, h)? / g[i] * s * eta(m, u)?;
            }
            let lower: f64 = kidx.iter().map(|&k| g[k]).product();
            out.set_mask(km, (-lower * div / sqrt_g(u) + weight) / scale(km, u));
        }
        Some(out)
    } else {
        None
    };
    Ok((d, delta))
}

/// Boundary splitting of δ_f and d at boundary points:
///   δ_f^{∂M}(J*ω) = J*(δ_fω) + i_N(∇_Nω) + S^{[p−1]}(i_Nω) − nH_f(i_Nω),
///   d^{∂M}(i_Nω) = −i_N dω + J*(∇_Nω) − S^{[p]}(J*ω).
/// Left sides come from chart calculus on the pulled-back forms; right sides
/// from ambient jets and the shape operator. A finite-difference chart
/// computation cross-checks the left sides.
pub fn check_boundary_split(
    w: &PFormField,
    f: &ScalarField,
    domain: &FlatDomain,
    points: &[Vec<f64>],
) -> Result<IdentityReport, OpError> {
    let (p, dim) = (w.degree(), w.dim());
    let n = dim - 1;
    if p == 0 || n == 0 {
        return Err(OpError::DegreeError { degree: p, dim, needs: "p ≥ 1 and a boundary of dimension ≥ 1" });
    }
    let charted = ChartedBoundary::new(domain, w)?;
    let comps = domain.boundary_components();
    // Pullbacks of i_Nω per component.
    let normal_forms: Vec<Option<(f64, ChartForm)>> = charted
        .charts
        .iter()
        .zip(&comps)
        .map(|(c, comp)| {
            c.as_ref().map(|(chart, _)| {
                let outer = matches!(comp, crate::fields::BoundaryComponent::Sphere { outer: true, .. });
                let sign = if outer { -1.0 } else { 1.0 };
                (sign, chart.pullback(&interior_field(w, &chart.normal_fields(outer))))
            })
        })
        .collect();
    let (mut res_delta, mut res_d, mut res_fd) = (0f64, 0f64, 0f64);
    let (mut lmax, mut rmax) = (0f64, 0f64);
    for x in points {
        let frame = domain.boundary_frame(x)?;
        let ci = frame.component;
        let Some((chart, eta)) = &charted.charts[ci] else { continue };
        let (sign, eta_n) = normal_forms[ci].as_ref().expect("charted component");
        let u = chart.coords_of(x)?;
        let frame = frame.with_tangents(chart.frame(&u)?);
        let j = FormJet2::of(w, x)?;
        let fj = f.jet(x)?;
        let bv = boundary_values_at(&j.value, frame.clone(), &fj, None);
        let i_n = bv.i_n.expect("p ≥ 1");
        let s_i = bv.s_i.expect("p ≥ 1");
        let nabla_n = j.first().along(&frame.normal);

        // δ-splitting.
        let lhs1 = if p <= n {
            chart.calculus(eta, f, &u)?.delta_f.expect("p ≥ 1")
        } else {
            FormValue::zero(p - 1, n)
        };
        let rhs1 = flat::codiff(&j.first(), fj.grad()).restrict(&frame.tangents)
            + nabla_n.interior(&frame.normal).restrict(&frame.tangents)
            + s_i
            - i_n * bv.n_h_f;
        res_delta = res_delta.max((lhs1 - rhs1).max_abs());
        lmax = lmax.max(lhs1.max_abs());
        rmax = rmax.max(rhs1.max_abs());
        let (_, fd_delta) = fd_chart_calculus(chart, w, None, f, &u, FD_STEP)?;
        if let Some(fd) = fd_delta {
            res_fd = res_fd.max((fd - lhs1).max_abs());
        }

        // d-splitting, when d^{∂M} of a (p−1)-form exists.
        if p - 1 < n {
            let lhs2 = chart.calculus(eta_n, f, &u)?.d.expect("p − 1 < n");
            let mut rhs2 = nabla_n.restrict(&frame.tangents) - bv.s_j;
            if p < dim {
                rhs2 = rhs2 - flat::d(&j.first()).interior(&frame.normal).restrict(&frame.tangents);
            }
            res_d = res_d.max((lhs2 - rhs2).max_abs());
            lmax = lmax.max(lhs2.max_abs());
            rmax = rmax.max(rhs2.max_abs());
            let (fd_d, _) = fd_chart_calculus(chart, w, Some(*sign), f, &u, FD_STEP)?;
            if let Some(fd) = fd_d {
                res_fd = res_fd.max((fd - lhs2).max_abs());
            }
        }
    }
    let tol = if form_is_polynomial(w) && f.is_polynomial() { TOL_POLYNOMIAL } else { TOL_GENERAL };
    let worst = res_delta.max(res_d).max(res_fd);
    let mut rep = IdentityReport::new("boundary_split", &domain.descriptor(), lmax, rmax, worst).with_tolerance(tol);
    rep.points = points.len();
    Ok(rep
        .with_term("delta_split_residual", res_delta)
        .with_term("d_split_residual", res_d)
        .with_term("fd_chart_oracle_residual", res_fd))
}
