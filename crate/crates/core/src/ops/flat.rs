//! Exterior calculus on jets of forms in flat coordinates.
//!
//! Two families live here and share nothing beyond `FormValue` algebra:
//! operator composition (d, δ_f and their products) and direct componentwise
//! formulas (rough Laplacian, induced Hessian actions).

use crate::fields::{Jet2, PFormField};

use super::value::FormValue;
use super::OpError;

/// Value and first partials ∂_a ω of a form at a point.
#[derive(Clone, Debug)]
pub struct FormJet1 {
    pub value: FormValue,
    pub grad: Vec<FormValue>,
}

/// Value, first and second partials of a form at a point.
#[derive(Clone, Debug)]
pub struct FormJet2 {
    pub value: FormValue,
    pub grad: Vec<FormValue>,
    pub hess: Vec<Vec<FormValue>>,
}

impl FormJet2 {
    pub fn of(w: &PFormField, x: &[f64]) -> Result<Self, OpError> {
        let jets = w.jets(x)?;
        let (p, dim) = (w.degree(), w.dim());
        let mut value = FormValue::zero(p, dim);
        let mut grad = vec![FormValue::zero(p, dim); dim];
        let mut hess = vec![vec![FormValue::zero(p, dim); dim]; dim];
        for m in value.masks() {
            let j = &jets[m as usize];
            value.set_mask(m, j.value());
            for a in 0..dim {
                grad[a].set_mask(m, j.d(a));
                for b in 0..dim {
                    hess[a][b].set_mask(m, j.hess(a, b));
                }
            }
        }
        Ok(FormJet2 { value, grad, hess })
    }

    pub fn dim(&self) -> usize {
        self.value.dim()
    }

    pub fn degree(&self) -> usize {
        self.value.degree()
    }

    pub fn first(&self) -> FormJet1 {
        FormJet1 { value: self.value, grad: self.grad.clone() }
    }

    /// Jet of G·ω by the product rule.
    pub fn scaled_by(&self, g: &Jet2) -> FormJet2 {
        let dim = self.dim();
        let value = self.value * g.value();
        let grad = (0..dim).map(|a| self.grad[a] * g.value() + self.value * g.d(a)).collect();
        let hess = (0..dim)
            .map(|a| {
                (0..dim)
                    .map(|b| {
                        self.hess[a][b] * g.value()
                            + self.grad[a] * g.d(b)
                            + self.grad[b] * g.d(a)
                            + self.value * g.hess(a, b)
                    })
                    .collect()
            })
            .collect();
        FormJet2 { value, grad, hess }
    }
}

impl FormJet1 {
    pub fn dim(&self) -> usize {
        self.value.dim()
    }

    pub fn degree(&self) -> usize {
        self.value.degree()
    }

    /// ∇_v ω = Σ v_a ∂_a ω.
    pub fn along(&self, v: &[f64]) -> FormValue {
        let mut out = FormValue::zero(self.degree(), self.dim());
        for (a, va) in v.iter().enumerate() {
            out = out + self.grad[a] * *va;
        }
        out
    }
}

/// dω = Σ_a e_a ∧ ∂_a ω. Zero form of degree D+1 is not representable, so
/// callers must guard p < D.
pub fn d(j: &FormJet1) -> FormValue {
    let mut out = FormValue::zero(j.degree() + 1, j.dim());
    for a in 0..j.dim() {
        out = out + j.grad[a].wedge_basis(a);
    }
    out
}

/// δ_f ω = −Σ_a i_{e_a} ∂_a ω + i_{∇f} ω.
pub fn codiff(j: &FormJet1, grad_f: &[f64]) -> FormValue {
    let mut out = j.value.interior(grad_f);
    for a in 0..j.dim() {
        out = out - j.grad[a].interior_basis(a);
    }
    out
}

/// First jet of dω from the second jet of ω.
pub fn d_jet(j: &FormJet2) -> FormJet1 {
    let dim = j.dim();
    let wedge_sum = |parts: &dyn Fn(usize) -> FormValue| {
        (0..dim).fold(FormValue::zero(j.degree() + 1, dim), |acc, a| acc + parts(a).wedge_basis(a))
    };
    let value = wedge_sum(&|a| j.grad[a]);
    let grad = (0..dim).map(|b| wedge_sum(&|a| j.hess[b][a])).collect();
    FormJet1 { value, grad }
}

/// First jet of δ_f ω from the second jet of ω and the 2-jet of f.
pub fn codiff_jet(j: &FormJet2, f: &Jet2) -> FormJet1 {
    let dim = j.dim();
    let gf = f.grad().to_vec();
    let value = codiff(&j.first(), &gf);
    let grad = (0..dim)
        .map(|b| {
            let hb: Vec<f64> = (0..dim).map(|a| f.hess(a, b)).collect();
            let mut out = j.value.interior(&hb) + j.grad[b].interior(&gf);
            for a in 0..dim {
                out = out - j.hess[b][a].interior_basis(a);
            }
            out
        })
        .collect();
    FormJet1 { value, grad }
}

/// Δ_f^H ω = dδ_f ω + δ_f dω by composition.
pub fn hodge_laplacian(j: &FormJet2, f: &Jet2) -> FormValue {
    let (p, dim) = (j.degree(), j.dim());
    let mut out = FormValue::zero(p, dim);
    if p > 0 {
        out = out + d(&codiff_jet(j, f));
    }
    if p < dim {
        out = out + codiff(&d_jet(j), f.grad());
    }
    out
}

/// ∇_f^*∇ω = −Σ_a ∂²_aa ω + Σ_a f_a ∂_a ω, componentwise.
pub fn rough_laplacian(j: &FormJet2, f: &Jet2) -> FormValue {
    let (p, dim) = (j.degree(), j.dim());
    let mut out = FormValue::zero(p, dim);
    for m in out.masks() {
        let mut s = 0.0;
        for a in 0..dim {
            s += -j.hess[a][a].get_mask(m) + f.d(a) * j.grad[a].get_mask(m);
        }
        out.set_mask(m, s);
    }
    out
}

/// (∇²f)^{[p]} ω.
pub fn hessian_action(f: &Jet2, w: &FormValue) -> FormValue {
    w.induced(&f.hessian())
}

/// |∇ω|² = Σ_{I,a} (∂_a ω_I)².
pub fn nabla_norm2(j: &FormJet1) -> f64 {
    j.grad.iter().map(|g| g.norm2()).sum()
}

/// Jet of i_F ω where F has 2-jets per component (first jet only).
pub fn interior_jet(j: &FormJet2, field: &[Jet2]) -> FormJet1 {
    let dim = j.dim();
    let fv: Vec<f64> = field.iter().map(|c| c.value()).collect();
    let value = j.value.interior(&fv);
    let grad = (0..dim)
        .map(|b| {
            let db: Vec<f64> = field.iter().map(|c| c.d(b)).collect();
            j.value.interior(&db) + j.grad[b].interior(&fv)
        })
        .collect();
    FormJet1 { value, grad }
}

/// Jet (first order) of α ∧ ω for a 1-form α = dV given the 2-jet of V.
pub fn dv_wedge_jet(v: &Jet2, j: &FormJet2) -> FormJet1 {
    let dim = j.dim();
    let dv = FormValue::covector(v.grad());
    let value = FormValue::wedge_one(&dv, &j.value);
    let grad = (0..dim)
        .map(|b| {
            let ddv: Vec<f64> = (0..dim).map(|a| v.hess(a, b)).collect();
            FormValue::wedge_one(&FormValue::covector(&ddv), &j.value) + FormValue::wedge_one(&dv, &j.grad[b])
        })
        .collect();
    FormJet1 { value, grad }
}
