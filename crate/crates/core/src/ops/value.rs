use std::ops::{Add, Mul, Neg, Sub};

use crate::fields::{canonical, mask_indices, masks_of_degree, Mask, MAX_DIM};

/// A p-form at a point: one coefficient per increasing multi-index, stored
/// by bit mask.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormValue {
    degree: usize,
    dim: usize,
    coeffs: [f64; 16],
}

fn lower_count(mask: Mask, a: usize) -> usize {
    (mask & ((1u8 << a) - 1)).count_ones() as usize
}

impl FormValue {
    /// Zero p-form. Degree dim + 1 is allowed and denotes the zero space
    /// (e.g. the tangential part of a top-degree form on the boundary).
    pub fn zero(degree: usize, dim: usize) -> Self {
        assert!(dim <= MAX_DIM && degree <= dim + 1, "degree {degree} on R^{dim}");
        FormValue { degree, dim, coeffs: [0.0; 16] }
    }

    pub fn scalar(dim: usize, v: f64) -> Self {
        let mut w = Self::zero(0, dim);
        w.coeffs[0] = v;
        w
    }

    /// 1-form with the given components.
    pub fn covector(v: &[f64]) -> Self {
        let mut w = Self::zero(1, v.len());
        for (a, c) in v.iter().enumerate() {
            w.coeffs[1 << a] = *c;
        }
        w
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn masks(&self) -> Vec<Mask> {
        masks_of_degree(self.dim, self.degree)
    }

    pub fn get_mask(&self, m: Mask) -> f64 {
        self.coeffs[m as usize]
    }

    pub fn set_mask(&mut self, m: Mask, v: f64) {
        self.coeffs[m as usize] = v;
    }

    pub fn add_mask(&mut self, m: Mask, v: f64) {
        self.coeffs[m as usize] += v;
    }

    /// Signed coefficient ω(e_{i1}, …, e_{ip}).
    pub fn get(&self, indices: &[usize]) -> f64 {
        match canonical(indices) {
            Some((m, s)) => s * self.coeffs[m as usize],
            None => 0.0,
        }
    }

    /// Coefficients in lexicographic multi-index order.
    pub fn to_vec(&self) -> Vec<f64> {
        self.masks().iter().map(|&m| self.coeffs[m as usize]).collect()
    }

    pub fn from_vec(degree: usize, dim: usize, v: &[f64]) -> Self {
        let mut w = Self::zero(degree, dim);
        for (m, c) in w.masks().into_iter().zip(v) {
            w.coeffs[m as usize] = *c;
        }
        w
    }

    pub fn dot(&self, o: &FormValue) -> f64 {
        debug_assert_eq!((self.degree, self.dim), (o.degree, o.dim));
        self.masks().iter().map(|&m| self.coeffs[m as usize] * o.coeffs[m as usize]).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()))
    }

    /// e_a ∧ ω.
    pub fn wedge_basis(&self, a: usize) -> FormValue {
        let mut out = Self::zero(self.degree + 1, self.dim);
        for m in self.masks() {
            if m & (1 << a) != 0 {
                continue;
            }
            let s = if lower_count(m, a) % 2 == 0 { 1.0 } else { -1.0 };
            out.coeffs[(m | (1 << a)) as usize] += s * self.coeffs[m as usize];
        }
        out
    }

    /// i_{e_a} ω.
    pub fn interior_basis(&self, a: usize) -> FormValue {
        let mut out = Self::zero(self.degree - 1, self.dim);
        for m in self.masks() {
            if m & (1 << a) == 0 {
                continue;
            }
            let s = if lower_count(m, a) % 2 == 0 { 1.0 } else { -1.0 };
            out.coeffs[(m & !(1 << a)) as usize] += s * self.coeffs[m as usize];
        }
        out
    }

    /// i_v ω.
    pub fn interior(&self, v: &[f64]) -> FormValue {
        if self.degree == 0 {
            return Self::zero(0, self.dim);
        }
        let mut out = Self::zero(self.degree - 1, self.dim);
        for (a, va) in v.iter().enumerate() {
            if *va != 0.0 {
                out = out + self.interior_basis(a) * *va;
            }
        }
        out
    }

    /// α ∧ ω for a 1-form α.
    pub fn wedge_one(alpha: &FormValue, w: &FormValue) -> FormValue {
        assert_eq!(alpha.degree, 1);
        let mut out = Self::zero(w.degree + 1, w.dim);
        for a in 0..w.dim {
            let c = alpha.coeffs[1 << a];
            if c != 0.0 {
                out = out + w.wedge_basis(a) * c;
            }
        }
        out
    }

    /// General wedge product.
    pub fn wedge(&self, o: &FormValue) -> FormValue {
        let mut out = Self::zero(self.degree + o.degree, self.dim);
        for m in self.masks() {
            let a = self.coeffs[m as usize];
            if a == 0.0 {
                continue;
            }
            for k in o.masks() {
                let b = o.coeffs[k as usize];
                if b == 0.0 || m & k != 0 {
                    continue;
                }
                let mut idx = mask_indices(m);
                idx.extend(mask_indices(k));
                let (mk, s) = canonical(&idx).unwrap();
                out.coeffs[mk as usize] += s * a * b;
            }
        }
        out
    }

    /// ω(v_1, …, v_p) for vectors in R^D.
    pub fn eval_on(&self, vs: &[Vec<f64>]) -> f64 {
        assert_eq!(vs.len(), self.degree);
        self.masks()
            .iter()
            .map(|&m| {
                let idx = mask_indices(m);
                let mat: Vec<Vec<f64>> = idx.iter().map(|&i| vs.iter().map(|v| v[i]).collect()).collect();
                self.coeffs[m as usize] * det(&mat)
            })
            .sum()
    }

    /// Induced action T^{[p]}: (T^{[p]}ω)(X_1..X_p) = Σ_α ω(.., T X_α, ..),
    /// with T e_i = Σ_b t[b][i] e_b.
    pub fn induced(&self, t: &[Vec<f64>]) -> FormValue {
        let mut out = Self::zero(self.degree, self.dim);
        for m in self.masks() {
            let idx = mask_indices(m);
            let mut acc = 0.0;
            for alpha in 0..idx.len() {
                for b in 0..self.dim {
                    let tb = t[b][idx[alpha]];
                    if tb == 0.0 {
                        continue;
                    }
                    let mut j = idx.clone();
                    j[alpha] = b;
                    acc += tb * self.get(&j);
                }
            }
            out.coeffs[m as usize] = acc;
        }
        out
    }

    /// Hodge star in R^D with the standard orientation.
    pub fn hodge_star(&self) -> FormValue {
        let mut out = Self::zero(self.dim - self.degree, self.dim);
        let full: Mask = ((1u16 << self.dim) - 1) as Mask;
        for m in self.masks() {
            let comp = full & !m;
            let mut idx = mask_indices(m);
            idx.extend(mask_indices(comp));
            let (_, s) = canonical(&idx).unwrap();
            out.coeffs[comp as usize] += s * self.coeffs[m as usize];
        }
        out
    }

    /// Components in an orthonormal frame {t_1..t_n} of a subspace:
    /// (J*ω)(t_{j1}, …) as an n-dimensional form (the pullback).
    pub fn restrict(&self, frame: &[Vec<f64>]) -> FormValue {
        let n = frame.len();
        let mut out = Self::zero(self.degree, n);
        for m in masks_of_degree(n, self.degree) {
            let vs: Vec<Vec<f64>> = mask_indices(m).iter().map(|&j| frame[j].clone()).collect();
            out.coeffs[m as usize] = self.eval_on(&vs);
        }
        out
    }
}

/// Determinant of a small square matrix by Gaussian elimination.
pub fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    match n {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            let mut a: Vec<Vec<f64>> = m.to_vec();
            let mut d = 1.0;
            for c in 0..n {
                let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
                if a[p][c] == 0.0 {
                    return 0.0;
                }
                if p != c {
                    a.swap(p, c);
                    d = -d;
                }
                d *= a[c][c];
                for r in c + 1..n {
                    let f = a[r][c] / a[c][c];
                    for k in c..n {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
            d
        }
    }
}

impl Add for FormValue {
    type Output = FormValue;
    fn add(mut self, o: FormValue) -> FormValue {
        assert_eq!((self.degree, self.dim), (o.degree, o.dim), "adding forms of different type");
        for k in 0..16 {
            self.coeffs[k] += o.coeffs[k];
        }
        self
    }
}

impl Sub for FormValue {
    type Output = FormValue;
    fn sub(self, o: FormValue) -> FormValue {
        self + (-o)
    }
}

impl Neg for FormValue {
    type Output = FormValue;
    fn neg(self) -> FormValue {
        self * -1.0
    }
}

impl Mul<f64> for FormValue {
    type Output = FormValue;
    fn mul(mut self, s: f64) -> FormValue {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
        self
    }
}
