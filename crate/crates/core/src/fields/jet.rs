use std::ops::{Add, Div, Mul, Neg, Sub};

pub const MAX_DIM: usize = 4;
const TRI: usize = MAX_DIM * (MAX_DIM + 1) / 2;

#[inline]
fn tri(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * MAX_DIM - i * (i + 1) / 2 + j
}

/// Value, gradient and Hessian of a scalar at a point.
///
/// The Hessian is stored as a packed upper triangle, so it is symmetric by
/// construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    dim: usize,
    value: f64,
    grad: [f64; MAX_DIM],
    hess: [f64; TRI],
}

impl Jet2 {
    pub fn constant(dim: usize, c: f64) -> Self {
        assert!(dim <= MAX_DIM, "jet dimension {dim} exceeds {MAX_DIM}");
        Jet2 { dim, value: c, grad: [0.0; MAX_DIM], hess: [0.0; TRI] }
    }

    /// The coordinate function x_i evaluated at `at`.
    pub fn variable(dim: usize, i: usize, at: f64) -> Self {
        let mut j = Self::constant(dim, at);
        j.grad[i] = 1.0;
        j
    }

    pub fn from_parts(value: f64, grad: &[f64], hess: &[Vec<f64>]) -> Self {
        let mut j = Self::constant(grad.len(), value);
        j.grad[..grad.len()].copy_from_slice(grad);
        for a in 0..grad.len() {
            for b in a..grad.len() {
                j.hess[tri(a, b)] = hess[a][b];
            }
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad[..self.dim]
    }

    pub fn d(&self, i: usize) -> f64 {
        self.grad[i]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[tri(i, j)]
    }

    pub fn hessian(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.hess(i, j)).collect()).collect()
    }

    /// Positive Laplacian −Σ ∂²_aa.
    pub fn laplacian(&self) -> f64 {
        -(0..self.dim).map(|a| self.hess(a, a)).sum::<f64>()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut r = *self;
        r.value *= s;
        r.grad.iter_mut().for_each(|g| *g *= s);
        r.hess.iter_mut().for_each(|h| *h *= s);
        r
    }

    /// g∘self given g(u), g'(u), g''(u).
    pub fn chain(&self, g0: f64, g1: f64, g2: f64) -> Self {
        let mut r = Self::constant(self.dim, g0);
        for a in 0..self.dim {
            r.grad[a] = g1 * self.grad[a];
            for b in a..self.dim {
                r.hess[tri(a, b)] = g1 * self.hess[tri(a, b)] + g2 * self.grad[a] * self.grad[b];
            }
        }
        r
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Option<Self> {
        let u = self.value;
        (u > 0.0).then(|| self.chain(u.ln(), 1.0 / u, -1.0 / (u * u)))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sqrt(&self) -> Option<Self> {
        let u = self.value;
        if u <= 0.0 {
            return None;
        }
        let s = u.sqrt();
        Some(self.chain(s, 0.5 / s, -0.25 / (s * u)))
    }

    pub fn recip(&self) -> Option<Self> {
        let u = self.value;
        if u == 0.0 {
            return None;
        }
        Some(self.chain(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u)))
    }

    /// self^c for a constant exponent. Integer exponents accept any base
    /// (nonzero when negative); other exponents need a positive base.
    pub fn powf(&self, c: f64) -> Option<Self> {
        let u = self.value;
        if c == 0.0 {
            return Some(Self::constant(self.dim, 1.0));
        }
        if c.fract() == 0.0 && c.abs() < 64.0 {
            let n = c as i32;
            if n < 0 && u == 0.0 {
                return None;
            }
            let g0 = u.powi(n);
            let g1 = if n == 0 { 0.0 } else { c * u.powi(n - 1) };
            let g2 = if n == 0 || n == 1 { 0.0 } else { c * (c - 1.0) * u.powi(n - 2) };
            return Some(self.chain(g0, g1, g2));
        }
        if u > 0.0 {
            return Some(self.chain(u.powf(c), c * u.powf(c - 1.0), c * (c - 1.0) * u.powf(c - 2.0)));
        }
        None
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, o: Jet2) -> Jet2 {
        self.value += o.value;
        for a in 0..MAX_DIM {
            self.grad[a] += o.grad[a];
        }
        for k in 0..TRI {
            self.hess[k] += o.hess[k];
        }
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        let dim = self.dim.max(o.dim);
        let mut r = Jet2::constant(dim, self.value * o.value);
        for a in 0..dim {
            r.grad[a] = self.value * o.grad[a] + o.value * self.grad[a];
            for b in a..dim {
                let k = tri(a, b);
                r.hess[k] = self.value * o.hess[k]
                    + o.value * self.hess[k]
                    + self.grad[a] * o.grad[b]
                    + self.grad[b] * o.grad[a];
            }
        }
        r
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    /// Panics on a zero denominator; use `recip` to handle that case.
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip().expect("division by zero in Jet2")
    }
}
