//! Seeded random test data: polynomial fields, forms and sample points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{masks_of_degree, mask_indices, FlatDomain, PFormField, ScalarField};

/// Deterministic generator of test fields and points.
#[derive(Clone, Debug)]
pub struct Sampler {
    seed: u64,
    rng: ChaCha8Rng,
}

fn monomials(dim: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; dim]];
    for _ in 0..degree {
        let mut next = out.clone();
        for m in &out {
            for i in 0..dim {
                let mut e = m.clone();
                e[i] += 1;
                if !next.contains(&e) {
                    next.push(e);
                }
            }
        }
        out = next;
    }
    out.sort_by_key(|e| (e.iter().sum::<usize>(), std::cmp::Reverse(e.clone())));
    out
}

fn monomial(e: &[usize]) -> ScalarField {
    let mut m = ScalarField::one();
    for (i, &k) in e.iter().enumerate() {
        for _ in 0..k {
            m = m * ScalarField::coord(i);
        }
    }
    m
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Polynomial of total degree ≤ `degree` with coefficients in [−1, 1].
    pub fn polynomial(&mut self, dim: usize, degree: usize) -> ScalarField {
        monomials(dim, degree).iter().fold(ScalarField::zero(), |acc, e| {
            let c = self.rng.gen_range(-1.0..1.0);
            acc + ScalarField::constant(c) * monomial(e)
        })
    }

    /// p-form with random polynomial coefficients.
    pub fn form(&mut self, degree: usize, dim: usize, poly_degree: usize) -> PFormField {
        masks_of_degree(dim, degree).into_iter().fold(PFormField::zero(degree, dim), |w, m| {
            let c = self.polynomial(dim, poly_degree);
            w.with(&mask_indices(m), c)
        })
    }

    /// Vector field with polynomial components.
    pub fn vector_field(&mut self, dim: usize, poly_degree: usize) -> Vec<ScalarField> {
        (0..dim).map(|_| self.polynomial(dim, poly_degree)).collect()
    }

    /// Quadratic potential 1 + 0.1⟨a,x⟩ + Σ b_i x_i² with |a_i| ≤ 1 and
    /// 0 ≤ b_i ≤ 0.5; positive on |x| < 2.
    pub fn positive_potential(&mut self, dim: usize) -> ScalarField {
        (0..dim).fold(ScalarField::one(), |acc, i| {
            let a = self.rng.gen_range(-1.0..1.0);
            let b = self.rng.gen_range(0.0..0.5);
            let x = ScalarField::coord(i);
            acc + ScalarField::constant(0.1 * a) * x.clone() + ScalarField::constant(b) * x.clone() * x
        })
    }

    /// Uniform point in a flat domain by rejection from its bounding box.
    pub fn interior_point(&mut self, domain: &FlatDomain) -> Vec<f64> {
        let dim = domain.dim();
        loop {
            let x: Vec<f64> = match domain {
                FlatDomain::Ball { radius, .. } | FlatDomain::Annulus { outer: radius, .. } => {
                    (0..dim).map(|_| self.rng.gen_range(-*radius..*radius)).collect()
                }
                FlatDomain::Box { lo, hi } => (0..dim).map(|a| self.rng.gen_range(lo[a]..hi[a])).collect(),
            };
            let r = x.iter().map(|t| t * t).sum::<f64>().sqrt();
            let inside = match domain {
                FlatDomain::Ball { radius, .. } => r < *radius,
                FlatDomain::Annulus { inner, outer, .. } => *inner < r && r < *outer,
                FlatDomain::Box { .. } => true,
            };
            if inside {
                return x;
            }
        }
    }

    /// Point on the round sphere of the given radius in R^dim, kept at least
    /// `margin` in colatitude away from the poles of the angle chart.
    pub fn sphere_point(&mut self, dim: usize, radius: f64, margin: f64) -> Vec<f64> {
        let pi = std::f64::consts::PI;
        match dim {
            1 => vec![if self.rng.gen_bool(0.5) { radius } else { -radius }],
            2 => {
                let t = self.rng.gen_range(0.0..2.0 * pi);
                vec![radius * t.cos(), radius * t.sin()]
            }
            _ => {
                let th = self.rng.gen_range(margin..pi - margin);
                let ph = self.rng.gen_range(0.0..2.0 * pi);
                vec![radius * th.sin() * ph.cos(), radius * th.sin() * ph.sin(), radius * th.cos()]
            }
        }
    }

    pub fn points(&mut self, domain: &FlatDomain, count: usize) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.interior_point(domain)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a = Sampler::new(7).polynomial(3, 2);
        let b = Sampler::new(7).polynomial(3, 2);
        assert_eq!(a.value(&[0.1, 0.2, 0.3]).unwrap(), b.value(&[0.1, 0.2, 0.3]).unwrap());
        assert_eq!(monomials(2, 2).len(), 6);
        assert_eq!(monomials(3, 3).len(), 20);
    }
}
