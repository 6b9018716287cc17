use std::collections::BTreeMap;

use super::expr::ScalarField;
use super::jet::{Jet2, MAX_DIM};
use super::FieldError;

/// Increasing multi-indices are stored as bit masks over 0..MAX_DIM.
pub type Mask = u8;

pub fn mask_indices(mask: Mask) -> Vec<usize> {
    (0..8).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn mask_of(indices: &[usize]) -> Mask {
    indices.iter().fold(0, |m, &i| m | (1 << i))
}

/// All increasing p-tuples of 0..dim, lexicographic.
pub fn masks_of_degree(dim: usize, p: usize) -> Vec<Mask> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p);
    fn rec(start: usize, dim: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Mask>) {
        if cur.len() == p {
            out.push(mask_of(cur));
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(i + 1, dim, p, cur, out);
            cur.pop();
        }
    }
    rec(0, dim, p, &mut cur, &mut out);
    out
}

/// Sort an index tuple: returns its mask and the permutation sign, or None if
/// an index repeats.
pub fn canonical(indices: &[usize]) -> Option<(Mask, f64)> {
    let mut v = indices.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((mask_of(&v), sign))
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// A p-form on R^D with closed-form coefficient fields.
#[derive(Clone, Debug, PartialEq)]
pub struct PFormField {
    degree: usize,
    dim: usize,
    components: BTreeMap<Mask, ScalarField>,
}

impl PFormField {
    pub fn zero(degree: usize, dim: usize) -> Self {
        assert!(dim <= MAX_DIM && degree <= dim, "degree {degree} form on R^{dim} unsupported");
        PFormField { degree, dim, components: BTreeMap::new() }
    }

    /// A 0-form.
    pub fn scalar(dim: usize, u: ScalarField) -> Self {
        Self::zero(0, dim).with(&[], u)
    }

    /// Builder: add `coef` times dx_{i1}∧…∧dx_{ip}; unsorted indices pick up
    /// the permutation sign, repeated indices contribute nothing.
    pub fn with(mut self, indices: &[usize], coef: ScalarField) -> Self {
        assert_eq!(indices.len(), self.degree, "multi-index length must equal the degree");
        assert!(indices.iter().all(|&i| i < self.dim), "index out of range");
        if let Some((m, s)) = canonical(indices) {
            let add = if s < 0.0 { -coef } else { coef };
            let cur = self.components.remove(&m).unwrap_or_else(ScalarField::zero);
            let new = cur + add;
            if !new.is_zero() {
                self.components.insert(m, new);
            }
        }
        self
    }

    /// The exterior derivative of a scalar field, built symbolically.
    pub fn differential(dim: usize, u: &ScalarField) -> Self {
        (0..dim).fold(Self::zero(1, dim), |w, i| w.with(&[i], u.derivative(i)))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> impl Iterator<Item = (Mask, &ScalarField)> {
        self.components.iter().map(|(m, f)| (*m, f))
    }

    /// Signed component for an arbitrary index tuple.
    pub fn component(&self, indices: &[usize]) -> ScalarField {
        match canonical(indices) {
            Some((m, s)) => {
                let c = self.components.get(&m).cloned().unwrap_or_else(ScalarField::zero);
                if s < 0.0 {
                    -c
                } else {
                    c
                }
            }
            None => ScalarField::zero(),
        }
    }

    pub fn scale(&self, g: &ScalarField) -> Self {
        let mut out = Self::zero(self.degree, self.dim);
        for (m, c) in &self.components {
            out.components.insert(*m, c.clone() * g.clone());
        }
        out
    }

    /// Jets of all components at x; absent components are zero jets.
    pub fn jets(&self, x: &[f64]) -> Result<[Jet2; 16], FieldError> {
        if x.len() != self.dim {
            return Err(FieldError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let mut out = [Jet2::constant(self.dim, 0.0); 16];
        for (m, c) in &self.components {
            out[*m as usize] = c.jet(x)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_access() {
        let w = PFormField::zero(2, 3).with(&[2, 0], ScalarField::constant(3.0));
        assert_eq!(w.component(&[0, 2]).as_const(), Some(-3.0));
        assert_eq!(w.component(&[2, 0]).as_const(), Some(3.0));
        assert!(w.component(&[1, 1]).is_zero());
    }

    #[test]
    fn lexicographic_masks() {
        let m = masks_of_degree(4, 2);
        let tuples: Vec<_> = m.iter().map(|&k| mask_indices(k)).collect();
        assert_eq!(tuples, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(canonical(&[2, 0, 1]), Some((0b111, 1.0)));
        assert_eq!(canonical(&[1, 0]), Some((0b11, -1.0)));
    }
}
