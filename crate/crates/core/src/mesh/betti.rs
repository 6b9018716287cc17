use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedMul, CheckedSub, One, Zero};

use super::complex::{Incidence, SimplicialComplex};

type Row<T> = Vec<(usize, T)>;

trait Field: Clone + Zero + One + PartialEq {
    fn sub_scaled(&self, k: &Self, b: &Self) -> Option<Self>;
    fn div(&self, b: &Self) -> Option<Self>;
}

impl Field for Ratio<i64> {
    fn sub_scaled(&self, k: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(&k.checked_mul(b)?)
    }
    fn div(&self, b: &Self) -> Option<Self> {
        num_traits::CheckedDiv::checked_div(self, b)
    }
}

impl Field for BigRational {
    fn sub_scaled(&self, k: &Self, b: &Self) -> Option<Self> {
        Some(self - k * b)
    }
    fn div(&self, b: &Self) -> Option<Self> {
        Some(self / b)
    }
}

/// Incremental row echelon reduction; `None` on overflow.
fn rank_generic<T: Field>(rows: &[Row<T>]) -> Option<usize> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&i| (rows[i].len(), i));
    let mut pivots: BTreeMap<usize, Row<T>> = BTreeMap::new();
    for i in order {
        let mut row = rows[i].clone();
        loop {
            let Some(&(lead, ref a)) = row.first() else { break };
            match pivots.get(&lead) {
                None => {
                    // Normalize so the pivot entry is one.
                    let a = a.clone();
                    let mut out = Vec::with_capacity(row.len());
                    for (c, v) in row {
                        out.push((c, v.div(&a)?));
                    }
                    pivots.insert(lead, out);
                    break;
                }
                Some(p) => {
                    let k = a.clone();
                    let mut out = Vec::with_capacity(row.len() + p.len());
                    let (mut x, mut y) = (row.iter().peekable(), p.iter().peekable());
                    loop {
                        match (x.peek(), y.peek()) {
                            (None, None) => break,
                            (Some(&&(cx, ref vx)), Some(&&(cy, ref vy))) if cx == cy => {
                                let v = vx.sub_scaled(&k, vy)?;
                                if !v.is_zero() {
                                    out.push((cx, v));
                                }
                                x.next();
                                y.next();
                            }
                            (Some(&&(cx, ref vx)), Some(&&(cy, _))) if cx < cy => {
                                out.push((cx, vx.clone()));
                                x.next();
                            }
                            (Some(&&(cx, ref vx)), None) => {
                                out.push((cx, vx.clone()));
                                x.next();
                            }
                            (_, Some(&&(cy, ref vy))) => {
                                out.push((cy, T::zero().sub_scaled(&k, vy)?));
                                y.next();
                            }
                        }
                    }
                    row = out;
                }
            }
        }
    }
    Some(pivots.len())
}

/// Exact rank over the rationals of an integer matrix given by sparse rows.
pub fn rank_exact(rows: &[Vec<(usize, i64)>]) -> usize {
    let small: Vec<Row<Ratio<i64>>> =
        rows.iter().map(|r| r.iter().map(|&(c, v)| (c, Ratio::from_integer(v))).collect()).collect();
    if let Some(r) = rank_generic(&small) {
        return r;
    }
    let big: Vec<Row<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&(c, v)| (c, BigRational::from_integer(BigInt::from(v)))).collect())
        .collect();
    rank_generic(&big).expect("arbitrary precision does not overflow")
}

fn incidence_rank(d: &Incidence) -> usize {
    let rows: Vec<Vec<(usize, i64)>> = d.rows.iter().map(|r| r.iter().map(|&(c, v)| (c, v as i64)).collect()).collect();
    rank_exact(&rows)
}

/// Betti numbers b_0..b_top over the rationals.
pub fn betti(k: &SimplicialComplex) -> Vec<usize> {
    if k.is_empty() {
        return Vec::new();
    }
    let n = k.top_dim();
    let ranks: Vec<usize> = (0..n).map(|p| incidence_rank(k.coboundary(p))).collect();
    (0..=n)
        .map(|p| {
            let r_out = if p < n { ranks[p] } else { 0 };
            let r_in = if p > 0 { ranks[p - 1] } else { 0 };
            k.count(p) - r_out - r_in
        })
        .collect()
}
