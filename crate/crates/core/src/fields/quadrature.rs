use std::f64::consts::PI;

use super::FieldError;

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    // P_n(z) and P_n'(z) by the three-term recurrence.
    let legendre = |z: f64| {
        let (mut p0, mut p1) = (1.0, z);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        if n == 1 {
            (z, 1.0)
        } else {
            (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
        }
    };
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = if n == 1 { 0.0 } else { (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos() };
        for _ in 0..100 {
            let (p, dp) = legendre(z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss rule mapped to [a, b].
pub fn gauss_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    (x.iter().map(|t| a + h * (t + 1.0)).collect(), w.iter().map(|v| v * h).collect())
}

/// Points and weights; `exactness_degree` is the total polynomial degree
/// integrated exactly.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, mut g: impl FnMut(&[f64]) -> f64) -> f64 {
        pairwise_sum(&self.points.iter().zip(&self.weights).map(|(p, w)| w * g(p)).collect::<Vec<_>>())
    }
}

/// Fixed-order pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let m = v.len() / 2;
    pairwise_sum(&v[..m]) + pairwise_sum(&v[m..])
}

pub(crate) fn check_order(order: usize) -> Result<(), FieldError> {
    if order > 40 {
        return Err(FieldError::UnsupportedOrder(order));
    }
    Ok(())
}

/// Uniform azimuthal rule, exact for trigonometric polynomials of degree < n.
pub fn uniform_circle(n: usize) -> (Vec<f64>, f64) {
    ((0..n).map(|k| 2.0 * PI * (k as f64 + 0.5) / n as f64).collect(), 2.0 * PI / n as f64)
}

/// Rule on the round sphere of radius `radius` in R^dim (dim ∈ {1, 2, 3}).
/// For dim = 1 the "sphere" is the two points ±radius with unit weights.
pub fn sphere_rule(dim: usize, radius: f64, order: usize) -> Result<QuadratureRule, FieldError> {
    check_order(order)?;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match dim {
        1 => {
            points = vec![vec![-radius], vec![radius]];
            weights = vec![1.0, 1.0];
        }
        2 => {
            let (phi, w) = uniform_circle(order + 2);
            for t in phi {
                points.push(vec![radius * t.cos(), radius * t.sin()]);
                weights.push(w * radius);
            }
        }
        3 => {
            let (ct, wt) = gauss_legendre(order / 2 + 2);
            let (phi, wp) = uniform_circle(order + 2);
            for (c, w) in ct.iter().zip(&wt) {
                let s = (1.0 - c * c).sqrt();
                for t in &phi {
                    points.push(vec![radius * s * t.cos(), radius * s * t.sin(), radius * c]);
                    weights.push(w * wp * radius * radius);
                }
            }
        }
        _ => return Err(FieldError::UnsupportedDimension(dim)),
    }
    Ok(QuadratureRule { dim, points, weights, exactness_degree: order })
}

/// Rule on the shell r_in ≤ |x| ≤ r_out in R^dim (r_in = 0 gives the ball).
pub fn shell_rule(dim: usize, r_in: f64, r_out: f64, order: usize) -> Result<QuadratureRule, FieldError> {
    check_order(order)?;
    let (rs, wr) = gauss_interval(order / 2 + 3, r_in, r_out);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    if dim == 1 {
        for (r, w) in rs.iter().zip(&wr) {
            for s in [-1.0, 1.0] {
                points.push(vec![s * r]);
                weights.push(*w);
            }
        }
        return Ok(QuadratureRule { dim, points, weights, exactness_degree: order });
    }
    let unit = sphere_rule(dim, 1.0, order)?;
    for (r, w) in rs.iter().zip(&wr) {
        let jac = r.powi(dim as i32 - 1);
        for (p, v) in unit.points.iter().zip(&unit.weights) {
            points.push(p.iter().map(|c| c * r).collect());
            weights.push(w * v * jac);
        }
    }
    Ok(QuadratureRule { dim, points, weights, exactness_degree: order })
}

/// Tensor Gauss rule on an axis-aligned box.
pub fn box_rule(lo: &[f64], hi: &[f64], order: usize) -> Result<QuadratureRule, FieldError> {
    check_order(order)?;
    let dim = lo.len();
    let n = order / 2 + 1;
    let axes: Vec<_> = (0..dim).map(|a| gauss_interval(n, lo[a], hi[a])).collect();
    let mut points = vec![vec![]];
    let mut weights = vec![1.0];
    for (x, w) in &axes {
        let mut np = Vec::new();
        let mut nw = Vec::new();
        for (p, pw) in points.iter().zip(&weights) {
            for (xi, wi) in x.iter().zip(w) {
                let mut q = p.clone();
                q.push(*xi);
                np.push(q);
                nw.push(pw * wi);
            }
        }
        points = np;
        weights = nw;
    }
    Ok(QuadratureRule { dim, points, weights, exactness_degree: order })
}

/// Rule on the reference k-simplex in barycentric coordinates, weights summing
/// to 1 (multiply by the cell volume). Collapsed Gauss rule averaged over all
/// vertex permutations, so the rule does not depend on vertex order.
pub fn simplex_rule(k: usize, order: usize) -> Vec<(Vec<f64>, f64)> {
    if k == 0 {
        return vec![(vec![1.0], 1.0)];
    }
    let m = (order + k).div_ceil(2).max(1);
    let (g, gw) = gauss_interval(m, 0.0, 1.0);
    // Collapsed map: ξ_1 = u_1, ξ_2 = u_2 (1 − u_1), ...
    let mut base: Vec<(Vec<f64>, f64)> = vec![(vec![], 1.0)];
    for _ in 0..k {
        let mut next = Vec::new();
        for (u, w) in &base {
            for (gi, wi) in g.iter().zip(&gw) {
                let mut v = u.clone();
                v.push(*gi);
                next.push((v, w * wi));
            }
        }
        base = next;
    }
    let kfact: f64 = (1..=k).map(|i| i as f64).product();
    let mut pts: Vec<(Vec<f64>, f64)> = Vec::new();
    for (u, w) in base {
        let mut rest = 1.0;
        let mut jac = 1.0;
        let mut bary = Vec::with_capacity(k + 1);
        for (i, ui) in u.iter().enumerate() {
            bary.push(ui * rest);
            rest *= 1.0 - ui;
            jac *= (1.0 - ui).powi((k - 1 - i) as i32);
        }
        bary.push(rest);
        pts.push((bary, w * jac * kfact));
    }
    let perms = permutations(k + 1);
    let scale = 1.0 / perms.len() as f64;
    let mut out = Vec::with_capacity(pts.len() * perms.len());
    for perm in &perms {
        for (b, w) in &pts {
            out.push((perm.iter().map(|&i| b[i]).collect(), w * scale));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}
