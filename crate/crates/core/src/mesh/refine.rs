use super::complex::{boundary_complex, MeshKind, SimplicialComplex};
use super::generate::volume_sign;

/// Local child simplices; labels < k+1 are parent vertices, the rest index
/// `mids` (pairs of parent vertices).
fn children(k: usize, coords: &[Vec<f64>]) -> (Vec<(usize, usize)>, Vec<Vec<usize>>) {
    let n = k + 1;
    let mut mids = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            mids.push((i, j));
        }
    }
    let m = |i: usize, j: usize| n + mids.iter().position(|&p| p == (i.min(j), i.max(j))).unwrap();
    let cells = match k {
        1 => vec![vec![0, m(0, 1)], vec![m(0, 1), 1]],
        2 => vec![
            vec![0, m(0, 1), m(0, 2)],
            vec![m(0, 1), 1, m(1, 2)],
            vec![m(0, 2), m(1, 2), 2],
            vec![m(0, 1), m(1, 2), m(0, 2)],
        ],
        3 => {
            let mut c = vec![
                vec![0, m(0, 1), m(0, 2), m(0, 3)],
                vec![m(0, 1), 1, m(1, 2), m(1, 3)],
                vec![m(0, 2), m(1, 2), 2, m(2, 3)],
                vec![m(0, 3), m(1, 3), m(2, 3), 3],
            ];
            // Split the inner octahedron along its shortest diagonal.
            let mid_pt = |(i, j): (usize, usize)| -> Vec<f64> {
                coords[i].iter().zip(&coords[j]).map(|(a, b)| 0.5 * (a + b)).collect()
            };
            let diags = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
            let len = |d: &((usize, usize), (usize, usize))| -> f64 {
                let (a, b) = (mid_pt(d.0), mid_pt(d.1));
                a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum()
            };
            let mut best = 0;
            for i in 1..3 {
                if len(&diags[i]) < len(&diags[best]) - 1e-12 * len(&diags[best]) {
                    best = i;
                }
            }
            let (p, q) = diags[best];
            let rest: Vec<(usize, usize)> = mids.iter().copied().filter(|&e| e != p && e != q).collect();
            let share = |a: (usize, usize), b: (usize, usize)| a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1;
            let mut ring = vec![rest[0]];
            while ring.len() < 4 {
                let last = *ring.last().unwrap();
                let next = rest.iter().copied().find(|&e| !ring.contains(&e) && share(last, e)).unwrap();
                ring.push(next);
            }
            for i in 0..4 {
                let (a, b) = (ring[i], ring[(i + 1) % 4]);
                c.push(vec![m(p.0, p.1), m(q.0, q.1), m(a.0, a.1), m(b.0, b.1)]);
            }
            c
        }
        _ => unreachable!("refinement supports dimensions 1 to 3"),
    };
    (mids, cells)
}

/// Orientation of a child relative to the parent's vertex order, from
/// barycentric coordinates.
fn relative_sign(n: usize, mids: &[(usize, usize)], child: &[usize]) -> f64 {
    let bary = |l: usize| -> Vec<f64> {
        let mut b = vec![0.0; n];
        if l < n {
            b[l] = 1.0;
        } else {
            let (i, j) = mids[l - n];
            b[i] = 0.5;
            b[j] = 0.5;
        }
        b[1..].to_vec()
    };
    volume_sign(&child.iter().map(|&l| bary(l)).collect::<Vec<_>>())
}

/// Uniform refinement: every edge is split at its midpoint (2, 4 or 8
/// children per cell). New vertices are projected according to the mesh kind.
pub fn refine(k: &SimplicialComplex) -> SimplicialComplex {
    let n = k.top_dim();
    assert!((1..=3).contains(&n), "refinement supports dimensions 1 to 3");
    let nv = k.count(0);
    let mut verts: Vec<Vec<f64>> = k.vertices().to_vec();
    let on_boundary: Vec<bool> = if n >= 2 && matches!(k.kind(), MeshKind::Ball { .. } | MeshKind::Shell { .. }) {
        let mut b = vec![false; k.count(1)];
        let bm = boundary_complex(k).expect("boundary of generated mesh");
        if !bm.is_empty() {
            for &e in &bm.inclusion[1] {
                b[e] = true;
            }
        }
        b
    } else {
        vec![false; k.count(1)]
    };
    for (ei, e) in k.simplices(1).iter().enumerate() {
        let x = k.simplex_coords(e);
        let mut p: Vec<f64> = x[0].iter().zip(&x[1]).map(|(a, b)| 0.5 * (a + b)).collect();
        let norm = p.iter().map(|t| t * t).sum::<f64>().sqrt();
        let radius = match k.kind() {
            MeshKind::Sphere { radius } => Some(*radius),
            MeshKind::Ball { radius } if on_boundary[ei] => Some(*radius),
            MeshKind::Shell { inner, outer } if on_boundary[ei] => {
                Some(if (norm - inner).abs() < (norm - outer).abs() { *inner } else { *outer })
            }
            _ => None,
        };
        if let Some(r) = radius {
            p.iter_mut().for_each(|t| *t *= r / norm);
        }
        if let MeshKind::Torus { periods } = k.kind() {
            for (t, l) in p.iter_mut().zip(periods) {
                *t -= l * (*t / l).floor();
                if *t >= *l {
                    *t -= l;
                }
            }
        }
        verts.push(p);
    }
    let mut top = Vec::new();
    let mut signs = Vec::new();
    for (ci, cell) in k.simplices(n).iter().enumerate() {
        let coords = k.simplex_coords(cell);
        let (mids, locals) = children(n, &coords);
        let global = |l: usize| -> usize {
            if l <= n {
                cell[l]
            } else {
                let (i, j) = mids[l - n - 1];
                nv + k.simplex_index(&[cell[i], cell[j]]).expect("edge of cell")
            }
        };
        for child in locals {
            let rel = relative_sign(n + 1, &mids, &child);
            let mut t: Vec<usize> = child.iter().map(|&l| global(l)).collect();
            let mut s = k.orientation(ci) * if rel > 0.0 { 1 } else { -1 };
            for i in 1..t.len() {
                let mut j = i;
                while j > 0 && t[j - 1] > t[j] {
                    t.swap(j - 1, j);
                    s = -s;
                    j -= 1;
                }
            }
            top.push(t);
            signs.push(s);
        }
    }
    SimplicialComplex::build_oriented(k.ambient_dim(), verts, top, signs, k.kind().clone(), false)
        .expect("refinement preserves manifold structure")
}
