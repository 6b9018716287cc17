use std::fmt;
use std::str::FromStr;

use super::complex::{MeshKind, SimplicialComplex};
use super::refine::refine;
use super::MeshError;

/// Shapes produced by [`generate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// [-1, 1] split into equal segments.
    Interval { segments: usize },
    /// Inscribed regular polygon in the unit circle.
    Circle { segments: usize },
    /// Hexagon fan refined `level` times, rim on the unit circle.
    Disc { level: usize },
    /// Unit ball from concentric icosphere shells.
    Ball3 { level: usize },
    /// Icosahedron refined `level` times, projected to the unit sphere.
    Icosphere { level: usize },
    /// Periodic nx × ny grid on [0, lx) × [0, ly).
    FlatTorus { nx: usize, ny: usize, lx: f64, ly: f64 },
}

impl Shape {
    pub fn flat_torus(nx: usize, ny: usize) -> Shape {
        Shape::FlatTorus { nx, ny, lx: 1.0, ly: 1.0 }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Interval { segments } => write!(f, "interval({segments})"),
            Shape::Circle { segments } => write!(f, "circle({segments})"),
            Shape::Disc { level } => write!(f, "disc({level})"),
            Shape::Ball3 { level } => write!(f, "ball3({level})"),
            Shape::Icosphere { level } => write!(f, "icosphere({level})"),
            Shape::FlatTorus { nx, ny, lx, ly } => {
                if *lx == 1.0 && *ly == 1.0 {
                    write!(f, "flat_torus({nx},{ny})")
                } else {
                    write!(f, "flat_torus({nx},{ny},{lx:?},{ly:?})")
                }
            }
        }
    }
}

impl FromStr for Shape {
    type Err = MeshError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MeshError::UnsupportedShape(s.to_string());
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], &s[i + 1..s.len() - 1]),
            None => (s, ""),
            _ => return Err(bad()),
        };
        let nums: Vec<&str> = if args.trim().is_empty() { vec![] } else { args.split(',').map(str::trim).collect() };
        let int = |i: usize| -> Result<usize, MeshError> { nums.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let real = |i: usize| -> Result<f64, MeshError> { nums.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let shape = match (name.trim(), nums.len()) {
            ("interval", 0) => Shape::Interval { segments: 1 },
            ("interval", 1) => Shape::Interval { segments: int(0)? },
            ("circle", 1) => Shape::Circle { segments: int(0)? },
            ("disc", 1) => Shape::Disc { level: int(0)? },
            ("ball3", 1) => Shape::Ball3 { level: int(0)? },
            ("icosphere", 1) => Shape::Icosphere { level: int(0)? },
            ("flat_torus", 2) => Shape::flat_torus(int(0)?, int(1)?),
            ("flat_torus", 4) => Shape::FlatTorus { nx: int(0)?, ny: int(1)?, lx: real(2)?, ly: real(3)? },
            _ => return Err(bad()),
        };
        Ok(shape)
    }
}

fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
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
            let k = a[r][c] / a[c][c];
            for j in c..n {
                a[r][j] -= k * a[c][j];
            }
        }
    }
    d
}

/// Orientation of a full-dimensional simplex: sign of det(x_i − x_0).
pub(crate) fn volume_sign(pts: &[Vec<f64>]) -> f64 {
    let rows: Vec<Vec<f64>> = pts[1..].iter().map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect()).collect();
    det(&rows)
}

/// Sort tuples and record parity, flipping tuples whose orientation test is
/// negative first.
fn orient(tuples: Vec<Vec<usize>>, test: impl Fn(&[usize]) -> f64) -> (Vec<Vec<usize>>, Vec<i8>) {
    let mut out = Vec::with_capacity(tuples.len());
    let mut signs = Vec::with_capacity(tuples.len());
    for mut t in tuples {
        if test(&t) < 0.0 {
            let k = t.len();
            t.swap(k - 2, k - 1);
        }
        let mut s = 1i8;
        for i in 1..t.len() {
            let mut j = i;
            while j > 0 && t[j - 1] > t[j] {
                t.swap(j - 1, j);
                s = -s;
                j -= 1;
            }
        }
        out.push(t);
        signs.push(s);
    }
    (out, signs)
}

fn icosahedron() -> (Vec<Vec<f64>>, Vec<Vec<usize>>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let v = raw
        .iter()
        .map(|p| {
            let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            p.iter().map(|x| x / n).collect()
        })
        .collect();
    let f = [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (v, f.iter().map(|t| t.to_vec()).collect())
}

fn icosphere(level: usize) -> Result<SimplicialComplex, MeshError> {
    let (v, f) = icosahedron();
    let (top, signs) = orient(f, |t| det(&[v[t[0]].clone(), v[t[1]].clone(), v[t[2]].clone()]));
    let mut k = SimplicialComplex::build_oriented(3, v, top, signs, MeshKind::Sphere { radius: 1.0 }, false)?;
    for _ in 0..level {
        k = refine(&k);
    }
    Ok(k)
}

/// Layered prisms between concentric copies of a sphere triangulation.
/// Shell `s` sits at radius `radii[s]`; with `cone` the innermost shell is
/// coned to an extra vertex at the origin.
fn layered(sphere: &SimplicialComplex, radii: &[f64], cone: bool, kind: MeshKind) -> Result<SimplicialComplex, MeshError> {
    let nv = sphere.count(0);
    let off = usize::from(cone);
    let id = |s: usize, i: usize| off + s * nv + i;
    let mut verts = Vec::with_capacity(off + nv * radii.len());
    if cone {
        verts.push(vec![0.0; 3]);
    }
    for &r in radii {
        for p in sphere.vertices() {
            let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            verts.push(p.iter().map(|x| x * r / n).collect());
        }
    }
    let mut tets = Vec::new();
    for tri in sphere.simplices(2) {
        let (a, b, c) = (tri[0], tri[1], tri[2]);
        if cone {
            tets.push(vec![0, id(0, a), id(0, b), id(0, c)]);
        }
        for s in 0..radii.len() - 1 {
            let (i, o) = (|x| id(s, x), |x| id(s + 1, x));
            tets.push(vec![i(a), i(b), i(c), o(c)]);
            tets.push(vec![i(a), i(b), o(b), o(c)]);
            tets.push(vec![i(a), o(a), o(b), o(c)]);
        }
    }
    let (top, signs) = orient(tets, |t| volume_sign(&t.iter().map(|&i| verts[i].clone()).collect::<Vec<_>>()));
    SimplicialComplex::build_oriented(3, verts, top, signs, kind, false)
}

/// Spherical shell r_in ≤ |x| ≤ r_out in R³ with `layers` prism layers over
/// icosphere(level).
pub fn shell3(level: usize, r_in: f64, r_out: f64, layers: usize) -> Result<SimplicialComplex, MeshError> {
    if !(0.0 < r_in && r_in < r_out) || layers == 0 {
        return Err(MeshError::UnsupportedShape(format!("shell3({level}, {r_in}, {r_out}, {layers})")));
    }
    let sphere = icosphere(level)?;
    let radii: Vec<f64> = (0..=layers).map(|s| r_in + (r_out - r_in) * s as f64 / layers as f64).collect();
    layered(&sphere, &radii, false, MeshKind::Shell { inner: r_in, outer: r_out })
}

/// Periodic chart [0, length) split into equal segments, oriented along
/// increasing coordinate.
pub fn periodic_segment(segments: usize, length: f64) -> Result<SimplicialComplex, MeshError> {
    if segments < 3 || !(length > 0.0) {
        return Err(MeshError::UnsupportedShape(format!("periodic_segment({segments}, {length})")));
    }
    let v = (0..segments).map(|i| vec![length * i as f64 / segments as f64]).collect();
    let edges = (0..segments).map(|i| vec![i, (i + 1) % segments]).collect();
    let (top, signs) = orient(edges, |_| 1.0);
    SimplicialComplex::build_oriented(1, v, top, signs, MeshKind::Torus { periods: vec![length] }, false)
}

pub fn generate(shape: &Shape) -> Result<SimplicialComplex, MeshError> {
    let unsupported = || MeshError::UnsupportedShape(shape.to_string());
    match *shape {
        Shape::Interval { segments } => {
            if segments == 0 {
                return Err(unsupported());
            }
            let v = (0..=segments).map(|i| vec![-1.0 + 2.0 * i as f64 / segments as f64]).collect();
            let top = (0..segments).map(|i| vec![i, i + 1]).collect();
            SimplicialComplex::build_oriented(1, v, top, vec![1; segments], MeshKind::Ball { radius: 1.0 }, false)
        }
        Shape::Circle { segments } => {
            if segments < 3 {
                return Err(unsupported());
            }
            let v: Vec<Vec<f64>> = (0..segments)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / segments as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect();
            let edges = (0..segments).map(|i| vec![i, (i + 1) % segments]).collect();
            let (top, signs) = orient(edges, |_| 1.0);
            SimplicialComplex::build_oriented(2, v, top, signs, MeshKind::Sphere { radius: 1.0 }, false)
        }
        Shape::Disc { level } => {
            let mut v = vec![vec![0.0, 0.0]];
            for i in 0..6 {
                let t = std::f64::consts::PI * i as f64 / 3.0;
                v.push(vec![t.cos(), t.sin()]);
            }
            let tris = (0..6).map(|i| vec![0, 1 + i, 1 + (i + 1) % 6]).collect();
            let (top, signs) = orient(tris, |t| volume_sign(&t.iter().map(|&i| v[i].clone()).collect::<Vec<_>>()));
            let mut k = SimplicialComplex::build_oriented(2, v, top, signs, MeshKind::Ball { radius: 1.0 }, false)?;
            for _ in 0..level {
                k = refine(&k);
            }
            Ok(k)
        }
        Shape::Icosphere { level } => icosphere(level),
        Shape::Ball3 { level } => {
            let sphere = icosphere(level)?;
            let layers = level + 1;
            let radii: Vec<f64> = (1..=layers).map(|s| s as f64 / layers as f64).collect();
            layered(&sphere, &radii, true, MeshKind::Ball { radius: 1.0 })
        }
        Shape::FlatTorus { nx, ny, lx, ly } => {
            if nx < 3 || ny < 3 || !(lx > 0.0 && ly > 0.0) {
                return Err(unsupported());
            }
            let id = |i: usize, j: usize| (j % ny) * nx + (i % nx);
            let v: Vec<Vec<f64>> = (0..ny)
                .flat_map(|j| (0..nx).map(move |i| vec![lx * i as f64 / nx as f64, ly * j as f64 / ny as f64]))
                .collect();
            let mut tris = Vec::with_capacity(2 * nx * ny);
            for j in 0..ny {
                for i in 0..nx {
                    tris.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                    tris.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                }
            }
            // Counterclockwise in the chart by construction.
            let (top, signs) = orient(tris, |_| 1.0);
            SimplicialComplex::build_oriented(2, v, top, signs, MeshKind::Torus { periods: vec![lx, ly] }, false)
        }
    }
}
