use std::fmt::Write;

use super::complex::{MeshKind, SimplicialComplex};
use super::MeshError;

/// Plain-text dump: `dim D n`, an optional `kind` or `periods` line, `v`
/// lines with coordinates, then `s` lines with the sorted top simplex and its
/// orientation sign. Floats are written in shortest round-trip form.
pub fn dump_mesh(k: &SimplicialComplex) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "dim {} {}", k.ambient_dim(), k.top_dim());
    match k.kind() {
        MeshKind::Generic => {}
        MeshKind::Sphere { radius } => {
            let _ = writeln!(s, "kind sphere {radius:?}");
        }
        MeshKind::Ball { radius } => {
            let _ = writeln!(s, "kind ball {radius:?}");
        }
        MeshKind::Shell { inner, outer } => {
            let _ = writeln!(s, "kind shell {inner:?} {outer:?}");
        }
        MeshKind::Torus { periods } => {
            s.push_str("periods");
            for p in periods {
                let _ = write!(s, " {p:?}");
            }
            s.push('\n');
        }
    }
    for v in k.vertices() {
        s.push('v');
        for x in v {
            let _ = write!(s, " {x:?}");
        }
        s.push('\n');
    }
    if k.top_dim() > 0 || k.count(0) > 0 {
        for (i, t) in k.simplices(k.top_dim()).iter().enumerate() {
            s.push('s');
            for v in t {
                let _ = write!(s, " {v}");
            }
            let _ = writeln!(s, " {}", k.orientation(i));
        }
    }
    s
}

pub fn load_mesh(text: &str) -> Result<SimplicialComplex, MeshError> {
    let err = |line: usize, m: &str| MeshError::Format { line, message: m.to_string() };
    let mut header = None;
    let mut kind = MeshKind::Generic;
    let mut verts = Vec::new();
    let mut top = Vec::new();
    let mut signs = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        let mut it = line.split_whitespace();
        let Some(tag) = it.next() else { continue };
        let rest: Vec<&str> = it.collect();
        let reals = || -> Result<Vec<f64>, MeshError> {
            rest.iter().map(|t| t.parse::<f64>().map_err(|_| err(ln, "expected a number"))).collect()
        };
        match tag {
            "dim" => {
                let v: Vec<usize> =
                    rest.iter().map(|t| t.parse().map_err(|_| err(ln, "expected integers"))).collect::<Result<_, _>>()?;
                if v.len() != 2 {
                    return Err(err(ln, "header needs `dim D n`"));
                }
                header = Some((v[0], v[1]));
            }
            "kind" => {
                let name = rest.first().copied().unwrap_or("");
                let nums: Vec<f64> =
                    rest[1.min(rest.len())..].iter().map(|t| t.parse().map_err(|_| err(ln, "expected a number"))).collect::<Result<_, _>>()?;
                kind = match (name, nums.len()) {
                    ("sphere", 1) => MeshKind::Sphere { radius: nums[0] },
                    ("ball", 1) => MeshKind::Ball { radius: nums[0] },
                    ("shell", 2) => MeshKind::Shell { inner: nums[0], outer: nums[1] },
                    _ => return Err(err(ln, "unknown kind")),
                };
            }
            "periods" => kind = MeshKind::Torus { periods: reals()? },
            "v" => verts.push(reals()?),
            "s" => {
                let v: Vec<i64> =
                    rest.iter().map(|t| t.parse().map_err(|_| err(ln, "expected integers"))).collect::<Result<_, _>>()?;
                let (sign, idx) = v.split_last().ok_or_else(|| err(ln, "empty simplex line"))?;
                if *sign != 1 && *sign != -1 {
                    return Err(err(ln, "orientation sign must be 1 or -1"));
                }
                if idx.iter().any(|&i| i < 0) {
                    return Err(err(ln, "negative vertex index"));
                }
                top.push(idx.iter().map(|&i| i as usize).collect::<Vec<_>>());
                signs.push(*sign as i8);
            }
            _ => return Err(err(ln, "unknown line tag")),
        }
    }
    let (d, n) = header.ok_or_else(|| err(1, "missing `dim` header"))?;
    if top.iter().any(|t| t.len() != n + 1) {
        return Err(err(0, "simplex size does not match the header"));
    }
    if top.is_empty() && n == 0 {
        return SimplicialComplex::build_oriented(d, verts, vec![], vec![], kind, false);
    }
    SimplicialComplex::build_oriented(d, verts, top, signs, kind, false)
}
