use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::linalg::SparseMatrix;

use super::MeshError;

/// Signed incidence matrix with small-integer entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Incidence {
    pub nrows: usize,
    pub ncols: usize,
    /// Per row: (column, ±1) sorted by column.
    pub rows: Vec<Vec<(usize, i8)>>,
}

impl Incidence {
    pub fn to_sparse(&self) -> SparseMatrix {
        let t: Vec<_> = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v as f64)))
            .collect();
        SparseMatrix::from_triplets(self.nrows, self.ncols, &t)
    }

    /// Integer product self · o.
    pub fn compose(&self, o: &Incidence) -> Vec<Vec<(usize, i64)>> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc: std::collections::BTreeMap<usize, i64> = Default::default();
                for &(k, a) in row {
                    for &(c, b) in &o.rows[k] {
                        *acc.entry(c).or_insert(0) += a as i64 * b as i64;
                    }
                }
                acc.into_iter().filter(|(_, v)| *v != 0).collect()
            })
            .collect()
    }
}

/// Extra structure remembered by generators, used by refinement.
#[derive(Clone, Debug, PartialEq)]
pub enum MeshKind {
    /// Plain complex from user data.
    Generic,
    /// Every vertex lies on the sphere |x| = radius.
    Sphere { radius: f64 },
    /// Boundary vertices lie on the sphere |x| = radius.
    Ball { radius: f64 },
    /// Boundary vertices lie on the spheres |x| = inner or |x| = outer.
    Shell { inner: f64, outer: f64 },
    /// Periodic complex over [0, L_1) × … with the flat chart metric.
    Torus { periods: Vec<f64> },
}

/// Oriented simplicial complex. k-simplices are sorted vertex tuples; only
/// top simplices carry an orientation sign relative to the sorted order.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    ambient_dim: usize,
    top_dim: usize,
    vertices: Vec<Vec<f64>>,
    simplices: Vec<Vec<Vec<usize>>>,
    orientation: Vec<i8>,
    coboundary: Vec<Incidence>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    kind: MeshKind,
}

fn parity_sign(t: &[usize]) -> (Vec<usize>, i8) {
    let mut v = t.to_vec();
    let mut s = 1i8;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            s = -s;
            j -= 1;
        }
    }
    (v, s)
}

fn subsets(v: &[usize], k: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(v: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..v.len() {
            cur.push(v[i]);
            rec(v, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(v, k, 0, &mut Vec::new(), out);
}

impl SimplicialComplex {
    /// Build from top simplices whose vertex order gives their orientation.
    /// Orientations are made consistent by propagation across shared ridges
    /// starting from the first cell of each connected component.
    pub fn build(ambient_dim: usize, vertices: Vec<Vec<f64>>, top: &[Vec<usize>]) -> Result<Self, MeshError> {
        let mut sorted = Vec::with_capacity(top.len());
        let mut signs = Vec::with_capacity(top.len());
        for t in top {
            let (s, sign) = parity_sign(t);
            sorted.push(s);
            signs.push(sign);
        }
        Self::build_oriented(ambient_dim, vertices, sorted, signs, MeshKind::Generic, true)
    }

    pub(crate) fn build_oriented(
        ambient_dim: usize,
        vertices: Vec<Vec<f64>>,
        top: Vec<Vec<usize>>,
        mut signs: Vec<i8>,
        kind: MeshKind,
        propagate: bool,
    ) -> Result<Self, MeshError> {
        let nv = vertices.len();
        if vertices.iter().any(|v| v.len() != ambient_dim) {
            return Err(MeshError::InvalidInput("vertex coordinate length differs from ambient dimension".into()));
        }
        let top_dim = match top.first() {
            Some(t) => t.len() - 1,
            None => 0,
        };
        for t in &top {
            if t.len() != top_dim + 1 {
                return Err(MeshError::InvalidInput("top simplices of mixed dimension".into()));
            }
            if t.iter().any(|&v| v >= nv) {
                return Err(MeshError::InvalidInput(format!("simplex {t:?} references a missing vertex")));
            }
            if t.windows(2).any(|w| w[0] >= w[1]) {
                return Err(MeshError::InvalidInput(format!("simplex {t:?} repeats a vertex")));
            }
        }

        // Ridge adjacency and orientation consistency.
        if top_dim > 0 {
            let mut ridge_cells: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
            for (c, t) in top.iter().enumerate() {
                for i in 0..t.len() {
                    let mut r = t.clone();
                    r.remove(i);
                    ridge_cells.entry(r).or_default().push((c, i));
                }
            }
            let mut adj: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); top.len()];
            for (r, cells) in &ridge_cells {
                if cells.len() > 2 {
                    return Err(MeshError::NonManifold(r.clone()));
                }
                if let [(c1, i1), (c2, i2)] = cells[..] {
                    adj[c1].push((c2, i1, i2));
                    adj[c2].push((c1, i2, i1));
                }
            }
            // Deterministic neighbor order.
            adj.iter_mut().for_each(|a| a.sort_unstable());
            // Without propagation every cell keeps its given sign.
            let mut fixed = vec![!propagate; top.len()];
            for start in 0..top.len() {
                if fixed[start] && propagate {
                    continue;
                }
                fixed[start] = true;
                let mut queue = VecDeque::from([start]);
                while let Some(c) = queue.pop_front() {
                    for &(n, ic, in_) in &adj[c] {
                        // Induced ridge orientations must be opposite.
                        let par = if (ic + in_) % 2 == 0 { 1 } else { -1 };
                        let want = -signs[c] * par;
                        if fixed[n] {
                            if signs[n] != want {
                                return Err(MeshError::NonOrientable);
                            }
                        } else {
                            signs[n] = want;
                            fixed[n] = true;
                            queue.push_back(n);
                        }
                    }
                }
            }
        }

        // Face lattice.
        let mut simplices: Vec<Vec<Vec<usize>>> = Vec::with_capacity(top_dim + 1);
        simplices.push((0..nv).map(|v| vec![v]).collect());
        for k in 1..=top_dim {
            if k == top_dim {
                simplices.push(top.clone());
                continue;
            }
            let mut set = BTreeSet::new();
            let mut buf = Vec::new();
            for t in &top {
                buf.clear();
                subsets(t, k + 1, &mut buf);
                set.extend(buf.drain(..));
            }
            simplices.push(set.into_iter().collect());
        }
        if top_dim == 0 && !top.is_empty() {
            // 0-dimensional complex: the listed points only.
            simplices[0] = top.clone();
        }
        let index: Vec<HashMap<Vec<usize>, usize>> = simplices
            .iter()
            .map(|s| s.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect())
            .collect();

        let mut coboundary = Vec::with_capacity(top_dim);
        for k in 0..top_dim {
            let rows = simplices[k + 1]
                .iter()
                .enumerate()
                .map(|(ti, t)| {
                    let s = if k + 1 == top_dim { signs[ti] } else { 1 };
                    let mut row: Vec<(usize, i8)> = (0..t.len())
                        .map(|i| {
                            let mut f = t.clone();
                            f.remove(i);
                            let sign = if i % 2 == 0 { s } else { -s };
                            (index[k][&f], sign)
                        })
                        .collect();
                    row.sort_unstable();
                    row
                })
                .collect();
            coboundary.push(Incidence { nrows: simplices[k + 1].len(), ncols: simplices[k].len(), rows });
        }

        let orientation = if top_dim == 0 && top.is_empty() { vec![1; nv] } else { signs };
        Ok(SimplicialComplex { ambient_dim, top_dim, vertices, simplices, orientation, coboundary, index, kind })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn top_dim(&self) -> usize {
        self.top_dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn kind(&self) -> &MeshKind {
        &self.kind
    }

    pub fn periods(&self) -> Option<&[f64]> {
        match &self.kind {
            MeshKind::Torus { periods } => Some(periods),
            _ => None,
        }
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        &self.simplices[k]
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, |s| s.len())
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.iter().all(|s| s.is_empty())
    }

    /// Orientation sign of top simplex `i` relative to its sorted tuple.
    pub fn orientation(&self, i: usize) -> i8 {
        self.orientation[i]
    }

    pub fn orientations(&self) -> &[i8] {
        &self.orientation
    }

    pub fn simplex_index(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s.len().wrapping_sub(1))?.get(s).copied()
    }

    /// Coboundary from k-cochains to (k+1)-cochains.
    pub fn coboundary(&self, k: usize) -> &Incidence {
        &self.coboundary[k]
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.top_dim).map(|k| if k % 2 == 0 { 1 } else { -1 } * self.count(k) as i64).sum()
    }

    /// Vertex coordinates of a simplex, unwrapped to a common periodic copy
    /// on tori (minimal image relative to the first vertex).
    pub fn simplex_coords(&self, s: &[usize]) -> Vec<Vec<f64>> {
        let base = &self.vertices[s[0]];
        s.iter()
            .map(|&v| {
                let mut x = self.vertices[v].clone();
                if let Some(per) = self.periods() {
                    for a in 0..x.len() {
                        let dlt = x[a] - base[a];
                        x[a] -= per[a] * (dlt / per[a]).round();
                    }
                }
                x
            })
            .collect()
    }

    /// Number of top cells containing each ridge.
    pub(crate) fn ridge_cells(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.count(self.top_dim.saturating_sub(1))];
        if self.top_dim == 0 {
            return out;
        }
        for (c, t) in self.simplices[self.top_dim].iter().enumerate() {
            for i in 0..t.len() {
                let mut r = t.clone();
                r.remove(i);
                out[self.index[self.top_dim - 1][&r]].push((c, i));
            }
        }
        out
    }

    /// True when every ridge bounds exactly two top cells.
    pub fn is_closed(&self) -> bool {
        self.top_dim > 0 && self.ridge_cells().iter().all(|c| c.len() == 2)
    }

    /// Longest edge length (chart metric on tori).
    pub fn mesh_size(&self) -> f64 {
        if self.top_dim == 0 {
            return 0.0;
        }
        self.simplices[1]
            .iter()
            .map(|e| {
                let x = self.simplex_coords(e);
                x[0].iter().zip(&x[1]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// The boundary of a complex with its inclusion into the parent.
#[derive(Clone, Debug)]
pub struct BoundaryMap {
    pub boundary: SimplicialComplex,
    /// inclusion[k][i] = parent index of boundary k-simplex i.
    pub inclusion: Vec<Vec<usize>>,
    /// Inner unit normal per boundary top simplex (facet of the parent).
    pub inner_normal: Vec<Vec<f64>>,
    /// Parent top cell incident to each boundary facet.
    pub incident_cell: Vec<usize>,
}

impl BoundaryMap {
    pub fn is_empty(&self) -> bool {
        self.inner_normal.is_empty()
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn barycenter(pts: &[Vec<f64>]) -> Vec<f64> {
    let n = pts.len() as f64;
    (0..pts[0].len()).map(|a| pts.iter().map(|p| p[a]).sum::<f64>() / n).collect()
}

/// Extract ∂K with induced orientation and inner normals. A closed complex
/// yields an empty map.
pub fn boundary_complex(k: &SimplicialComplex) -> Result<BoundaryMap, MeshError> {
    let n = k.top_dim();
    let empty = || BoundaryMap {
        boundary: SimplicialComplex::build_oriented(k.ambient_dim(), vec![], vec![], vec![], MeshKind::Generic, false)
            .expect("empty complex"),
        inclusion: vec![vec![]; n.max(1)],
        inner_normal: vec![],
        incident_cell: vec![],
    };
    if n == 0 {
        return Ok(empty());
    }
    let ridges = k.ridge_cells();
    let mut facets = Vec::new();
    for (r, cells) in ridges.iter().enumerate() {
        if cells.len() == 1 {
            let (c, i) = cells[0];
            let sign = if i % 2 == 0 { k.orientation(c) } else { -k.orientation(c) };
            facets.push((r, c, sign));
        }
    }
    if facets.is_empty() {
        return Ok(empty());
    }
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for &(r, _, _) in &facets {
        used.extend(k.simplices(n - 1)[r].iter().copied());
    }
    let old_to_new: HashMap<usize, usize> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let verts: Vec<Vec<f64>> = used.iter().map(|&v| k.vertices()[v].clone()).collect();
    let top: Vec<Vec<usize>> =
        facets.iter().map(|&(r, _, _)| k.simplices(n - 1)[r].iter().map(|v| old_to_new[v]).collect()).collect();
    let signs: Vec<i8> = facets.iter().map(|f| f.2).collect();
    let kind = match k.kind() {
        MeshKind::Ball { radius } => MeshKind::Sphere { radius: *radius },
        _ => MeshKind::Generic,
    };
    let boundary = SimplicialComplex::build_oriented(k.ambient_dim(), verts, top, signs, kind, false)?;
    let new_to_old: Vec<usize> = used.iter().copied().collect();
    let inclusion = (0..=boundary.top_dim())
        .map(|d| {
            boundary
                .simplices(d)
                .iter()
                .map(|s| {
                    let parent: Vec<usize> = s.iter().map(|&v| new_to_old[v]).collect();
                    k.simplex_index(&parent).expect("boundary simplex missing from parent")
                })
                .collect()
        })
        .collect();
    let mut inner_normal = Vec::with_capacity(facets.len());
    for &(r, c, _) in &facets {
        let fpts = k.simplex_coords(&k.simplices(n - 1)[r]);
        let cpts = k.simplex_coords(&k.simplices(n)[c]);
        let mut v = sub(&barycenter(&cpts), &barycenter(&fpts));
        // Remove components along the facet.
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for p in &fpts[1..] {
            let mut e = sub(p, &fpts[0]);
            for b in &basis {
                let c = dotv(&e, b);
                e.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let ne = dotv(&e, &e).sqrt();
            e.iter_mut().for_each(|x| *x /= ne);
            basis.push(e);
        }
        for b in &basis {
            let c = dotv(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let nv = dotv(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= nv);
        inner_normal.push(v);
    }
    let incident_cell = facets.iter().map(|f| f.1).collect();
    Ok(BoundaryMap { boundary, inclusion, inner_normal, incident_cell })
}
