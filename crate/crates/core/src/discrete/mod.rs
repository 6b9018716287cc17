//! Lowest-order Whitney discretization of the weighted de Rham complex:
//! weighted mass matrices, the discrete weighted codifferential, Hodge
//! decomposition and harmonic dimension.

mod whitney;

pub use whitney::{local_faces, simplex_integral, CellGeometry};

use std::path::Path;
use std::sync::OnceLock;

use faer::Mat;
use thiserror::Error;

use crate::fields::{FieldError, PFormField, ScalarField};
use crate::linalg::{dot, eig_gen_sym, DenseCholesky, LinalgError, SparseMatrix, SpdSolver, SymPinv};
use crate::mesh::SimplicialComplex;
use crate::ops::FormValue;

pub type Cochain = Vec<f64>;

/// Default order for de Rham interpolation.
pub const INTERPOLATION_ORDER: usize = 6;
/// Relative cutoff used by the pseudo-inverse solves of `hodge_decompose`.
pub const PINV_RTOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscreteError {
    #[error("degenerate cell {cell} (volume {volume:e})")]
    SingularCell { cell: usize, volume: f64 },
    #[error("quadrature order {0} below 2")]
    InvalidOrder(usize),
    #[error("degree {p} out of range for a {top}-dimensional complex")]
    InvalidDegree { p: usize, top: usize },
    #[error("operation needs a closed mesh")]
    OpenMesh,
    #[error("cochain has {got} entries, expected {expected}")]
    CochainLength { expected: usize, got: usize },
    #[error("zero cluster ambiguous: gap ratio {gap_ratio:.3e} below 10")]
    ThresholdAmbiguous { gap_ratio: f64 },
    #[error("solve failure: {0}")]
    SolveFailure(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("point {0:?} is not inside any cell")]
    PointOutside(Vec<f64>),
}

impl From<LinalgError> for DiscreteError {
    fn from(e: LinalgError) -> Self {
        DiscreteError::SolveFailure(e.to_string())
    }
}

/// A complex together with its weighted Whitney mass matrices.
pub struct WeightedComplex {
    complex: SimplicialComplex,
    weight: ScalarField,
    quad_order: usize,
    mass: Vec<SparseMatrix>,
    d: Vec<SparseMatrix>,
    solvers: Vec<OnceLock<Result<SpdSolver, LinalgError>>>,
}

/// mass[p] = Σ_cells ∫ ⟨W_σ, W_τ⟩ e^{−f} dv.
pub fn assemble(k: &SimplicialComplex, f: &ScalarField, quad_order: usize) -> Result<WeightedComplex, DiscreteError> {
    if quad_order < 2 {
        return Err(DiscreteError::InvalidOrder(quad_order));
    }
    let top = k.top_dim();
    let mut trip: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); top + 1];
    let faces: Vec<Vec<Vec<usize>>> = (0..=top).map(|p| local_faces(top, p)).collect();
    for (c, t) in k.simplices(top).iter().enumerate() {
        let geom = whitney::cell_geometry(k, c)?;
        let phi = geom.weighted_moments(f, quad_order, k.periods())?;
        for p in 0..=top {
            let block = geom.whitney_mass(p, &phi);
            let ids: Vec<(usize, f64)> = faces[p]
                .iter()
                .map(|lf| {
                    let s: Vec<usize> = lf.iter().map(|&i| t[i]).collect();
                    let sign = if p == top { k.orientation(c) as f64 } else { 1.0 };
                    (k.simplex_index(&s).expect("face of a cell is in the complex"), sign)
                })
                .collect();
            for (i, &(gi, si)) in ids.iter().enumerate() {
                for (j, &(gj, sj)) in ids.iter().enumerate() {
                    trip[p].push((gi, gj, si * sj * block[i][j]));
                }
            }
        }
    }
    let mass = trip.iter().enumerate().map(|(p, t)| SparseMatrix::from_triplets(k.count(p), k.count(p), t)).collect();
    let d = (0..top).map(|p| k.coboundary(p).to_sparse()).collect();
    Ok(WeightedComplex {
        complex: k.clone(),
        weight: f.clone(),
        quad_order,
        mass,
        d,
        solvers: (0..=top).map(|_| OnceLock::new()).collect(),
    })
}

impl WeightedComplex {
    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn weight(&self) -> &ScalarField {
        &self.weight
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn top_dim(&self) -> usize {
        self.complex.top_dim()
    }

    pub fn count(&self, p: usize) -> usize {
        self.complex.count(p)
    }

    pub fn mass(&self, p: usize) -> &SparseMatrix {
        &self.mass[p]
    }

    /// Coboundary d_p as a sparse matrix (rows: (p+1)-simplices).
    pub fn d(&self, p: usize) -> &SparseMatrix {
        &self.d[p]
    }

    fn check_degree(&self, p: usize) -> Result<(), DiscreteError> {
        if p > self.top_dim() {
            return Err(DiscreteError::InvalidDegree { p, top: self.top_dim() });
        }
        Ok(())
    }

    fn check_len(&self, p: usize, c: &[f64]) -> Result<(), DiscreteError> {
        if c.len() != self.count(p) {
            return Err(DiscreteError::CochainLength { expected: self.count(p), got: c.len() });
        }
        Ok(())
    }

    /// ⟨a, b⟩_f = aᵀ mass[p] b.
    pub fn inner(&self, p: usize, a: &[f64], b: &[f64]) -> f64 {
        dot(a, &self.mass[p].matvec(b))
    }

    pub fn apply_d(&self, p: usize, c: &[f64]) -> Cochain {
        self.d[p].matvec(c)
    }

    /// dᵀ mass[p+1] d.
    pub fn stiffness(&self, p: usize) -> Result<SparseMatrix, DiscreteError> {
        if p >= self.top_dim() {
            return Err(DiscreteError::InvalidDegree { p, top: self.top_dim() });
        }
        Ok(self.d[p].transpose().mul(&self.mass[p + 1]).mul(&self.d[p]))
    }

    pub fn mass_solver(&self, p: usize) -> Result<&SpdSolver, DiscreteError> {
        self.check_degree(p)?;
        self.solvers[p].get_or_init(|| SpdSolver::new(&self.mass[p])).as_ref().map_err(|e| e.clone().into())
    }

    /// mass[p]⁻¹ b.
    pub fn mass_solve(&self, p: usize, b: &[f64]) -> Result<Cochain, DiscreteError> {
        Ok(self.mass_solver(p)?.solve(b)?)
    }

    /// δ_f c = mass[p−1]⁻¹ dᵀ mass[p] c.
    pub fn delta_f(&self, p: usize, c: &[f64]) -> Result<Cochain, DiscreteError> {
        if p == 0 {
            return Err(DiscreteError::InvalidDegree { p, top: self.top_dim() });
        }
        self.check_degree(p)?;
        self.check_len(p, c)?;
        let rhs = self.d[p - 1].transpose().matvec(&self.mass[p].matvec(c));
        self.mass_solve(p - 1, &rhs)
    }

    /// Dense mass[p] d_{p−1} mass[p−1]⁻¹ d_{p−1}ᵀ mass[p] (the dδ_f part of
    /// the weak Hodge Laplacian); zero for p = 0.
    pub fn down_form(&self, p: usize) -> Result<Mat<f64>, DiscreteError> {
        self.check_degree(p)?;
        let n = self.count(p);
        if p == 0 {
            return Ok(Mat::zeros(n, n));
        }
        let md = self.mass[p].mul(&self.d[p - 1]).to_dense();
        let solved = self.mass_solver(p - 1)?.solve_mat(&md.transpose().to_owned())?;
        Ok(&md * &solved)
    }

    /// Dense weak weighted Hodge Laplacian stiffness for p-cochains.
    pub fn hodge_form(&self, p: usize) -> Result<Mat<f64>, DiscreteError> {
        let mut a = self.down_form(p)?;
        if p < self.top_dim() {
            a += self.stiffness(p)?.to_dense();
        }
        Ok(a)
    }

    /// c = d(a) + δ_f(b) + h, weighted-orthogonal.
    pub fn hodge_decompose(&self, p: usize, c: &[f64]) -> Result<HodgeParts, DiscreteError> {
        self.check_degree(p)?;
        self.check_len(p, c)?;
        if !self.complex.is_closed() {
            return Err(DiscreteError::OpenMesh);
        }
        let n = self.count(p);
        let mc = self.mass[p].matvec(c);
        let (exact, potential) = if p > 0 {
            let d = &self.d[p - 1];
            let lap = d.transpose().mul(&self.mass[p]).mul(d).to_dense();
            let a = SymPinv::new(&lap, PINV_RTOL)?.solve(&d.transpose().matvec(&mc));
            (d.matvec(&a), a)
        } else {
            (vec![0.0; n], vec![])
        };
        let (coexact, copotential) = if p < self.top_dim() {
            let md = self.mass[p + 1].mul(&self.d[p]).to_dense();
            let chol = DenseCholesky::new(&self.mass[p].to_dense())?;
            let mut y = md.transpose().to_owned();
            chol.solve_in_place(&mut y);
            let normal = &md * &y;
            let rhs = self.mass[p + 1].matvec(&self.d[p].matvec(c));
            let b = SymPinv::new(&normal, PINV_RTOL)?.solve(&rhs);
            let co: Vec<f64> = (0..n).map(|i| (0..b.len()).map(|j| y[(i, j)] * b[j]).sum()).collect();
            (co, b)
        } else {
            (vec![0.0; n], vec![])
        };
        let harmonic = (0..n).map(|i| c[i] - exact[i] - coexact[i]).collect();
        Ok(HodgeParts { exact, coexact, harmonic, potential, copotential })
    }

    /// Number of zero eigenvalues of the weak weighted Hodge Laplacian.
    pub fn harmonic_dim(&self, p: usize) -> Result<usize, DiscreteError> {
        if !self.complex.is_closed() {
            return Err(DiscreteError::OpenMesh);
        }
        let a = self.hodge_form(p)?;
        let n = a.nrows();
        let pairs = eig_gen_sym(&a, &self.mass[p].to_dense(), n)?;
        Ok(zero_cluster(&pairs.values)?.count)
    }

    /// Writes mass_p.txt, d_p.txt and stiffness_p.txt in coordinate format.
    pub fn dump_matrices(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for p in 0..=self.top_dim() {
            std::fs::write(dir.join(format!("mass_{p}.txt")), self.mass[p].to_coordinate_text())?;
            if p < self.top_dim() {
                std::fs::write(dir.join(format!("d_{p}.txt")), self.d[p].to_coordinate_text())?;
                let k = self.stiffness(p).map_err(|e| std::io::Error::other(e.to_string()))?;
                std::fs::write(dir.join(format!("stiffness_{p}.txt")), k.to_coordinate_text())?;
            }
        }
        Ok(())
    }

    /// Whitney interpolant of c evaluated at barycentric coordinates in a cell.
    pub fn reconstruct_in_cell(&self, p: usize, c: &[f64], cell: usize, bary: &[f64]) -> Result<FormValue, DiscreteError> {
        whitney_in_cell(&self.complex, p, c, cell, bary)
    }
}

/// Parts of a discrete Hodge decomposition plus the potentials that
/// generate the exact and co-exact parts.
#[derive(Clone, Debug)]
pub struct HodgeParts {
    pub exact: Cochain,
    pub coexact: Cochain,
    pub harmonic: Cochain,
    pub potential: Cochain,
    pub copotential: Cochain,
}

/// Size of the near-zero eigenvalue cluster and its separation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroCluster {
    pub count: usize,
    pub epsilon: f64,
    pub gap_ratio: f64,
}

/// Relative floor below which an eigenvalue cannot be a nonzero estimate.
const ZERO_FLOOR: f64 = 1e-10;
/// ε_h as a fraction of the first nonzero eigenvalue.
pub const ZERO_REL: f64 = 1e-8;
pub const MIN_GAP_RATIO: f64 = 10.0;

/// Count eigenvalues below ε_h = 1e-8 × (first nonzero eigenvalue) and
/// require a gap of at least 10 to the first kept eigenvalue.
pub fn zero_cluster(values: &[f64]) -> Result<ZeroCluster, DiscreteError> {
    let top = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if top == 0.0 {
        return Ok(ZeroCluster { count: values.len(), epsilon: 0.0, gap_ratio: f64::INFINITY });
    }
    let first = values.iter().copied().find(|v| *v >= ZERO_FLOOR * top).unwrap_or(top);
    let epsilon = ZERO_REL * first;
    let count = values.iter().filter(|v| **v < epsilon).count();
    if count == values.len() {
        return Ok(ZeroCluster { count, epsilon, gap_ratio: f64::INFINITY });
    }
    let cluster = values[..count].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let next = values[count];
    let gap_ratio = if cluster > 0.0 { next / cluster } else { f64::INFINITY };
    if gap_ratio < MIN_GAP_RATIO || next < first {
        return Err(DiscreteError::ThresholdAmbiguous { gap_ratio: gap_ratio.min(next / epsilon) });
    }
    Ok(ZeroCluster { count, epsilon, gap_ratio })
}

pub fn stiffness(wc: &WeightedComplex, p: usize) -> Result<SparseMatrix, DiscreteError> {
    wc.stiffness(p)
}

pub fn discrete_delta_f(wc: &WeightedComplex, p: usize, c: &[f64]) -> Result<Cochain, DiscreteError> {
    wc.delta_f(p, c)
}

pub fn hodge_decompose(wc: &WeightedComplex, p: usize, c: &[f64]) -> Result<HodgeParts, DiscreteError> {
    wc.hodge_decompose(p, c)
}

pub fn harmonic_dim(wc: &WeightedComplex, p: usize) -> Result<usize, DiscreteError> {
    wc.harmonic_dim(p)
}

/// Integrate a p-form over every oriented p-simplex (top simplices carry
/// their orientation sign).
pub fn de_rham_interpolate(field: &PFormField, k: &SimplicialComplex) -> Result<Cochain, DiscreteError> {
    de_rham_interpolate_with(field, k, INTERPOLATION_ORDER)
}

pub fn de_rham_interpolate_with(field: &PFormField, k: &SimplicialComplex, order: usize) -> Result<Cochain, DiscreteError> {
    let p = field.degree();
    if p > k.top_dim() {
        return Err(DiscreteError::InvalidDegree { p, top: k.top_dim() });
    }
    if field.dim() != k.ambient_dim() {
        return Err(FieldError::DimensionMismatch { expected: k.ambient_dim(), got: field.dim() }.into());
    }
    k.simplices(p)
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let v = simplex_integral(field, &k.simplex_coords(s), order, k.periods())?;
            Ok(if p == k.top_dim() { k.orientation(i) as f64 * v } else { v })
        })
        .collect()
}

/// Whitney interpolant of a p-cochain evaluated at an ambient point; the
/// containing cell is the one with the least negative barycentric
/// coordinate after projection onto its affine hull.
pub fn whitney_reconstruct(k: &SimplicialComplex, p: usize, c: &[f64], x: &[f64]) -> Result<FormValue, DiscreteError> {
    let top = k.top_dim();
    let mut best: Option<(f64, f64, usize, Vec<f64>)> = None;
    for cell in 0..k.count(top) {
        let geom = whitney::cell_geometry(k, cell)?;
        let x0 = &geom.coords[0];
        let rel: Vec<f64> = x.iter().zip(x0).map(|(a, b)| a - b).collect();
        let mut bary: Vec<f64> = (1..=top).map(|i| geom.grads[i].iter().zip(&rel).map(|(g, r)| g * r).sum()).collect();
        bary.insert(0, 1.0 - bary.iter().sum::<f64>());
        let inside = bary.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        let proj = geom.point(&bary);
        let dist: f64 = proj.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let better = match &best {
            None => true,
            Some((bi, bd, _, _)) => (inside >= -1e-12 && dist < *bd - 1e-12) || (*bi < -1e-12 && inside > *bi),
        };
        if better {
            best = Some((inside, dist, cell, bary));
        }
    }
    let (inside, _, cell, bary) = best.ok_or_else(|| DiscreteError::PointOutside(x.to_vec()))?;
    if inside < -1e-9 {
        return Err(DiscreteError::PointOutside(x.to_vec()));
    }
    whitney_in_cell(k, p, c, cell, &bary)
}

fn whitney_in_cell(k: &SimplicialComplex, p: usize, c: &[f64], cell: usize, bary: &[f64]) -> Result<FormValue, DiscreteError> {
    let top = k.top_dim();
    if p > top {
        return Err(DiscreteError::InvalidDegree { p, top });
    }
    if c.len() != k.count(p) {
        return Err(DiscreteError::CochainLength { expected: k.count(p), got: c.len() });
    }
    let geom = whitney::cell_geometry(k, cell)?;
    let t = &k.simplices(top)[cell];
    let mut out = FormValue::zero(p, k.ambient_dim());
    for lf in local_faces(top, p) {
        let s: Vec<usize> = lf.iter().map(|&i| t[i]).collect();
        let gi = k.simplex_index(&s).expect("face of a cell is in the complex");
        let sign = if p == top { k.orientation(cell) as f64 } else { 1.0 };
        out = out + geom.whitney_form(&lf, bary) * (sign * c[gi]);
    }
    Ok(out)
}
