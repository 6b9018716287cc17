use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use super::{LinalgError, SparseMatrix};

/// Dense Cholesky factor of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct DenseCholesky {
    l: Mat<f64>,
}

impl DenseCholesky {
    pub fn new(a: &Mat<f64>) -> Result<Self, LinalgError> {
        if a.nrows() != a.ncols() {
            return Err(LinalgError::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
        }
        let llt = a.llt(Side::Lower).map_err(|_| LinalgError::NotSpd)?;
        Ok(DenseCholesky { l: llt.L().to_owned() })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    pub fn lower(&self) -> &Mat<f64> {
        &self.l
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        self.solve_in_place(&mut x);
        (0..b.len()).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve_in_place(&self, x: &mut Mat<f64>) {
        self.l.solve_lower_triangular_in_place(x.as_mut());
        self.l.transpose().solve_upper_triangular_in_place(x.as_mut());
    }
}

/// Eigenpairs in ascending order; vectors are the columns.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.vectors.nrows()).map(|i| self.vectors[(i, j)]).collect()
    }
}

/// Full symmetric eigendecomposition (lower triangle read).
pub fn eig_sym(a: &Mat<f64>) -> Result<EigenPairs, LinalgError> {
    let n = a.nrows();
    if n == 0 {
        return Ok(EigenPairs { values: vec![], vectors: Mat::zeros(0, 0) });
    }
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(|e| LinalgError::ConvergenceFailure(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    Ok(EigenPairs { values: (0..n).map(|i| s[i]).collect(), vectors: evd.U().to_owned() })
}

/// Smallest k eigenpairs of A v = λ B v, B-orthonormal vectors.
pub fn eig_gen_sym(a: &Mat<f64>, b: &Mat<f64>, k: usize) -> Result<EigenPairs, LinalgError> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, got: b.nrows() });
    }
    if k > n {
        return Err(LinalgError::DimensionMismatch { expected: n, got: k });
    }
    let chol = DenseCholesky::new(b)?;
    let l = chol.lower();
    let mut x = symmetrized(a);
    l.solve_lower_triangular_in_place(x.as_mut());
    let mut c = x.transpose().to_owned();
    l.solve_lower_triangular_in_place(c.as_mut());
    let c = symmetrized(&c);
    let full = eig_sym(&c)?;
    let mut v = full.vectors.subcols(0, k).to_owned();
    l.transpose().solve_upper_triangular_in_place(v.as_mut());
    Ok(EigenPairs { values: full.values[..k].to_vec(), vectors: v })
}

/// ‖A v − λ B v‖ / ‖B v‖ for each pair.
pub fn residual_norms(a: &Mat<f64>, b: &Mat<f64>, pairs: &EigenPairs) -> Vec<f64> {
    let av = a * &pairs.vectors;
    let bv = b * &pairs.vectors;
    (0..pairs.len())
        .map(|j| {
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..av.nrows() {
                let r = av[(i, j)] - pairs.values[j] * bv[(i, j)];
                num += r * r;
                den += bv[(i, j)] * bv[(i, j)];
            }
            (num / den.max(f64::MIN_POSITIVE)).sqrt()
        })
        .collect()
}

pub fn symmetrized(a: &Mat<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

/// Pseudo-inverse of a symmetric positive semidefinite matrix through its
/// eigendecomposition; eigenvalues below `rtol · λ_max` are treated as zero.
#[derive(Clone, Debug)]
pub struct SymPinv {
    pairs: EigenPairs,
    cutoff: f64,
}

impl SymPinv {
    pub fn new(a: &Mat<f64>, rtol: f64) -> Result<Self, LinalgError> {
        let pairs = eig_sym(&symmetrized(a))?;
        let top = pairs.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok(SymPinv { pairs, cutoff: rtol * top })
    }

    pub fn rank(&self) -> usize {
        self.pairs.values.iter().filter(|v| **v > self.cutoff).count()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut x = vec![0.0; n];
        for (j, &lam) in self.pairs.values.iter().enumerate() {
            if lam <= self.cutoff {
                continue;
            }
            let coef: f64 = (0..n).map(|i| self.pairs.vectors[(i, j)] * b[i]).sum::<f64>() / lam;
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += coef * self.pairs.vectors[(i, j)];
            }
        }
        x
    }
}

/// Jacobi-preconditioned conjugate gradients; stops when ‖r‖ ≤ tol·‖b‖.
pub fn cg_jacobi(a: &SparseMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>, LinalgError> {
    let n = b.len();
    let diag = a.diagonal();
    if diag.iter().any(|d| *d <= 0.0) {
        return Err(LinalgError::NotSpd);
    }
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..max_iter {
        let ap = a.matvec(&p);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(LinalgError::NotSpd);
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm(&r) <= tol * bnorm {
            return Ok(x);
        }
        z = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(LinalgError::SolveFailure(format!("cg did not reach {tol:e} in {max_iter} iterations")))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Linear solver for sparse SPD systems: dense Cholesky up to
/// `DENSE_LIMIT` unknowns, Jacobi CG above.
pub enum SpdSolver {
    Dense(DenseCholesky),
    Iterative { matrix: SparseMatrix, tol: f64 },
    SparseDirect(faer::sparse::linalg::solvers::Llt<usize, f64>),
}

pub const DENSE_LIMIT: usize = 4000;
pub const CG_TOL: f64 = 1e-12;

impl SpdSolver {
    pub fn new(a: &SparseMatrix) -> Result<Self, LinalgError> {
        if a.nrows() <= DENSE_LIMIT {
            Ok(SpdSolver::Dense(DenseCholesky::new(&a.to_dense())?))
        } else {
            Ok(SpdSolver::Iterative { matrix: a.clone(), tol: CG_TOL })
        }
    }

    /// Sparse Cholesky regardless of size, for systems solved against many
    /// right-hand sides.
    pub fn sparse_direct(a: &SparseMatrix) -> Result<Self, LinalgError> {
        let trip: Vec<_> = a
            .triplets()
            .into_iter()
            .filter(|(r, c, _)| r >= c)
            .map(|(r, c, v)| faer::sparse::Triplet::new(r, c, v))
            .collect();
        let m = faer::sparse::SparseColMat::<usize, f64>::try_new_from_triplets(a.nrows(), a.ncols(), &trip)
            .map_err(|e| LinalgError::SolveFailure(format!("{e:?}")))?;
        let llt = m.sp_cholesky(Side::Lower).map_err(|_| LinalgError::NotSpd)?;
        Ok(SpdSolver::SparseDirect(llt))
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        match self {
            SpdSolver::Dense(c) => Ok(c.solve(b)),
            SpdSolver::Iterative { matrix, tol } => cg_jacobi(matrix, b, *tol, 20 * b.len().max(100)),
            SpdSolver::SparseDirect(llt) => {
                let mut x = Mat::from_fn(b.len(), 1, |i, _| b[i]);
                llt.solve_in_place(x.as_mut());
                Ok((0..b.len()).map(|i| x[(i, 0)]).collect())
            }
        }
    }

    /// Solve for every column of `b`.
    pub fn solve_mat(&self, b: &Mat<f64>) -> Result<Mat<f64>, LinalgError> {
        match self {
            SpdSolver::Dense(c) => {
                let mut x = b.clone();
                c.solve_in_place(&mut x);
                Ok(x)
            }
            SpdSolver::SparseDirect(llt) => {
                let mut x = b.clone();
                llt.solve_in_place(x.as_mut());
                Ok(x)
            }
            SpdSolver::Iterative { .. } => {
                let mut out = Mat::zeros(b.nrows(), b.ncols());
                for j in 0..b.ncols() {
                    let col: Vec<f64> = (0..b.nrows()).map(|i| b[(i, j)]).collect();
                    let x = self.solve(&col)?;
                    for (i, v) in x.into_iter().enumerate() {
                        out[(i, j)] = v;
                    }
                }
                Ok(out)
            }
        }
    }
}
