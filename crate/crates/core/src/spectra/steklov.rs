use faer::Mat;

use crate::discrete::{assemble, zero_cluster, WeightedComplex};
use crate::linalg::{eig_sym, symmetrized, DenseCholesky, SparseMatrix, SpdSolver};
use crate::mesh::boundary_complex;

use super::{mesh_descriptor, SpectraError, SteklovResult};

/// Whether boundary-harmonic traces belong to the test space (default: yes).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SteklovOptions {
    pub include_harmonic: bool,
}

impl Default for SteklovOptions {
    fn default() -> Self {
        SteklovOptions { include_harmonic: true }
    }
}

const BLOCK: usize = 64;

/// σ_1..σ_k of the weighted Dirichlet-to-Neumann map on co-closed p-forms.
///
/// The stiffness dᵀ mass[p+1] d is Schur-complemented onto the boundary
/// trace unknowns. Interior exact directions are gauge-fixed by adding
/// s·GᵀG with G the interior discrete δ_f; this leaves the minimal energy
/// unchanged. The reduced pencil lives on the kernel of the boundary δ_f.
pub fn steklov_spectrum(
    wc: &WeightedComplex,
    p: usize,
    k: usize,
    opts: SteklovOptions,
) -> Result<SteklovResult, SpectraError> {
    let complex = wc.complex();
    let top = complex.top_dim();
    if p + 1 > top {
        return Err(SpectraError::InvalidDegree { p, top });
    }
    let bm = boundary_complex(complex)?;
    if bm.is_empty() {
        return Err(SpectraError::NoBoundary);
    }
    let bdry = &bm.boundary;
    let btop = bdry.top_dim();

    let trace: Vec<usize> = bm.inclusion[p].clone();
    let on_boundary = |q: usize| {
        let mut flag = vec![false; complex.count(q)];
        for &i in &bm.inclusion[q] {
            flag[i] = true;
        }
        flag
    };
    let bflag = on_boundary(p);
    let interior: Vec<usize> = (0..complex.count(p)).filter(|&i| !bflag[i]).collect();

    let stiff = wc.stiffness(p)?;
    let k_ii = stiff.select(&interior, &interior);
    let k_ib = stiff.select(&interior, &trace);
    let k_bb = stiff.select(&trace, &trace).to_dense();

    let a = if p == 0 {
        k_ii
    } else {
        let fl = on_boundary(p - 1);
        let interior_lower: Vec<usize> = (0..complex.count(p - 1)).filter(|&i| !fl[i]).collect();
        let d_i = wc.d(p - 1).select(&interior, &interior_lower);
        let g = d_i.transpose().mul(&wc.mass(p).select(&interior, &interior));
        let gtg = g.transpose().mul(&g);
        let mean = |m: &SparseMatrix| m.diagonal().iter().sum::<f64>() / m.nrows().max(1) as f64;
        let s = mean(&k_ii) / mean(&gtg).max(f64::MIN_POSITIVE);
        k_ii.add(&gtg.scale(s))
    };

    let nb = trace.len();
    let mut schur = k_bb;
    if !interior.is_empty() {
        let solver = SpdSolver::sparse_direct(&a)?;
        let k_bi = k_ib.transpose();
        for start in (0..nb).step_by(BLOCK) {
            let w = BLOCK.min(nb - start);
            let mut rhs = Mat::zeros(interior.len(), w);
            for (r, row) in (0..k_ib.nrows()).map(|r| (r, k_ib.row(r))) {
                for (c, v) in row {
                    if c >= start && c < start + w {
                        rhs[(r, c - start)] = v;
                    }
                }
            }
            let y = solver.solve_mat(&rhs)?;
            for i in 0..nb {
                for (c, v) in k_bi.row(i) {
                    for j in 0..w {
                        schur[(i, start + j)] -= v * y[(c, j)];
                    }
                }
            }
        }
    }

    // Parent traces use sorted vertex order; boundary top cells carry the
    // induced orientation.
    let signs: Vec<f64> =
        (0..nb).map(|i| if p == btop { bdry.orientation(i) as f64 } else { 1.0 }).collect();
    let schur = Mat::from_fn(nb, nb, |i, j| signs[i] * signs[j] * schur[(i, j)]);

    let bwc = assemble(bdry, wc.weight(), wc.quad_order())?;
    let basis = coclosed_basis(&bwc, p, opts.include_harmonic)?;
    if basis.ncols() == 0 {
        return Err(SpectraError::EmptyCoclosedSpace);
    }
    let reduced = symmetrized(&(basis.transpose() * &schur * &basis));
    let pairs = eig_sym(&reduced)?;
    let zero_modes = zero_cluster(&pairs.values).map(|z| z.count).unwrap_or(0);
    let take = k.min(pairs.len());
    let rv = &reduced * pairs.vectors.subcols(0, take);
    let residuals = (0..take)
        .map(|j| {
            let mut num = 0.0;
            for i in 0..rv.nrows() {
                let r = rv[(i, j)] - pairs.values[j] * pairs.vectors[(i, j)];
                num += r * r;
            }
            num.sqrt()
        })
        .collect();
    Ok(SteklovResult {
        degree: p,
        eigenvalues: pairs.values[..take].to_vec(),
        residuals,
        boundary_mesh: mesh_descriptor(bdry),
        weight: wc.weight().to_string(),
        coclosed_dim: basis.ncols(),
        harmonic_included: opts.include_harmonic,
        zero_modes,
    })
}

/// Mass-orthonormal basis of ker δ_f on boundary p-cochains, optionally
/// with the harmonic cochains removed.
fn coclosed_basis(bwc: &WeightedComplex, p: usize, include_harmonic: bool) -> Result<Mat<f64>, SpectraError> {
    let m = bwc.mass(p).to_dense();
    let chol = DenseCholesky::new(&m)?;
    let l = chol.lower();
    let n = m.nrows();
    let y = if p == 0 {
        Mat::<f64>::identity(n, n)
    } else {
        let pm = l.transpose() * bwc.d(p - 1).to_dense();
        let c = &pm * pm.transpose();
        let ev = eig_sym(&symmetrized(&c))?;
        let z = zero_cluster(&ev.values)?;
        ev.vectors.subcols(0, z.count).to_owned()
    };
    let mut x = y;
    l.transpose().solve_upper_triangular_in_place(x.as_mut());
    if include_harmonic || x.ncols() == 0 {
        return Ok(x);
    }
    if p >= bwc.top_dim() {
        return Ok(Mat::zeros(n, 0));
    }
    let dx = bwc.d(p).to_dense() * &x;
    let r = dx.transpose() * bwc.mass(p + 1).to_dense() * &dx;
    let ev = eig_sym(&symmetrized(&r))?;
    let z = zero_cluster(&ev.values)?;
    let keep = ev.vectors.subcols(z.count, ev.len() - z.count).to_owned();
    Ok(&x * &keep)
}
