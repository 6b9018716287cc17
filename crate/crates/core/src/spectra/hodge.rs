use faer::Mat;
use serde::Serialize;

use crate::discrete::{zero_cluster, WeightedComplex};
use crate::linalg::{eig_gen_sym, eig_sym, residual_norms, EigenPairs};

use super::{mesh_descriptor, SpectraError, SpectrumKind, SpectrumResult};

/// Relative agreement required by both duality identities.
pub const DUALITY_TOL: f64 = 1e-7;

fn result(wc: &WeightedComplex, p: usize, kind: SpectrumKind, pairs: &EigenPairs, cols: std::ops::Range<usize>, residuals: Vec<f64>, zero_modes: usize) -> SpectrumResult {
    SpectrumResult {
        degree: p,
        kind,
        eigenvalues: pairs.values[cols.clone()].to_vec(),
        residuals,
        mesh: mesh_descriptor(wc.complex()),
        weight: wc.weight().to_string(),
        mesh_size: wc.complex().mesh_size(),
        zero_modes,
        vectors: cols.map(|j| pairs.vector(j)).collect(),
    }
}

fn subset(pairs: &EigenPairs, cols: std::ops::Range<usize>) -> EigenPairs {
    EigenPairs { values: pairs.values[cols.clone()].to_vec(), vectors: pairs.vectors.subcols(cols.start, cols.len()).to_owned() }
}

/// Nonzero eigenvalues of (dᵀ mass[p+1] d, mass[p]): the co-exact spectrum
/// λ''_{k,p}. The kernel of d is deflated by the zero-cluster rule.
pub fn coexact_spectrum(wc: &WeightedComplex, p: usize, k: usize) -> Result<SpectrumResult, SpectraError> {
    if !wc.complex().is_closed() {
        return Err(SpectraError::OpenMesh);
    }
    if p >= wc.top_dim() {
        return Err(SpectraError::InvalidDegree { p, top: wc.top_dim() });
    }
    let a = wc.stiffness(p)?.to_dense();
    let b = wc.mass(p).to_dense();
    let n = a.nrows();
    let pairs = eig_gen_sym(&a, &b, n)?;
    let z = zero_cluster(&pairs.values)?;
    let cols = z.count..(z.count + k).min(n);
    if cols.is_empty() {
        return Err(SpectraError::EmptySpectrum);
    }
    let res = residual_norms(&a, &b, &subset(&pairs, cols.clone()));
    Ok(result(wc, p, SpectrumKind::Coexact, &pairs, cols, res, z.count))
}

/// Smallest k eigenvalues of the full weak weighted Hodge Laplacian on
/// p-cochains, zero modes included.
pub fn full_spectrum(wc: &WeightedComplex, p: usize, k: usize) -> Result<SpectrumResult, SpectraError> {
    if p > wc.top_dim() {
        return Err(SpectraError::InvalidDegree { p, top: wc.top_dim() });
    }
    let a = wc.hodge_form(p)?;
    let b = wc.mass(p).to_dense();
    let n = a.nrows();
    let pairs = eig_gen_sym(&a, &b, n)?;
    let z = zero_cluster(&pairs.values)?;
    let cols = 0..k.min(n);
    if cols.is_empty() {
        return Err(SpectraError::EmptySpectrum);
    }
    let res = residual_norms(&a, &b, &subset(&pairs, cols.clone()));
    Ok(result(wc, p, SpectrumKind::Full, &pairs, cols, res, z.count))
}

/// λ'_{k,p} directly: the full Hodge pencil restricted to the exact
/// subspace range(d_{p−1}), using a mass-orthonormal basis of that range.
pub fn exact_spectrum_direct(wc: &WeightedComplex, p: usize, k: usize) -> Result<SpectrumResult, SpectraError> {
    if !wc.complex().is_closed() {
        return Err(SpectraError::OpenMesh);
    }
    if p == 0 || p > wc.top_dim() {
        return Err(SpectraError::InvalidDegree { p, top: wc.top_dim() });
    }
    let e = wc.d(p - 1).to_dense();
    let m = wc.mass(p).to_dense();
    let gram = e.transpose() * &m * &e;
    let g = eig_sym(&gram)?;
    let z = zero_cluster(&g.values)?;
    let r = g.len() - z.count;
    if r == 0 {
        return Err(SpectraError::EmptySpectrum);
    }
    let mut basis = Mat::zeros(e.ncols(), r);
    for j in 0..r {
        let s = 1.0 / g.values[z.count + j].sqrt();
        for i in 0..e.ncols() {
            basis[(i, j)] = g.vectors[(i, z.count + j)] * s;
        }
    }
    let q = &e * &basis;
    let h = wc.hodge_form(p)?;
    let reduced = q.transpose() * &h * &q;
    let red = eig_sym(&crate::linalg::symmetrized(&reduced))?;
    let take = k.min(r);
    let vecs = &q * red.vectors.subcols(0, take);
    let pairs = EigenPairs { values: red.values[..take].to_vec(), vectors: vecs };
    let res = residual_norms(&h, &m, &pairs);
    Ok(result(wc, p, SpectrumKind::Exact, &pairs, 0..take, res, 0))
}

/// λ'_{k,p} computed through the duality λ'_{k,p} = λ''_{k,p−1} (primary)
/// and directly on the exact subspace (cross-check, when requested).
#[derive(Clone, Debug, Serialize)]
pub struct ExactSpectrum {
    pub via_duality: SpectrumResult,
    pub direct: Option<SpectrumResult>,
    pub max_rel_diff: Option<f64>,
}

pub fn exact_spectrum(wc: &WeightedComplex, p: usize, k: usize, cross_check: bool) -> Result<ExactSpectrum, SpectraError> {
    if p == 0 || p > wc.top_dim() {
        return Err(SpectraError::InvalidDegree { p, top: wc.top_dim() });
    }
    let mut via_duality = coexact_spectrum(wc, p - 1, k)?;
    via_duality.kind = SpectrumKind::Exact;
    via_duality.degree = p;
    via_duality.vectors = via_duality.vectors.iter().map(|v| wc.apply_d(p - 1, v)).collect();
    let direct = if cross_check { Some(exact_spectrum_direct(wc, p, k)?) } else { None };
    let max_rel_diff = direct.as_ref().map(|d| {
        d.eigenvalues
            .iter()
            .zip(&via_duality.eigenvalues)
            .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    });
    Ok(ExactSpectrum { via_duality, direct, max_rel_diff })
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityEntry {
    /// "p_to_p_plus_1" for λ''_{1,p} = λ'_{1,p+1}, "p_to_n_minus_p" for
    /// λ''_{1,p} = λ'_{1,n−p}.
    pub identity: String,
    pub p: usize,
    pub coexact: f64,
    pub exact_degree: usize,
    pub exact: f64,
    pub rel_diff: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub mesh: String,
    pub weight: String,
    pub tolerance: f64,
    pub entries: Vec<DualityEntry>,
    pub pass: bool,
}

impl DualityReport {
    pub fn identity_pass(&self, identity: &str) -> bool {
        self.entries.iter().filter(|e| e.identity == identity).all(|e| e.pass)
    }
}

/// Both duality identities for every valid p, with λ' computed directly on
/// the exact subspace.
pub fn check_duality(wc: &WeightedComplex) -> Result<DualityReport, SpectraError> {
    let n = wc.top_dim();
    let mut entries = Vec::new();
    let mut exact_cache: Vec<Option<f64>> = vec![None; n + 1];
    let mut exact_first = |q: usize| -> Result<f64, SpectraError> {
        if let Some(v) = exact_cache[q] {
            return Ok(v);
        }
        let v = exact_spectrum_direct(wc, q, 1)?.first().ok_or(SpectraError::EmptySpectrum)?;
        exact_cache[q] = Some(v);
        Ok(v)
    };
    for p in 0..n {
        let co = coexact_spectrum(wc, p, 1)?.first().ok_or(SpectraError::EmptySpectrum)?;
        for (identity, q) in [("p_to_p_plus_1", p + 1), ("p_to_n_minus_p", n - p)] {
            let ex = exact_first(q)?;
            let rel_diff = (co - ex).abs() / co.abs().max(ex.abs());
            entries.push(DualityEntry {
                identity: identity.to_string(),
                p,
                coexact: co,
                exact_degree: q,
                exact: ex,
                rel_diff,
                pass: rel_diff <= DUALITY_TOL,
            });
        }
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(DualityReport {
        mesh: mesh_descriptor(wc.complex()),
        weight: wc.weight().to_string(),
        tolerance: DUALITY_TOL,
        entries,
        pass,
    })
}
