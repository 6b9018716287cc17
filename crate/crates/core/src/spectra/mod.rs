//! Weighted Hodge spectra (exact, co-exact, full), the duality between
//! them, Steklov spectra on co-closed boundary forms and the eigenvalue
//! inequalities built on top of them.

mod embedding;
mod hodge;
mod lp;
mod steklov;
mod sweep;
mod theorem;

pub use embedding::{trace_identities, ChartGeometry, Embedding, EmbeddingData, TraceReport};
pub use hodge::{
    check_duality, coexact_spectrum, exact_spectrum, exact_spectrum_direct, full_spectrum, DualityEntry, DualityReport,
    ExactSpectrum, DUALITY_TOL,
};
pub use lp::{lp_check, LP_QUAD_ORDER, REWRITE_TOL};
pub use steklov::{steklov_spectrum, SteklovOptions};
pub use sweep::{convergence_sweep, csv_header, refined_shape, richardson, sweep_csv, SweepRow};
pub use theorem::{
    check_theorem, inf_normal_derivative, sigma_p, TheoremCase, TheoremConfig, TheoremDomain, DEFAULT_TOL_REL,
};

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::discrete::DiscreteError;
use crate::fields::FieldError;
use crate::linalg::LinalgError;
use crate::mesh::{MeshError, MeshKind, SimplicialComplex};

/// Residual bound every reported eigenpair must meet.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("zero-mode gap ambiguous (ratio {gap_ratio:.3e})")]
    GapAmbiguous { gap_ratio: f64 },
    #[error("operation needs a closed mesh")]
    OpenMesh,
    #[error("operation needs a mesh with boundary")]
    NoBoundary,
    #[error("degree {p} not valid here (top dimension {top})")]
    InvalidDegree { p: usize, top: usize },
    #[error("co-closed boundary space is empty")]
    EmptyCoclosedSpace,
    #[error("no eigenvalues to report")]
    EmptySpectrum,
    #[error("solve failure: {0}")]
    SolveFailure(String),
    #[error("{theorem}: hypothesis violated: {reason}")]
    HypothesisViolated { theorem: String, reason: String, constants: BTreeMap<String, Constant> },
    #[error("unsupported embedding: {0}")]
    UnsupportedEmbedding(String),
    #[error("curvature unavailable: {0}")]
    CurvatureUnavailable(String),
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    #[error(transparent)]
    Discrete(DiscreteError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<DiscreteError> for SpectraError {
    fn from(e: DiscreteError) -> Self {
        match e {
            DiscreteError::ThresholdAmbiguous { gap_ratio } => SpectraError::GapAmbiguous { gap_ratio },
            DiscreteError::OpenMesh => SpectraError::OpenMesh,
            e => SpectraError::Discrete(e),
        }
    }
}

impl From<LinalgError> for SpectraError {
    fn from(e: LinalgError) -> Self {
        SpectraError::SolveFailure(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Coexact,
    Exact,
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumResult {
    pub degree: usize,
    pub kind: SpectrumKind,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub mesh: String,
    pub weight: String,
    pub mesh_size: f64,
    /// Eigenvalues removed as the discrete kernel.
    pub zero_modes: usize,
    /// Eigenvectors (cochains) of the reported pairs, mass-orthonormal.
    #[serde(skip)]
    pub vectors: Vec<Vec<f64>>,
}

impl SpectrumResult {
    pub fn first(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(*r))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SteklovResult {
    pub degree: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub boundary_mesh: String,
    pub weight: String,
    /// Dimension of the co-closed trace space the pencil is restricted to.
    pub coclosed_dim: usize,
    pub harmonic_included: bool,
    pub zero_modes: usize,
}

impl SteklovResult {
    /// First eigenvalue above the zero cluster.
    pub fn first_nonzero(&self) -> Option<f64> {
        self.eigenvalues.get(self.zero_modes).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Sampled,
    Computed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constant {
    pub value: f64,
    pub provenance: Provenance,
}

impl Constant {
    pub fn analytic(value: f64) -> Self {
        Constant { value, provenance: Provenance::Analytic }
    }

    pub fn sampled(value: f64) -> Self {
        Constant { value, provenance: Provenance::Sampled }
    }

    pub fn computed(value: f64) -> Self {
        Constant { value, provenance: Provenance::Computed }
    }
}

/// One inequality instance inside a theorem check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckDetail {
    pub label: String,
    pub computed: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremCheck {
    pub theorem_id: String,
    pub constants: BTreeMap<String, Constant>,
    pub computed: f64,
    pub bound: f64,
    /// Signed so that a nonnegative margin means the inequality holds.
    pub margin: f64,
    pub tol_rel: f64,
    pub pass: bool,
    pub details: Vec<CheckDetail>,
    pub mesh: String,
    pub weight: String,
}

impl TheoremCheck {
    /// Assemble a check from per-instance details; the reported instance is
    /// the one with the smallest margin.
    pub fn from_details(
        theorem_id: &str,
        constants: BTreeMap<String, Constant>,
        details: Vec<CheckDetail>,
        tol_rel: f64,
        mesh: String,
        weight: String,
    ) -> Result<Self, SpectraError> {
        let worst = details
            .iter()
            .min_by(|a, b| a.margin.total_cmp(&b.margin))
            .ok_or(SpectraError::EmptySpectrum)?
            .clone();
        let pass = details.iter().all(|d| d.margin >= -tol_rel * d.bound.abs());
        Ok(TheoremCheck {
            theorem_id: theorem_id.to_string(),
            constants,
            computed: worst.computed,
            bound: worst.bound,
            margin: worst.margin,
            tol_rel,
            pass,
            details,
            mesh,
            weight,
        })
    }
}

/// Short human-readable description of a mesh.
pub fn mesh_descriptor(k: &SimplicialComplex) -> String {
    let kind = match k.kind() {
        MeshKind::Generic => "generic".to_string(),
        MeshKind::Sphere { radius } => format!("sphere(r={radius})"),
        MeshKind::Ball { radius } => format!("ball(r={radius})"),
        MeshKind::Shell { inner, outer } => format!("shell({inner},{outer})"),
        MeshKind::Torus { periods } => format!("torus({periods:?})"),
    };
    let counts: Vec<String> = (0..=k.top_dim()).map(|p| k.count(p).to_string()).collect();
    format!("{kind} dim={} cells=[{}]", k.top_dim(), counts.join(","))
}
