//! Weighted Hodge theory on manifolds with boundary: pointwise and integral
//! identities for the weighted codifferential and Hodge Laplacian, Whitney
//! discretizations, and spectral checks.

pub mod fields;
pub mod ops;
pub mod linalg;
pub mod mesh;
pub mod random;
pub mod identity;
pub mod discrete;
pub mod spectra;

/// Sign-convention ledger embedded in every report.
pub const CONVENTIONS: &str = "whodge-conventions/1: Δu = −Σ∂²u; Δ_f u = Δu + ⟨∇f,∇u⟩; δ_f = δ + i_{∇f}; \
Δ_f^H = dδ_f + δ_f d; dμ = e^{−f} dv; N inner unit normal; S(X) = −∇_X N; f_N = ⟨∇f,N⟩; \
unit sphere boundary η = +1; eigenvalues 1-indexed";
