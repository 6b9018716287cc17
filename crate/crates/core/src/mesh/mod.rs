//! Oriented simplicial complexes, boundary extraction, shape generators,
//! refinement and exact Betti numbers.

mod betti;
mod complex;
mod generate;
mod io;
mod refine;

pub use betti::{betti, rank_exact};
pub use complex::{boundary_complex, BoundaryMap, Incidence, MeshKind, SimplicialComplex};
pub use generate::{generate, periodic_segment, shell3, Shape};
pub use io::{dump_mesh, load_mesh};
pub use refine::refine;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("ridge {0:?} is shared by more than two cells")]
    NonManifold(Vec<usize>),
    #[error("no consistent orientation exists")]
    NonOrientable,
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("invalid mesh input: {0}")]
    InvalidInput(String),
    #[error("mesh format error at line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Build an oriented complex from top simplices; vertex order within each
/// tuple is a hint, orientations are propagated from the first cell.
pub fn build_complex(
    ambient_dim: usize,
    vertex_coords: Vec<Vec<f64>>,
    top_simplices: &[Vec<usize>],
) -> Result<SimplicialComplex, MeshError> {
    SimplicialComplex::build(ambient_dim, vertex_coords, top_simplices)
}
