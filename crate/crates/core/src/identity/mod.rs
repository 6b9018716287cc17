//! Numerical verification of pointwise and integral identities of the
//! weighted exterior calculus. Each identity's two sides are evaluated
//! through separate code paths and compared.

mod integral;
mod pointwise;
mod report;
mod split;

pub use integral::{check_green, check_green_laplacian, check_pohozhaev, check_reilly};
pub use pointwise::{
    check_bochner, check_cartan, check_commutator, check_contraction, check_scalar_bochner, check_wedge_codiff,
    check_wedge_interior,
};
pub use report::{IdentityReport, TOL_GENERAL, TOL_POLYNOMIAL};
pub use split::{check_boundary_split, fd_chart_calculus, FD_STEP};
