//! Closed-form fields with exact 2-jets, quadrature on flat domains and
//! weighted integration against e^{-f}.

mod domain;
mod expr;
mod form;
mod jet;
mod parse;
mod quadrature;

pub use domain::{tangent_frame, BoundaryComponent, BoundaryFrame, BoundaryRule, FlatDomain};
pub use expr::ScalarField;
pub use form::{binomial, canonical, mask_indices, mask_of, masks_of_degree, Mask, PFormField};
pub use jet::{Jet2, MAX_DIM};
pub use parse::{parse_field, ParseError};
pub use quadrature::{
    gauss_interval, gauss_legendre, pairwise_sum, shell_rule, simplex_rule, sphere_rule, uniform_circle,
    QuadratureRule,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("coordinate x{index} used in dimension {dim}")]
    CoordinateOutOfRange { index: usize, dim: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("unsupported quadrature order {0}")]
    UnsupportedOrder(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point {0:?} is not on the boundary")]
    NotOnBoundary(Vec<f64>),
}

/// Σ w_i · g(x_i) · e^{−f(x_i)}.
pub fn integrate_weighted(
    rule: &QuadratureRule,
    mut g: impl FnMut(&[f64]) -> Result<f64, FieldError>,
    f: &ScalarField,
) -> Result<f64, FieldError> {
    let mut terms = Vec::with_capacity(rule.len());
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        terms.push(w * g(p)? * (-f.value(p)?).exp());
    }
    Ok(pairwise_sum(&terms))
}
