//! Refinement sweeps for convergence studies.

use serde::Serialize;

use crate::discrete::assemble;
use crate::fields::ScalarField;
use crate::mesh::{generate, Shape};

use super::hodge::coexact_spectrum;
use super::steklov::{steklov_spectrum, SteklovOptions};
use super::SpectraError;

/// One refinement level: mesh size and the first k eigenvalues.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub level: usize,
    pub h: f64,
    pub eigenvalues: Vec<f64>,
}

/// The shape refined to `level`: icosphere, disc and ball levels are used
/// as given; circle, interval and torus segment counts double per level.
pub fn refined_shape(base: &Shape, level: usize) -> Shape {
    let s = 1usize << level;
    match *base {
        Shape::Interval { segments } => Shape::Interval { segments: segments * s },
        Shape::Circle { segments } => Shape::Circle { segments: segments * s },
        Shape::Disc { .. } => Shape::Disc { level },
        Shape::Ball3 { .. } => Shape::Ball3 { level },
        Shape::Icosphere { .. } => Shape::Icosphere { level },
        Shape::FlatTorus { nx, ny, lx, ly } => Shape::FlatTorus { nx: nx * s, ny: ny * s, lx, ly },
    }
}

/// First k co-exact eigenvalues on closed meshes, or first k Steklov
/// eigenvalues on meshes with boundary, at each level.
pub fn convergence_sweep(
    base: &Shape,
    levels: &[usize],
    p: usize,
    k: usize,
    weight: &ScalarField,
    quad_order: usize,
) -> Result<Vec<SweepRow>, SpectraError> {
    levels
        .iter()
        .map(|&level| {
            let mesh = generate(&refined_shape(base, level))?;
            let h = mesh.mesh_size();
            let wc = assemble(&mesh, weight, quad_order)?;
            let eigenvalues = if mesh.is_closed() {
                coexact_spectrum(&wc, p, k)?.eigenvalues
            } else {
                steklov_spectrum(&wc, p, k, SteklovOptions::default())?.eigenvalues
            };
            Ok(SweepRow { level, h, eigenvalues })
        })
        .collect()
}

/// `level,h,lambda_1,...,lambda_k`.
pub fn csv_header(k: usize) -> String {
    let mut cols = vec!["level".to_string(), "h".to_string()];
    cols.extend((1..=k).map(|i| format!("lambda_{i}")));
    cols.join(",")
}

/// CSV text with a header line; missing eigenvalues are left empty.
pub fn sweep_csv(rows: &[SweepRow], k: usize) -> String {
    let mut out = csv_header(k);
    out.push('\n');
    for r in rows {
        let mut cols = vec![r.level.to_string(), format!("{:.17e}", r.h)];
        cols.extend((0..k).map(|i| r.eigenvalues.get(i).map(|v| format!("{v:.17e}")).unwrap_or_default()));
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

/// Richardson extrapolation of a quantity converging like h^order.
pub fn richardson(h_coarse: f64, v_coarse: f64, h_fine: f64, v_fine: f64, order: f64) -> f64 {
    let r = (h_coarse / h_fine).powf(order);
    v_fine + (v_fine - v_coarse) / (r - 1.0)
}
