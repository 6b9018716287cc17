use std::collections::BTreeMap;

use serde::Serialize;

/// Default relative tolerance for polynomial data at exact quadrature order.
pub const TOL_POLYNOMIAL: f64 = 1e-8;
/// Default relative tolerance otherwise.
pub const TOL_GENERAL: f64 = 1e-6;

/// Outcome of one identity check: both sides, residuals and provenance of
/// the numbers (quadrature orders, sample seed, domain).
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct IdentityReport {
    pub identity_id: String,
    /// Left side (integral value, or max pointwise norm).
    pub lhs: f64,
    /// Right side (integral value, or max pointwise norm).
    pub rhs: f64,
    pub abs_residual: f64,
    /// abs_residual / max(1, |lhs|, |rhs|).
    pub rel_residual: f64,
    /// Interior and boundary quadrature orders; empty for pointwise checks.
    pub quadrature_orders: Vec<usize>,
    pub seed: Option<u64>,
    pub domain: String,
    /// Number of sample points (pointwise) or quadrature nodes (integral).
    pub points: usize,
    /// Individual terms of the identity, by name.
    pub terms: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    pub fn new(identity_id: &str, domain: &str, lhs: f64, rhs: f64, abs_residual: f64) -> Self {
        let rel_residual = abs_residual / 1f64.max(lhs.abs()).max(rhs.abs());
        IdentityReport {
            identity_id: identity_id.to_string(),
            lhs,
            rhs,
            abs_residual,
            rel_residual,
            quadrature_orders: Vec::new(),
            seed: None,
            domain: domain.to_string(),
            points: 0,
            terms: BTreeMap::new(),
            tolerance: TOL_GENERAL,
            pass: rel_residual <= TOL_GENERAL,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self.pass = self.rel_residual <= tol;
        self
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_term(mut self, name: &str, v: f64) -> Self {
        self.terms.insert(name.to_string(), v);
        self
    }

    pub const CSV_HEADER: &'static str =
        "identity_id,domain,lhs,rhs,abs_residual,rel_residual,tolerance,pass,quadrature_orders,seed,points";

    pub fn csv_row(&self) -> String {
        let orders: Vec<String> = self.quadrature_orders.iter().map(|o| o.to_string()).collect();
        format!(
            "{},{},{:e},{:e},{:e},{:e},{:e},{},{},{},{}",
            self.identity_id,
            csv_quote(&self.domain),
            self.lhs,
            self.rhs,
            self.abs_residual,
            self.rel_residual,
            self.tolerance,
            self.pass,
            orders.join(";"),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.points
        )
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
