use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use super::jet::{Jet2, MAX_DIM};
use super::FieldError;

#[derive(Debug, PartialEq)]
enum Node {
    Const(f64),
    Coord(usize),
    R2,
    Add(ScalarField, ScalarField),
    Sub(ScalarField, ScalarField),
    Mul(ScalarField, ScalarField),
    Div(ScalarField, ScalarField),
    Neg(ScalarField),
    Pow(ScalarField, ScalarField),
    Exp(ScalarField),
    Ln(ScalarField),
    Sin(ScalarField),
    Cos(ScalarField),
    Sqrt(ScalarField),
}

/// Closed-form scalar field: an immutable expression tree over x_1..x_D.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField(Arc<Node>);

impl ScalarField {
    fn node(n: Node) -> Self {
        ScalarField(Arc::new(n))
    }

    pub fn constant(c: f64) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// The coordinate x_{i+1} (0-based index).
    pub fn coord(i: usize) -> Self {
        assert!(i < MAX_DIM, "coordinate index {i} out of range");
        Self::node(Node::Coord(i))
    }

    /// r² = Σ x_i² over the evaluation dimension.
    pub fn r2() -> Self {
        Self::node(Node::R2)
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn powf(&self, e: f64) -> Self {
        self.pow(&Self::constant(e))
    }

    pub fn pow(&self, e: &ScalarField) -> Self {
        match (self.as_const(), e.as_const()) {
            (_, Some(c)) if c == 0.0 => Self::one(),
            (_, Some(c)) if c == 1.0 => self.clone(),
            (Some(b), Some(c)) if b > 0.0 || c.fract() == 0.0 => Self::constant(b.powf(c)),
            _ => Self::node(Node::Pow(self.clone(), e.clone())),
        }
    }

    pub fn exp(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(c.exp()),
            None => Self::node(Node::Exp(self.clone())),
        }
    }

    pub fn ln(&self) -> Self {
        match self.as_const() {
            Some(c) if c > 0.0 => Self::constant(c.ln()),
            _ => Self::node(Node::Ln(self.clone())),
        }
    }

    pub fn sin(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(c.sin()),
            None => Self::node(Node::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(c.cos()),
            None => Self::node(Node::Cos(self.clone())),
        }
    }

    pub fn sqrt(&self) -> Self {
        match self.as_const() {
            Some(c) if c >= 0.0 => Self::constant(c.sqrt()),
            _ => Self::node(Node::Sqrt(self.clone())),
        }
    }

    /// True when the tree is a polynomial in the coordinates (constant
    /// divisors and nonnegative integer powers only).
    pub fn is_polynomial(&self) -> bool {
        match &*self.0 {
            Node::Const(_) | Node::Coord(_) | Node::R2 => true,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => a.is_polynomial() && b.is_polynomial(),
            Node::Div(a, b) => a.is_polynomial() && b.as_const().is_some(),
            Node::Neg(a) => a.is_polynomial(),
            Node::Pow(a, b) => a.is_polynomial() && b.as_const().is_some_and(|e| e >= 0.0 && e.fract() == 0.0),
            Node::Exp(_) | Node::Ln(_) | Node::Sin(_) | Node::Cos(_) | Node::Sqrt(_) => false,
        }
    }

    /// Largest coordinate index used plus one (0 for coordinate-free trees).
    /// r² counts as dimension-agnostic.
    pub fn min_dim(&self) -> usize {
        match &*self.0 {
            Node::Const(_) | Node::R2 => 0,
            Node::Coord(i) => i + 1,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
                a.min_dim().max(b.min_dim())
            }
            Node::Neg(a) | Node::Exp(a) | Node::Ln(a) | Node::Sin(a) | Node::Cos(a) | Node::Sqrt(a) => a.min_dim(),
        }
    }

    /// Value, gradient and Hessian at `x`; the jet dimension is `x.len()`.
    pub fn jet(&self, x: &[f64]) -> Result<Jet2, FieldError> {
        let dim = x.len();
        if dim > MAX_DIM {
            return Err(FieldError::UnsupportedDimension(dim));
        }
        if self.min_dim() > dim {
            return Err(FieldError::CoordinateOutOfRange { index: self.min_dim(), dim });
        }
        self.jet_unchecked(x)
    }

    fn jet_unchecked(&self, x: &[f64]) -> Result<Jet2, FieldError> {
        let dim = x.len();
        let dom = |what: &str| FieldError::DomainError(format!("{what} at {x:?}"));
        Ok(match &*self.0 {
            Node::Const(c) => Jet2::constant(dim, *c),
            Node::Coord(i) => Jet2::variable(dim, *i, x[*i]),
            Node::R2 => {
                let mut acc = Jet2::constant(dim, 0.0);
                for i in 0..dim {
                    let v = Jet2::variable(dim, i, x[i]);
                    acc = acc + v * v;
                }
                acc
            }
            Node::Add(a, b) => a.jet_unchecked(x)? + b.jet_unchecked(x)?,
            Node::Sub(a, b) => a.jet_unchecked(x)? - b.jet_unchecked(x)?,
            Node::Mul(a, b) => a.jet_unchecked(x)? * b.jet_unchecked(x)?,
            Node::Div(a, b) => {
                let d = b.jet_unchecked(x)?.recip().ok_or_else(|| dom("division by zero"))?;
                a.jet_unchecked(x)? * d
            }
            Node::Neg(a) => -a.jet_unchecked(x)?,
            Node::Pow(a, b) => {
                let base = a.jet_unchecked(x)?;
                match b.as_const() {
                    Some(c) => base.powf(c).ok_or_else(|| dom("pow of nonpositive base"))?,
                    None => {
                        let l = base.ln().ok_or_else(|| dom("pow of nonpositive base"))?;
                        (b.jet_unchecked(x)? * l).exp()
                    }
                }
            }
            Node::Exp(a) => a.jet_unchecked(x)?.exp(),
            Node::Ln(a) => a.jet_unchecked(x)?.ln().ok_or_else(|| dom("ln of nonpositive value"))?,
            Node::Sin(a) => a.jet_unchecked(x)?.sin(),
            Node::Cos(a) => a.jet_unchecked(x)?.cos(),
            Node::Sqrt(a) => a.jet_unchecked(x)?.sqrt().ok_or_else(|| dom("sqrt of nonpositive value"))?,
        })
    }

    /// Value only; cheaper than `jet` when derivatives are not needed.
    pub fn value(&self, x: &[f64]) -> Result<f64, FieldError> {
        if self.min_dim() > x.len() {
            return Err(FieldError::CoordinateOutOfRange { index: self.min_dim(), dim: x.len() });
        }
        self.value_unchecked(x)
    }

    fn value_unchecked(&self, x: &[f64]) -> Result<f64, FieldError> {
        let dom = |what: &str| FieldError::DomainError(format!("{what} at {x:?}"));
        Ok(match &*self.0 {
            Node::Const(c) => *c,
            Node::Coord(i) => x[*i],
            Node::R2 => x.iter().map(|v| v * v).sum(),
            Node::Add(a, b) => a.value_unchecked(x)? + b.value_unchecked(x)?,
            Node::Sub(a, b) => a.value_unchecked(x)? - b.value_unchecked(x)?,
            Node::Mul(a, b) => a.value_unchecked(x)? * b.value_unchecked(x)?,
            Node::Div(a, b) => {
                let d = b.value_unchecked(x)?;
                if d == 0.0 {
                    return Err(dom("division by zero"));
                }
                a.value_unchecked(x)? / d
            }
            Node::Neg(a) => -a.value_unchecked(x)?,
            Node::Pow(a, b) => {
                let u = a.value_unchecked(x)?;
                let e = b.value_unchecked(x)?;
                let integral = b.as_const().is_some_and(|c| c.fract() == 0.0 && c.abs() < 64.0);
                if integral {
                    if e < 0.0 && u == 0.0 {
                        return Err(dom("pow of zero to a negative power"));
                    }
                    u.powi(e as i32)
                } else if u > 0.0 {
                    u.powf(e)
                } else {
                    return Err(dom("pow of nonpositive base"));
                }
            }
            Node::Exp(a) => a.value_unchecked(x)?.exp(),
            Node::Ln(a) => {
                let u = a.value_unchecked(x)?;
                if u <= 0.0 {
                    return Err(dom("ln of nonpositive value"));
                }
                u.ln()
            }
            Node::Sin(a) => a.value_unchecked(x)?.sin(),
            Node::Cos(a) => a.value_unchecked(x)?.cos(),
            Node::Sqrt(a) => {
                let u = a.value_unchecked(x)?;
                if u < 0.0 {
                    return Err(dom("sqrt of negative value"));
                }
                u.sqrt()
            }
        })
    }

    /// Replace every coordinate x_i by `subs[i]`. `r2` expands to Σ subs[i]².
    pub fn substitute(&self, subs: &[ScalarField]) -> ScalarField {
        match &*self.0 {
            Node::Const(_) => self.clone(),
            Node::Coord(i) => subs.get(*i).cloned().unwrap_or_else(|| panic!("no substitute for x{}", i + 1)),
            Node::R2 => subs.iter().fold(Self::zero(), |acc, s| acc + s.clone() * s.clone()),
            Node::Add(a, b) => a.substitute(subs) + b.substitute(subs),
            Node::Sub(a, b) => a.substitute(subs) - b.substitute(subs),
            Node::Mul(a, b) => a.substitute(subs) * b.substitute(subs),
            Node::Div(a, b) => a.substitute(subs) / b.substitute(subs),
            Node::Neg(a) => -a.substitute(subs),
            Node::Pow(a, b) => a.substitute(subs).pow(&b.substitute(subs)),
            Node::Exp(a) => a.substitute(subs).exp(),
            Node::Ln(a) => a.substitute(subs).ln(),
            Node::Sin(a) => a.substitute(subs).sin(),
            Node::Cos(a) => a.substitute(subs).cos(),
            Node::Sqrt(a) => a.substitute(subs).sqrt(),
        }
    }

    /// Symbolic partial derivative ∂/∂x_{i+1}. Used to build test fields such
    /// as du; numerical work goes through `jet`.
    pub fn derivative(&self, i: usize) -> ScalarField {
        let c = Self::constant;
        match &*self.0 {
            Node::Const(_) => Self::zero(),
            Node::Coord(j) => c(if *j == i { 1.0 } else { 0.0 }),
            Node::R2 => c(2.0) * Self::coord(i),
            Node::Add(a, b) => a.derivative(i) + b.derivative(i),
            Node::Sub(a, b) => a.derivative(i) - b.derivative(i),
            Node::Mul(a, b) => a.derivative(i) * b.clone() + a.clone() * b.derivative(i),
            Node::Div(a, b) => {
                (a.derivative(i) * b.clone() - a.clone() * b.derivative(i)) / (b.clone() * b.clone())
            }
            Node::Neg(a) => -a.derivative(i),
            Node::Pow(a, b) => match b.as_const() {
                Some(e) => c(e) * a.powf(e - 1.0) * a.derivative(i),
                None => self.clone() * (b.derivative(i) * a.ln() + b.clone() * a.derivative(i) / a.clone()),
            },
            Node::Exp(a) => self.clone() * a.derivative(i),
            Node::Ln(a) => a.derivative(i) / a.clone(),
            Node::Sin(a) => a.cos() * a.derivative(i),
            Node::Cos(a) => -(a.sin() * a.derivative(i)),
            Node::Sqrt(a) => a.derivative(i) / (c(2.0) * self.clone()),
        }
    }
}

impl From<f64> for ScalarField {
    fn from(c: f64) -> Self {
        ScalarField::constant(c)
    }
}

impl Add for ScalarField {
    type Output = ScalarField;
    fn add(self, o: ScalarField) -> ScalarField {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => ScalarField::constant(a + b),
            (Some(a), _) if a == 0.0 => o,
            (_, Some(b)) if b == 0.0 => self,
            _ => ScalarField::node(Node::Add(self, o)),
        }
    }
}

impl Sub for ScalarField {
    type Output = ScalarField;
    fn sub(self, o: ScalarField) -> ScalarField {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => ScalarField::constant(a - b),
            (Some(a), _) if a == 0.0 => -o,
            (_, Some(b)) if b == 0.0 => self,
            _ => ScalarField::node(Node::Sub(self, o)),
        }
    }
}

impl Mul for ScalarField {
    type Output = ScalarField;
    fn mul(self, o: ScalarField) -> ScalarField {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => ScalarField::constant(a * b),
            (Some(a), _) | (_, Some(a)) if a == 0.0 => ScalarField::zero(),
            (Some(a), _) if a == 1.0 => o,
            (_, Some(b)) if b == 1.0 => self,
            _ => ScalarField::node(Node::Mul(self, o)),
        }
    }
}

impl Div for ScalarField {
    type Output = ScalarField;
    fn div(self, o: ScalarField) -> ScalarField {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => ScalarField::constant(a / b),
            (Some(a), _) if a == 0.0 => ScalarField::zero(),
            (_, Some(b)) if b == 1.0 => self,
            _ => ScalarField::node(Node::Div(self, o)),
        }
    }
}

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        match self.as_const() {
            Some(a) => ScalarField::constant(-a),
            None => ScalarField::node(Node::Neg(self)),
        }
    }
}

impl fmt::Display for ScalarField {
    /// Fully parenthesized; the parser reads it back to an equal tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) if *c < 0.0 => write!(f, "(-{:?})", -c),
            Node::Const(c) => write!(f, "{c:?}"),
            Node::Coord(i) => write!(f, "x{}", i + 1),
            Node::R2 => write!(f, "r2"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b) => write!(f, "({a} / {b})"),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Pow(a, b) => write!(f, "pow({a}, {b})"),
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Ln(a) => write!(f, "ln({a})"),
            Node::Sin(a) => write!(f, "sin({a})"),
            Node::Cos(a) => write!(f, "cos({a})"),
            Node::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

/// Raw constructors that skip constant folding, so a parsed tree mirrors its
/// source text.
pub(crate) mod raw {
    use super::*;

    pub fn add(a: ScalarField, b: ScalarField) -> ScalarField {
        ScalarField::node(Node::Add(a, b))
    }
    pub fn sub(a: ScalarField, b: ScalarField) -> ScalarField {
        ScalarField::node(Node::Sub(a, b))
    }
    pub fn mul(a: ScalarField, b: ScalarField) -> ScalarField {
        ScalarField::node(Node::Mul(a, b))
    }
    pub fn div(a: ScalarField, b: ScalarField) -> ScalarField {
        ScalarField::node(Node::Div(a, b))
    }
    pub fn neg(a: ScalarField) -> ScalarField {
        ScalarField::node(Node::Neg(a))
    }
    pub fn pow(a: ScalarField, b: ScalarField) -> ScalarField {
        ScalarField::node(Node::Pow(a, b))
    }
    pub fn func(name: &str, a: ScalarField) -> ScalarField {
        ScalarField::node(match name {
            "exp" => Node::Exp(a),
            "ln" => Node::Ln(a),
            "sin" => Node::Sin(a),
            "cos" => Node::Cos(a),
            "sqrt" => Node::Sqrt(a),
            _ => unreachable!("unknown function {name}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r2_gradient() {
        let j = ScalarField::r2().jet(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(j.value(), 14.0);
        assert_eq!(j.grad(), &[2.0, 4.0, 6.0]);
        assert_eq!(j.hess(1, 1), 2.0);
        assert_eq!(j.hess(0, 2), 0.0);
    }

    #[test]
    fn derivative_matches_jet() {
        let x = ScalarField::coord(0);
        let y = ScalarField::coord(1);
        let f = (x.clone() * y.clone()).sin().exp() / (ScalarField::constant(2.0) + y.clone() * y);
        let p = [0.3, -0.7];
        let j = f.jet(&p).unwrap();
        for i in 0..2 {
            let d = f.derivative(i).value(&p).unwrap();
            assert!((d - j.d(i)).abs() < 1e-14);
        }
    }

    #[test]
    fn domain_errors() {
        let f = ScalarField::one() / ScalarField::coord(0);
        assert!(matches!(f.jet(&[0.0]), Err(FieldError::DomainError(_))));
        let g = (-ScalarField::coord(0)).sqrt();
        assert!(matches!(g.value(&[1.0]), Err(FieldError::DomainError(_))));
        assert!(matches!(ScalarField::coord(2).jet(&[0.0, 1.0]), Err(FieldError::CoordinateOutOfRange { .. })));
    }

    #[test]
    fn substitute_composes() {
        // x1*x2 with x1 = cos t, x2 = sin t gives sin(2t)/2.
        let t = ScalarField::coord(0);
        let f = ScalarField::coord(0) * ScalarField::coord(1);
        let g = f.substitute(&[t.cos(), t.sin()]);
        let j = g.jet(&[0.4]).unwrap();
        assert!((j.value() - (0.8f64).sin() / 2.0).abs() < 1e-15);
        assert!((j.d(0) - (0.8f64).cos()).abs() < 1e-15);
    }
}
