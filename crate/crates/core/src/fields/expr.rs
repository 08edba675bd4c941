use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use super::{Jet2, Point};
use crate::error::DomainError;
use crate::scalar::Scalar;

/// Denominators (quotients, `lin_inv`, negative powers) smaller than this in
/// magnitude are rejected as domain violations.
pub const EPS_DENOMINATOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(f64),
    /// Coordinate `x{k}`, `k` in `1..=4`.
    Coord(u8),
    Add(ScalarField, ScalarField),
    Sub(ScalarField, ScalarField),
    Mul(ScalarField, ScalarField),
    Div(ScalarField, ScalarField),
    Neg(ScalarField),
    Pow(ScalarField, i32),
    Func(Func, ScalarField),
    /// `1 / (a0 + a3 x3 + a4 x4)`.
    LinInv {
        a0: f64,
        a3: f64,
        a4: f64,
    },
}

/// Immutable expression tree over the coordinates `x1..x4`.
///
/// Cloning is cheap (shared nodes). The arithmetic operator impls fold
/// constants and neutral elements; the parser builds trees verbatim.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField(Arc<Node>);

impl ScalarField {
    pub fn from_node(node: Node) -> Self {
        ScalarField(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: f64) -> Self {
        Self::from_node(Node::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Coordinate field `x{k}`.
    pub fn coord(k: u8) -> Self {
        assert!((1..=4).contains(&k), "coordinate index {k} out of range");
        Self::from_node(Node::Coord(k))
    }

    pub fn lin_inv(a0: f64, a3: f64, a4: f64) -> Self {
        Self::from_node(Node::LinInv { a0, a3, a4 })
    }

    pub fn func(f: Func, arg: ScalarField) -> Self {
        if let Some(c) = arg.as_const() {
            let folded = match f {
                Func::Sin => c.sin(),
                Func::Cos => c.cos(),
                Func::Exp => c.exp(),
                Func::Log if c > 0.0 => c.ln(),
                Func::Log => return Self::from_node(Node::Func(f, arg)),
            };
            return Self::constant(folded);
        }
        Self::from_node(Node::Func(f, arg))
    }

    pub fn sin(self) -> Self {
        Self::func(Func::Sin, self)
    }

    pub fn cos(self) -> Self {
        Self::func(Func::Cos, self)
    }

    pub fn exp(self) -> Self {
        Self::func(Func::Exp, self)
    }

    pub fn ln(self) -> Self {
        Self::func(Func::Log, self)
    }

    pub fn powi(self, n: i32) -> Self {
        match (n, self.as_const()) {
            (0, _) => Self::constant(1.0),
            (1, _) => self,
            (_, Some(c)) if n > 0 || c != 0.0 => Self::constant(c.powi(n)),
            _ => Self::from_node(Node::Pow(self, n)),
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    /// True for the constant-zero tree (structural, not semantic).
    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    /// Coordinates referenced anywhere in the tree.
    pub fn coordinates(&self) -> BTreeSet<u8> {
        let mut out = BTreeSet::new();
        self.collect_coords(&mut out);
        out
    }

    fn collect_coords(&self, out: &mut BTreeSet<u8>) {
        match self.node() {
            Node::Const(_) => {}
            Node::Coord(k) => {
                out.insert(*k);
            }
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.collect_coords(out);
                b.collect_coords(out);
            }
            Node::Neg(a) | Node::Pow(a, _) | Node::Func(_, a) => a.collect_coords(out),
            Node::LinInv { a3, a4, .. } => {
                if *a3 != 0.0 {
                    out.insert(3);
                }
                if *a4 != 0.0 {
                    out.insert(4);
                }
            }
        }
    }

    /// Field depends on the base coordinates `x3, x4` only.
    pub fn is_base_only(&self) -> bool {
        self.coordinates().iter().all(|&k| k == 3 || k == 4)
    }

    /// Exact value, gradient and Hessian at `p`.
    pub fn eval_jet2<T: Scalar, const N: usize>(&self, p: &Point<T, N>) -> Result<Jet2<T, N>, DomainError> {
        let eps = T::lit(EPS_DENOMINATOR);
        let jet = match self.node() {
            Node::Const(c) => Jet2::constant(T::lit(*c)),
            Node::Coord(k) => {
                let slot = Point::<T, N>::slot(*k).ok_or_else(|| {
                    DomainError::new(format!("x{k}"), format!("coordinate not available on a {N}-dimensional point"))
                })?;
                Jet2::variable(slot, p.0[slot])
            }
            Node::Add(a, b) => a.eval_jet2(p)? + b.eval_jet2(p)?,
            Node::Sub(a, b) => a.eval_jet2(p)? - b.eval_jet2(p)?,
            Node::Mul(a, b) => a.eval_jet2(p)? * b.eval_jet2(p)?,
            Node::Div(a, b) => {
                let den = b.eval_jet2(p)?;
                if den.value.abs() < eps {
                    return Err(DomainError::new(self.to_string(), "denominator vanishes"));
                }
                a.eval_jet2(p)? * den.recip()
            }
            Node::Neg(a) => -a.eval_jet2(p)?,
            Node::Pow(a, n) => {
                let base = a.eval_jet2(p)?;
                if *n < 0 && base.value.abs() < eps {
                    return Err(DomainError::new(self.to_string(), "negative power of a vanishing base"));
                }
                base.powi(*n)
            }
            Node::Func(f, a) => {
                let arg = a.eval_jet2(p)?;
                let v = arg.value;
                match f {
                    Func::Sin => arg.compose(v.sin(), v.cos(), -v.sin()),
                    Func::Cos => arg.compose(v.cos(), -v.sin(), -v.cos()),
                    Func::Exp => {
                        let e = v.exp();
                        arg.compose(e, e, e)
                    }
                    Func::Log => {
                        if v <= T::zero() {
                            return Err(DomainError::new(self.to_string(), "logarithm of a non-positive value"));
                        }
                        let inv = T::one() / v;
                        arg.compose(v.ln(), inv, -inv * inv)
                    }
                }
            }
            Node::LinInv { a0, a3, a4 } => {
                let mut lin = Jet2::constant(T::lit(*a0));
                for (k, a) in [(3u8, *a3), (4u8, *a4)] {
                    if a == 0.0 {
                        continue;
                    }
                    let slot = Point::<T, N>::slot(k).ok_or_else(|| {
                        DomainError::new(self.to_string(), format!("x{k} not available on a {N}-dimensional point"))
                    })?;
                    lin = lin + Jet2::variable(slot, p.0[slot]).scale(T::lit(a));
                }
                if lin.value.abs() < eps {
                    return Err(DomainError::new(self.to_string(), "denominator vanishes"));
                }
                lin.recip()
            }
        };
        if !jet.is_finite() {
            return Err(DomainError::new(self.to_string(), "non-finite result"));
        }
        Ok(jet)
    }

    /// Plain value evaluation in `f64`, independent of the jet arithmetic.
    pub fn eval<const N: usize>(&self, p: &Point<f64, N>) -> Result<f64, DomainError> {
        let v = match self.node() {
            Node::Const(c) => *c,
            Node::Coord(k) => {
                p.coord(*k).ok_or_else(|| DomainError::new(format!("x{k}"), "coordinate not available"))?
            }
            Node::Add(a, b) => a.eval(p)? + b.eval(p)?,
            Node::Sub(a, b) => a.eval(p)? - b.eval(p)?,
            Node::Mul(a, b) => a.eval(p)? * b.eval(p)?,
            Node::Div(a, b) => {
                let den = b.eval(p)?;
                if den.abs() < EPS_DENOMINATOR {
                    return Err(DomainError::new(self.to_string(), "denominator vanishes"));
                }
                a.eval(p)? / den
            }
            Node::Neg(a) => -a.eval(p)?,
            Node::Pow(a, n) => {
                let base = a.eval(p)?;
                if *n < 0 && base.abs() < EPS_DENOMINATOR {
                    return Err(DomainError::new(self.to_string(), "negative power of a vanishing base"));
                }
                base.powi(*n)
            }
            Node::Func(f, a) => {
                let x = a.eval(p)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log if x > 0.0 => x.ln(),
                    Func::Log => return Err(DomainError::new(self.to_string(), "logarithm of a non-positive value")),
                }
            }
            Node::LinInv { a0, a3, a4 } => {
                let mut den = *a0;
                for (k, a) in [(3u8, *a3), (4u8, *a4)] {
                    if a != 0.0 {
                        den += a * p
                            .coord(k)
                            .ok_or_else(|| DomainError::new(self.to_string(), "coordinate not available"))?;
                    }
                }
                if den.abs() < EPS_DENOMINATOR {
                    return Err(DomainError::new(self.to_string(), "denominator vanishes"));
                }
                1.0 / den
            }
        };
        if !v.is_finite() {
            return Err(DomainError::new(self.to_string(), "non-finite result"));
        }
        Ok(v)
    }

    /// Symbolic partial derivative with respect to `x{k}`.
    pub fn derivative(&self, k: u8) -> ScalarField {
        let zero = ScalarField::zero;
        match self.node() {
            Node::Const(_) => zero(),
            Node::Coord(j) => ScalarField::constant(if *j == k { 1.0 } else { 0.0 }),
            Node::Add(a, b) => a.derivative(k) + b.derivative(k),
            Node::Sub(a, b) => a.derivative(k) - b.derivative(k),
            Node::Mul(a, b) => a.derivative(k) * b.clone() + a.clone() * b.derivative(k),
            Node::Div(a, b) => (a.derivative(k) * b.clone() - a.clone() * b.derivative(k)) / b.clone().powi(2),
            Node::Neg(a) => -a.derivative(k),
            Node::Pow(a, n) => ScalarField::constant(*n as f64) * a.clone().powi(n - 1) * a.derivative(k),
            Node::Func(f, a) => {
                let outer = match f {
                    Func::Sin => a.clone().cos(),
                    Func::Cos => -a.clone().sin(),
                    Func::Exp => self.clone(),
                    Func::Log => ScalarField::constant(1.0) / a.clone(),
                };
                outer * a.derivative(k)
            }
            Node::LinInv { a3, a4, .. } => {
                let coeff = match k {
                    3 => *a3,
                    4 => *a4,
                    _ => 0.0,
                };
                ScalarField::constant(-coeff) * self.clone().powi(2)
            }
        }
    }
}

impl Add for ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: ScalarField) -> ScalarField {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => ScalarField::constant(a + b),
            (Some(0.0), _) => rhs,
            (_, Some(0.0)) => self,
            _ => ScalarField::from_node(Node::Add(self, rhs)),
        }
    }
}

impl Sub for ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: ScalarField) -> ScalarField {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => ScalarField::constant(a - b),
            (Some(0.0), _) => -rhs,
            (_, Some(0.0)) => self,
            _ => ScalarField::from_node(Node::Sub(self, rhs)),
        }
    }
}

impl Mul for ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: ScalarField) -> ScalarField {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => ScalarField::constant(a * b),
            (Some(0.0), _) | (_, Some(0.0)) => ScalarField::zero(),
            (Some(1.0), _) => rhs,
            (_, Some(1.0)) => self,
            _ => ScalarField::from_node(Node::Mul(self, rhs)),
        }
    }
}

impl Div for ScalarField {
    type Output = ScalarField;
    fn div(self, rhs: ScalarField) -> ScalarField {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => ScalarField::constant(a / b),
            (Some(0.0), _) => ScalarField::zero(),
            (_, Some(1.0)) => self,
            _ => ScalarField::from_node(Node::Div(self, rhs)),
        }
    }
}

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        match self.node() {
            Node::Const(c) => ScalarField::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => ScalarField::from_node(Node::Neg(self)),
        }
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c < 0.0 || (c == 0.0 && c.is_sign_negative()) {
        write!(f, "(-{:?})", -c)
    } else {
        write!(f, "{c:?}")
    }
}

fn write_literal(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c < 0.0 {
        write!(f, "-{:?}", -c)
    } else {
        write!(f, "{c:?}")
    }
}

/// Fully parenthesised rendering accepted by [`super::parse_field`].
impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write_number(f, *c),
            Node::Coord(k) => write!(f, "x{k}"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b) => write!(f, "({a} / {b})"),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Pow(a, n) => write!(f, "({a}^{n})"),
            Node::Func(func, a) => write!(f, "{}({a})", func.name()),
            Node::LinInv { a0, a3, a4 } => {
                write!(f, "lin_inv(")?;
                write_literal(f, *a0)?;
                write!(f, ", ")?;
                write_literal(f, *a3)?;
                write!(f, ", ")?;
                write_literal(f, *a4)?;
                write!(f, ")")
            }
        }
    }
}
