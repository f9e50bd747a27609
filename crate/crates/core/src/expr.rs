//! Scalar fields on coordinate space as immutable expression trees.
//!
//! The same tree type is produced by the manifest parser, so a parsed
//! expression *is* an evaluable field once its coordinate names are bound to
//! indices.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

/// Elementary functions available in fields and in the expression grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Exp,
        Func::Log,
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }

    /// Value and first three derivatives at `t`, or `None` outside the domain.
    pub(crate) fn derivatives(self, t: f64) -> Option<[f64; 4]> {
        let d = match self {
            Func::Exp => {
                let e = t.exp();
                [e, e, e, e]
            }
            Func::Log => {
                if t <= 0.0 {
                    return None;
                }
                let r = 1.0 / t;
                [t.ln(), r, -r * r, 2.0 * r * r * r]
            }
            Func::Sin => {
                let (s, c) = t.sin_cos();
                [s, c, -s, -c]
            }
            Func::Cos => {
                let (s, c) = t.sin_cos();
                [c, -s, -c, s]
            }
            Func::Tan => {
                let c = t.cos();
                if c == 0.0 {
                    return None;
                }
                let v = t.tan();
                let sec2 = 1.0 + v * v;
                [v, sec2, 2.0 * v * sec2, 2.0 * sec2 * (1.0 + 3.0 * v * v)]
            }
            Func::Sinh => {
                let (s, c) = (t.sinh(), t.cosh());
                [s, c, s, c]
            }
            Func::Cosh => {
                let (s, c) = (t.sinh(), t.cosh());
                [c, s, c, s]
            }
            Func::Tanh => {
                let v = t.tanh();
                let sech2 = 1.0 - v * v;
                [v, sech2, -2.0 * v * sech2, sech2 * (6.0 * v * v - 2.0)]
            }
            Func::Sqrt => {
                if t <= 0.0 {
                    return None;
                }
                let s = t.sqrt();
                [s, 0.5 / s, -0.25 / (s * t), 0.375 / (s * t * t)]
            }
        };
        if d.iter().all(|v| v.is_finite()) {
            Some(d)
        } else {
            None
        }
    }

    pub(crate) fn value(self, t: f64) -> Option<f64> {
        let v = match self {
            Func::Exp => t.exp(),
            Func::Log if t <= 0.0 => return None,
            Func::Log => t.ln(),
            Func::Sin => t.sin(),
            Func::Cos => t.cos(),
            Func::Tan if t.cos() == 0.0 => return None,
            Func::Tan => t.tan(),
            Func::Sinh => t.sinh(),
            Func::Cosh => t.cosh(),
            Func::Tanh => t.tanh(),
            Func::Sqrt if t <= 0.0 => return None,
            Func::Sqrt => t.sqrt(),
        };
        v.is_finite().then_some(v)
    }
}

/// One node of an expression tree. Children are shared, so cloning a field is
/// a reference-count bump.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(f64),
    Coord(usize),
    Neg(ScalarField),
    Add(ScalarField, ScalarField),
    Sub(ScalarField, ScalarField),
    Mul(ScalarField, ScalarField),
    Div(ScalarField, ScalarField),
    Pow(ScalarField, ScalarField),
    Apply(Func, ScalarField),
}

/// An evaluable map from a point of R^n to a real number.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField(Arc<Node>);

/// Syntax tree produced by the expression parser; identical to a field.
pub type ExprAst = ScalarField;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainViolation {
    DivisionByZero,
    LogNonPositive,
    SqrtNonPositive,
    TanPole,
    PowNonPositiveBase,
    NonFinite,
    CoordinateOutOfRange { index: usize, dim: usize },
}

impl fmt::Display for DomainViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainViolation::DivisionByZero => write!(f, "division by zero"),
            DomainViolation::LogNonPositive => write!(f, "log of a non-positive value"),
            DomainViolation::SqrtNonPositive => write!(f, "sqrt of a non-positive value"),
            DomainViolation::TanPole => write!(f, "tan at a pole"),
            DomainViolation::PowNonPositiveBase => {
                write!(f, "non-integer power of a non-positive base")
            }
            DomainViolation::NonFinite => write!(f, "non-finite result"),
            DomainViolation::CoordinateOutOfRange { index, dim } => {
                write!(f, "coordinate x{index} referenced at a point of dimension {dim}")
            }
        }
    }
}

/// Evaluation failure, naming the sub-expression where it happened.
#[derive(Clone, Debug, Error, PartialEq)]
#[error("{violation} in `{node}`")]
pub struct EvalError {
    pub violation: DomainViolation,
    pub node: String,
}

impl EvalError {
    pub(crate) fn at(field: &ScalarField, violation: DomainViolation) -> Self {
        EvalError {
            violation,
            node: field.to_string(),
        }
    }
}

impl ScalarField {
    pub fn new(node: Node) -> Self {
        ScalarField(Arc::new(node))
    }

    pub fn constant(v: f64) -> Self {
        Self::new(Node::Const(v))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn coord(index: usize) -> Self {
        Self::new(Node::Coord(index))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn apply(self, f: Func) -> Self {
        Self::new(Node::Apply(f, self))
    }

    pub fn exp(self) -> Self {
        self.apply(Func::Exp)
    }

    pub fn log(self) -> Self {
        self.apply(Func::Log)
    }

    pub fn sin(self) -> Self {
        self.apply(Func::Sin)
    }

    pub fn cos(self) -> Self {
        self.apply(Func::Cos)
    }

    pub fn sqrt(self) -> Self {
        self.apply(Func::Sqrt)
    }

    pub fn pow(self, exponent: ScalarField) -> Self {
        Self::new(Node::Pow(self, exponent))
    }

    pub fn powi(self, k: i32) -> Self {
        self.pow(Self::constant(k as f64))
    }

    /// `Some(v)` when the tree references no coordinate.
    pub fn constant_value(&self) -> Option<f64> {
        if self.max_coord().is_some() {
            return None;
        }
        self.eval(&[]).ok()
    }

    /// True for a literal zero, used to skip work and to print sparse arrays.
    pub fn is_literal_zero(&self) -> bool {
        matches!(self.node(), Node::Const(v) if *v == 0.0)
    }

    /// Highest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self.node() {
            Node::Const(_) => None,
            Node::Coord(i) => Some(*i),
            Node::Neg(a) | Node::Apply(_, a) => a.max_coord(),
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => match (a.max_coord(), b.max_coord()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Plain value evaluation, independent of the jet machinery.
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        let v = match self.node() {
            Node::Const(c) => *c,
            Node::Coord(i) => match point.get(*i) {
                Some(v) => *v,
                None => {
                    return Err(EvalError::at(
                        self,
                        DomainViolation::CoordinateOutOfRange {
                            index: *i,
                            dim: point.len(),
                        },
                    ))
                }
            },
            Node::Neg(a) => -a.eval(point)?,
            Node::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Node::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Node::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Node::Div(a, b) => {
                let num = a.eval(point)?;
                let den = b.eval(point)?;
                if den == 0.0 {
                    return Err(EvalError::at(self, DomainViolation::DivisionByZero));
                }
                num / den
            }
            Node::Pow(a, b) => {
                let base = a.eval(point)?;
                let exponent = b.eval(point)?;
                match integer_exponent(b) {
                    Some(k) => {
                        if k < 0 && base == 0.0 {
                            return Err(EvalError::at(self, DomainViolation::DivisionByZero));
                        }
                        base.powi(k)
                    }
                    None => {
                        if base <= 0.0 {
                            return Err(EvalError::at(self, DomainViolation::PowNonPositiveBase));
                        }
                        base.powf(exponent)
                    }
                }
            }
            Node::Apply(f, a) => {
                let t = a.eval(point)?;
                match f.value(t) {
                    Some(v) => v,
                    None => return Err(EvalError::at(self, domain_violation(*f))),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::at(self, DomainViolation::NonFinite))
        }
    }

    /// Renders the tree with the given coordinate names. The output reparses
    /// to a structurally identical tree for any tree the parser can produce.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> Display<'a> {
        Display { field: self, names: Some(names) }
    }
}

pub(crate) fn domain_violation(f: Func) -> DomainViolation {
    match f {
        Func::Log => DomainViolation::LogNonPositive,
        Func::Sqrt => DomainViolation::SqrtNonPositive,
        Func::Tan => DomainViolation::TanPole,
        _ => DomainViolation::NonFinite,
    }
}

/// Exponent usable as an integer power: a coordinate-free subtree whose value
/// is an integer of modest size.
pub(crate) fn integer_exponent(exponent: &ScalarField) -> Option<i32> {
    let v = exponent.constant_value()?;
    (v.fract() == 0.0 && v.abs() <= 1024.0).then_some(v as i32)
}

pub struct Display<'a> {
    field: &'a ScalarField,
    names: Option<&'a [String]>,
}

// Binding strength used to decide where parentheses are required.
const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => PREC_SUM,
        Node::Mul(..) | Node::Div(..) => PREC_PRODUCT,
        Node::Neg(_) => PREC_UNARY,
        Node::Pow(..) => PREC_POWER,
        Node::Const(c) if *c < 0.0 || c.is_sign_negative() => PREC_UNARY,
        Node::Const(_) | Node::Coord(_) | Node::Apply(..) => PREC_ATOM,
    }
}

pub(crate) fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

impl Display<'_> {
    fn write_node(&self, f: &mut fmt::Formatter<'_>, field: &ScalarField, min: u8) -> fmt::Result {
        let node = field.node();
        let paren = precedence(node) < min;
        if paren {
            f.write_str("(")?;
        }
        match node {
            Node::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "-{}", format_number(-c))?;
                } else {
                    f.write_str(&format_number(*c))?;
                }
            }
            Node::Coord(i) => match self.names.and_then(|n| n.get(*i)) {
                Some(name) => f.write_str(name)?,
                None => write!(f, "x{i}")?,
            },
            Node::Neg(a) => {
                f.write_str("-")?;
                self.write_node(f, a, PREC_UNARY)?;
            }
            Node::Add(a, b) => {
                self.write_node(f, a, PREC_SUM)?;
                f.write_str(" + ")?;
                self.write_node(f, b, PREC_PRODUCT)?;
            }
            Node::Sub(a, b) => {
                self.write_node(f, a, PREC_SUM)?;
                f.write_str(" - ")?;
                self.write_node(f, b, PREC_PRODUCT)?;
            }
            Node::Mul(a, b) => {
                self.write_node(f, a, PREC_PRODUCT)?;
                f.write_str("*")?;
                self.write_node(f, b, PREC_UNARY)?;
            }
            Node::Div(a, b) => {
                self.write_node(f, a, PREC_PRODUCT)?;
                f.write_str("/")?;
                self.write_node(f, b, PREC_UNARY)?;
            }
            Node::Pow(a, b) => {
                // right-associative; the base must be an atom
                self.write_node(f, a, PREC_ATOM)?;
                f.write_str("^")?;
                self.write_node(f, b, PREC_POWER)?;
            }
            Node::Apply(func, a) => {
                write!(f, "{}(", func.name())?;
                self.write_node(f, a, 0)?;
                f.write_str(")")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_node(f, self.field, 0)
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display { field: self, names: None }.fmt(f)
    }
}

impl From<f64> for ScalarField {
    fn from(v: f64) -> Self {
        ScalarField::constant(v)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl $trait for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                ScalarField::new(Node::$variant(self, rhs))
            }
        }
        impl $trait<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                ScalarField::new(Node::$variant(self.clone(), rhs.clone()))
            }
        }
        impl $trait<f64> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: f64) -> ScalarField {
                ScalarField::new(Node::$variant(self, ScalarField::constant(rhs)))
            }
        }
        impl $trait<ScalarField> for f64 {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                ScalarField::new(Node::$variant(ScalarField::constant(self), rhs))
            }
        }
    };
}

binary_op!(Add, add, Add);
binary_op!(Sub, sub, Sub);
binary_op!(Mul, mul, Mul);
binary_op!(Div, div, Div);

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        ScalarField::new(Node::Neg(self))
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        ScalarField::new(Node::Neg(self.clone()))
    }
}
