//! Truncated multivariate Taylor jets: a value with exact partial derivatives
//! through order 3.
//!
//! Derivative arrays are stored densely but every entry is computed once for
//! its sorted index tuple and copied to all permutations, so symmetry of the
//! Hessian and third-derivative arrays is exact rather than approximate.
//!
//! A jet also carries its truncation `order`. Differentiating a jet lowers the
//! order by one, and arithmetic between jets of different order yields the
//! lower one; this is what lets Christoffel symbols (built from first
//! derivatives of the metric) be carried as order-2 jets, and curvature as
//! order-1 jets.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::expr::{domain_violation, integer_exponent, DomainViolation, EvalError, Node, ScalarField};

pub const MAX_ORDER: u8 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    dim: usize,
    order: u8,
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
    third: Vec<f64>,
}

/// The order-3 jet returned by [`eval_jet`].
pub type Jet3 = Jet;

// Sorted index tuples of a given dimension, used to fill symmetric arrays.
fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i..n).map(move |j| (i, j)))
}

fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |i| (i..n).flat_map(move |j| (j..n).map(move |k| (i, j, k))))
}

impl Jet {
    pub fn constant(dim: usize, order: u8, value: f64) -> Self {
        let order = order.min(MAX_ORDER);
        Jet {
            dim,
            order,
            value,
            grad: if order >= 1 { vec![0.0; dim] } else { Vec::new() },
            hess: if order >= 2 { vec![0.0; dim * dim] } else { Vec::new() },
            third: if order >= 3 { vec![0.0; dim * dim * dim] } else { Vec::new() },
        }
    }

    /// The coordinate function `x_index` evaluated at `value`.
    pub fn variable(dim: usize, order: u8, index: usize, value: f64) -> Self {
        let mut j = Jet::constant(dim, order, value);
        if j.order >= 1 {
            j.grad[index] = 1.0;
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.grad[i]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.dim + j]
    }

    pub fn third(&self, i: usize, j: usize, k: usize) -> f64 {
        self.third[(i * self.dim + j) * self.dim + k]
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    /// Partial derivative of the given order along `idx` (`idx.len()` is the order).
    pub fn partial(&self, idx: &[usize]) -> f64 {
        match idx {
            [] => self.value,
            [i] => self.grad(*i),
            [i, j] => self.hess(*i, *j),
            [i, j, k] => self.third(*i, *j, *k),
            _ => panic!("jets carry derivatives through order 3"),
        }
    }

    pub fn truncate(&self, order: u8) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        let mut j = self.clone();
        j.order = order;
        if order < 3 {
            j.third = Vec::new();
        }
        if order < 2 {
            j.hess = Vec::new();
        }
        if order < 1 {
            j.grad = Vec::new();
        }
        j
    }

    /// Exact partial derivative along coordinate `i`; the result has one order less.
    pub fn derivative(&self, i: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let n = self.dim;
        let mut out = Jet::constant(n, self.order - 1, self.grad[i]);
        if out.order >= 1 {
            for j in 0..n {
                out.grad[j] = self.hess(i, j);
            }
        }
        if out.order >= 2 {
            for j in 0..n {
                for k in 0..n {
                    out.hess[j * n + k] = self.third(i, j, k);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Jet {
        self.map_linear(|v| s * v)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().chain(&self.hess).chain(&self.third).all(|v| v.is_finite())
    }

    fn map_linear(&self, f: impl Fn(f64) -> f64) -> Jet {
        Jet {
            dim: self.dim,
            order: self.order,
            value: f(self.value),
            grad: self.grad.iter().map(|v| f(*v)).collect(),
            hess: self.hess.iter().map(|v| f(*v)).collect(),
            third: self.third.iter().map(|v| f(*v)).collect(),
        }
    }

    fn zip_linear(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        assert_eq!(self.dim, other.dim, "jet dimension mismatch");
        let order = self.order.min(other.order);
        let zip = |a: &[f64], b: &[f64], keep: bool| -> Vec<f64> {
            if keep {
                a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
            } else {
                Vec::new()
            }
        };
        Jet {
            dim: self.dim,
            order,
            value: f(self.value, other.value),
            grad: zip(&self.grad, &other.grad, order >= 1),
            hess: zip(&self.hess, &other.hess, order >= 2),
            third: zip(&self.third, &other.third, order >= 3),
        }
    }

    fn set_hess(&mut self, i: usize, j: usize, v: f64) {
        let n = self.dim;
        self.hess[i * n + j] = v;
        self.hess[j * n + i] = v;
    }

    fn set_third(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.dim;
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            self.third[(a * n + b) * n + c] = v;
        }
    }

    /// Leibniz product.
    pub fn mul_jet(&self, b: &Jet) -> Jet {
        let a = self;
        assert_eq!(a.dim, b.dim, "jet dimension mismatch");
        let n = a.dim;
        let order = a.order.min(b.order);
        let mut out = Jet::constant(n, order, a.value * b.value);
        if order >= 1 {
            for i in 0..n {
                out.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
            }
        }
        if order >= 2 {
            for (i, j) in pairs(n) {
                let v = a.hess(i, j) * b.value
                    + a.grad[i] * b.grad[j]
                    + a.grad[j] * b.grad[i]
                    + a.value * b.hess(i, j);
                out.set_hess(i, j, v);
            }
        }
        if order >= 3 {
            for (i, j, k) in triples(n) {
                let v = a.third(i, j, k) * b.value
                    + a.hess(i, j) * b.grad[k]
                    + a.hess(i, k) * b.grad[j]
                    + a.hess(j, k) * b.grad[i]
                    + a.grad[i] * b.hess(j, k)
                    + a.grad[j] * b.hess(i, k)
                    + a.grad[k] * b.hess(i, j)
                    + a.value * b.third(i, j, k);
                out.set_third(i, j, k, v);
            }
        }
        out
    }

    /// Composition `f(self)` given `f` and its first three derivatives at
    /// `self.value()` (chain rule through order 3).
    pub fn compose(&self, d: [f64; 4]) -> Jet {
        let u = self;
        let n = u.dim;
        let mut out = Jet::constant(n, u.order, d[0]);
        if u.order >= 1 {
            for i in 0..n {
                out.grad[i] = d[1] * u.grad[i];
            }
        }
        if u.order >= 2 {
            for (i, j) in pairs(n) {
                let v = d[2] * u.grad[i] * u.grad[j] + d[1] * u.hess(i, j);
                out.set_hess(i, j, v);
            }
        }
        if u.order >= 3 {
            for (i, j, k) in triples(n) {
                let v = d[3] * u.grad[i] * u.grad[j] * u.grad[k]
                    + d[2] * (u.hess(i, j) * u.grad[k] + u.hess(i, k) * u.grad[j] + u.hess(j, k) * u.grad[i])
                    + d[1] * u.third(i, j, k);
                out.set_third(i, j, k, v);
            }
        }
        out
    }

    /// `1 / self`, or `None` when the value is zero.
    pub fn recip(&self) -> Option<Jet> {
        let t = self.value;
        if t == 0.0 {
            return None;
        }
        let r = 1.0 / t;
        Some(self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]))
    }

    pub fn div_jet(&self, other: &Jet) -> Option<Jet> {
        Some(self.mul_jet(&other.recip()?))
    }

    /// Integer power via the chain rule with falling-factorial coefficients.
    pub fn powi(&self, k: i32) -> Option<Jet> {
        let t = self.value;
        if k < 0 && t == 0.0 {
            return None;
        }
        let kf = k as f64;
        let mut d = [0.0; 4];
        let mut coeff = 1.0;
        for (m, slot) in d.iter_mut().enumerate() {
            // coefficient k (k-1) ... (k-m+1); zero once the power is exhausted
            *slot = if coeff == 0.0 { 0.0 } else { coeff * t.powi(k - m as i32) };
            coeff *= kf - m as f64;
        }
        Some(self.compose(d))
    }

    /// Real power of a positive base.
    pub fn powf(&self, p: f64) -> Option<Jet> {
        let t = self.value;
        if t <= 0.0 {
            return None;
        }
        let mut d = [0.0; 4];
        let mut coeff = 1.0;
        for (m, slot) in d.iter_mut().enumerate() {
            *slot = coeff * t.powf(p - m as f64);
            coeff *= p - m as f64;
        }
        Some(self.compose(d))
    }

    /// Sum of products, truncated to the lowest order involved.
    pub fn dot<'a>(a: impl IntoIterator<Item = &'a Jet>, b: impl IntoIterator<Item = &'a Jet>) -> Option<Jet> {
        let mut acc: Option<Jet> = None;
        for (x, y) in a.into_iter().zip(b) {
            let p = x.mul_jet(y);
            acc = Some(match acc {
                None => p,
                Some(s) => &s + &p,
            });
        }
        acc
    }
}

impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip_linear(rhs, |a, b| a + b)
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip_linear(rhs, |a, b| a - b)
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map_linear(|v| -v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_jet(&rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

/// Evaluates a field and its partial derivatives through order 3 at `point`.
pub fn eval_jet(field: &ScalarField, point: &[f64]) -> Result<Jet3, EvalError> {
    eval_jet_order(field, point, MAX_ORDER)
}

pub fn eval_jet_order(field: &ScalarField, point: &[f64], order: u8) -> Result<Jet, EvalError> {
    let n = point.len();
    if let Some(i) = field.max_coord() {
        if i >= n {
            return Err(EvalError::at(
                field,
                DomainViolation::CoordinateOutOfRange { index: i, dim: n },
            ));
        }
    }
    eval_node(field, point, order)
}

fn eval_node(field: &ScalarField, point: &[f64], order: u8) -> Result<Jet, EvalError> {
    let n = point.len();
    let fail = |v| Err(EvalError::at(field, v));
    let out = match field.node() {
        Node::Const(c) => Jet::constant(n, order, *c),
        Node::Coord(i) => Jet::variable(n, order, *i, point[*i]),
        Node::Neg(a) => -eval_node(a, point, order)?,
        Node::Add(a, b) => eval_node(a, point, order)? + eval_node(b, point, order)?,
        Node::Sub(a, b) => eval_node(a, point, order)? - eval_node(b, point, order)?,
        Node::Mul(a, b) => eval_node(a, point, order)? * eval_node(b, point, order)?,
        Node::Div(a, b) => {
            let num = eval_node(a, point, order)?;
            let den = eval_node(b, point, order)?;
            match num.div_jet(&den) {
                Some(j) => j,
                None => return fail(DomainViolation::DivisionByZero),
            }
        }
        Node::Pow(a, b) => {
            let base = eval_node(a, point, order)?;
            match integer_exponent(b) {
                Some(k) => match base.powi(k) {
                    Some(j) => j,
                    None => return fail(DomainViolation::DivisionByZero),
                },
                None => {
                    if base.value() <= 0.0 {
                        return fail(DomainViolation::PowNonPositiveBase);
                    }
                    match b.constant_value() {
                        Some(p) => base.powf(p).expect("positive base"),
                        None => {
                            // base^e = exp(e log base)
                            let log_base = base
                                .compose(crate::expr::Func::Log.derivatives(base.value()).expect("positive base"));
                            let e = eval_node(b, point, order)?;
                            let arg = e * log_base;
                            let d = crate::expr::Func::Exp.derivatives(arg.value());
                            match d {
                                Some(d) => arg.compose(d),
                                None => return fail(DomainViolation::NonFinite),
                            }
                        }
                    }
                }
            }
        }
        Node::Apply(f, a) => {
            let u = eval_node(a, point, order)?;
            match f.derivatives(u.value()) {
                Some(d) => u.compose(d),
                None => return fail(domain_violation(*f)),
            }
        }
    };
    if out.is_finite() {
        Ok(out)
    } else {
        fail(DomainViolation::NonFinite)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FdError {
    #[error("finite-difference step must be positive, got {0}")]
    BadStep(f64),
    #[error("finite-difference order must be 1, 2 or 3, got {0}")]
    BadOrder(u8),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Max over index tuples of |jet derivative − central finite difference|.
///
/// The stencil for an order-m derivative is the tensor product of m central
/// first differences, `Σ_s s₁⋯s_m f(x + h Σ s_r e_{i_r}) / (2h)^m`, which
/// handles repeated indices uniformly and is accurate to O(h²). Only plain
/// value evaluation is used, so this is independent of the jet arithmetic.
pub fn fd_residual(field: &ScalarField, point: &[f64], order: u8, step: f64) -> Result<f64, FdError> {
    if !(step > 0.0) {
        return Err(FdError::BadStep(step));
    }
    if !(1..=3).contains(&order) {
        return Err(FdError::BadOrder(order));
    }
    let jet = eval_jet(field, point)?;
    let n = point.len();
    let m = order as usize;
    let mut worst: f64 = 0.0;
    let mut idx = vec![0usize; m];
    let total = n.pow(m as u32);
    let mut shifted = point.to_vec();
    for flat in 0..total {
        let mut rest = flat;
        for slot in idx.iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        // only sorted tuples; the jet is exactly symmetric
        if idx.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        let mut sum = 0.0;
        for signs in 0..(1u32 << m) {
            shifted.copy_from_slice(point);
            let mut sign = 1.0;
            for (r, &i) in idx.iter().enumerate() {
                if signs & (1 << r) != 0 {
                    shifted[i] -= step;
                    sign = -sign;
                } else {
                    shifted[i] += step;
                }
            }
            sum += sign * field.eval(&shifted)?;
        }
        let fd = sum / (2.0 * step).powi(m as i32);
        worst = worst.max((jet.partial(&idx) - fd).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ScalarField as F;

    #[test]
    fn constant_field_has_zero_derivatives() {
        let j = eval_jet(&F::constant(5.0), &[0.3, -1.0, 2.0]).unwrap();
        assert_eq!(j.value(), 5.0);
        for i in 0..3 {
            assert_eq!(j.grad(i), 0.0);
            for k in 0..3 {
                assert_eq!(j.hess(i, k), 0.0);
                for l in 0..3 {
                    assert_eq!(j.third(i, k, l), 0.0);
                }
            }
        }
    }

    #[test]
    fn coordinate_projection() {
        let j = eval_jet(&F::coord(2), &[0.3, -1.0, 2.0]).unwrap();
        assert_eq!(j.value(), 2.0);
        assert_eq!(j.gradient(), &[0.0, 0.0, 1.0]);
        assert!(j.hess.iter().chain(&j.third).all(|v| *v == 0.0));
    }

    #[test]
    fn exponential_derivatives_are_powers_of_two() {
        let f = (2.0 * F::coord(2)).exp();
        let j = eval_jet(&f, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(j.value(), 1.0);
        assert_eq!(j.grad(2), 2.0);
        assert_eq!(j.hess(2, 2), 4.0);
        assert_eq!(j.third(2, 2, 2), 8.0);
        assert_eq!(j.grad(0), 0.0);
    }

    #[test]
    fn fd_examples() {
        let p = [0.3, -1.0, 2.0];
        assert!(fd_residual(&F::constant(5.0), &p, 1, 1e-4).unwrap() < 1e-12);
        let f = (2.0 * F::coord(2)).exp();
        assert!(fd_residual(&f, &[0.0; 3], 1, 1e-4).unwrap() < 1e-7);
        let g = F::coord(0) * F::coord(1).powi(2);
        let jg = eval_jet(&g, &[1.0, 1.0]).unwrap();
        assert_eq!([jg.hess(0, 0), jg.hess(0, 1), jg.hess(1, 1)], [0.0, 2.0, 2.0]);
        assert!(fd_residual(&g, &[1.0, 1.0], 2, 1e-4).unwrap() < 1e-6);
        assert!(fd_residual(&g, &[1.0, 1.0], 3, 1e-3).unwrap() < 1e-3);
    }

    #[test]
    fn fd_rejects_bad_step() {
        assert_eq!(fd_residual(&F::one(), &[0.0], 1, 0.0), Err(FdError::BadStep(0.0)));
        assert_eq!(fd_residual(&F::one(), &[0.0], 4, 0.1), Err(FdError::BadOrder(4)));
    }

    #[test]
    fn domain_errors_are_reported() {
        let f = F::coord(0).log();
        let e = eval_jet(&f, &[0.0]).unwrap_err();
        assert_eq!(e.violation, DomainViolation::LogNonPositive);
        let s = F::coord(0).sqrt();
        assert_eq!(eval_jet(&s, &[-1.0]).unwrap_err().violation, DomainViolation::SqrtNonPositive);
        let d = F::coord(1);
        assert!(matches!(
            eval_jet(&d, &[0.0]).unwrap_err().violation,
            DomainViolation::CoordinateOutOfRange { index: 1, dim: 1 }
        ));
    }

    #[test]
    fn integer_power_at_zero_is_finite() {
        let f = F::coord(0).powi(1);
        let j = eval_jet(&f, &[0.0]).unwrap();
        assert_eq!((j.value(), j.grad(0), j.hess(0, 0), j.third(0, 0, 0)), (0.0, 1.0, 0.0, 0.0));
        let c = F::coord(0).powi(3);
        let j = eval_jet(&c, &[0.0]).unwrap();
        assert_eq!(j.third(0, 0, 0), 6.0);
    }

    #[test]
    fn derivative_lowers_order() {
        let f = F::coord(0).powi(3) * F::coord(1);
        let j = eval_jet(&f, &[2.0, 3.0]).unwrap();
        let dx = j.derivative(0);
        assert_eq!(dx.order(), 2);
        assert_eq!(dx.value(), 36.0); // 3 x^2 y
        assert_eq!(dx.grad(0), 36.0); // 6 x y
        assert_eq!(dx.hess(0, 1), 12.0); // 6 x
    }
}
