//! Truncated complex power series.
//!
//! A [`TruncatedSeries`] of order `N` stores the Taylor coefficients
//! `a_0, ..., a_N` of a germ at the origin; everything above `z^N` is
//! unknown. Binary operations return a series whose order is the smaller of
//! the two operand orders, so no result ever claims more coefficients than
//! its inputs determine.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Order used when none is requested explicitly.
pub const DEFAULT_ORDER: usize = 12;
/// Largest order accepted by the public constructors.
pub const MAX_ORDER: usize = 64;

/// Divisors whose constant term is smaller than this are treated as singular.
pub const SINGULAR_TOL: f64 = 1e-14;
/// Tolerance for the `a0 = 0, a1 = 1` normalization check.
pub const NORMALIZED_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    coeffs: Vec<C64>,
}

impl TruncatedSeries {
    /// Builds a series from `a_0..=a_N`; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a series needs at least the constant coefficient".into(),
            ));
        }
        if coeffs.len() - 1 > MAX_ORDER {
            return Err(Error::OrderTooLarge(coeffs.len() - 1));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Series with the given leading coefficients, zero-padded up to `order`.
    pub fn from_prefix(prefix: &[C64], order: usize) -> Result<Self> {
        if prefix.len() > order + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients do not fit in order {order}",
                prefix.len()
            )));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); order + 1];
        coeffs[..prefix.len()].copy_from_slice(prefix);
        Self::new(coeffs)
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<C64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::from_vec_unchecked(vec![C64::new(0.0, 0.0); order + 1])
    }

    pub fn constant(c: C64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The identity germ `z`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = C64::new(1.0, 0.0);
        }
        s
    }

    /// The normalized germ `z + a_2 z^2 + ...` with the given tail `a_2, a_3, ...`.
    pub fn normalized(tail: &[C64], order: usize) -> Result<Self> {
        let mut prefix = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        prefix.extend_from_slice(tail);
        Self::from_prefix(&prefix, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`. Panics if `k` exceeds the order.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs[k]
    }

    pub fn get(&self, k: usize) -> Option<C64> {
        self.coeffs.get(k).copied()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Self::from_vec_unchecked(self.coeffs[..=n].to_vec())
    }

    /// `a_0 = 0` and `a_1 = 1`, i.e. the series is a member of the class A.
    pub fn is_normalized(&self) -> bool {
        self.order() >= 1
            && self.coeffs[0].norm() <= NORMALIZED_TOL
            && (self.coeffs[1] - 1.0).norm() <= NORMALIZED_TOL
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_vec_unchecked(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn arith(&self, rhs: &Self, kind: ArithKind) -> Result<Self> {
        match kind {
            ArithKind::Add => Ok(self + rhs),
            ArithKind::Sub => Ok(self - rhs),
            ArithKind::Mul => Ok(self * rhs),
            ArithKind::Div => self.div(rhs),
        }
    }

    fn zip_with(&self, rhs: &Self, op: impl Fn(C64, C64) -> C64) -> Self {
        let n = self.order().min(rhs.order());
        Self::from_vec_unchecked((0..=n).map(|k| op(self.coeffs[k], rhs.coeffs[k])).collect())
    }

    fn cauchy(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n)
            .map(|k| (0..=k).map(|i| self.coeffs[i] * rhs.coeffs[k - i]).sum())
            .collect();
        Self::from_vec_unchecked(coeffs)
    }

    /// Long division `self / rhs`.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        let b0 = rhs.coeffs[0];
        if b0.norm() <= SINGULAR_TOL {
            return Err(Error::DivisionBySingularSeries(b0.norm()));
        }
        let n = self.order().min(rhs.order());
        let mut q: Vec<C64> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let acc: C64 = (1..=k).map(|i| rhs.coeffs[i] * q[k - i]).sum();
            q.push((self.coeffs[k] - acc) / b0);
        }
        Ok(Self::from_vec_unchecked(q))
    }

    /// Multiplicative inverse `1 / self`.
    pub fn recip(&self) -> Result<Self> {
        Self::constant(C64::new(1.0, 0.0), self.order()).div(self)
    }

    /// `outer(inner(z))`. The inner series must vanish at the origin.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let a0 = inner.coeffs[0].norm();
        if a0 > NORMALIZED_TOL {
            return Err(Error::InnerNotVanishing(a0));
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        // Horner in series arithmetic: (((o_N) u + o_{N-1}) u + ...) u + o_0.
        // Since u(0) = 0 only o_0..o_n can influence the first n coefficients.
        let mut acc = Self::constant(self.coeffs[n], n);
        for k in (0..n).rev() {
            acc = &acc * &inner;
            acc.coeffs[0] += self.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse of a normalized germ.
    ///
    /// Solved triangularly: with `g_1 = 1`, the `w^n` coefficient of `f(g(w))`
    /// equals `g_n` plus terms that only involve `g_2..g_{n-1}`.
    pub fn revert(&self) -> Result<Self> {
        if !self.is_normalized() {
            return Err(Error::NotNormalized);
        }
        let n = self.order();
        let mut g = Self::identity(n);
        for k in 2..=n {
            let probe = self.truncate(k).compose(&g.truncate(k))?;
            g.coeffs[k] = -probe.coeffs[k];
        }
        Ok(g)
    }

    pub fn differentiate(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_vec_unchecked(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| a * k as f64)
                .collect(),
        )
    }

    /// `f(z) / z`; requires `a_0 = 0`. Order drops by one.
    pub fn shift_down(&self) -> Result<Self> {
        if self.coeffs[0].norm() > NORMALIZED_TOL || self.order() == 0 {
            return Err(Error::InvalidArgument(
                "f(z)/z needs a series of order >= 1 with a0 = 0".into(),
            ));
        }
        Ok(Self::from_vec_unchecked(self.coeffs[1..].to_vec()))
    }

    /// `z f(z)`. Order grows by one since the product is known exactly.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(C64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs);
        Self::from_vec_unchecked(coeffs)
    }

    /// Principal power `self^p` for a series with constant term 1.
    ///
    /// Uses the recurrence from `f g' = p f' g` for `g = f^p`.
    pub fn powf(&self, p: f64) -> Result<Self> {
        let a0 = self.coeffs[0];
        if (a0 - 1.0).norm() > NORMALIZED_TOL {
            return Err(Error::BranchUndefined(format!("{a0}")));
        }
        let n = self.order();
        let mut g = vec![C64::new(0.0, 0.0); n + 1];
        g[0] = C64::new(1.0, 0.0);
        for k in 1..=n {
            let acc: C64 = (1..=k)
                .map(|i| self.coeffs[i] * g[k - i] * (p * i as f64 - (k - i) as f64))
                .sum();
            g[k] = acc / (k as f64 * a0);
        }
        Ok(Self::from_vec_unchecked(g))
    }

    /// Horner evaluation of the stored polynomial part.
    pub fn evaluate(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// Largest coefficientwise deviation over the shared order.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        self.cauchy(rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "({a})")?,
                1 => write!(f, "({a})z")?,
                _ => write!(f, "({a})z^{k}")?,
            }
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}
