//! Arbitrary-precision scalars, dense vectors/matrices, and the Gaussian
//! function `rho_s(x) = exp(-pi*||x/s||^2)` that underlies every density
//! and lattice mass in the crate.
//!
//! Arithmetic between operands of different precision promotes to the
//! larger precision. The minimum working precision is 64 bits; the default
//! is 256. Paths feeding the LLL solver escalate to `max(256, 8*n^2)` bits
//! via [`solver_precision`].

mod identities;
pub mod theta;

pub use identities::{complete_squares, gaussian_tv_bound};
pub use theta::{
    discrete_gaussian_second_moment, gaussian_mass, gaussian_mass_coset, poisson_residual,
    GaussianMassResult,
};

use crate::error::{Error, Result};
use rug::float::Constant;
use rug::ops::CompleteRound;
use rug::Float;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 256;

/// Smallest precision any [`Real`] may carry.
pub const MIN_PREC: u32 = 64;

/// Precision used by paths that feed the LLL solver: `max(256, 8*n^2)`.
pub fn solver_precision(n: usize) -> u32 {
    DEFAULT_PREC.max((8 * n * n) as u32)
}

/// Converts a Gaussian width parameter to the standard deviation of the
/// corresponding normal distribution (`sigma = s / sqrt(2*pi)`).
///
/// This is the only place in the crate where the standard-deviation
/// convention appears.
pub fn width_to_std(width: f64) -> f64 {
    width / (2.0 * std::f64::consts::PI).sqrt()
}

/// An arbitrary-precision real number (MPFR-backed).
#[derive(Clone)]
pub struct Real(Float);

impl Real {
    pub fn zero(prec: u32) -> Self {
        Real(Float::new(prec.max(MIN_PREC)))
    }

    pub fn one(prec: u32) -> Self {
        Real(Float::with_val(prec.max(MIN_PREC), 1))
    }

    pub fn pi(prec: u32) -> Self {
        Real(Float::with_val(prec.max(MIN_PREC), Constant::Pi))
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        Real(Float::with_val(prec.max(MIN_PREC), x))
    }

    pub fn from_i64(x: i64, prec: u32) -> Self {
        Real(Float::with_val(prec.max(MIN_PREC), x))
    }

    pub fn from_integer(x: &rug::Integer, prec: u32) -> Self {
        Real(Float::with_val(prec.max(MIN_PREC), x))
    }

    /// Parses a decimal string (as produced by [`Real::decimal`]).
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        let incomplete =
            Float::parse(s).map_err(|e| Error::Parse(format!("bad real literal {s:?}: {e}")))?;
        Ok(Real(Float::with_val(prec.max(MIN_PREC), incomplete)))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Returns a copy rounded to the given precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        Real(Float::with_val(prec.max(MIN_PREC), &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Decimal string with enough digits to round-trip at this precision.
    pub fn decimal(&self) -> String {
        let digits = (self.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
        self.0.to_string_radix(10, Some(digits))
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn exp(&self) -> Self {
        Real(self.0.exp_ref().complete(self.prec()))
    }

    pub fn ln(&self) -> Self {
        Real(self.0.ln_ref().complete(self.prec()))
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt_ref().complete(self.prec()))
    }

    pub fn square(&self) -> Self {
        Real(self.0.square_ref().complete(self.prec()))
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs_ref().complete(self.prec()))
    }

    pub fn recip(&self) -> Self {
        Real(self.0.recip_ref().complete(self.prec()))
    }

    pub fn floor(&self) -> Self {
        Real(self.0.floor_ref().complete(self.prec()))
    }

    pub fn ceil(&self) -> Self {
        Real(self.0.ceil_ref().complete(self.prec()))
    }

    /// Rounds to the nearest integer (ties away from zero).
    pub fn round(&self) -> Self {
        Real(self.0.round_ref().complete(self.prec()))
    }

    pub fn to_integer(&self) -> rug::Integer {
        self.0
            .to_integer()
            .expect("finite value expected when rounding to integer")
    }

    /// Representative of `self mod 1` in `[0, 1)`.
    pub fn mod_one(&self) -> Self {
        let f = self.floor();
        self - &f
    }

    /// Representative of `self mod 1` in `(-1/2, 1/2]`.
    pub fn centered_mod_one(&self) -> Self {
        let half = Real::from_f64(0.5, self.prec());
        let k = (self - &half).ceil();
        self - &k
    }

    pub fn max(&self, other: &Real) -> Real {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min(&self, other: &Real) -> Real {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    fn join_prec(&self, other: &Real) -> u32 {
        self.prec().max(other.prec())
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e}@{})", self.0.to_f64(), self.prec())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.decimal())
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl PartialEq<f64> for Real {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for Real {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let prec = self.join_prec(rhs);
                Real((&self.0).$method(&rhs.0).complete(prec))
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);
impl_binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real((-&self.0).complete(self.prec()))
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

impl AddAssign<&Real> for Real {
    fn add_assign(&mut self, rhs: &Real) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Real> for Real {
    fn sub_assign(&mut self, rhs: &Real) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Real> for Real {
    fn mul_assign(&mut self, rhs: &Real) {
        *self = &*self * rhs;
    }
}

/// The Gaussian function `rho_s(x) = exp(-pi * ||x/s||^2)` for scalar `x`.
pub fn rho_scalar(x: &Real, s: &Real) -> Result<Real> {
    if *s <= 0.0 {
        return Err(Error::Parameter(format!(
            "gaussian width must be positive, got {}",
            s.to_f64()
        )));
    }
    let prec = x.join_prec(s);
    let t = x / s;
    Ok((-(Real::pi(prec) * t.square())).exp())
}

/// The Gaussian function `rho_s(x) = exp(-pi * ||x/s||^2)` for vector `x`.
pub fn rho(x: &Vector, s: &Real) -> Result<Real> {
    if *s <= 0.0 {
        return Err(Error::Parameter(format!(
            "gaussian width must be positive, got {}",
            s.to_f64()
        )));
    }
    let prec = x.prec().max(s.prec());
    let q = x.norm_sq() / s.square();
    Ok((-(Real::pi(prec) * q)).exp())
}

/// A dense vector of [`Real`]s.
#[derive(Clone, Debug)]
pub struct Vector {
    elems: Vec<Real>,
}

impl Vector {
    pub fn zeros(n: usize, prec: u32) -> Self {
        Vector {
            elems: (0..n).map(|_| Real::zero(prec)).collect(),
        }
    }

    pub fn from_reals(elems: Vec<Real>) -> Self {
        Vector { elems }
    }

    pub fn from_f64s(xs: &[f64], prec: u32) -> Self {
        Vector {
            elems: xs.iter().map(|&x| Real::from_f64(x, prec)).collect(),
        }
    }

    /// Standard basis vector `e_i`.
    pub fn basis(n: usize, i: usize, prec: u32) -> Self {
        let mut v = Self::zeros(n, prec);
        v.elems[i] = Real::one(prec);
        v
    }

    pub fn dim(&self) -> usize {
        self.elems.len()
    }

    pub fn prec(&self) -> u32 {
        self.elems.iter().map(Real::prec).max().unwrap_or(MIN_PREC)
    }

    pub fn get(&self, i: usize) -> &Real {
        &self.elems[i]
    }

    pub fn set(&mut self, i: usize, v: Real) {
        self.elems[i] = v;
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Real> {
        self.elems.iter()
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.elems.iter().map(Real::to_f64).collect()
    }

    pub fn dot(&self, other: &Vector) -> Real {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in dot");
        let prec = self.prec().max(other.prec());
        let mut acc = Real::zero(prec);
        for (a, b) in self.elems.iter().zip(other.elems.iter()) {
            acc += &(a * b);
        }
        acc
    }

    pub fn norm_sq(&self) -> Real {
        self.dot(self)
    }

    pub fn norm(&self) -> Real {
        self.norm_sq().sqrt()
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim());
        Vector {
            elems: self
                .elems
                .iter()
                .zip(other.elems.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim());
        Vector {
            elems: self
                .elems
                .iter()
                .zip(other.elems.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scaled(&self, c: &Real) -> Vector {
        Vector {
            elems: self.elems.iter().map(|a| a * c).collect(),
        }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: &Real, other: &Vector) {
        assert_eq!(self.dim(), other.dim());
        for (a, b) in self.elems.iter_mut().zip(other.elems.iter()) {
            *a += &(c * b);
        }
    }

    /// Concatenation, used by the separability property of `rho`.
    pub fn concat(&self, other: &Vector) -> Vector {
        let mut elems = self.elems.clone();
        elems.extend(other.elems.iter().cloned());
        Vector { elems }
    }
}

/// A dense row-major matrix of [`Real`]s.
#[derive(Clone, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Real>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        Matrix {
            rows,
            cols,
            data: (0..rows * cols).map(|_| Real::zero(prec)).collect(),
        }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Self::zeros(n, n, prec);
        for i in 0..n {
            *m.at_mut(i, i) = Real::one(prec);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Real) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows_f64(rows: &[Vec<f64>], prec: u32) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| Real::from_f64(rows[i][j], prec))
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vector]) -> Self {
        let c = cols.len();
        let r = if c == 0 { 0 } else { cols[0].dim() };
        Self::from_fn(r, c, |i, j| cols[j].get(i).clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prec(&self) -> u32 {
        self.data.iter().map(Real::prec).max().unwrap_or(MIN_PREC)
    }

    pub fn at(&self, r: usize, c: usize) -> &Real {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Real {
        &mut self.data[r * self.cols + c]
    }

    pub fn col(&self, c: usize) -> Vector {
        Vector::from_reals((0..self.rows).map(|r| self.at(r, c).clone()).collect())
    }

    pub fn row(&self, r: usize) -> Vector {
        Vector::from_reals((0..self.cols).map(|c| self.at(r, c).clone()).collect())
    }

    pub fn set_col(&mut self, c: usize, v: &Vector) {
        assert_eq!(v.dim(), self.rows);
        for r in 0..self.rows {
            *self.at_mut(r, c) = v.get(r).clone();
        }
    }

    pub fn transpose(&self) -> Matrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let prec = self.prec().max(other.prec());
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Real::zero(prec);
            for k in 0..self.cols {
                acc += &(self.at(i, k) * other.at(k, j));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols, v.dim(), "dimension mismatch in mul_vec");
        let prec = self.prec().max(v.prec());
        Vector::from_reals(
            (0..self.rows)
                .map(|i| {
                    let mut acc = Real::zero(prec);
                    for k in 0..self.cols {
                        acc += &(self.at(i, k) * v.get(k));
                    }
                    acc
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j) - other.at(i, j))
    }

    pub fn max_abs_entry(&self) -> Real {
        let mut best = Real::zero(self.prec());
        for x in &self.data {
            let a = x.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn det(&self) -> Real {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        let prec = self.prec();
        let mut a = self.clone();
        let mut det = Real::one(prec);
        for k in 0..n {
            let mut piv = k;
            let mut best = a.at(k, k).abs();
            for r in (k + 1)..n {
                let v = a.at(r, k).abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best.is_zero() {
                return Real::zero(prec);
            }
            if piv != k {
                for c in 0..n {
                    let tmp = a.at(k, c).clone();
                    *a.at_mut(k, c) = a.at(piv, c).clone();
                    *a.at_mut(piv, c) = tmp;
                }
                det = -det;
            }
            det *= a.at(k, k);
            let inv = a.at(k, k).recip();
            for r in (k + 1)..n {
                let f = a.at(r, k) * &inv;
                for c in k..n {
                    let upd = a.at(k, c) * &f;
                    *a.at_mut(r, c) = a.at(r, c) - upd;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let prec = self.prec();
        let mut a = self.clone();
        let mut inv = Matrix::identity(n, prec);
        for k in 0..n {
            let mut piv = k;
            let mut best = a.at(k, k).abs();
            for r in (k + 1)..n {
                let v = a.at(r, k).abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best.is_zero() {
                return Err(Error::Singular("matrix inverse: zero pivot".into()));
            }
            if piv != k {
                for c in 0..n {
                    a.data.swap(k * n + c, piv * n + c);
                    inv.data.swap(k * n + c, piv * n + c);
                }
            }
            let pinv = a.at(k, k).recip();
            for c in 0..n {
                *a.at_mut(k, c) = a.at(k, c) * &pinv;
                *inv.at_mut(k, c) = inv.at(k, c) * &pinv;
            }
            for r in 0..n {
                if r == k {
                    continue;
                }
                let f = a.at(r, k).clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let u1 = a.at(k, c) * &f;
                    *a.at_mut(r, c) = a.at(r, c) - u1;
                    let u2 = inv.at(k, c) * &f;
                    *inv.at_mut(r, c) = inv.at(r, c) - u2;
                }
            }
        }
        Ok(inv)
    }

    /// Solves `self * x = rhs` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &Vector) -> Result<Vector> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, rhs.dim());
        let n = self.rows;
        let prec = self.prec().max(rhs.prec());
        let mut a = self.clone();
        let mut b: Vec<Real> = rhs.iter().cloned().collect();
        for k in 0..n {
            let mut piv = k;
            let mut best = a.at(k, k).abs();
            for r in (k + 1)..n {
                let v = a.at(r, k).abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best.is_zero() {
                return Err(Error::Singular("linear solve: zero pivot".into()));
            }
            if piv != k {
                for c in 0..n {
                    a.data.swap(k * n + c, piv * n + c);
                }
                b.swap(k, piv);
            }
            let inv = a.at(k, k).recip();
            for r in (k + 1)..n {
                let f = a.at(r, k) * &inv;
                for c in k..n {
                    let upd = a.at(k, c) * &f;
                    *a.at_mut(r, c) = a.at(r, c) - upd;
                }
                let upd = &b[k] * &f;
                b[r] = &b[r] - upd;
            }
        }
        let mut x = vec![Real::zero(prec); n];
        for k in (0..n).rev() {
            let mut acc = b[k].clone();
            for c in (k + 1)..n {
                acc -= &(a.at(k, c) * &x[c]);
            }
            x[k] = acc / a.at(k, k);
        }
        Ok(Vector::from_reals(x))
    }

    /// Checks the orthonormal-columns invariant `||M^T M - I||_max <= 2^(-prec/2)`.
    pub fn is_orthonormal_cols(&self) -> bool {
        let prec = self.prec();
        let gram = self.transpose().mul(self);
        let id = Matrix::identity(self.cols, prec);
        let dev = gram.sub(&id).max_abs_entry();
        let bound = Real::from_f64(2.0, prec);
        let exponent = -(prec as i64) / 2;
        let bound = bound_pow2(&bound, exponent);
        dev <= bound
    }
}

fn bound_pow2(two: &Real, e: i64) -> Real {
    let mut r = Real::one(two.prec());
    let half = Real::from_f64(0.5, two.prec());
    if e >= 0 {
        for _ in 0..e {
            r *= two;
        }
    } else {
        for _ in 0..(-e) {
            r *= &half;
        }
    }
    r
}
