//! Dense complex square matrices and the tolerance model used for every
//! floating-point comparison in the crate.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// Shorthand for building a complex scalar.
#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Frobenius-norm condition numbers above this count as singular.
const SINGULAR_CONDITION: f64 = 1e13;

/// Absolute/relative tolerance pair.
///
/// Two quantities compare equal when their distance is at most
/// `abs + rel * scale`, with `scale` the largest Frobenius norm among the
/// operands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        if !(abs.is_finite() && rel.is_finite() && abs >= 0.0 && rel >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be finite and non-negative (abs={abs}, rel={rel})"
            )));
        }
        Ok(Self { abs, rel })
    }

    /// Tolerance with `rel = 10 * abs`, the same ratio as the default.
    pub fn scaled(abs: f64) -> Result<Self> {
        Self::new(abs, 10.0 * abs)
    }

    #[inline]
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }

    /// Threshold below which |Im E| counts as zero for an eigenvalue `E`.
    #[inline]
    pub fn reality_bound(&self, value: Complex64) -> f64 {
        self.rel * value.norm().max(1.0)
    }
}

/// A dense `n x n` complex matrix with `n >= 1` and finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexSquareMatrix(DMatrix<Complex64>);

impl ComplexSquareMatrix {
    /// Wraps a nalgebra matrix after checking shape and finiteness.
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = inner.shape();
        if rows != cols {
            return Err(Error::NonSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::Empty);
        }
        for j in 0..cols {
            for i in 0..rows {
                let z = inner[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(inner))
    }

    pub(crate) fn from_inner(inner: DMatrix<Complex64>) -> Self {
        debug_assert!(inner.is_square() && inner.nrows() > 0);
        Self(inner)
    }

    /// Builds from nested rows.
    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        for row in rows {
            let len = row.as_ref().len();
            if len != n {
                return Err(Error::NonSquare { rows: n, cols: len });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i].as_ref()[j]))
    }

    /// Builds from real-valued nested rows.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[CVector]) -> Result<Self> {
        let n = columns.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        for col in columns {
            if col.len() != n {
                return Err(Error::NonSquare { rows: col.len(), cols: n });
            }
        }
        Self::new(DMatrix::from_columns(columns))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Empty);
        }
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    pub fn column(&self, j: usize) -> CVector {
        self.0.column(j).into_owned()
    }

    pub fn columns(&self) -> Vec<CVector> {
        (0..self.dim()).map(|j| self.column(j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.clone().determinant()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius inner product `tr(self^dagger other)`.
    pub fn frobenius_dot(&self, other: &Self) -> Complex64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_entry_distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.0 - &other.0)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius-closeness under `tol`.
    pub fn is_close(&self, other: &Self, tol: &Tolerance) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let scale = self.frobenius_norm().max(other.frobenius_norm());
        self.distance(other) <= tol.bound(scale)
    }

    pub fn is_identity(&self, tol: &Tolerance) -> bool {
        self.is_close(&Self::identity(self.dim()), tol)
    }

    /// Inverse, or `None` when the matrix is numerically singular.
    pub fn inverse(&self) -> Option<Self> {
        let inv = self.0.clone().try_inverse()?;
        let cond = self.frobenius_norm() * frob(&inv);
        if !cond.is_finite() || cond > SINGULAR_CONDITION {
            return None;
        }
        Some(Self(inv))
    }

    /// Frobenius condition number `||A|| ||A^-1||`; infinite when singular.
    pub fn condition_number(&self) -> f64 {
        match self.0.clone().try_inverse() {
            Some(inv) => self.frobenius_norm() * frob(&inv),
            None => f64::INFINITY,
        }
    }

    pub fn mul_vec(&self, v: &CVector) -> Result<CVector> {
        self.check_vec(v)?;
        Ok(&self.0 * v)
    }

    pub(crate) fn check_vec(&self, v: &CVector) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        self.is_close(&self.adjoint(), tol)
    }
}

pub(crate) fn frob(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Outer product `u v^T` (no conjugation).
pub fn outer_transpose(u: &CVector, v: &CVector) -> ComplexSquareMatrix {
    ComplexSquareMatrix::from_inner(u * v.transpose())
}

/// Outer product `u v^dagger`.
pub fn outer_adjoint(u: &CVector, v: &CVector) -> ComplexSquareMatrix {
    ComplexSquareMatrix::from_inner(u * v.adjoint())
}

/// `u^dagger v`.
pub fn dot_adjoint(u: &CVector, v: &CVector) -> Complex64 {
    u.dotc(v)
}

/// `u^T v`.
pub fn dot_transpose(u: &CVector, v: &CVector) -> Complex64 {
    u.dot(v)
}

pub fn vector(entries: &[Complex64]) -> CVector {
    CVector::from_column_slice(entries)
}

pub fn vector_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl fmt::Debug for ComplexSquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        write!(f, "[")?;
        for i in 0..n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                let z = self.0[(i, j)];
                write!(f, "{}{:+}i", z.re, z.im)?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<'a> Mul<&'a ComplexSquareMatrix> for &'a ComplexSquareMatrix {
    type Output = ComplexSquareMatrix;

    fn mul(self, rhs: &'a ComplexSquareMatrix) -> ComplexSquareMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in product");
        ComplexSquareMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexSquareMatrix> for &'a ComplexSquareMatrix {
    type Output = ComplexSquareMatrix;

    fn add(self, rhs: &'a ComplexSquareMatrix) -> ComplexSquareMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in sum");
        ComplexSquareMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexSquareMatrix> for &'a ComplexSquareMatrix {
    type Output = ComplexSquareMatrix;

    fn sub(self, rhs: &'a ComplexSquareMatrix) -> ComplexSquareMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in difference");
        ComplexSquareMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexSquareMatrix {
    type Output = ComplexSquareMatrix;

    fn neg(self) -> ComplexSquareMatrix {
        ComplexSquareMatrix(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_square_and_empty() {
        let rows = vec![vec![c(1.0, 0.0), c(2.0, 0.0)]];
        assert_eq!(
            ComplexSquareMatrix::from_rows(&rows),
            Err(Error::NonSquare { rows: 1, cols: 2 })
        );
        let empty: Vec<Vec<Complex64>> = vec![];
        assert_eq!(ComplexSquareMatrix::from_rows(&empty), Err(Error::Empty));
    }

    #[test]
    fn rejects_non_finite() {
        let rows = vec![vec![c(1.0, 0.0), c(f64::NAN, 0.0)], vec![c(0.0, 0.0); 2]];
        assert_eq!(
            ComplexSquareMatrix::from_rows(&rows),
            Err(Error::NonFinite { row: 0, col: 1 })
        );
    }

    #[test]
    fn inverse_of_singular_is_none() {
        let m = ComplexSquareMatrix::from_real_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(m.inverse().is_none());
        let d = ComplexSquareMatrix::from_real_rows(&[[2.0, 0.0], [0.0, 1.0]]).unwrap();
        let inv = d.inverse().unwrap();
        assert!((inv.get(0, 0) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn tolerance_bound_scales() {
        let tol = Tolerance::default();
        assert_eq!(tol.bound(0.0), 1e-10);
        assert!((tol.bound(10.0) - (1e-10 + 1e-8)).abs() < 1e-20);
        assert!(Tolerance::new(-1.0, 0.0).is_err());
    }
}
