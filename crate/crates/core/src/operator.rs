//! Linear and antilinear operators.
//!
//! An antilinear operator is stored as a matrix `M` together with a flag and
//! acts as `v -> M conj(v)`, i.e. `M K0` with `K0` complex conjugation. The
//! conjugation is never folded into the matrix; composition follows the
//! defining rule `(a o b)(v) = a(b(v))`.

use crate::error::Result;
use crate::matrix::{CVector, ComplexSquareMatrix, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorRep {
    matrix: ComplexSquareMatrix,
    antilinear: bool,
}

impl OperatorRep {
    pub fn new(matrix: ComplexSquareMatrix, antilinear: bool) -> Self {
        Self { matrix, antilinear }
    }

    pub fn linear(matrix: ComplexSquareMatrix) -> Self {
        Self::new(matrix, false)
    }

    pub fn antilinear(matrix: ComplexSquareMatrix) -> Self {
        Self::new(matrix, true)
    }

    pub fn identity(n: usize) -> Self {
        Self::linear(ComplexSquareMatrix::identity(n))
    }

    /// Bare complex conjugation `K0`.
    pub fn conjugation(n: usize) -> Self {
        Self::antilinear(ComplexSquareMatrix::identity(n))
    }

    pub fn matrix(&self) -> &ComplexSquareMatrix {
        &self.matrix
    }

    pub fn is_antilinear(&self) -> bool {
        self.antilinear
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        self.matrix.check_vec(v)?;
        let m = self.matrix.inner();
        Ok(if self.antilinear {
            m * v.map(|z| z.conj())
        } else {
            m * v
        })
    }

    /// `self o other`, the operator `v -> self(other(v))`.
    ///
    /// The matrix part is `A B` when `self` is linear and `A conj(B)` when it
    /// is antilinear; the result is antilinear iff exactly one factor is.
    pub fn compose(&self, other: &OperatorRep) -> Result<OperatorRep> {
        self.matrix.check_same_dim(&other.matrix)?;
        let rhs = if self.antilinear {
            other.matrix.conj()
        } else {
            other.matrix.clone()
        };
        Ok(OperatorRep {
            matrix: &self.matrix * &rhs,
            antilinear: self.antilinear ^ other.antilinear,
        })
    }

    pub fn square(&self) -> OperatorRep {
        self.compose(self).expect("an operator composes with itself")
    }

    /// Same linearity and Frobenius-close matrices.
    pub fn is_close(&self, other: &OperatorRep, tol: &Tolerance) -> bool {
        self.antilinear == other.antilinear && self.matrix.is_close(&other.matrix, tol)
    }

    /// Distance to `other`; infinite when the linearity flags differ.
    pub fn distance(&self, other: &OperatorRep) -> f64 {
        if self.antilinear != other.antilinear || self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.matrix.distance(&other.matrix)
    }
}

/// Frobenius norm of the commutator `[H, X]`.
///
/// For linear `X = M` this is `||HM - MH||`; for antilinear `X = M K0` the
/// commutator vanishes iff `HM = M conj(H)`, so `||HM - M conj(H)||` is
/// returned.
pub fn symmetry_residual(h: &ComplexSquareMatrix, op: &OperatorRep) -> Result<f64> {
    h.check_same_dim(op.matrix())?;
    let m = op.matrix();
    let right = if op.is_antilinear() {
        m * &h.conj()
    } else {
        m * h
    };
    Ok((h * m).distance(&right))
}

/// Whether `op o op` is the identity within `tol`.
pub fn is_involutory(op: &OperatorRep, tol: &Tolerance) -> bool {
    let sq = op.square();
    !sq.is_antilinear() && sq.matrix().is_identity(tol)
}
