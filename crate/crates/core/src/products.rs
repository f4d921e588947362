//! Inner products over the eigenbasis.
//!
//! Besides the eta-inner product `Psi_m^dagger eta Psi_n` and the X-inner
//! product `(X Psi_m)^dagger eta_+ Psi_n`, two metric-free rival products are
//! evaluated as written, `(X Psi_m)^T Psi_n` and `(X Upsilon_m)^T Psi_n`, so
//! their failure to be real-definite shows up unaltered.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{dot_adjoint, dot_transpose, CVector, ComplexSquareMatrix, Tolerance};
use crate::operator::{symmetry_residual, OperatorRep};
use crate::spectral::BiorthoSystem;
use crate::symmetry::SymmetrySuite;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalSign {
    Plus,
    Minus,
    NonUnit,
}

impl DiagonalSign {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiagonalSign::Plus => "+1",
            DiagonalSign::Minus => "-1",
            DiagonalSign::NonUnit => "non-unit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerProductReport {
    /// `values[(m, n)]`.
    pub values: DMatrix<Complex64>,
    pub real_definite: bool,
    pub diagonal_signs: Vec<DiagonalSign>,
    pub max_imag: f64,
    /// Threshold `max_imag` is held against for `real_definite`.
    pub imag_bound: f64,
}

impl InnerProductReport {
    pub fn from_values(values: DMatrix<Complex64>, tol: &Tolerance) -> Self {
        let max_imag = values.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let bound = tol.bound(scale);
        let diagonal_signs = (0..values.nrows())
            .map(|n| {
                let z = values[(n, n)];
                if (z - Complex64::new(1.0, 0.0)).norm() <= bound {
                    DiagonalSign::Plus
                } else if (z + Complex64::new(1.0, 0.0)).norm() <= bound {
                    DiagonalSign::Minus
                } else {
                    DiagonalSign::NonUnit
                }
            })
            .collect();
        Self {
            values,
            real_definite: max_imag <= bound,
            diagonal_signs,
            max_imag,
            imag_bound: bound,
        }
    }

    /// Largest `|values - identity|` entry.
    pub fn identity_defect(&self) -> f64 {
        let n = self.values.nrows();
        (&self.values - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// `Psi_m^dagger eta Psi_n`.
pub fn eta_inner(psi_m: &CVector, psi_n: &CVector, eta: &ComplexSquareMatrix) -> Result<Complex64> {
    Ok(dot_adjoint(psi_m, &eta.mul_vec(psi_n)?))
}

/// `(X Psi_m)^dagger eta_+ Psi_n`, rejecting an `X` that does not commute with `h`.
pub fn x_inner(
    h: &ComplexSquareMatrix,
    x: &OperatorRep,
    psi_m: &CVector,
    psi_n: &CVector,
    eta_plus: &ComplexSquareMatrix,
    tol: &Tolerance,
) -> Result<Complex64> {
    let residual = symmetry_residual(h, x)?;
    if residual > tol.bound(h.frobenius_norm() * x.matrix().frobenius_norm()) {
        return Err(Error::NotASymmetry { residual });
    }
    x_inner_unchecked(x, psi_m, psi_n, eta_plus)
}

fn x_inner_unchecked(
    x: &OperatorRep,
    psi_m: &CVector,
    psi_n: &CVector,
    eta_plus: &ComplexSquareMatrix,
) -> Result<Complex64> {
    let xm = x.apply(psi_m)?;
    Ok(dot_adjoint(&xm, &eta_plus.mul_vec(psi_n)?))
}

/// `(X Psi_n)^dagger eta_+ Psi_n`.
pub fn x_norm(
    h: &ComplexSquareMatrix,
    x: &OperatorRep,
    psi_n: &CVector,
    eta_plus: &ComplexSquareMatrix,
    tol: &Tolerance,
) -> Result<Complex64> {
    x_inner(h, x, psi_n, psi_n, eta_plus, tol)
}

/// `(X Psi_m)^T Psi_n`.
pub fn rival_inner_transpose(x: &OperatorRep, psi_m: &CVector, psi_n: &CVector) -> Result<Complex64> {
    Ok(dot_transpose(&x.apply(psi_m)?, psi_n))
}

/// `(X Upsilon_m)^T Psi_n`.
pub fn rival_inner_biortho(
    x: &OperatorRep,
    upsilon_m: &CVector,
    psi_n: &CVector,
) -> Result<Complex64> {
    Ok(dot_transpose(&x.apply(upsilon_m)?, psi_n))
}

fn gram<F>(n: usize, f: F) -> Result<DMatrix<Complex64>>
where
    F: Fn(usize, usize) -> Result<Complex64>,
{
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = f(i, j)?;
        }
    }
    Ok(g)
}

/// Every Gram matrix of interest, keyed by name:
/// `eta`, `eta_plus`, `x.C`, `x.PT`, `x.CPT`, `rival_transpose.I`,
/// `rival_transpose.CPT`, `rival_biortho.I`, `rival_biortho.CPT`.
///
/// The suite is taken as already verified, so `x.*` skip the commutator check.
pub fn gram_report(
    bio: &BiorthoSystem,
    eta: &ComplexSquareMatrix,
    eta_plus: &ComplexSquareMatrix,
    suite: &SymmetrySuite,
    tol: &Tolerance,
) -> Result<BTreeMap<String, InnerProductReport>> {
    let n = bio.len();
    let (psi, ups) = (bio.psi(), bio.upsilon());
    let identity = OperatorRep::identity(bio.dim());
    let mut out = BTreeMap::new();
    let mut put = |name: &str, values: DMatrix<Complex64>| {
        out.insert(name.to_string(), InnerProductReport::from_values(values, tol));
    };

    put("eta", gram(n, |m, k| eta_inner(&psi[m], &psi[k], eta))?);
    put("eta_plus", gram(n, |m, k| eta_inner(&psi[m], &psi[k], eta_plus))?);
    for (name, x) in [("x.C", &suite.c), ("x.PT", &suite.pt), ("x.CPT", &suite.cpt)] {
        put(name, gram(n, |m, k| x_inner_unchecked(x, &psi[m], &psi[k], eta_plus))?);
    }
    for (label, x) in [("I", &identity), ("CPT", &suite.cpt)] {
        put(
            &format!("rival_transpose.{label}"),
            gram(n, |m, k| rival_inner_transpose(x, &psi[m], &psi[k]))?,
        );
        put(
            &format!("rival_biortho.{label}"),
            gram(n, |m, k| rival_inner_biortho(x, &ups[m], &psi[k]))?,
        );
    }
    Ok(out)
}
