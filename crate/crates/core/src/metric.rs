//! Metric operators: the positive-definite metric `(D D^dagger)^-1` built
//! from a diagonalizer, its conjugate-pair analogue, the full solution space
//! of `eta H = H^dagger eta`, and metric classification.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{c, CVector, ComplexSquareMatrix, Tolerance};
use crate::operator::{symmetry_residual, OperatorRep};

/// Singular values below `NULL_SPACE_THRESHOLD * sigma_max` span the null space.
pub const NULL_SPACE_THRESHOLD: f64 = 1e-8;

const LM_MAX_ITERATIONS: usize = 200;
const LM_MAX_STARTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MetricFlags {
    pub hermitian: bool,
    pub involutory: bool,
    pub unitary: bool,
    pub real_symmetric: bool,
    /// `det = 1`.
    pub simple: bool,
    pub positive_definite: bool,
}

/// An invertible metric together with its structural flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    matrix: ComplexSquareMatrix,
    flags: MetricFlags,
}

impl Metric {
    pub fn new(matrix: ComplexSquareMatrix, tol: &Tolerance) -> Result<Metric> {
        if matrix.inverse().is_none() {
            return Err(Error::SingularMetric);
        }
        let flags = classify_metric(&matrix, tol);
        Ok(Metric { matrix, flags })
    }

    pub fn matrix(&self) -> &ComplexSquareMatrix {
        &self.matrix
    }

    pub fn flags(&self) -> MetricFlags {
        self.flags
    }

    pub fn into_matrix(self) -> ComplexSquareMatrix {
        self.matrix
    }
}

pub fn classify_metric(eta: &ComplexSquareMatrix, tol: &Tolerance) -> MetricFlags {
    let n = eta.dim();
    let id = ComplexSquareMatrix::identity(n);
    let norm = eta.frobenius_norm();
    let hermitian = eta.is_close(&eta.adjoint(), tol);
    let imag_norm = eta
        .inner()
        .iter()
        .map(|z| z.im * z.im)
        .sum::<f64>()
        .sqrt();
    let real_symmetric = eta.is_close(&eta.transpose(), tol) && imag_norm <= tol.bound(norm);
    let positive_definite = hermitian && {
        let herm = (eta.inner() + eta.inner().adjoint()) * c(0.5, 0.0);
        let min = herm
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        min > tol.bound(norm)
    };
    MetricFlags {
        hermitian,
        involutory: (eta * eta).is_close(&id, tol),
        unitary: (&eta.adjoint() * eta).is_close(&id, tol),
        real_symmetric,
        simple: (eta.determinant() - c(1.0, 0.0)).norm() <= tol.bound(1.0),
        positive_definite,
    }
}

/// `||eta H eta^-1 - H^dagger||_F / max(1, ||H||_F)`.
pub fn pseudo_hermiticity_residual(
    h: &ComplexSquareMatrix,
    eta: &ComplexSquareMatrix,
) -> Result<f64> {
    h.check_same_dim(eta)?;
    let inv = eta.inverse().ok_or(Error::SingularMetric)?;
    let conj = &(eta * h) * &inv;
    Ok(conj.distance(&h.adjoint()) / h.frobenius_norm().max(1.0))
}

/// Acceptance bound for [`pseudo_hermiticity_residual`]: rounding in
/// `eta H eta^-1` grows with the condition number of `eta`.
pub fn metric_residual_bound(eta: &ComplexSquareMatrix, tol: &Tolerance) -> f64 {
    tol.bound(eta.condition_number())
}

/// Checks `eta` against `h` and wraps it as a [`Metric`].
pub fn validate_metric(
    h: &ComplexSquareMatrix,
    eta: &ComplexSquareMatrix,
    tol: &Tolerance,
) -> Result<Metric> {
    let residual = pseudo_hermiticity_residual(h, eta)?;
    if residual > metric_residual_bound(eta, tol) {
        return Err(Error::NotAMetric { residual });
    }
    Metric::new(eta.clone(), tol)
}

/// `eta_+ = (D D^dagger)^-1`.
///
/// Hermitian and positive definite for any invertible `D`, since
/// `v^dagger eta_+ v = |D^-1 v|^2`.
pub fn metric_from_diagonalizer(d: &ComplexSquareMatrix, tol: &Tolerance) -> Result<Metric> {
    if d.inverse().is_none() {
        return Err(Error::SingularD);
    }
    let gram = d * &d.adjoint();
    let inv = gram.inverse().ok_or(Error::SingularD)?;
    // symmetrize away rounding so the Hermitian flag is exact
    let herm = (&inv + &inv.adjoint()).scale(c(0.5, 0.0));
    Metric::new(herm, tol)
}

/// Block-diagonal `Diag[sigma_x, ..., sigma_x]` of even size `n`.
pub fn pair_swap_matrix(n: usize) -> Result<ComplexSquareMatrix> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::OddDimension { dim: n });
    }
    let mut s = DMatrix::zeros(n, n);
    for k in (0..n).step_by(2) {
        s[(k, k + 1)] = c(1.0, 0.0);
        s[(k + 1, k)] = c(1.0, 0.0);
    }
    Ok(ComplexSquareMatrix::from_inner(s))
}

/// `eta_bar = (D S D^dagger)^-1` for a spectrum of complex-conjugate pairs.
///
/// The columns of `D` are first rearranged so that each `(k, l)` of `pairing`
/// becomes adjacent; `S` swaps within every pair.
pub fn metric_conjugate_paired(
    d: &ComplexSquareMatrix,
    pairing: &[(usize, usize)],
    tol: &Tolerance,
) -> Result<Metric> {
    let n = d.dim();
    if n % 2 == 1 {
        return Err(Error::OddDimension { dim: n });
    }
    let perm: Vec<usize> = pairing.iter().flat_map(|&(k, l)| [k, l]).collect();
    crate::spectral::check_permutation(&perm, n)?;
    let columns: Vec<CVector> = perm.iter().map(|&k| d.column(k)).collect();
    let arranged = ComplexSquareMatrix::from_columns(&columns)?;
    if arranged.inverse().is_none() {
        return Err(Error::SingularD);
    }
    let s = pair_swap_matrix(n)?;
    let m = &(&arranged * &s) * &arranged.adjoint();
    let inv = m.inverse().ok_or(Error::SingularD)?;
    Metric::new(inv, tol)
}

/// Basis of every `eta` with `eta H = H^dagger eta`, orthonormal under the
/// Frobenius inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricFamily {
    basis: Vec<ComplexSquareMatrix>,
    singular_values: Vec<f64>,
}

impl MetricFamily {
    pub fn basis(&self) -> &[ComplexSquareMatrix] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Singular values of the vectorized map, descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn combine(&self, coefficients: &[Complex64]) -> Result<ComplexSquareMatrix> {
        if coefficients.len() != self.basis.len() || self.basis.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.len(),
                found: coefficients.len(),
            });
        }
        let n = self.basis[0].dim();
        let mut acc = DMatrix::zeros(n, n);
        for (b, &k) in self.basis.iter().zip(coefficients) {
            acc += b.inner() * k;
        }
        Ok(ComplexSquareMatrix::from_inner(acc))
    }

    /// Orthogonal projection of `eta` onto the span.
    pub fn project(&self, eta: &ComplexSquareMatrix) -> ComplexSquareMatrix {
        let mut acc = DMatrix::zeros(eta.dim(), eta.dim());
        for b in &self.basis {
            acc += b.inner() * b.frobenius_dot(eta);
        }
        ComplexSquareMatrix::from_inner(acc)
    }

    /// `||eta - proj(eta)||_F / ||eta||_F`.
    pub fn projection_defect(&self, eta: &ComplexSquareMatrix) -> f64 {
        let norm = eta.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        if self.basis.is_empty() {
            return 1.0;
        }
        eta.distance(&self.project(eta)) / norm
    }

    /// Real basis of the Hermitian members, orthonormal under `Re tr(A^dagger B)`.
    pub fn hermitian_real_basis(&self) -> Vec<ComplexSquareMatrix> {
        let half = c(0.5, 0.0);
        let mut candidates = Vec::with_capacity(2 * self.basis.len());
        for b in &self.basis {
            let adj = b.adjoint();
            candidates.push((b + &adj).scale(half));
            candidates.push((b - &adj).scale(c(0.0, -0.5)));
        }
        let mut out: Vec<ComplexSquareMatrix> = Vec::new();
        for cand in candidates {
            let mut v = cand.clone();
            for _ in 0..2 {
                for q in &out {
                    let proj = q.frobenius_dot(&v).re;
                    v = &v - &q.scale(c(proj, 0.0));
                }
            }
            let norm = v.frobenius_norm();
            if norm > 1e-8 * cand.frobenius_norm().max(1e-300) && norm > 1e-12 {
                out.push(v.scale(c(1.0 / norm, 0.0)));
            }
        }
        out
    }
}

/// Vectorized `eta -> eta H - H^dagger eta` acting on row-major `vec(eta)`.
fn intertwiner_matrix(h: &ComplexSquareMatrix) -> DMatrix<Complex64> {
    let n = h.dim();
    let mut l = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let r = i * n + j;
            for k in 0..n {
                l[(r, i * n + k)] += h.get(k, j);
                l[(r, k * n + j)] -= h.get(k, i).conj();
            }
        }
    }
    l
}

/// Null space of the vectorized intertwining map, by singular-value
/// thresholding, returned in a canonical orthonormal basis.
pub fn solve_metric_space(h: &ComplexSquareMatrix, _tol: &Tolerance) -> MetricFamily {
    let n = h.dim();
    let l = intertwiner_matrix(h);
    let svd = l.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    let sigma_max = singular_values.iter().copied().fold(0.0, f64::max);
    let null_rows: Vec<DVector<Complex64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|&(_, &s)| sigma_max == 0.0 || s < NULL_SPACE_THRESHOLD * sigma_max)
        .map(|(k, _)| v_t.row(k).transpose().map(|z| z.conj()))
        .collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));

    let basis = canonical_basis(null_rows)
        .into_iter()
        .map(|v| {
            ComplexSquareMatrix::from_inner(DMatrix::from_fn(n, n, |i, j| v[i * n + j]))
        })
        .collect();
    MetricFamily {
        basis,
        singular_values,
    }
}

/// Reduced row echelon form followed by Gram-Schmidt, so the result depends
/// only on the spanned subspace; the first non-negligible entry of each
/// vector is made real positive.
fn canonical_basis(vectors: Vec<DVector<Complex64>>) -> Vec<DVector<Complex64>> {
    if vectors.is_empty() {
        return vectors;
    }
    let len = vectors[0].len();
    let mut rows = vectors;
    let k = rows.len();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let mut pivot_row = 0;
    for col in 0..len {
        if pivot_row == k {
            break;
        }
        let (best, best_abs) = (pivot_row..k)
            .map(|r| (r, rows[r][col].norm()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= 1e-8 * scale {
            continue;
        }
        rows.swap(pivot_row, best);
        let p = rows[pivot_row][col];
        rows[pivot_row] /= p;
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row {
                let f = row[col];
                if f != Complex64::new(0.0, 0.0) {
                    *row -= &pivot * f;
                }
            }
        }
        pivot_row += 1;
    }
    rows.truncate(pivot_row);

    let mut out: Vec<DVector<Complex64>> = Vec::with_capacity(rows.len());
    for row in rows {
        let mut v = row;
        for _ in 0..2 {
            for q in &out {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let norm = v.norm();
        if norm <= 1e-12 {
            continue;
        }
        v /= Complex64::new(norm, 0.0);
        if let Some(first) = v.iter().find(|z| z.norm() > 1e-9).copied() {
            v *= first.conj() / first.norm();
        }
        // drop rounding debris so exact zeros print as zeros
        for z in v.iter_mut() {
            if z.re.abs() < 1e-14 {
                z.re = 0.0;
            }
            if z.im.abs() < 1e-14 {
                z.im = 0.0;
            }
        }
        out.push(v);
    }
    out
}

/// Whether one fixed `eta` is a metric for every member of a parameterized
/// family of Hamiltonians.
pub fn is_secular<F>(family: F, eta: &ComplexSquareMatrix, samples: &[Vec<f64>], tol: &Tolerance) -> bool
where
    F: Fn(&[f64]) -> ComplexSquareMatrix,
{
    let bound = metric_residual_bound(eta, tol);
    samples.iter().all(|p| {
        let h = family(p);
        matches!(pseudo_hermiticity_residual(&h, eta), Ok(r) if r <= bound)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HiddenSymmetry {
    pub operator: OperatorRep,
    /// `||[H, F]||_F`.
    pub residual: f64,
}

/// Symmetry of `H` built from two of its metrics: `F = eta_j^-1 eta_i`.
///
/// Since `eta_i H = H^dagger eta_i` and `H^dagger = eta_j H eta_j^-1`, this
/// product commutes with `H`. The reversed product `eta_i eta_j^-1`
/// commutes with `H^dagger` instead.
pub fn hidden_symmetry_ops(
    eta_i: &Metric,
    eta_j: &Metric,
    h: &ComplexSquareMatrix,
) -> Result<HiddenSymmetry> {
    let inv = eta_j.matrix().inverse().ok_or(Error::SingularMetric)?;
    let operator = OperatorRep::linear(&inv * eta_i.matrix());
    let residual = symmetry_residual(h, &operator)?;
    Ok(HiddenSymmetry { operator, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricChoice {
    Supplied,
    Identity,
    HermitianInvolutory,
    HermitianInvertible,
}

impl MetricChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            MetricChoice::Supplied => "supplied",
            MetricChoice::Identity => "identity",
            MetricChoice::HermitianInvolutory => "hermitian-involutory",
            MetricChoice::HermitianInvertible => "hermitian-invertible",
        }
    }
}

/// Picks a fundamental metric from `family`.
///
/// Preference order: the identity when `H` is Hermitian, then a Hermitian
/// involutory member found by Levenberg-Marquardt over the real span of the
/// Hermitian members, then the best-conditioned Hermitian member. The overall
/// sign is chosen so that `leading^dagger eta leading > 0`.
pub fn select_fundamental_metric(
    h: &ComplexSquareMatrix,
    family: &MetricFamily,
    leading: &CVector,
    tol: &Tolerance,
) -> Result<(Metric, MetricChoice)> {
    let n = h.dim();
    let id = ComplexSquareMatrix::identity(n);
    if matches!(pseudo_hermiticity_residual(h, &id), Ok(r) if r <= tol.bound(1.0)) {
        return Ok((Metric::new(id, tol)?, MetricChoice::Identity));
    }
    let herm = family.hermitian_real_basis();
    if herm.is_empty() {
        return Err(Error::SingularMetric);
    }

    let orient = |m: ComplexSquareMatrix| -> ComplexSquareMatrix {
        let v = m.mul_vec(leading).expect("dimensions agree");
        if leading.dotc(&v).re < 0.0 {
            m.scale(c(-1.0, 0.0))
        } else {
            m
        }
    };

    if let Some(found) = search_involutory(&herm, tol) {
        let found = orient(found);
        if pseudo_hermiticity_residual(h, &found)? <= metric_residual_bound(&found, tol) {
            return Ok((Metric::new(found, tol)?, MetricChoice::HermitianInvolutory));
        }
    }

    let mut sum = ComplexSquareMatrix::zeros(n);
    for b in &herm {
        sum = &sum + b;
    }
    let best = herm
        .iter()
        .chain(std::iter::once(&sum))
        .filter(|m| m.inverse().is_some())
        .min_by(|a, b| a.condition_number().total_cmp(&b.condition_number()))
        .cloned()
        .ok_or(Error::SingularMetric)?;
    Ok((Metric::new(orient(best), tol)?, MetricChoice::HermitianInvertible))
}

/// Real coefficients `x` with `(sum x_j B_j)^2 = I`, by Levenberg-Marquardt
/// from a deterministic list of starting points.
fn search_involutory(
    basis: &[ComplexSquareMatrix],
    tol: &Tolerance,
) -> Option<ComplexSquareMatrix> {
    let m = basis.len();
    let n = basis[0].dim();
    let id = ComplexSquareMatrix::identity(n);
    let target = tol.bound((n as f64).sqrt());
    let root_n = (n as f64).sqrt();

    let mut starts: Vec<Vec<f64>> = Vec::new();
    for j in 0..m {
        let mut x = vec![0.0; m];
        x[j] = root_n;
        starts.push(x);
    }
    let patterns = 1usize << m.min(6);
    for mask in 0..patterns {
        if starts.len() >= LM_MAX_STARTS {
            break;
        }
        let x = (0..m)
            .map(|j| {
                let sign = if j < 6 && (mask >> j) & 1 == 1 { -1.0 } else { 1.0 };
                sign * root_n / (m as f64).sqrt()
            })
            .collect();
        starts.push(x);
    }

    let build = |x: &[f64]| -> ComplexSquareMatrix {
        let mut acc = DMatrix::zeros(n, n);
        for (b, &k) in basis.iter().zip(x) {
            acc += b.inner() * c(k, 0.0);
        }
        ComplexSquareMatrix::from_inner(acc)
    };
    let residual = |eta: &ComplexSquareMatrix| -> DVector<f64> {
        let r = &(eta * eta) - &id;
        DVector::from_iterator(
            2 * n * n,
            r.inner().iter().flat_map(|z| [z.re, z.im]),
        )
    };

    for start in starts {
        let mut x = start;
        let mut lambda = 1e-3;
        let mut eta = build(&x);
        let mut r = residual(&eta);
        for _ in 0..LM_MAX_ITERATIONS {
            if r.norm() <= target {
                break;
            }
            let mut jac = DMatrix::<f64>::zeros(2 * n * n, m);
            for (j, b) in basis.iter().enumerate() {
                let d = &(b * &eta) + &(&eta * b);
                for (k, z) in d.inner().iter().enumerate() {
                    jac[(2 * k, j)] = z.re;
                    jac[(2 * k + 1, j)] = z.im;
                }
            }
            let jtj = jac.transpose() * &jac;
            let jtr = jac.transpose() * &r;
            let mut improved = false;
            for _ in 0..20 {
                let mut a = jtj.clone();
                for d in 0..m {
                    a[(d, d)] += lambda * (1.0 + jtj[(d, d)]);
                }
                let Some(step) = a.lu().solve(&(-&jtr)) else {
                    lambda *= 10.0;
                    continue;
                };
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let trial_eta = build(&trial);
                let trial_r = residual(&trial_eta);
                if trial_r.norm() < r.norm() {
                    x = trial;
                    eta = trial_eta;
                    r = trial_r;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
                lambda *= 10.0;
            }
            if !improved {
                break;
            }
        }
        if r.norm() <= target && eta.inverse().is_some() {
            return Some(eta);
        }
    }
    None
}
