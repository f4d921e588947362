//! Complex Schur decomposition by Householder reduction to Hessenberg form
//! followed by single-shift QR sweeps with Wilkinson shifts.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CVector;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Iterations allowed per eigenvalue before giving up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// `A = Q T Q^dagger` with `Q` unitary and `T` upper triangular.
pub(crate) struct Schur {
    pub q: DMatrix<Complex64>,
    pub t: DMatrix<Complex64>,
}

pub(crate) fn schur(a: &DMatrix<Complex64>) -> Result<Schur> {
    let n = a.nrows();
    let mut t = a.clone();
    let mut q = DMatrix::<Complex64>::identity(n, n);
    hessenberg(&mut t, &mut q);
    qr_iterate(&mut t, &mut q)?;
    Ok(Schur { q, t })
}

fn hessenberg(t: &mut DMatrix<Complex64>, q: &mut DMatrix<Complex64>) {
    let n = t.nrows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| t[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            ONE
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // T <- (I - 2 v v^dagger) T on rows k+1..n
        for j in 0..n {
            let s: Complex64 = (0..v.len()).map(|i| v[i].conj() * t[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                t[(k + 1 + i, j)] -= 2.0 * v[i] * s;
            }
        }
        // T <- T (I - 2 v v^dagger) on columns k+1..n, same for Q
        for m in [&mut *t, &mut *q] {
            for i in 0..n {
                let s: Complex64 = (0..v.len()).map(|j| m[(i, k + 1 + j)] * v[j]).sum();
                for j in 0..v.len() {
                    m[(i, k + 1 + j)] -= 2.0 * s * v[j].conj();
                }
            }
        }
        for i in k + 2..n {
            t[(i, k)] = ZERO;
        }
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let norm = an.hypot(bn);
    let alpha = a / an;
    (an / norm, alpha * b.conj() / norm)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mu1 = (a + d) * 0.5 + disc;
    let mu2 = (a + d) * 0.5 - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

fn qr_iterate(t: &mut DMatrix<Complex64>, q: &mut DMatrix<Complex64>) -> Result<()> {
    let n = t.nrows();
    if n == 1 {
        return Ok(());
    }
    let norm = t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(n);

    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let mut s = t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm();
            if s == 0.0 {
                s = norm;
            }
            if t[(lo, lo - 1)].norm() <= eps * s {
                t[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if iter > MAX_SWEEPS_PER_EIGENVALUE {
            return Err(Error::NoConvergence { iterations: total });
        }

        let mu = if iter.is_multiple_of(10) {
            // exceptional shift to break cycles
            t[(hi, hi)] + Complex64::new(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                t[(hi - 1, hi - 1)],
                t[(hi - 1, hi)],
                t[(hi, hi - 1)],
                t[(hi, hi)],
            )
        };

        for k in lo..=hi {
            t[(k, k)] -= mu;
        }
        rotations.clear();
        for k in lo..hi {
            let (cs, sn) = givens(t[(k, k)], t[(k + 1, k)]);
            rotations.push((cs, sn));
            for j in k..n {
                let x = t[(k, j)];
                let y = t[(k + 1, j)];
                t[(k, j)] = cs * x + sn * y;
                t[(k + 1, j)] = -sn.conj() * x + cs * y;
            }
            t[(k + 1, k)] = ZERO;
        }
        for (offset, &(cs, sn)) in rotations.iter().enumerate() {
            let k = lo + offset;
            let last = (k + 1).min(hi);
            for i in 0..=last {
                let x = t[(i, k)];
                let y = t[(i, k + 1)];
                t[(i, k)] = x * cs + y * sn.conj();
                t[(i, k + 1)] = -x * sn + y * cs;
            }
            for i in 0..n {
                let x = q[(i, k)];
                let y = q[(i, k + 1)];
                q[(i, k)] = x * cs + y * sn.conj();
                q[(i, k + 1)] = -x * sn + y * cs;
            }
        }
        for k in lo..=hi {
            t[(k, k)] += mu;
        }
    }
    Ok(())
}

/// Eigenvectors of the upper-triangular Schur factor mapped back by `Q`,
/// each scaled to unit 2-norm. Column `k` belongs to `T[k][k]`.
pub(crate) fn schur_eigenvectors(s: &Schur) -> Vec<CVector> {
    let n = s.t.nrows();
    let tnorm = s.t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let small = f64::EPSILON * tnorm.max(f64::MIN_POSITIVE);
    (0..n)
        .map(|k| {
            let lambda = s.t[(k, k)];
            let mut y = vec![ZERO; n];
            y[k] = ONE;
            for j in (0..k).rev() {
                let rhs: Complex64 = (j + 1..=k).map(|l| s.t[(j, l)] * y[l]).sum();
                let mut denom = s.t[(j, j)] - lambda;
                if denom.norm() < small {
                    denom = Complex64::new(small, 0.0);
                }
                y[j] = -rhs / denom;
            }
            let v = &s.q * CVector::from_vec(y);
            let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v / Complex64::new(vn, 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn residual(a: &DMatrix<Complex64>, s: &Schur) -> f64 {
        let back = &s.q * &s.t * s.q.adjoint();
        (a - back).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn schur_of_small_matrices() {
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.5),
                c(2.0, 0.0),
                c(0.0, -1.0),
                c(0.3, 0.0),
                c(-1.0, 1.0),
                c(4.0, 0.0),
                c(2.0, 2.0),
                c(0.0, 0.0),
                c(3.0, -0.5),
            ],
        );
        let s = schur(&a).unwrap();
        assert!(residual(&a, &s) < 1e-12);
        for i in 0..3 {
            for j in 0..i {
                assert_eq!(s.t[(i, j)], ZERO);
            }
        }
        let unitarity = &s.q.adjoint() * &s.q - DMatrix::<Complex64>::identity(3, 3);
        assert!(unitarity.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-13);
        for (k, v) in schur_eigenvectors(&s).iter().enumerate() {
            let r = &a * v - v * s.t[(k, k)];
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_matrix_has_zero_subdiagonal() {
        // eigenvalues are +-i; real shifts alone would stall here
        let a = DMatrix::from_row_slice(2, 2, &[ZERO, c(-1.0, 0.0), ONE, ZERO]);
        let s = schur(&a).unwrap();
        assert_eq!(s.t[(1, 0)], ZERO);
        let mut ev = [s.t[(0, 0)], s.t[(1, 1)]];
        ev.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-13);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-13);
    }

    #[test]
    fn givens_zeroes_second_component() {
        let (cs, sn) = givens(c(1.0, 2.0), c(-0.5, 3.0));
        let a = c(1.0, 2.0);
        let b = c(-0.5, 3.0);
        let lower = -sn.conj() * a + cs * b;
        assert!(lower.norm() < 1e-15);
    }
}
