//! Eigendecomposition, spectrum classification, eta-normalization of
//! eigenvectors and the diagonalizer `D`.

use num_complex::Complex64;

use crate::eigen;
use crate::error::{Error, Result};
use crate::matrix::{dot_adjoint, vector_norm, CVector, ComplexSquareMatrix, Tolerance};

/// Eigenvalues whose distance is below this multiple of `tol.rel * max(1, ||H||)`
/// count as repeated.
const DEGENERACY_FACTOR: f64 = 100.0;

/// Reference vectors must overlap the eigenvector by at least this fraction
/// of `|ref| |v|` to fix a phase.
const MIN_ALIGNMENT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumClass {
    AllReal,
    ConjugatePaired,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: SpectrumClass,
    /// For `ConjugatePaired`: index pairs `(k, l)` with `Im E_k > 0` and
    /// `E_l ~ conj(E_k)`, listed in order of `k`.
    pub pairing: Vec<(usize, usize)>,
}

impl Classification {
    /// Flattened pairing `[k0, l0, k1, l1, ...]` keeping each pair adjacent.
    pub fn pairing_permutation(&self) -> Vec<usize> {
        self.pairing.iter().flat_map(|&(k, l)| [k, l]).collect()
    }
}

/// Eigenvalues with unit-norm eigenvectors, in the order the caller asked for.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem {
    pub values: Vec<Complex64>,
    pub vectors: Vec<CVector>,
}

impl Eigensystem {
    /// Reorders so that entry `k` of the result is entry `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Eigensystem> {
        check_permutation(perm, self.values.len())?;
        Ok(Eigensystem {
            values: perm.iter().map(|&i| self.values[i]).collect(),
            vectors: perm.iter().map(|&i| self.vectors[i].clone()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidPermutation(perm.to_vec()));
    }
    for &i in perm {
        if i >= n || seen[i] {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Eigenvalues and unit eigenvectors of `h`, sorted by descending real part
/// with near-equal real parts ordered by descending imaginary part.
///
/// `n = 2` uses the characteristic polynomial directly; larger matrices go
/// through a complex Schur decomposition.
pub fn eig(h: &ComplexSquareMatrix, tol: &Tolerance) -> Result<Eigensystem> {
    let n = h.dim();
    let (values, vectors) = match n {
        1 => (vec![h.get(0, 0)], vec![CVector::from_element(1, Complex64::new(1.0, 0.0))]),
        2 => eig2(h),
        _ => {
            let s = eigen::schur(h.inner())?;
            let values = (0..n).map(|k| s.t[(k, k)]).collect();
            (values, eigen::schur_eigenvectors(&s))
        }
    };

    let order = default_order(&values, tol);
    let sys = Eigensystem {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: order.iter().map(|&i| vectors[i].clone()).collect(),
    };

    let scale = h.frobenius_norm().max(1.0);
    let gap = DEGENERACY_FACTOR * tol.rel * scale;
    for i in 0..n {
        for j in 0..i {
            if (sys.values[i] - sys.values[j]).norm() <= gap {
                return Err(Error::DegenerateSpectrum {
                    index: i,
                    value: sys.values[i],
                });
            }
        }
    }
    if n > 1 {
        let v = ComplexSquareMatrix::from_columns(&sys.vectors)?;
        let condition = v.condition_number();
        if !(condition.is_finite() && condition * tol.abs <= 1.0) {
            return Err(Error::NonDiagonalizable { condition });
        }
    }
    Ok(sys)
}

fn eig2(h: &ComplexSquareMatrix) -> (Vec<Complex64>, Vec<CVector>) {
    let (a, b, c, d) = (h.get(0, 0), h.get(0, 1), h.get(1, 0), h.get(1, 1));
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let values = vec![mean + disc, mean - disc];
    let vectors = values
        .iter()
        .map(|&e| {
            // two candidate null vectors of H - E; keep the better scaled one
            let v1 = CVector::from_vec(vec![b, e - a]);
            let v2 = CVector::from_vec(vec![e - d, c]);
            let v = if vector_norm(&v1) >= vector_norm(&v2) {
                v1
            } else {
                v2
            };
            let norm = vector_norm(&v);
            if norm == 0.0 {
                // H = E I: any basis works; use the standard one
                CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            } else {
                v / Complex64::new(norm, 0.0)
            }
        })
        .collect();
    (values, vectors)
}

/// Sort permutation for the default ordering.
pub fn default_order(values: &[Complex64], tol: &Tolerance) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[j].re.total_cmp(&values[i].re).then(i.cmp(&j)));
    // chain near-equal real parts into groups, then order each by imaginary part
    let mut out = Vec::with_capacity(idx.len());
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() {
            let prev = values[idx[end - 1]];
            let cur = values[idx[end]];
            let bound = tol.rel * prev.norm().max(cur.norm()).max(1.0);
            if (prev.re - cur.re).abs() > bound {
                break;
            }
            end += 1;
        }
        let mut group = idx[start..end].to_vec();
        group.sort_by(|&i, &j| values[j].im.total_cmp(&values[i].im).then(i.cmp(&j)));
        out.extend(group);
        start = end;
    }
    out
}

pub fn classify_spectrum(values: &[Complex64], tol: &Tolerance) -> Classification {
    let is_real = |z: &Complex64| z.im.abs() <= tol.reality_bound(*z);
    let real_count = values.iter().filter(|z| is_real(z)).count();
    if real_count == values.len() {
        return Classification {
            class: SpectrumClass::AllReal,
            pairing: Vec::new(),
        };
    }
    let mixed = Classification {
        class: SpectrumClass::Mixed,
        pairing: Vec::new(),
    };
    if real_count > 0 || values.len() % 2 == 1 {
        return mixed;
    }

    let mut used = vec![false; values.len()];
    let mut pairing = Vec::with_capacity(values.len() / 2);
    for k in 0..values.len() {
        if values[k].im < 0.0 || used[k] {
            continue;
        }
        let target = values[k].conj();
        let partner = (0..values.len())
            .filter(|&l| !used[l] && l != k && values[l].im < 0.0)
            .min_by(|&x, &y| {
                (values[x] - target)
                    .norm()
                    .total_cmp(&(values[y] - target).norm())
            });
        match partner {
            Some(l) if (values[l] - target).norm() <= 10.0 * tol.reality_bound(target) => {
                used[k] = true;
                used[l] = true;
                pairing.push((k, l));
            }
            _ => return mixed,
        }
    }
    if used.iter().all(|&u| u) {
        Classification {
            class: SpectrumClass::ConjugatePaired,
            pairing,
        }
    } else {
        mixed
    }
}

/// How eigenvector phases are fixed before eta-normalization.
#[derive(Debug, Clone, PartialEq)]
pub enum PhasePolicy {
    /// Largest-modulus component made real and positive.
    Auto,
    /// Unit factors multiplied onto the `Auto` vectors, one per eigenvector.
    Relative(Vec<Complex64>),
    /// Each eigenvector rotated so that `ref_n^dagger v_n` is real positive.
    Aligned(Vec<CVector>),
}

/// Rotates `v` so its largest-modulus component (first one on ties) is real
/// and positive.
pub fn fix_phase(v: &CVector) -> CVector {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v.clone();
    }
    let pivot = v
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-9))
        .copied()
        .expect("max is attained");
    let phase = pivot.conj() / pivot.norm();
    v * phase
}

pub fn apply_phases(vectors: &[CVector], policy: &PhasePolicy) -> Result<Vec<CVector>> {
    match policy {
        PhasePolicy::Auto => Ok(vectors.iter().map(fix_phase).collect()),
        PhasePolicy::Relative(phases) => {
            if phases.len() != vectors.len() {
                return Err(Error::InvalidPhases(format!(
                    "expected {} phases, got {}",
                    vectors.len(),
                    phases.len()
                )));
            }
            phases
                .iter()
                .zip(vectors)
                .map(|(p, v)| {
                    if (p.norm() - 1.0).abs() > 1e-9 {
                        return Err(Error::InvalidPhases(format!("phase {p} is not unit modulus")));
                    }
                    Ok(fix_phase(v) * *p)
                })
                .collect()
        }
        PhasePolicy::Aligned(refs) => {
            if refs.len() != vectors.len() {
                return Err(Error::InvalidPhases(format!(
                    "expected {} reference vectors, got {}",
                    vectors.len(),
                    refs.len()
                )));
            }
            refs.iter()
                .zip(vectors)
                .enumerate()
                .map(|(n, (r, v))| {
                    if r.len() != v.len() {
                        return Err(Error::DimensionMismatch {
                            expected: v.len(),
                            found: r.len(),
                        });
                    }
                    let overlap = dot_adjoint(r, v);
                    if overlap.norm() <= MIN_ALIGNMENT * vector_norm(r) * vector_norm(v) {
                        return Err(Error::InvalidPhases(format!(
                            "reference vector {n} is orthogonal to eigenvector {n}"
                        )));
                    }
                    Ok(v * (overlap.conj() / overlap.norm()))
                })
                .collect()
        }
    }
}

/// Scales each vector to unit |eta-norm| and reports the sign of that norm.
///
/// Phases are left untouched, so normalizing an already normalized set is a
/// no-op.
pub fn eta_normalize(
    vectors: &[CVector],
    eta: &ComplexSquareMatrix,
    tol: &Tolerance,
) -> Result<(Vec<CVector>, Vec<i8>)> {
    let eta_norm = eta.frobenius_norm();
    let mut psi = Vec::with_capacity(vectors.len());
    let mut signs = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let ev = eta.mul_vec(v)?;
        let value = dot_adjoint(v, &ev);
        let bound = tol.bound(eta_norm * vector_norm(v).powi(2));
        if value.norm() <= bound {
            return Err(Error::ZeroEtaNorm {
                index,
                norm: value.norm(),
            });
        }
        if value.im.abs() > bound.max(tol.rel * value.norm()) {
            return Err(Error::ComplexEtaNorm { index, value });
        }
        psi.push(v / Complex64::new(value.re.abs().sqrt(), 0.0));
        signs.push(if value.re > 0.0 { 1 } else { -1 });
    }
    Ok((psi, signs))
}

/// Matrix with the given vectors as columns; fails when they are linearly
/// dependent.
pub fn build_diagonalizer(psi: &[CVector]) -> Result<ComplexSquareMatrix> {
    let d = ComplexSquareMatrix::from_columns(psi)?;
    if d.inverse().is_none() {
        return Err(Error::SingularD);
    }
    Ok(d)
}

/// `||D^-1 H D - diag(E)||_F`.
pub fn diagonalization_defect(
    h: &ComplexSquareMatrix,
    d: &ComplexSquareMatrix,
    values: &[Complex64],
) -> Result<f64> {
    h.check_same_dim(d)?;
    let inv = d.inverse().ok_or(Error::SingularD)?;
    let diag = ComplexSquareMatrix::from_diagonal(values)?;
    Ok((&(&inv * h) * d).distance(&diag))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOptions {
    pub tol: Tolerance,
    /// Applied on top of the default ordering: position `k` takes the
    /// eigenpair the default ordering puts at `ordering[k]`.
    pub ordering: Option<Vec<usize>>,
    pub phases: PhasePolicy,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            ordering: None,
            phases: PhasePolicy::Auto,
        }
    }
}

impl SpectralOptions {
    pub fn with_tol(tol: Tolerance) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Everything the symmetry constructions need from the eigenproblem of a
/// real-spectrum `H` under a fixed metric `eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<Complex64>,
    /// eta-normalized eigenvectors `Psi_n`.
    pub vectors: Vec<CVector>,
    /// `Psi_n^dagger eta Psi_n`, either +1 or -1.
    pub signs: Vec<i8>,
    pub diagonalizer: ComplexSquareMatrix,
    pub class: SpectrumClass,
    pub ordering: Vec<usize>,
    /// Frobenius condition number of `D`.
    pub condition: f64,
    /// `||D^-1 H D - diag(E)||_F`.
    pub diagonalization_defect: f64,
}

impl SpectralData {
    pub fn compute(
        h: &ComplexSquareMatrix,
        eta: &ComplexSquareMatrix,
        opts: &SpectralOptions,
    ) -> Result<SpectralData> {
        h.check_same_dim(eta)?;
        let tol = &opts.tol;
        let mut sys = eig(h, tol)?;
        let ordering = match &opts.ordering {
            Some(perm) => {
                sys = sys.permuted(perm)?;
                perm.clone()
            }
            None => (0..h.dim()).collect(),
        };
        match classify_spectrum(&sys.values, tol).class {
            SpectrumClass::AllReal => {}
            SpectrumClass::Mixed => return Err(Error::MixedSpectrum),
            SpectrumClass::ConjugatePaired => return Err(Error::RealSpectrumRequired),
        }
        let phased = apply_phases(&sys.vectors, &opts.phases)?;
        let (vectors, signs) = eta_normalize(&phased, eta, tol)?;
        let diagonalizer = build_diagonalizer(&vectors)?;
        let defect = diagonalization_defect(h, &diagonalizer, &sys.values)?;
        let condition = diagonalizer.condition_number();
        if defect > tol.bound(h.frobenius_norm() * condition) {
            return Err(Error::DiagonalizationDefect { defect });
        }
        Ok(SpectralData {
            eigenvalues: sys.values,
            vectors,
            signs,
            diagonalizer,
            class: SpectrumClass::AllReal,
            ordering,
            condition,
            diagonalization_defect: defect,
        })
    }
}

/// The bases `Psi_n`, `Phi_n = eta Psi_n` and `Upsilon_n = eta_+ Psi_n`,
/// checked to satisfy `Psi_m^dagger Upsilon_n = delta_mn`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiorthoSystem {
    psi: Vec<CVector>,
    phi: Vec<CVector>,
    upsilon: Vec<CVector>,
    gram_defect: f64,
}

impl BiorthoSystem {
    pub fn build(
        psi: &[CVector],
        eta: &ComplexSquareMatrix,
        eta_plus: &ComplexSquareMatrix,
        tol: &Tolerance,
    ) -> Result<BiorthoSystem> {
        eta.check_same_dim(eta_plus)?;
        if psi.len() != eta.dim() {
            return Err(Error::DimensionMismatch {
                expected: eta.dim(),
                found: psi.len(),
            });
        }
        if eta.inverse().is_none() || eta_plus.inverse().is_none() {
            return Err(Error::SingularMetric);
        }
        let phi = psi.iter().map(|v| eta.mul_vec(v)).collect::<Result<Vec<_>>>()?;
        let upsilon = psi
            .iter()
            .map(|v| eta_plus.mul_vec(v))
            .collect::<Result<Vec<_>>>()?;
        let mut defect = 0.0f64;
        let mut scale = 0.0f64;
        for (m, p) in psi.iter().enumerate() {
            for (n, u) in upsilon.iter().enumerate() {
                let target = if m == n { 1.0 } else { 0.0 };
                let g = dot_adjoint(p, u) - Complex64::new(target, 0.0);
                defect = defect.max(g.norm());
                scale = scale.max(vector_norm(p) * vector_norm(u));
            }
        }
        if defect > tol.bound(scale) {
            return Err(Error::BiorthogonalityViolation { defect });
        }
        Ok(BiorthoSystem {
            psi: psi.to_vec(),
            phi,
            upsilon,
            gram_defect: defect,
        })
    }

    pub fn psi(&self) -> &[CVector] {
        &self.psi
    }

    pub fn phi(&self) -> &[CVector] {
        &self.phi
    }

    pub fn upsilon(&self) -> &[CVector] {
        &self.upsilon
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.psi.first().map_or(0, |v| v.len())
    }

    /// Largest entry of `|Psi_m^dagger Upsilon_n - delta_mn|`.
    pub fn gram_defect(&self) -> f64 {
        self.gram_defect
    }

    /// `(-1)^n`.
    pub fn alternation(n: usize) -> f64 {
        if n.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}
