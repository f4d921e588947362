//! End-to-end analysis: spectrum, positive metric, biorthonormal system,
//! symmetry suite and inner products.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fixtures::PaperFixture;
use crate::matrix::{CVector, ComplexSquareMatrix, Tolerance};
use crate::metric::{
    metric_conjugate_paired, metric_from_diagonalizer, metric_residual_bound,
    pseudo_hermiticity_residual, validate_metric, Metric,
};
use crate::products::{gram_report, InnerProductReport};
use crate::spectral::{
    apply_phases, build_diagonalizer, classify_spectrum, eig, BiorthoSystem, PhasePolicy,
    SpectralData, SpectralOptions, SpectrumClass,
};
use crate::symmetry::{ResidualReport, SymmetrySuite};

#[derive(Debug, Clone, PartialEq)]
pub struct RealAnalysis {
    pub spectral: SpectralData,
    pub eta: Metric,
    pub eta_plus: Metric,
    /// Pseudo-Hermiticity residual of the fundamental metric.
    pub eta_residual: f64,
    /// Pseudo-Hermiticity residual of `eta_+`.
    pub eta_plus_residual: f64,
    pub bio: BiorthoSystem,
    pub suite: SymmetrySuite,
    pub report: ResidualReport,
    pub products: BTreeMap<String, InnerProductReport>,
}

/// Full analysis of a real-spectrum `h` under the fundamental metric `eta`.
pub fn analyze_real(
    h: &ComplexSquareMatrix,
    eta: &ComplexSquareMatrix,
    opts: &SpectralOptions,
) -> Result<RealAnalysis> {
    let tol = &opts.tol;
    h.check_same_dim(eta)?;
    let eta_residual = pseudo_hermiticity_residual(h, eta)?;
    let eta = validate_metric(h, eta, tol)?;
    let spectral = SpectralData::compute(h, eta.matrix(), opts)?;
    let eta_plus = metric_from_diagonalizer(&spectral.diagonalizer, tol)?;
    let eta_plus_residual = pseudo_hermiticity_residual(h, eta_plus.matrix())?;
    let bio = BiorthoSystem::build(&spectral.vectors, eta.matrix(), eta_plus.matrix(), tol)?;
    let (suite, report) = SymmetrySuite::build(h, &bio, eta.clone(), eta_plus.clone(), tol)?;
    let products = gram_report(&bio, eta.matrix(), eta_plus.matrix(), &suite, tol)?;
    Ok(RealAnalysis {
        spectral,
        eta,
        eta_plus,
        eta_residual,
        eta_plus_residual,
        bio,
        suite,
        report,
        products,
    })
}

/// [`analyze_real`] on a fixture with its fundamental metric and pinned phases.
pub fn analyze_fixture(fixture: &PaperFixture, tol: Tolerance) -> Result<RealAnalysis> {
    analyze_real(
        &fixture.hamiltonian,
        fixture.fundamental_metric.matrix(),
        &fixture.spectral_options(tol),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugatePairedAnalysis {
    pub eigenvalues: Vec<Complex64>,
    pub pairing: Vec<(usize, usize)>,
    /// Unit eigenvectors with automatic phases, in eigenvalue order.
    pub vectors: Vec<CVector>,
    pub eta_bar: Metric,
    pub residual: f64,
}

/// `eta_bar = (D S D^dagger)^-1` for a spectrum made of conjugate pairs.
pub fn analyze_conjugate_paired(
    h: &ComplexSquareMatrix,
    tol: &Tolerance,
) -> Result<ConjugatePairedAnalysis> {
    let sys = eig(h, tol)?;
    let class = classify_spectrum(&sys.values, tol);
    match class.class {
        SpectrumClass::ConjugatePaired => {}
        SpectrumClass::Mixed => return Err(Error::MixedSpectrum),
        SpectrumClass::AllReal => return Err(Error::ConjugatePairsRequired),
    }
    let vectors = apply_phases(&sys.vectors, &PhasePolicy::Auto)?;
    let d = build_diagonalizer(&vectors)?;
    let eta_bar = metric_conjugate_paired(&d, &class.pairing, tol)?;
    let residual = pseudo_hermiticity_residual(h, eta_bar.matrix())?;
    if residual > metric_residual_bound(eta_bar.matrix(), tol) {
        return Err(Error::NotAMetric { residual });
    }
    Ok(ConjugatePairedAnalysis {
        eigenvalues: sys.values,
        pairing: class.pairing,
        vectors,
        eta_bar,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture_i1, random_conjugate_paired};
    use crate::matrix::c;

    #[test]
    fn i1_end_to_end() {
        let fx = fixture_i1(2.0).unwrap();
        let a = analyze_fixture(&fx, Tolerance::default()).unwrap();
        assert_eq!(a.spectral.signs, vec![1, -1]);
        assert!(a.report.all_must_pass_hold());
        let expected = fx.expected_matrix("eta_plus").unwrap();
        assert!(a.eta_plus.matrix().max_entry_distance(expected) < 1e-12);
        for (name, op) in a.suite.named() {
            let want = fx.expected_operator(name).unwrap();
            assert!(op.distance(want) < 1e-12, "{name}");
        }
    }

    #[test]
    fn conjugate_pair_branch() {
        let h = ComplexSquareMatrix::from_diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]).unwrap();
        let a = analyze_conjugate_paired(&h, &Tolerance::default()).unwrap();
        let sx = ComplexSquareMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(a.eta_bar.matrix().max_entry_distance(&sx) < 1e-14);

        let g = random_conjugate_paired(2, 3).unwrap();
        let a = analyze_conjugate_paired(&g.h, &Tolerance::default()).unwrap();
        assert!(a.residual <= 1e-8);

        let real = ComplexSquareMatrix::from_real_rows(&[[1.0, 0.0], [0.0, 2.0]]).unwrap();
        assert_eq!(
            analyze_conjugate_paired(&real, &Tolerance::default()),
            Err(Error::ConjugatePairsRequired)
        );
    }
}
