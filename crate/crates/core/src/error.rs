use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix dimension must be at least 1")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("eigenvalue {value} at index {index} is repeated")]
    DegenerateSpectrum { index: usize, value: Complex64 },

    #[error("matrix is not diagonalizable (eigenvector condition number {condition:.3e})")]
    NonDiagonalizable { condition: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("eigenvector {index} has vanishing eta-norm ({norm:.3e})")]
    ZeroEtaNorm { index: usize, norm: f64 },

    #[error("eigenvector {index} has a non-real eta-norm {value}")]
    ComplexEtaNorm { index: usize, value: Complex64 },

    #[error("diagonalizer is singular")]
    SingularD,

    #[error("metric is singular")]
    SingularMetric,

    #[error("conjugate-pair metric needs an even dimension, got {dim}")]
    OddDimension { dim: usize },

    #[error("spectrum mixes real eigenvalues and complex pairs")]
    MixedSpectrum,

    #[error("operation needs an all-real spectrum")]
    RealSpectrumRequired,

    #[error("operation needs a spectrum of complex-conjugate pairs")]
    ConjugatePairsRequired,

    #[error("matrix is not pseudo-Hermitian under the given metric (residual {residual:.3e})")]
    NotAMetric { residual: f64 },

    #[error("D^-1 H D deviates from diagonal by {defect:.3e}")]
    DiagonalizationDefect { defect: f64 },

    #[error("biorthonormality violated (Gram defect {defect:.3e})")]
    BiorthogonalityViolation { defect: f64 },

    #[error("completeness violated (defect {defect:.3e})")]
    CompletenessViolation { defect: f64 },

    #[error("suite check `{check}` failed with residual {residual:.3e}")]
    SuiteInvalid { check: String, residual: f64 },

    #[error("operator does not commute with H (residual {residual:.3e})")]
    NotASymmetry { residual: f64 },

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("invalid phase list: {0}")]
    InvalidPhases(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
