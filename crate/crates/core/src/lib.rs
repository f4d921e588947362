//! Metric operators and generalized parity, time-reversal and charge
//! conjugation for pseudo-Hermitian matrices.
//!
//! A matrix `H` is pseudo-Hermitian when `eta H eta^-1 = H^dagger` for some
//! invertible `eta`. When the spectrum is real, the diagonalizer `D` gives a
//! positive-definite metric `eta_+ = (D D^dagger)^-1`, and from the
//! eigenvectors one builds `P`, `T`, `C`, `PT` and `CPT`.
//!
//! ```
//! use pseudoherm::{analyze_fixture, fixtures::fixture_i1, Tolerance};
//!
//! let fx = fixture_i1(2.0).unwrap();
//! let a = analyze_fixture(&fx, Tolerance::default()).unwrap();
//! assert!(a.report.all_must_pass_hold());
//! ```

mod eigen;
pub mod error;
pub mod fixtures;
pub mod matrix;
pub mod metric;
pub mod operator;
pub mod pipeline;
pub mod products;
pub mod spectral;
pub mod symmetry;

pub use error::{Error, Result};
pub use matrix::{c, CVector, ComplexSquareMatrix, Tolerance};
pub use metric::{Metric, MetricChoice, MetricFamily, MetricFlags};
pub use operator::OperatorRep;
pub use pipeline::{analyze_conjugate_paired, analyze_fixture, analyze_real, RealAnalysis};
pub use products::InnerProductReport;
pub use spectral::{BiorthoSystem, PhasePolicy, SpectralData, SpectralOptions, SpectrumClass};
pub use symmetry::{ResidualReport, SymmetrySuite};
