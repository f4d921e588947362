//! Command-line front end: matrix files in, analysis reports out.

pub mod file;
pub mod render;
pub mod report;

use num_complex::Complex64;
use pseudoherm::fixtures::PaperFixture;
use pseudoherm::spectral::{apply_phases, eig};
use pseudoherm::{PhasePolicy, Tolerance};

pub use file::{parse_matrix_file, parse_matrix_str, write_matrix_file, write_matrix_str, FileError, MatrixFile};
pub use render::{emit_report, Format};
pub use report::{analyze, AnalysisReport, AnalyzeOptions, ExitClass};

/// A fixture as a matrix file. Pinned eigenvectors become the unit factors
/// that turn the automatic phases into the pinned ones.
pub fn fixture_to_file(fx: &PaperFixture, tol: &Tolerance) -> pseudoherm::Result<MatrixFile> {
    let mut file = MatrixFile::new(fx.hamiltonian.clone());
    file.eta = Some(fx.fundamental_metric.matrix().clone());
    if let (Some(pinned), true) = (&fx.pinned_eigenvectors, fx.real_spectrum) {
        let sys = eig(&fx.hamiltonian, tol)?;
        let auto = apply_phases(&sys.vectors, &PhasePolicy::Auto)?;
        let phases = auto
            .iter()
            .zip(pinned)
            .map(|(a, p)| {
                let overlap = a.dotc(p);
                overlap / overlap.norm()
            })
            .collect::<Vec<Complex64>>();
        file.phases = Some(phases);
    }
    Ok(file)
}
