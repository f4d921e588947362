//! Analysis report: the pipeline run step by step so that a failure at any
//! stage still yields everything computed before it.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pseudoherm::metric::{
    metric_conjugate_paired, metric_from_diagonalizer, metric_residual_bound,
    pseudo_hermiticity_residual, select_fundamental_metric, solve_metric_space,
};
use pseudoherm::products::gram_report;
use pseudoherm::spectral::{apply_phases, build_diagonalizer, classify_spectrum, eig};
use pseudoherm::symmetry::p2_t2_condition;
use pseudoherm::{
    BiorthoSystem, ComplexSquareMatrix, Error, Metric, MetricChoice, MetricFlags, PhasePolicy,
    SpectralData, SpectralOptions, SpectrumClass, SymmetrySuite, Tolerance,
};
use serde::{Deserialize, Serialize};

use crate::file::to_pairs;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

/// Process exit codes, one per failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExitClass {
    Ok,
    Other,
    Usage,
    Parse,
    Spectral,
    Metric,
    Suite,
}

impl ExitClass {
    pub fn code(self) -> i32 {
        match self {
            ExitClass::Ok => 0,
            ExitClass::Other => 1,
            ExitClass::Usage => 2,
            ExitClass::Parse => 3,
            ExitClass::Spectral => 4,
            ExitClass::Metric => 5,
            ExitClass::Suite => 6,
        }
    }

    pub fn of(err: &Error) -> ExitClass {
        match err {
            Error::InvalidPermutation(_) | Error::InvalidPhases(_) | Error::InvalidParameter(_) => {
                ExitClass::Usage
            }
            Error::DimensionMismatch { .. }
            | Error::NonSquare { .. }
            | Error::Empty
            | Error::NonFinite { .. } => ExitClass::Parse,
            Error::DegenerateSpectrum { .. }
            | Error::NonDiagonalizable { .. }
            | Error::NoConvergence { .. }
            | Error::MixedSpectrum
            | Error::RealSpectrumRequired
            | Error::ConjugatePairsRequired
            | Error::DiagonalizationDefect { .. }
            | Error::SingularD => ExitClass::Spectral,
            Error::ZeroEtaNorm { .. }
            | Error::ComplexEtaNorm { .. }
            | Error::SingularMetric
            | Error::OddDimension { .. }
            | Error::NotAMetric { .. } => ExitClass::Metric,
            Error::BiorthogonalityViolation { .. }
            | Error::CompletenessViolation { .. }
            | Error::SuiteInvalid { .. }
            | Error::NotASymmetry { .. } => ExitClass::Suite,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalyzeOptions {
    pub tol: Tolerance,
    /// Fundamental metric; selected from the metric family when absent.
    pub metric: Option<ComplexSquareMatrix>,
    pub ordering: Option<Vec<usize>>,
    /// Unit factors applied on top of the automatic phases.
    pub phases: Option<Vec<Complex64>>,
    pub conjugate_pairs: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: InputEcho,
    pub spectrum: Option<SpectrumSection>,
    pub metrics: Option<MetricsSection>,
    pub suite: Option<SuiteSection>,
    pub products: Option<BTreeMap<String, ProductSection>>,
    pub verdicts: Verdicts,
    pub residuals: BTreeMap<String, ResidualSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub n: usize,
    #[serde(rename = "H")]
    pub h: JsonMatrix,
    pub eta: Option<JsonMatrix>,
    pub phases: Option<Vec<[f64; 2]>>,
    pub ordering: Option<Vec<usize>>,
    pub conjugate_pairs: bool,
    pub tol_abs: f64,
    pub tol_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSection {
    pub eigenvalues: Vec<[f64; 2]>,
    pub class: String,
    pub pairing: Vec<(usize, usize)>,
    pub signs: Option<Vec<i8>>,
    pub condition: Option<f64>,
    pub diagonalization_defect: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySection {
    pub dimension: usize,
    pub basis: Vec<JsonMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagsSection {
    pub hermitian: bool,
    pub involutory: bool,
    pub unitary: bool,
    pub real_symmetric: bool,
    pub simple: bool,
    pub positive_definite: bool,
}

impl From<MetricFlags> for FlagsSection {
    fn from(f: MetricFlags) -> Self {
        Self {
            hermitian: f.hermitian,
            involutory: f.involutory,
            unitary: f.unitary,
            real_symmetric: f.real_symmetric,
            simple: f.simple,
            positive_definite: f.positive_definite,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSection {
    pub matrix: JsonMatrix,
    pub choice: Option<String>,
    pub flags: FlagsSection,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsSection {
    pub family: Option<FamilySection>,
    pub fundamental: Option<MetricSection>,
    pub eta_plus: Option<MetricSection>,
    pub eta_bar: Option<MetricSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSection {
    pub matrix: JsonMatrix,
    pub antilinear: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct P2T2Section {
    pub condition_holds: bool,
    pub t2_equals_p2: bool,
    pub condition_defect: f64,
    pub t2_p2_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSection {
    pub operators: BTreeMap<String, OperatorSection>,
    pub p2_t2: P2T2Section,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSection {
    pub values: JsonMatrix,
    pub real_definite: bool,
    pub diagonal_signs: Vec<String>,
    pub max_imag: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSection {
    pub value: f64,
    pub bound: f64,
    pub must_pass: bool,
}

impl ResidualSection {
    pub fn passed(&self) -> bool {
        self.value <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub stage: String,
    pub class: ExitClass,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Verdicts {
    pub all_pass: bool,
    /// One entry per residual: does it meet its bound.
    pub checks: BTreeMap<String, bool>,
    pub failure: Option<Failure>,
}

impl AnalysisReport {
    pub fn exit_class(&self) -> ExitClass {
        if let Some(f) = &self.verdicts.failure {
            return f.class;
        }
        let failed = self
            .residuals
            .iter()
            .find(|(_, r)| r.must_pass && !r.passed());
        match failed {
            None => ExitClass::Ok,
            Some((name, _)) if name.starts_with("metric.") => ExitClass::Metric,
            Some(_) => ExitClass::Suite,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.exit_class().code()
    }
}

fn pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

fn class_name(class: SpectrumClass) -> &'static str {
    match class {
        SpectrumClass::AllReal => "all-real",
        SpectrumClass::ConjugatePaired => "conjugate-paired",
        SpectrumClass::Mixed => "mixed",
    }
}

fn metric_section(m: &Metric, choice: Option<MetricChoice>, residual: f64) -> MetricSection {
    MetricSection {
        matrix: to_pairs(m.matrix()),
        choice: choice.map(|c| c.as_str().to_string()),
        flags: m.flags().into(),
        residual,
    }
}

struct Builder<'a> {
    h: &'a ComplexSquareMatrix,
    opts: &'a AnalyzeOptions,
    report: AnalysisReport,
}

type Step<T> = std::result::Result<T, (&'static str, Error)>;

fn at<T>(stage: &'static str, r: pseudoherm::Result<T>) -> Step<T> {
    r.map_err(|e| (stage, e))
}

impl<'a> Builder<'a> {
    fn residual(&mut self, name: &str, value: f64, bound: f64, must_pass: bool) {
        self.report.residuals.insert(
            name.to_string(),
            ResidualSection {
                value,
                bound,
                must_pass,
            },
        );
    }

    fn metrics(&mut self) -> &mut MetricsSection {
        self.report.metrics.get_or_insert_with(MetricsSection::default)
    }

    fn run(&mut self) -> Step<()> {
        let (h, opts) = (self.h, self.opts);
        let tol = opts.tol;
        let mut sys = at("spectrum", eig(h, &tol))?;
        if let Some(perm) = &opts.ordering {
            sys = at("spectrum", sys.permuted(perm))?;
        }
        let class = classify_spectrum(&sys.values, &tol);
        self.report.spectrum = Some(SpectrumSection {
            eigenvalues: pairs(&sys.values),
            class: class_name(class.class).into(),
            pairing: class.pairing.clone(),
            signs: None,
            condition: None,
            diagonalization_defect: None,
        });
        if class.class == SpectrumClass::Mixed {
            return Err(("spectrum", Error::MixedSpectrum));
        }

        let family = solve_metric_space(h, &tol);
        self.metrics().family = Some(FamilySection {
            dimension: family.dimension(),
            basis: family.basis().iter().map(to_pairs).collect(),
        });

        if opts.conjugate_pairs {
            if class.class != SpectrumClass::ConjugatePaired {
                return Err(("metric", Error::ConjugatePairsRequired));
            }
            let vectors = at("metric", apply_phases(&sys.vectors, &PhasePolicy::Auto))?;
            let d = at("metric", build_diagonalizer(&vectors))?;
            let eta_bar = at("metric", metric_conjugate_paired(&d, &class.pairing, &tol))?;
            let residual = at("metric", pseudo_hermiticity_residual(h, eta_bar.matrix()))?;
            let bound = metric_residual_bound(eta_bar.matrix(), &tol);
            self.residual("metric.eta_bar", residual, bound, true);
            self.metrics().eta_bar = Some(metric_section(&eta_bar, None, residual));
            return Ok(());
        }
        if class.class == SpectrumClass::ConjugatePaired {
            return Err(("spectrum", Error::RealSpectrumRequired));
        }

        let (eta, choice) = match &opts.metric {
            Some(m) => (at("metric", Metric::new(m.clone(), &tol))?, MetricChoice::Supplied),
            None => {
                let leading = at("metric", apply_phases(&sys.vectors[..1], &PhasePolicy::Auto))?;
                at(
                    "metric",
                    select_fundamental_metric(h, &family, &leading[0], &tol),
                )?
            }
        };
        let residual = at("metric", pseudo_hermiticity_residual(h, eta.matrix()))?;
        let bound = metric_residual_bound(eta.matrix(), &tol);
        self.residual("metric.fundamental", residual, bound, true);
        self.metrics().fundamental = Some(metric_section(&eta, Some(choice), residual));
        if residual > bound {
            return Err(("metric", Error::NotAMetric { residual }));
        }

        let spectral_opts = SpectralOptions {
            tol,
            ordering: opts.ordering.clone(),
            phases: match &opts.phases {
                Some(p) => PhasePolicy::Relative(p.clone()),
                None => PhasePolicy::Auto,
            },
        };
        let spectral = at("spectrum", SpectralData::compute(h, eta.matrix(), &spectral_opts))?;
        if let Some(s) = self.report.spectrum.as_mut() {
            s.signs = Some(spectral.signs.clone());
            s.condition = Some(spectral.condition);
            s.diagonalization_defect = Some(spectral.diagonalization_defect);
        }

        let eta_plus = at("metric", metric_from_diagonalizer(&spectral.diagonalizer, &tol))?;
        let residual = at("metric", pseudo_hermiticity_residual(h, eta_plus.matrix()))?;
        let bound = metric_residual_bound(eta_plus.matrix(), &tol);
        self.residual("metric.eta_plus", residual, bound, true);
        self.metrics().eta_plus = Some(metric_section(&eta_plus, None, residual));
        if residual > bound {
            return Err(("metric", Error::NotAMetric { residual }));
        }

        let bio = at(
            "suite",
            BiorthoSystem::build(&spectral.vectors, eta.matrix(), eta_plus.matrix(), &tol),
        )?;
        let scale = bio
            .psi()
            .iter()
            .zip(bio.upsilon())
            .map(|(p, u)| p.norm() * u.norm())
            .fold(0.0, f64::max);
        self.residual("biorthogonality", bio.gram_defect(), tol.bound(scale), true);

        let (suite, checks) = at(
            "suite",
            SymmetrySuite::assemble(h, &bio, eta.clone(), eta_plus.clone(), &tol),
        )?;
        for e in &checks.entries {
            self.residual(&format!("suite.{}", e.name), e.value, e.bound, e.must_pass);
        }
        let cond = p2_t2_condition(&bio, &tol);
        self.report.suite = Some(SuiteSection {
            operators: suite
                .named()
                .into_iter()
                .map(|(name, op)| {
                    (
                        name.to_string(),
                        OperatorSection {
                            matrix: to_pairs(op.matrix()),
                            antilinear: op.is_antilinear(),
                        },
                    )
                })
                .collect(),
            p2_t2: P2T2Section {
                condition_holds: cond.condition_holds,
                t2_equals_p2: cond.t2_equals_p2,
                condition_defect: cond.condition_defect,
                t2_p2_distance: cond.t2_p2_distance,
            },
        });
        at("suite", checks.check())?;

        let grams = at(
            "products",
            gram_report(&bio, eta.matrix(), eta_plus.matrix(), &suite, &tol),
        )?;
        for (name, g) in &grams {
            let must = matches!(name.as_str(), "eta_plus" | "x.C" | "x.PT" | "x.CPT");
            self.residual(&format!("products.{name}.imag"), g.max_imag, g.imag_bound, must);
        }
        self.report.products = Some(
            grams
                .into_iter()
                .map(|(name, g)| {
                    let section = ProductSection {
                        values: g
                            .values
                            .row_iter()
                            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                            .collect(),
                        real_definite: g.real_definite,
                        diagonal_signs: g
                            .diagonal_signs
                            .iter()
                            .map(|s| s.as_str().to_string())
                            .collect(),
                        max_imag: g.max_imag,
                    };
                    (name, section)
                })
                .collect(),
        );
        Ok(())
    }
}

/// Runs the full pipeline on `h`. Never fails: errors end the run early and
/// are recorded in `verdicts.failure`.
pub fn analyze(h: &ComplexSquareMatrix, opts: &AnalyzeOptions) -> AnalysisReport {
    let input = InputEcho {
        n: h.dim(),
        h: to_pairs(h),
        eta: opts.metric.as_ref().map(to_pairs),
        phases: opts.phases.as_deref().map(pairs),
        ordering: opts.ordering.clone(),
        conjugate_pairs: opts.conjugate_pairs,
        tol_abs: opts.tol.abs,
        tol_rel: opts.tol.rel,
    };
    let mut b = Builder {
        h,
        opts,
        report: AnalysisReport {
            input,
            spectrum: None,
            metrics: None,
            suite: None,
            products: None,
            verdicts: Verdicts::default(),
            residuals: BTreeMap::new(),
        },
    };
    let failure = b.run().err().map(|(stage, e)| Failure {
        stage: stage.to_string(),
        class: ExitClass::of(&e),
        message: e.to_string(),
    });
    let mut report = b.report;
    report.verdicts.checks = report
        .residuals
        .iter()
        .map(|(k, r)| (k.clone(), r.passed()))
        .collect();
    report.verdicts.all_pass = failure.is_none()
        && report
            .residuals
            .values()
            .all(|r| !r.must_pass || r.passed());
    report.verdicts.failure = failure;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use pseudoherm::c;

    fn i1() -> ComplexSquareMatrix {
        ComplexSquareMatrix::from_rows(&[[c(1.0, 0.0), c(0.0, -1.0)], [c(0.0, 4.0), c(1.0, 0.0)]])
            .unwrap()
    }

    #[test]
    fn i1_with_supplied_metric() {
        let eta = ComplexSquareMatrix::from_rows(&[[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
            .unwrap();
        let opts = AnalyzeOptions {
            metric: Some(eta),
            ..Default::default()
        };
        let r = analyze(&i1(), &opts);
        assert_eq!(r.exit_code(), 0, "{:?}", r.verdicts.failure);
        assert!(r.verdicts.all_pass);
        let ep = &r.metrics.as_ref().unwrap().eta_plus.as_ref().unwrap().matrix;
        assert!((ep[0][0][0] - 2.0).abs() < 1e-12 && (ep[1][1][0] - 0.5).abs() < 1e-12);
        for (name, ok) in &r.verdicts.checks {
            assert!(r.residuals.contains_key(name));
            assert_eq!(*ok, r.residuals[name].passed());
        }
    }

    #[test]
    fn hermitian_input_selects_identity() {
        let h = ComplexSquareMatrix::from_rows(&[[c(2.0, 0.0), c(1.0, -1.0)], [c(1.0, 1.0), c(-1.0, 0.0)]])
            .unwrap();
        let r = analyze(&h, &AnalyzeOptions::default());
        assert_eq!(r.exit_code(), 0);
        let m = r.metrics.unwrap();
        assert_eq!(m.fundamental.unwrap().choice.as_deref(), Some("identity"));
        let ep = m.eta_plus.unwrap().matrix;
        assert!((ep[0][0][0] - 1.0).abs() < 1e-10 && ep[0][1][0].abs() < 1e-10);
    }

    #[test]
    fn conjugate_pairs_report_eta_bar_only() {
        let h = ComplexSquareMatrix::from_diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]).unwrap();
        let opts = AnalyzeOptions {
            conjugate_pairs: true,
            ..Default::default()
        };
        let r = analyze(&h, &opts);
        assert_eq!(r.exit_code(), 0);
        assert!(r.suite.is_none());
        assert!(r.metrics.unwrap().eta_bar.is_some());
        let plain = analyze(&h, &AnalyzeOptions::default());
        assert_eq!(plain.exit_class(), ExitClass::Spectral);
    }

    #[test]
    fn mixed_spectrum_stops_after_classification() {
        let h = ComplexSquareMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let r = analyze(&h, &AnalyzeOptions::default());
        assert_eq!(r.exit_class(), ExitClass::Spectral);
        assert_eq!(r.spectrum.unwrap().class, "mixed");
        assert!(r.metrics.is_none());
    }

    #[test]
    fn wrong_metric_is_a_metric_failure() {
        let opts = AnalyzeOptions {
            metric: Some(ComplexSquareMatrix::identity(2)),
            ..Default::default()
        };
        let r = analyze(&i1(), &opts);
        assert_eq!(r.exit_class(), ExitClass::Metric);
        assert!(!r.verdicts.checks["metric.fundamental"]);
    }

    #[test]
    fn bad_ordering_is_usage() {
        let opts = AnalyzeOptions {
            ordering: Some(vec![0, 0]),
            ..Default::default()
        };
        assert_eq!(analyze(&i1(), &opts).exit_class(), ExitClass::Usage);
    }
}
