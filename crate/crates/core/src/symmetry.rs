//! Generalized parity, time reversal and charge conjugation built from a
//! biorthonormal system, and the checks they must pass.
//!
//! With `Psi_m^dagger Upsilon_n = delta_mn`:
//!
//! * `P   = sum (-1)^n Psi_n Psi_n^dagger`
//! * `T   = (sum Upsilon_n Upsilon_n^T) K0`
//! * `PT  = (sum (-1)^n Psi_n Upsilon_n^T) K0`
//! * `C   = sum (-1)^n Psi_n Upsilon_n^dagger`
//! * `CPT = (sum Psi_n Upsilon_n^T) K0`
//!
//! The sign `(-1)^n` follows the eigenvalue ordering of the system.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::{
    c, dot_adjoint, outer_adjoint, outer_transpose, vector_norm, ComplexSquareMatrix, Tolerance,
};
use crate::metric::Metric;
use crate::operator::{symmetry_residual, OperatorRep};
use crate::spectral::BiorthoSystem;

fn weighted_sum<F>(bio: &BiorthoSystem, alternate: bool, term: F) -> ComplexSquareMatrix
where
    F: Fn(usize) -> ComplexSquareMatrix,
{
    let mut acc = ComplexSquareMatrix::zeros(bio.dim());
    for n in 0..bio.len() {
        let t = term(n);
        acc = if alternate && n % 2 == 1 {
            &acc - &t
        } else {
            &acc + &t
        };
    }
    acc
}

pub fn build_parity(bio: &BiorthoSystem) -> OperatorRep {
    let psi = bio.psi();
    OperatorRep::linear(weighted_sum(bio, true, |n| outer_adjoint(&psi[n], &psi[n])))
}

pub fn build_time_reversal(bio: &BiorthoSystem) -> OperatorRep {
    let ups = bio.upsilon();
    OperatorRep::antilinear(weighted_sum(bio, false, |n| outer_transpose(&ups[n], &ups[n])))
}

pub fn build_pt(bio: &BiorthoSystem) -> OperatorRep {
    let (psi, ups) = (bio.psi(), bio.upsilon());
    OperatorRep::antilinear(weighted_sum(bio, true, |n| outer_transpose(&psi[n], &ups[n])))
}

/// `sum Psi_n Upsilon_n^dagger`, which must be the identity.
pub fn completeness(bio: &BiorthoSystem) -> ComplexSquareMatrix {
    let (psi, ups) = (bio.psi(), bio.upsilon());
    weighted_sum(bio, false, |n| outer_adjoint(&psi[n], &ups[n]))
}

pub fn build_charge(bio: &BiorthoSystem, tol: &Tolerance) -> Result<OperatorRep> {
    let resolution = completeness(bio);
    let id = ComplexSquareMatrix::identity(bio.dim());
    if !resolution.is_close(&id, tol) {
        return Err(Error::CompletenessViolation {
            defect: resolution.distance(&id),
        });
    }
    let (psi, ups) = (bio.psi(), bio.upsilon());
    Ok(OperatorRep::linear(weighted_sum(bio, true, |n| {
        outer_adjoint(&psi[n], &ups[n])
    })))
}

pub fn build_cpt(bio: &BiorthoSystem) -> OperatorRep {
    let (psi, ups) = (bio.psi(), bio.upsilon());
    OperatorRep::antilinear(weighted_sum(bio, false, |n| outer_transpose(&psi[n], &ups[n])))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualEntry {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// Failing a must-pass entry invalidates the suite; the others are
    /// informational (e.g. `[H, P]`, expected nonzero for non-Hermitian `H`).
    pub must_pass: bool,
}

impl ResidualEntry {
    pub fn passed(&self) -> bool {
        self.value <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
}

impl ResidualReport {
    fn push(&mut self, name: &str, value: f64, bound: f64, must_pass: bool) {
        self.entries.push(ResidualEntry {
            name: name.to_string(),
            value,
            bound,
            must_pass,
        });
    }

    pub fn get(&self, name: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.get(name).map(|e| e.value)
    }

    pub fn first_failure(&self) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.must_pass && !e.passed())
    }

    pub fn all_must_pass_hold(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn check(&self) -> Result<()> {
        match self.first_failure() {
            Some(bad) => Err(Error::SuiteInvalid {
                check: bad.name.clone(),
                residual: bad.value,
            }),
            None => Ok(()),
        }
    }
}

/// The five operators plus the metrics they were built under.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrySuite {
    pub p: OperatorRep,
    pub t: OperatorRep,
    pub c: OperatorRep,
    pub pt: OperatorRep,
    pub cpt: OperatorRep,
    pub eta: Metric,
    pub eta_plus: Metric,
    pub residuals: BTreeMap<String, f64>,
}

impl SymmetrySuite {
    /// Builds all five operators and runs [`verify_suite`]; any failing
    /// must-pass check is returned as [`Error::SuiteInvalid`].
    pub fn build(
        h: &ComplexSquareMatrix,
        bio: &BiorthoSystem,
        eta: Metric,
        eta_plus: Metric,
        tol: &Tolerance,
    ) -> Result<(SymmetrySuite, ResidualReport)> {
        let (suite, report) = Self::assemble(h, bio, eta, eta_plus, tol)?;
        report.check()?;
        Ok((suite, report))
    }

    /// Like [`SymmetrySuite::build`] but keeps the suite when checks fail.
    pub fn assemble(
        h: &ComplexSquareMatrix,
        bio: &BiorthoSystem,
        eta: Metric,
        eta_plus: Metric,
        tol: &Tolerance,
    ) -> Result<(SymmetrySuite, ResidualReport)> {
        let mut suite = SymmetrySuite {
            p: build_parity(bio),
            t: build_time_reversal(bio),
            c: build_charge(bio, tol)?,
            pt: build_pt(bio),
            cpt: build_cpt(bio),
            eta,
            eta_plus,
            residuals: BTreeMap::new(),
        };
        let report = measure_suite(h, &suite, bio, tol)?;
        suite.residuals = report
            .entries
            .iter()
            .map(|e| (e.name.clone(), e.value))
            .collect();
        Ok((suite, report))
    }

    pub fn named(&self) -> [(&'static str, &OperatorRep); 5] {
        [
            ("P", &self.p),
            ("T", &self.t),
            ("C", &self.c),
            ("PT", &self.pt),
            ("CPT", &self.cpt),
        ]
    }
}

fn involution_residual(op: &OperatorRep) -> (f64, f64) {
    let sq = op.square();
    let id = ComplexSquareMatrix::identity(op.dim());
    let value = if sq.is_antilinear() {
        f64::INFINITY
    } else {
        sq.matrix().distance(&id)
    };
    (value, sq.matrix().frobenius_norm().max(id.frobenius_norm()))
}

/// Largest `||X v_n - s_n w_n||` over the basis, and its natural scale.
fn action_residual<F>(op: &OperatorRep, bio: &BiorthoSystem, law: F) -> (f64, f64)
where
    F: Fn(usize) -> (usize, f64, bool),
{
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for n in 0..bio.len() {
        // law(n) = (index, sign, acts on upsilon?) with target sign * psi[index]
        let (idx, sign, on_upsilon) = law(n);
        let input = if on_upsilon {
            &bio.upsilon()[n]
        } else {
            &bio.psi()[n]
        };
        let out = op.apply(input).expect("dimensions agree");
        let target = &bio.psi()[idx] * c(sign, 0.0);
        worst = worst.max(vector_norm(&(out - &target)));
        scale = scale.max(op.matrix().frobenius_norm() * vector_norm(input));
    }
    (worst, scale)
}

/// [`measure_suite`], failing with [`Error::SuiteInvalid`] on the first
/// must-pass entry out of bounds.
pub fn verify_suite(
    h: &ComplexSquareMatrix,
    suite: &SymmetrySuite,
    bio: &BiorthoSystem,
    tol: &Tolerance,
) -> Result<ResidualReport> {
    let report = measure_suite(h, suite, bio, tol)?;
    report.check()?;
    Ok(report)
}

/// Involutions, commutators, action laws and composition consistency.
///
/// `[H, P]` and `[H, T]` are reported but never required to vanish.
pub fn measure_suite(
    h: &ComplexSquareMatrix,
    suite: &SymmetrySuite,
    bio: &BiorthoSystem,
    tol: &Tolerance,
) -> Result<ResidualReport> {
    let mut report = ResidualReport::default();
    for (name, op) in [("C", &suite.c), ("PT", &suite.pt), ("CPT", &suite.cpt)] {
        let (value, scale) = involution_residual(op);
        report.push(&format!("involution.{name}"), value, tol.bound(scale), true);
    }

    let hn = h.frobenius_norm();
    for (name, op) in suite.named() {
        let value = symmetry_residual(h, op)?;
        let must = matches!(name, "C" | "PT" | "CPT");
        report.push(
            &format!("commutator.{name}"),
            value,
            tol.bound(hn * op.matrix().frobenius_norm()),
            must,
        );
    }

    type Law<'a> = (&'static str, &'a OperatorRep, fn(usize) -> (usize, f64, bool));
    let laws: [Law; 4] = [
        ("action.P_upsilon", &suite.p, |n| (n, BiorthoSystem::alternation(n), true)),
        ("action.PT_psi", &suite.pt, |n| (n, BiorthoSystem::alternation(n), false)),
        ("action.C_psi", &suite.c, |n| (n, BiorthoSystem::alternation(n), false)),
        ("action.CPT_psi", &suite.cpt, |n| (n, 1.0, false)),
    ];
    for (name, op, law) in laws {
        let (value, scale) = action_residual(op, bio, law);
        report.push(name, value, tol.bound(scale), true);
    }
    // T maps Psi_n onto Upsilon_n rather than onto a multiple of Psi_n
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (psi, ups) in bio.psi().iter().zip(bio.upsilon()) {
        let out = suite.t.apply(psi)?;
        worst = worst.max(vector_norm(&(out - ups)));
        scale = scale.max(suite.t.matrix().frobenius_norm() * vector_norm(psi));
    }
    report.push("action.T_psi", worst, tol.bound(scale), true);

    let pt_from_parts = suite.p.compose(&suite.t)?;
    report.push(
        "composition.PT",
        pt_from_parts.distance(&suite.pt),
        tol.bound(pt_from_parts.matrix().frobenius_norm()),
        true,
    );
    let cpt_from_parts = suite.c.compose(&suite.pt)?;
    report.push(
        "composition.CPT",
        cpt_from_parts.distance(&suite.cpt),
        tol.bound(cpt_from_parts.matrix().frobenius_norm()),
        true,
    );

    for (name, op) in [("P", &suite.p), ("T", &suite.t)] {
        let (value, scale) = involution_residual(op);
        report.push(&format!("involution.{name}"), value, tol.bound(scale), false);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P2T2Condition {
    /// `(-1)^(m+n) Psi_m^dagger Psi_n = Upsilon_m^dagger Upsilon_n` for all m, n.
    pub condition_holds: bool,
    pub t2_equals_p2: bool,
    /// Largest entrywise violation of the Gram condition.
    pub condition_defect: f64,
    /// `||T^2 - P^2||_F`.
    pub t2_p2_distance: f64,
}

pub fn p2_t2_condition(bio: &BiorthoSystem, tol: &Tolerance) -> P2T2Condition {
    let (psi, ups) = (bio.psi(), bio.upsilon());
    let mut defect = 0.0f64;
    let mut scale = 0.0f64;
    for m in 0..bio.len() {
        for n in 0..bio.len() {
            let sign = BiorthoSystem::alternation(m + n);
            let lhs = dot_adjoint(&psi[m], &psi[n]) * sign;
            let rhs = dot_adjoint(&ups[m], &ups[n]);
            defect = defect.max((lhs - rhs).norm());
            scale = scale.max(lhs.norm()).max(rhs.norm());
        }
    }
    let p2 = build_parity(bio).square();
    let t2 = build_time_reversal(bio).square();
    let distance = p2.distance(&t2);
    let op_scale = p2.matrix().frobenius_norm().max(t2.matrix().frobenius_norm());
    P2T2Condition {
        condition_holds: defect <= tol.bound(scale),
        t2_equals_p2: distance <= tol.bound(op_scale),
        condition_defect: defect,
        t2_p2_distance: distance,
    }
}
