//! Parameterized Hamiltonian families with known metrics and symmetry
//! operators, plus seeded random constructions used as oracles.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{c, vector, CVector, ComplexSquareMatrix, Tolerance};
use crate::metric::Metric;
use crate::operator::OperatorRep;
use crate::spectral::{PhasePolicy, SpectralOptions};

/// Largest dimension accepted by the random generators.
pub const MAX_RANDOM_DIM: usize = 16;

/// Redraw `D` until its Frobenius condition number is below this.
pub const MAX_RANDOM_CONDITION: f64 = 1e3;

/// Minimum spacing between random eigenvalues, and minimum `|Im|` of a
/// random conjugate pair.
pub const MIN_RANDOM_GAP: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    Scalar(Complex64),
    Values(Vec<Complex64>),
    Matrix(ComplexSquareMatrix),
    Operator(OperatorRep),
    Flag(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaperFixture {
    pub name: String,
    pub hamiltonian: ComplexSquareMatrix,
    pub fundamental_metric: Metric,
    /// Eigenvectors with the phases the expected operators were derived in.
    pub pinned_eigenvectors: Option<Vec<CVector>>,
    pub expected: BTreeMap<String, Expected>,
    /// False when the parameters put the family on its conjugate-pair branch.
    pub real_spectrum: bool,
}

impl PaperFixture {
    fn new(name: String, hamiltonian: ComplexSquareMatrix, eta: ComplexSquareMatrix) -> Result<Self> {
        let tol = Tolerance::default();
        Ok(Self {
            name,
            hamiltonian,
            fundamental_metric: Metric::new(eta, &tol)?,
            pinned_eigenvectors: None,
            expected: BTreeMap::new(),
            real_spectrum: true,
        })
    }

    fn expect(&mut self, key: &str, value: Expected) {
        self.expected.insert(key.to_string(), value);
    }

    pub fn expected_matrix(&self, key: &str) -> Option<&ComplexSquareMatrix> {
        match self.expected.get(key)? {
            Expected::Matrix(m) => Some(m),
            Expected::Operator(op) => Some(op.matrix()),
            _ => None,
        }
    }

    pub fn expected_operator(&self, key: &str) -> Option<&OperatorRep> {
        match self.expected.get(key)? {
            Expected::Operator(op) => Some(op),
            _ => None,
        }
    }

    pub fn expected_values(&self, key: &str) -> Option<&[Complex64]> {
        match self.expected.get(key)? {
            Expected::Values(v) => Some(v),
            _ => None,
        }
    }

    pub fn expected_scalar(&self, key: &str) -> Option<Complex64> {
        match self.expected.get(key)? {
            Expected::Scalar(z) => Some(*z),
            _ => None,
        }
    }

    pub fn expected_flag(&self, key: &str) -> Option<bool> {
        match self.expected.get(key)? {
            Expected::Flag(b) => Some(*b),
            _ => None,
        }
    }

    /// Spectral options that reproduce the pinned phases, if any.
    pub fn spectral_options(&self, tol: Tolerance) -> SpectralOptions {
        let mut opts = SpectralOptions::with_tol(tol);
        if let Some(pinned) = &self.pinned_eigenvectors {
            opts.phases = PhasePolicy::Aligned(pinned.clone());
        }
        opts
    }
}

fn m2(rows: [[Complex64; 2]; 2]) -> ComplexSquareMatrix {
    ComplexSquareMatrix::from_rows(&rows).expect("2x2 literal")
}

fn finite(name: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name}: parameters must be finite")))
    }
}

/// `H = [[a, -ib], [ic, a]]` with its four metrics
/// `eta_1 = [[0, -i], [i, 0]]`, `eta_2 = [[r^2, -s], [s, 1]]`,
/// `eta_3 = diag(r, 1/r)`, `eta_4 = [[0, -1], [1, 0]]`, `r = sqrt(c/b)`.
///
/// `eta_2` is taken at `s = 1 + i`. Eigenvalues `a +- sqrt(bc)`; for
/// `bc < 0` the fixture is still built but flagged as conjugate-paired.
pub fn family_eq3(a: f64, b: f64, cc: f64) -> Result<PaperFixture> {
    family_eq3_with_s(a, b, cc, c(1.0, 1.0))
}

pub fn family_eq3_with_s(a: f64, b: f64, cc: f64, s: Complex64) -> Result<PaperFixture> {
    finite("family_eq3", &[a, b, cc, s.re, s.im])?;
    if b == 0.0 || cc == 0.0 {
        return Err(Error::InvalidParameter(
            "family_eq3: b and c must be nonzero".into(),
        ));
    }
    let i = c(0.0, 1.0);
    let h = m2([[c(a, 0.0), -i * b], [i * cc, c(a, 0.0)]]);
    let r = c(cc / b, 0.0).sqrt();
    let eta1 = m2([[c(0.0, 0.0), -i], [i, c(0.0, 0.0)]]);
    let eta2 = m2([[r * r, -s], [s, c(1.0, 0.0)]]);
    let eta3 = m2([[r, c(0.0, 0.0)], [c(0.0, 0.0), r.inv()]]);
    let eta4 = m2([[c(0.0, 0.0), c(-1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]);

    let root = c(b * cc, 0.0).sqrt();
    let mut fx = PaperFixture::new(format!("eq3(a={a},b={b},c={cc})"), h, eta1.clone())?;
    fx.real_spectrum = b * cc > 0.0;
    fx.expect("eigenvalues", Expected::Values(vec![c(a, 0.0) + root, c(a, 0.0) - root]));
    fx.expect("r", Expected::Scalar(r));
    fx.expect("eta1", Expected::Matrix(eta1));
    fx.expect("eta2", Expected::Matrix(eta2));
    fx.expect("eta3", Expected::Matrix(eta3));
    fx.expect("eta4", Expected::Matrix(eta4));
    fx.expect("family_dimension", Expected::Scalar(c(2.0, 0.0)));
    Ok(fx)
}

/// `H = [[a - c, ib], [ib, a + c]]` with `eta = diag(1, -1)`.
///
/// Eigenvalues `a +- sqrt(c^2 - b^2)`. For `b != 0` on the real branch the
/// un-normalized `psi_0 = [1, -ir]`, `psi_1 = [1, -i/r]` with
/// `r = (c + sqrt(c^2 - b^2)) / b` are pinned; they satisfy `psi_0' psi_1 = 0`.
pub fn family_eq23(a: f64, b: f64, cc: f64) -> Result<PaperFixture> {
    finite("family_eq23", &[a, b, cc])?;
    let i = c(0.0, 1.0);
    let h = m2([[c(a - cc, 0.0), i * b], [i * b, c(a + cc, 0.0)]]);
    let eta = ComplexSquareMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]])?;
    let disc = cc * cc - b * b;
    let root = c(disc, 0.0).sqrt();

    let mut fx = PaperFixture::new(format!("eq23(a={a},b={b},c={cc})"), h, eta)?;
    fx.real_spectrum = disc > 0.0;
    fx.expect("eigenvalues", Expected::Values(vec![c(a, 0.0) + root, c(a, 0.0) - root]));
    if b != 0.0 && disc > 0.0 {
        let r = (cc + disc.sqrt()) / b;
        let psi0 = vector(&[c(1.0, 0.0), c(0.0, -r)]);
        let psi1 = vector(&[c(1.0, 0.0), c(0.0, -1.0 / r)]);
        let transpose_product = psi0.dot(&psi1);
        fx.pinned_eigenvectors = Some(vec![psi0, psi1]);
        fx.expect("r", Expected::Scalar(c(r, 0.0)));
        fx.expect("psi0_t_psi1", Expected::Scalar(transpose_product));
    }
    Ok(fx)
}

/// `H = [[a, -ic/x], [icx, b]]` with the Hermitian, generally non-involutory
/// `eta = diag(x, 1/x)` and `theta = atan2(2c, a - b) / 2`.
///
/// Pins `Psi_0 = sqrt(x) [cos(theta)/x, i sin(theta)]` and
/// `Psi_1 = [i sin(theta), x cos(theta)] / sqrt(x)`.
pub fn family_eq28(a: f64, b: f64, cc: f64, x: f64) -> Result<PaperFixture> {
    finite("family_eq28", &[a, b, cc, x])?;
    if x <= 0.0 {
        return Err(Error::InvalidParameter("family_eq28: x must be positive".into()));
    }
    let i = c(0.0, 1.0);
    let h = m2([[c(a, 0.0), -i * (cc / x)], [i * (cc * x), c(b, 0.0)]]);
    let eta = ComplexSquareMatrix::from_real_rows(&[[x, 0.0], [0.0, 1.0 / x]])?;
    let theta = 0.5 * (2.0 * cc).atan2(a - b);
    let (sn, cs) = theta.sin_cos();
    let sx = x.sqrt();
    let psi0 = vector(&[c(cs / sx, 0.0), c(0.0, sx * sn)]);
    let psi1 = vector(&[c(0.0, sn / sx), c(sx * cs, 0.0)]);
    let root = ((a - b).powi(2) + 4.0 * cc * cc).sqrt();

    let mut fx = PaperFixture::new(format!("eq28(a={a},b={b},c={cc},x={x})"), h, eta)?;
    fx.expect(
        "eigenvalues",
        Expected::Values(vec![c(0.5 * (a + b + root), 0.0), c(0.5 * (a + b - root), 0.0)]),
    );
    fx.expect("theta", Expected::Scalar(c(theta, 0.0)));
    fx.pinned_eigenvectors = Some(vec![psi0, psi1]);
    Ok(fx)
}

/// The `eq3` family at `b = 1`, `c = r^2`, with `eta_1` as the fundamental
/// metric and the phases `Psi_0 ~ [-i/r, 1]`, `Psi_1 ~ [1/r, -i]`.
pub fn fixture_i1(r: f64) -> Result<PaperFixture> {
    fixture_i1_with_a(r, 1.0)
}

/// Same as [`fixture_i1`] with a free diagonal `a`; none of the expected
/// operators depend on it.
pub fn fixture_i1_with_a(r: f64, a: f64) -> Result<PaperFixture> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter("fixture_i1: r must be positive".into()));
    }
    let mut fx = family_eq3(a, 1.0, r * r)?;
    fx.name = format!("I1(r={r},a={a})");
    let i = c(0.0, 1.0);
    let z = c(0.0, 0.0);
    let norm = (r / 2.0).sqrt();
    fx.pinned_eigenvectors = Some(vec![
        vector(&[c(0.0, -norm / r), c(norm, 0.0)]),
        vector(&[c(norm / r, 0.0), c(0.0, -norm)]),
    ]);
    fx.expect("signs", Expected::Values(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
    fx.expect("P", Expected::Operator(OperatorRep::linear(m2([[z, -i], [i, z]]))));
    fx.expect("T", Expected::Operator(OperatorRep::antilinear(m2([[z, -i], [-i, z]]))));
    fx.expect(
        "eta_plus",
        Expected::Matrix(m2([[c(r, 0.0), z], [z, c(1.0 / r, 0.0)]])),
    );
    fx.expect("C", Expected::Operator(OperatorRep::linear(m2([[z, -i / r], [i * r, z]]))));
    fx.expect(
        "PT",
        Expected::Operator(OperatorRep::antilinear(m2([[c(-1.0, 0.0), z], [z, c(1.0, 0.0)]]))),
    );
    fx.expect(
        "CPT",
        Expected::Operator(OperatorRep::antilinear(m2([[z, -i / r], [-i * r, z]]))),
    );
    fx.expect("psi0_t_psi1", Expected::Scalar(c(0.0, -(1.0 + r * r) / (2.0 * r))));
    fx.expect("t2_equals_p2", Expected::Flag(true));
    Ok(fx)
}

/// The `eq28` family with the expected `P`, `T`, `C`, `eta_+ = eta` and
/// `(CP)^-1 = eta`.
pub fn fixture_i2(a: f64, b: f64, cc: f64, x: f64) -> Result<PaperFixture> {
    let mut fx = family_eq28(a, b, cc, x)?;
    fx.name = format!("I2(a={a},b={b},c={cc},x={x})");
    let theta = match fx.expected_scalar("theta") {
        Some(t) => t.re,
        None => unreachable!("family_eq28 records theta"),
    };
    let (s2, c2) = (2.0 * theta).sin_cos();
    let (sn, cs) = theta.sin_cos();
    let i = c(0.0, 1.0);
    let p = m2([[c(c2 / x, 0.0), -i * s2], [i * s2, c(-x * c2, 0.0)]]);
    let t = m2([[c(x * c2, 0.0), i * s2], [i * s2, c(c2 / x, 0.0)]]);
    let ch = m2([[c(c2, 0.0), -i * (s2 / x)], [i * (x * s2), c(-c2, 0.0)]]);
    let eta = fx.fundamental_metric.matrix().clone();
    fx.expect("P", Expected::Operator(OperatorRep::linear(p)));
    fx.expect("T", Expected::Operator(OperatorRep::antilinear(t)));
    fx.expect("C", Expected::Operator(OperatorRep::linear(ch)));
    fx.expect("eta_plus", Expected::Matrix(eta.clone()));
    fx.expect("CP_inverse", Expected::Matrix(eta));
    fx.expect(
        "psi0_t_psi1",
        Expected::Scalar(c(0.0, sn * cs * (1.0 + x * x) / x)),
    );
    fx.expect("t2_equals_p2", Expected::Flag(x == 1.0));
    Ok(fx)
}

/// Seeded construction `H = D Lambda D^-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomConstruction {
    pub h: ComplexSquareMatrix,
    pub d: ComplexSquareMatrix,
    pub lambda: Vec<Complex64>,
}

fn check_random_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_RANDOM_DIM {
        return Err(Error::InvalidParameter(format!(
            "random dimension must be in 1..={MAX_RANDOM_DIM}, got {n}"
        )));
    }
    Ok(())
}

/// Entries with real and imaginary parts uniform on `[-1, 1]`, redrawn until
/// the Frobenius condition number is below [`MAX_RANDOM_CONDITION`].
fn random_diagonalizer(n: usize, rng: &mut ChaCha8Rng) -> ComplexSquareMatrix {
    loop {
        let rows: Vec<Vec<Complex64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| c(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
                    .collect()
            })
            .collect();
        let d = ComplexSquareMatrix::from_rows(&rows).expect("square and finite");
        if d.inverse().is_some() && d.condition_number() < MAX_RANDOM_CONDITION {
            return d;
        }
    }
}

fn well_separated(values: &[Complex64]) -> bool {
    values
        .iter()
        .enumerate()
        .all(|(k, a)| values[..k].iter().all(|b| (a - b).norm() > MIN_RANDOM_GAP))
}

fn assemble(d: ComplexSquareMatrix, lambda: Vec<Complex64>) -> RandomConstruction {
    let inv = d.inverse().expect("conditioned");
    let diag = ComplexSquareMatrix::from_diagonal(&lambda).expect("nonempty");
    let h = &(&d * &diag) * &inv;
    RandomConstruction { h, d, lambda }
}

/// Real eigenvalues uniform on `[-5, 5]`, pairwise more than
/// [`MIN_RANDOM_GAP`] apart.
pub fn random_real_spectrum(n: usize, seed: u64) -> Result<RandomConstruction> {
    check_random_dim(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = random_diagonalizer(n, &mut rng);
    let lambda = loop {
        let l: Vec<Complex64> = (0..n).map(|_| c(rng.random_range(-5.0..=5.0), 0.0)).collect();
        if well_separated(&l) {
            break l;
        }
    };
    Ok(assemble(d, lambda))
}

/// Eigenvalues `(lambda_k, conj(lambda_k))` adjacent, `Re` uniform on
/// `[-5, 5]`, `Im` uniform on `[0.1, 5]`.
pub fn random_conjugate_paired(n_pairs: usize, seed: u64) -> Result<RandomConstruction> {
    check_random_dim(2 * n_pairs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = random_diagonalizer(2 * n_pairs, &mut rng);
    let lambda = loop {
        let l: Vec<Complex64> = (0..n_pairs)
            .flat_map(|_| {
                let z = c(
                    rng.random_range(-5.0..=5.0),
                    rng.random_range(MIN_RANDOM_GAP..=5.0),
                );
                [z, z.conj()]
            })
            .collect();
        if well_separated(&l) {
            break l;
        }
    };
    Ok(assemble(d, lambda))
}

/// `(A + A^dagger) / 2` with `A` drawn like the random diagonalizers.
pub fn random_hermitian(n: usize, seed: u64) -> Result<ComplexSquareMatrix> {
    check_random_dim(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| c(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
                .collect()
        })
        .collect();
    let a = ComplexSquareMatrix::from_rows(&rows)?;
    Ok((&a + &a.adjoint()).scale(c(0.5, 0.0)))
}
