//! Acceptance criteria: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::{FRAC_PI_8, SQRT_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};

use num_complex::Complex64;
use pseudoherm::fixtures::{
    family_eq23, family_eq3, fixture_i1, fixture_i2, random_conjugate_paired, random_hermitian,
    random_real_spectrum, PaperFixture,
};
use pseudoherm::metric::{
    metric_conjugate_paired, pseudo_hermiticity_residual, solve_metric_space,
};
use pseudoherm::operator::symmetry_residual;
use pseudoherm::products::{rival_inner_transpose, x_inner};
use pseudoherm::spectral::eig;
use pseudoherm::symmetry::p2_t2_condition;
use pseudoherm::{
    analyze_conjugate_paired, analyze_fixture, analyze_real, c, CVector, ComplexSquareMatrix,
    OperatorRep, RealAnalysis, SpectralOptions, Tolerance,
};
use pseudoherm_cli::{fixture_to_file, parse_matrix_file, write_matrix_file};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

// Written as `!cond` on purpose so that a NaN fails the check.
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn m2(rows: [[Complex64; 2]; 2]) -> ComplexSquareMatrix {
    ComplexSquareMatrix::from_rows(&rows).unwrap()
}

fn z() -> Complex64 {
    c(0.0, 0.0)
}

fn i() -> Complex64 {
    c(0.0, 1.0)
}

fn id(n: usize) -> ComplexSquareMatrix {
    ComplexSquareMatrix::identity(n)
}

/// Elementwise comparison including the antilinear flag.
fn op_close(got: &OperatorRep, matrix: &ComplexSquareMatrix, antilinear: bool, eps: f64, what: &str) -> Outcome {
    ensure!(got.is_antilinear() == antilinear, "{what}: antilinear flag is {}", got.is_antilinear());
    let d = got.matrix().max_entry_distance(matrix);
    ensure!(d <= eps, "{what}: entry distance {d:e} > {eps:e}");
    Ok(())
}

fn fixture_analysis(fx: &PaperFixture) -> Result<RealAnalysis, String> {
    analyze_fixture(fx, tol()).map_err(|e| format!("{}: {e}", fx.name))
}

/// Random metric `D^-dagger W D^-1` with random signs in `W`: every column
/// of `D` then has eta-norm `w_n`.
fn random_indefinite_case(k: u64) -> (ComplexSquareMatrix, ComplexSquareMatrix) {
    let n = 2 + (k % 5) as usize;
    let g = random_real_spectrum(n, 1000 + k).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(k);
    let w: Vec<Complex64> = (0..n)
        .map(|_| if rng.random_bool(0.5) { c(1.0, 0.0) } else { c(-1.0, 0.0) })
        .collect();
    let dinv = g.d.inverse().unwrap();
    let eta = &(&dinv.adjoint() * &ComplexSquareMatrix::from_diagonal(&w).unwrap()) * &dinv;
    (g.h, eta)
}

type Case = (String, ComplexSquareMatrix, RealAnalysis);

fn all_suites() -> Result<Vec<Case>, String> {
    let mut out = Vec::new();
    for (name, fx) in [
        ("I1", fixture_i1(2.0).unwrap()),
        ("I2", fixture_i2(3.0, 1.0, 1.0, 2.0).unwrap()),
        ("Eq23", family_eq23(0.0, 3.0, 5.0).unwrap()),
    ] {
        out.push((name.to_string(), fx.hamiltonian.clone(), fixture_analysis(&fx)?));
    }
    for k in 0..100 {
        let (h, eta) = random_indefinite_case(k);
        let a = analyze_real(&h, &eta, &SpectralOptions::default())
            .map_err(|e| format!("random case {k}: {e}"))?;
        out.push((format!("random case {k}"), h, a));
    }
    Ok(out)
}

fn criterion_1() -> Outcome {
    let fx = family_eq3(1.0, 1.0, 4.0).unwrap();
    let sys = eig(&fx.hamiltonian, &tol()).map_err(|e| e.to_string())?;
    for (got, want) in sys.values.iter().zip([3.0, -1.0]) {
        ensure!((got - c(want, 0.0)).norm() <= 1e-12, "eigenvalue {got} vs {want}");
    }
    let fam = solve_metric_space(&fx.hamiltonian, &tol());
    ensure!(fam.dimension() == 2, "family dimension {}", fam.dimension());
    let r = c(2.0, 0.0);
    let s = c(1.0, 1.0);
    let metrics = [
        ("eta1", m2([[z(), -i()], [i(), z()]])),
        ("eta2", m2([[r * r, -s], [s, c(1.0, 0.0)]])),
        ("eta3", m2([[r, z()], [z(), r.inv()]])),
        ("eta4", m2([[z(), c(-1.0, 0.0)], [c(1.0, 0.0), z()]])),
    ];
    for (name, eta) in metrics {
        let res = pseudo_hermiticity_residual(&fx.hamiltonian, &eta).map_err(|e| e.to_string())?;
        ensure!(res <= 1e-10, "{name}: residual {res:e}");
        let defect = fam.projection_defect(&eta);
        ensure!(defect <= 1e-9, "{name}: projection defect {defect:e}");
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let a = fixture_analysis(&fixture_i1(2.0).unwrap())?;
    let s = &a.suite;
    let eta_plus = m2([[c(2.0, 0.0), z()], [z(), c(0.5, 0.0)]]);
    let d = a.eta_plus.matrix().max_entry_distance(&eta_plus);
    ensure!(d <= 1e-10, "eta_+ distance {d:e}");
    op_close(&s.p, &m2([[z(), -i()], [i(), z()]]), false, 1e-10, "P")?;
    op_close(&s.t, &m2([[z(), -i()], [-i(), z()]]), true, 1e-10, "T")?;
    op_close(&s.c, &m2([[z(), -i() * 0.5], [i() * 2.0, z()]]), false, 1e-10, "C")?;
    op_close(&s.pt, &m2([[c(-1.0, 0.0), z()], [z(), c(1.0, 0.0)]]), true, 1e-10, "PT")?;
    op_close(&s.cpt, &m2([[z(), -i() * 0.5], [-i() * 2.0, z()]]), true, 1e-10, "CPT")?;

    let cp = s.c.compose(&s.p).unwrap();
    let cp_inv = cp.matrix().inverse().ok_or("CP is singular")?;
    let pc = s.p.compose(&s.c).unwrap();
    ensure!(cp_inv.max_entry_distance(&eta_plus) <= 1e-10, "(CP)^-1 != eta_+");
    op_close(&pc, &eta_plus, false, 1e-10, "PC")?;
    op_close(&s.t.square(), &id(2), false, 1e-10, "T^2")?;
    op_close(&s.p.square(), &id(2), false, 1e-10, "P^2")?;
    Ok(())
}

fn criterion_3() -> Outcome {
    let fx = fixture_i2(3.0, 1.0, 1.0, 2.0).unwrap();
    let a = fixture_analysis(&fx)?;
    for (got, want) in a.spectral.eigenvalues.iter().zip([2.0 + SQRT_2, 2.0 - SQRT_2]) {
        ensure!((got - c(want, 0.0)).norm() <= 1e-10, "eigenvalue {got} vs {want}");
    }
    let eta = m2([[c(2.0, 0.0), z()], [z(), c(0.5, 0.0)]]);
    let d = a.eta_plus.matrix().max_entry_distance(&eta);
    ensure!(d <= 1e-10, "eta_+ differs from eta by {d:e}");

    let (x, theta) = (2.0, FRAC_PI_8);
    let (s2, c2) = (2.0 * theta).sin_cos();
    let s = &a.suite;
    op_close(&s.p, &m2([[c(c2 / x, 0.0), -i() * s2], [i() * s2, c(-x * c2, 0.0)]]), false, 1e-10, "P")?;
    op_close(&s.t, &m2([[c(x * c2, 0.0), i() * s2], [i() * s2, c(c2 / x, 0.0)]]), true, 1e-10, "T")?;
    op_close(&s.c, &m2([[c(c2, 0.0), -i() * (s2 / x)], [i() * (x * s2), c(-c2, 0.0)]]), false, 1e-10, "C")?;

    let t2p2 = s.t.square().matrix().distance(s.p.square().matrix());
    ensure!(t2p2 > 0.1, "||T^2 - P^2|| = {t2p2}");
    let cp_inv = s.c.compose(&s.p).unwrap().matrix().inverse().ok_or("CP is singular")?;
    let pc = s.p.compose(&s.c).unwrap();
    let gap = pc.matrix().distance(&cp_inv);
    ensure!(gap > 0.1, "||PC - (CP)^-1|| = {gap}");
    let d = cp_inv.distance(a.eta_plus.matrix());
    ensure!(d <= 1e-10, "||(CP)^-1 - eta_+|| = {d:e}");
    for (name, op) in [("C", &s.c), ("PT", &s.pt), ("CPT", &s.cpt)] {
        let r = symmetry_residual(&fx.hamiltonian, op).map_err(|e| e.to_string())?;
        ensure!(r <= 1e-10, "[H, {name}] = {r:e}");
    }
    Ok(())
}

fn involution_and_actions(name: &str, a: &RealAnalysis) -> Outcome {
    let s = &a.suite;
    let n = a.bio.len();
    for (label, op) in [("C", &s.c), ("PT", &s.pt), ("CPT", &s.cpt)] {
        let sq = op.square();
        ensure!(!sq.is_antilinear(), "{name}: {label}^2 is antilinear");
        let d = sq.matrix().distance(&id(n));
        ensure!(d <= 1e-8, "{name}: ||{label}^2 - I|| = {d:e}");
    }
    let (psi, ups) = (a.bio.psi(), a.bio.upsilon());
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let checks = [
            ("T psi = upsilon", s.t.apply(&psi[k]).unwrap() - &ups[k]),
            ("C psi = (-1)^n psi", s.c.apply(&psi[k]).unwrap() - &psi[k] * c(sign, 0.0)),
            ("CPT psi = psi", s.cpt.apply(&psi[k]).unwrap() - &psi[k]),
            ("P upsilon = (-1)^n psi", s.p.apply(&ups[k]).unwrap() - &psi[k] * c(sign, 0.0)),
        ];
        for (law, diff) in checks {
            ensure!(diff.norm() <= 1e-8, "{name}: {law} at n={k}: {:e}", diff.norm());
        }
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    for (name, _, a) in all_suites()? {
        involution_and_actions(&name, &a)?;
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    for k in 0..100u64 {
        let n = 2 + (k % 5) as usize;
        let g = random_real_spectrum(n, k).unwrap();
        let sys = eig(&g.h, &tol()).map_err(|e| format!("seed {k}: {e}"))?;
        let im = sys.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        ensure!(im <= 1e-8, "seed {k}: max |Im E| = {im:e}");
        let eta_plus = (&g.d * &g.d.adjoint()).inverse().unwrap();
        let r = pseudo_hermiticity_residual(&g.h, &eta_plus).unwrap();
        ensure!(r <= 1e-8, "seed {k}: residual of (DD^dagger)^-1 = {r:e}");
    }
    for k in 0..50u64 {
        let pairs = 1 + (k % 3) as usize;
        let g = random_conjugate_paired(pairs, k).unwrap();
        let pairing: Vec<(usize, usize)> = (0..pairs).map(|p| (2 * p, 2 * p + 1)).collect();
        let eta_bar = metric_conjugate_paired(&g.d, &pairing, &tol()).map_err(|e| e.to_string())?;
        let r = pseudo_hermiticity_residual(&g.h, eta_bar.matrix()).unwrap();
        ensure!(r <= 1e-8, "pair seed {k}: residual of (DSD^dagger)^-1 = {r:e}");
        let a = analyze_conjugate_paired(&g.h, &tol()).map_err(|e| format!("pair seed {k}: {e}"))?;
        ensure!(a.residual <= 1e-8, "pair seed {k}: computed eta_bar residual {:e}", a.residual);
    }
    Ok(())
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    CVector::from_iterator(
        n,
        (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (name, h, a) in all_suites()? {
        let n = a.bio.len();
        let ep = a.eta_plus.matrix();
        for _ in 0..100 {
            let v = random_vector(n, &mut rng);
            let q = v.dotc(&ep.mul_vec(&v).unwrap());
            ensure!(q.re > 0.0, "{name}: v^dagger eta_+ v = {q}");
        }
        let psi = a.bio.psi();
        for (label, op) in [("C", &a.suite.c), ("PT", &a.suite.pt), ("CPT", &a.suite.cpt)] {
            for m in 0..n {
                for k in 0..n {
                    let g = x_inner(&h, op, &psi[m], &psi[k], ep, &Tolerance::new(1e-8, 1e-8).unwrap())
                        .map_err(|e| format!("{name}: {label}: {e}"))?;
                    ensure!(g.im.abs() <= 1e-8, "{name}: {label} Gram ({m},{k}) = {g}");
                    if m == k {
                        let unit = (g.re.abs() - 1.0).abs();
                        ensure!(unit <= 1e-8, "{name}: {label} diagonal {m} = {g}");
                        if label == "CPT" {
                            ensure!((g.re - 1.0).abs() <= 1e-8, "{name}: CPT diagonal {m} = {g}");
                        }
                    } else {
                        ensure!(g.norm() <= 1e-8, "{name}: {label} off-diagonal ({m},{k}) = {g}");
                    }
                }
            }
        }
        if name == "I1" {
            let pt: Vec<f64> = (0..n)
                .map(|k| x_inner(&h, &a.suite.pt, &psi[k], &psi[k], ep, &tol()).unwrap().re)
                .collect();
            ensure!(
                (pt[0] - 1.0).abs() <= 1e-8 && (pt[1] + 1.0).abs() <= 1e-8,
                "I1: PT diagonal {pt:?}"
            );
        }
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let one = OperatorRep::identity(2);
    let a = fixture_analysis(&fixture_i1(2.0).unwrap())?;
    let psi = a.bio.psi();
    let v = rival_inner_transpose(&one, &psi[0], &psi[1]).unwrap();
    let r = 2.0;
    let printed = c(0.0, -(1.0 + r * r) / (2.0 * r));
    ensure!((v - c(0.0, -1.25)).norm() <= 1e-10 && (v - printed).norm() <= 1e-10, "I1: {v}");

    let a = fixture_analysis(&family_eq23(0.0, 3.0, 5.0).unwrap())?;
    let psi = a.bio.psi();
    let v = rival_inner_transpose(&one, &psi[0], &psi[1]).unwrap();
    ensure!(v.norm() <= 1e-12, "Eq23: psi_0' psi_1 = {v}");
    let raw = rival_inner_transpose(
        &one,
        &CVector::from_vec(vec![c(1.0, 0.0), c(0.0, -3.0)]),
        &CVector::from_vec(vec![c(1.0, 0.0), c(0.0, -1.0 / 3.0)]),
    )
    .unwrap();
    ensure!(raw.norm() <= 1e-12, "Eq23 un-normalized: {raw}");

    let a = fixture_analysis(&fixture_i2(3.0, 1.0, 1.0, 2.0).unwrap())?;
    let psi = a.bio.psi();
    let v = rival_inner_transpose(&one, &psi[0], &psi[1]).unwrap();
    ensure!(v.norm() > 0.1, "I2: |Psi_0' Psi_1| = {}", v.norm());
    Ok(())
}

fn criterion_8() -> Outcome {
    let named = [
        ("I1", fixture_i1(2.0).unwrap(), Some(true)),
        ("I2", fixture_i2(3.0, 1.0, 1.0, 2.0).unwrap(), Some(false)),
        ("Hermitian limit", fixture_i2(3.0, 1.0, 1.0, 1.0).unwrap(), None),
    ];
    for (name, fx, expected) in named {
        let a = fixture_analysis(&fx)?;
        let p = p2_t2_condition(&a.bio, &tol());
        ensure!(
            p.condition_holds == p.t2_equals_p2,
            "{name}: condition {} vs T^2=P^2 {}",
            p.condition_holds,
            p.t2_equals_p2
        );
        if let Some(want) = expected {
            ensure!(p.t2_equals_p2 == want, "{name}: T^2 = P^2 is {}", p.t2_equals_p2);
        }
    }
    for k in 0..100 {
        let (h, eta) = random_indefinite_case(k);
        let a = analyze_real(&h, &eta, &SpectralOptions::default())
            .map_err(|e| format!("random case {k}: {e}"))?;
        let p = p2_t2_condition(&a.bio, &tol());
        ensure!(
            p.condition_holds == p.t2_equals_p2,
            "random case {k}: condition {} (defect {:e}) vs T^2=P^2 {} (distance {:e})",
            p.condition_holds,
            p.condition_defect,
            p.t2_equals_p2,
            p.t2_p2_distance
        );
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    for k in 0..50u64 {
        let n = 2 + (k % 5) as usize;
        let h = random_hermitian(n, k).unwrap();
        let a = analyze_real(&h, &id(n), &SpectralOptions::default())
            .map_err(|e| format!("seed {k}: {e}"))?;
        let d = a.eta_plus.matrix().distance(&id(n));
        ensure!(d <= 1e-8, "seed {k}: ||eta_+ - I|| = {d:e}");
        for (label, op) in [("P", &a.suite.p), ("T", &a.suite.t)] {
            let sq = op.square();
            ensure!(
                !sq.is_antilinear() && sq.matrix().distance(&id(n)) <= 1e-8,
                "seed {k}: {label}^2 != I"
            );
        }
        for (label, op) in a.suite.named() {
            let r = symmetry_residual(&h, op).unwrap();
            ensure!(r <= 1e-8, "seed {k}: [H, {label}] = {r:e}");
        }
    }
    Ok(())
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_pseudoherm"))
        .args(args)
        .env_remove("PSEUDOHERM_TOL")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fixtures = [
        ("i1", fixture_i1(2.0).unwrap()),
        ("i2", fixture_i2(3.0, 1.0, 1.0, 2.0).unwrap()),
        ("eq23", family_eq23(0.0, 3.0, 5.0).unwrap()),
        ("eq3", family_eq3(1.0, 1.0, 4.0).unwrap()),
    ];
    for (name, fx) in fixtures {
        let file = fixture_to_file(&fx, &tol()).map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("{name}.json"));
        write_matrix_file(&path, &file).map_err(|e| e.to_string())?;
        let back = parse_matrix_file(&path).map_err(|e| e.to_string())?;
        ensure!(back == file, "{name}: parse(write(file)) differs");
        let mut args = vec!["analyze", path.to_str().unwrap()];
        if file.phases.is_some() {
            args.extend(["--phases", "file"]);
        }
        let (code1, out1) = run_cli(&args);
        let (code2, out2) = run_cli(&args);
        ensure!(code1 == 0, "{name}: exit code {code1}");
        ensure!(code1 == code2 && out1 == out2, "{name}: json differs between runs");
        let report: serde_json::Value = serde_json::from_slice(&out1).map_err(|e| e.to_string())?;
        ensure!(report["verdicts"]["all_pass"] == true, "{name}: verdicts fail");
    }

    let write = |name: &str, text: &str| -> String {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let cases = [
        ("malformed", write("bad.json", "{\"n\": 2, \"H\": [[[1, 0]"), 3),
        ("non-square", write("ns.json", r#"{"n":2,"H":[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]]]}"#), 3),
        ("mixed spectrum", write("mixed.json", r#"{"n":2,"H":[[[1,0],[0,0]],[[0,0],[0,1]]]}"#), 4),
        ("degenerate spectrum", write("degen.json", r#"{"n":2,"H":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#), 4),
    ];
    for (label, path, want) in cases {
        let (code, _) = run_cli(&["analyze", &path]);
        ensure!(code == want, "{label}: exit code {code}, expected {want}");
    }
    let (code, _) = run_cli(&["analyze", "--no-such-flag"]);
    ensure!(code == 2, "usage error: exit code {code}");
    ensure!(Path::new(&dir.path().join("i1.json")).exists(), "fixture file missing");
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 metric family of the four-metric example", criterion_1),
        ("2 illustration I1 operators", criterion_2),
        ("3 illustration I2 operators", criterion_3),
        ("4 involutions and action laws", criterion_4),
        ("5 forward constructions are pseudo-Hermitian", criterion_5),
        ("6 positivity and X-inner definiteness", criterion_6),
        ("7 rival transpose products", criterion_7),
        ("8 Gram condition versus T^2 = P^2", criterion_8),
        ("9 Hermitian limit", criterion_9),
        ("10 CLI round trip and exit codes", criterion_10),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(()) => println!("PASS  criterion {name}"),
            Err(why) => {
                println!("FAIL  criterion {name}: {why}");
                failed.push(name);
            }
        }
    }
    if failed.is_empty() {
        println!("all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
