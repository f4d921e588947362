use num_complex::Complex64;
use proptest::prelude::*;

use pseudoherm::fixtures::{family_eq3_with_s, random_conjugate_paired, random_real_spectrum};
use pseudoherm::metric::{pseudo_hermiticity_residual, solve_metric_space};
use pseudoherm::spectral::{eta_normalize, PhasePolicy};
use pseudoherm::{
    analyze_conjugate_paired, analyze_real, c, CVector, ComplexSquareMatrix, OperatorRep,
    SpectralOptions, Tolerance,
};

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| c(re, im))
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexSquareMatrix> {
    proptest::collection::vec(complex(), n * n).prop_map(move |v| {
        let rows: Vec<Vec<Complex64>> = v.chunks(n).map(|r| r.to_vec()).collect();
        ComplexSquareMatrix::from_rows(&rows).unwrap()
    })
}

fn cvector(n: usize) -> impl Strategy<Value = CVector> {
    proptest::collection::vec(complex(), n).prop_map(CVector::from_vec)
}

fn eta_plus_of(d: &ComplexSquareMatrix) -> ComplexSquareMatrix {
    (d * &d.adjoint()).inverse().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_matches_sequential_application(
        a in matrix(3), b in matrix(3), fa: bool, fb: bool, v in cvector(3)
    ) {
        let oa = OperatorRep::new(a, fa);
        let ob = OperatorRep::new(b, fb);
        let ab = oa.compose(&ob).unwrap();
        prop_assert_eq!(ab.is_antilinear(), fa ^ fb);
        let direct = oa.apply(&ob.apply(&v).unwrap()).unwrap();
        let composed = ab.apply(&v).unwrap();
        prop_assert!((direct - composed).norm() < 1e-11);
    }

    #[test]
    fn antilinear_operators_are_additive_and_conjugate_homogeneous(
        a in matrix(3), u in cvector(3), v in cvector(3), z in complex()
    ) {
        let op = OperatorRep::antilinear(a);
        let lhs = op.apply(&(&u * z + &v)).unwrap();
        let rhs = op.apply(&u).unwrap() * z.conj() + op.apply(&v).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn eta_plus_is_positive(n in 2usize..=6, seed: u64, v in cvector(6)) {
        let g = random_real_spectrum(n, seed).unwrap();
        let eta = eta_plus_of(&g.d);
        let a = analyze_real(&g.h, &eta, &SpectralOptions::default()).unwrap();
        let v = v.rows(0, n).into_owned();
        prop_assume!(v.norm() > 1e-3);
        let q = v.dotc(&a.eta_plus.matrix().mul_vec(&v).unwrap());
        prop_assert!(q.re > 0.0);
        prop_assert!(q.im.abs() <= 1e-9 * q.re.max(1.0));
        prop_assert!(a.eta_plus.flags().positive_definite);
    }

    #[test]
    fn metric_family_is_closed_under_combination(
        a in -3.0..3.0f64, b in 0.2..3.0f64, cc in 0.2..3.0f64,
        s in complex(), z1 in complex(), z2 in complex()
    ) {
        let fx = family_eq3_with_s(a, b, cc, s).unwrap();
        let fam = solve_metric_space(&fx.hamiltonian, &Tolerance::default());
        prop_assert_eq!(fam.dimension(), 2);
        let eta = fam.combine(&[z1, z2]).unwrap();
        let h = &fx.hamiltonian;
        // check eta H = H^dagger eta directly; eta may be singular
        let lhs = &eta * h;
        let rhs = &h.adjoint() * &eta;
        prop_assert!(lhs.distance(&rhs) <= 1e-9 * (1.0 + eta.frobenius_norm() * h.frobenius_norm()));
        for key in ["eta1", "eta2", "eta3", "eta4"] {
            let m = fx.expected_matrix(key).unwrap();
            prop_assert!(fam.projection_defect(m) <= 1e-9, "{}", key);
        }
    }

    #[test]
    fn p_c_and_eta_plus_ignore_phases(
        n in 2usize..=5, seed: u64, angles in proptest::collection::vec(0.0..std::f64::consts::TAU, 5)
    ) {
        let g = random_real_spectrum(n, seed).unwrap();
        let eta = eta_plus_of(&g.d);
        let base = analyze_real(&g.h, &eta, &SpectralOptions::default()).unwrap();
        let opts = SpectralOptions {
            phases: PhasePolicy::Relative(angles[..n].iter().map(|&t| Complex64::from_polar(1.0, t)).collect()),
            ..SpectralOptions::default()
        };
        let turned = analyze_real(&g.h, &eta, &opts).unwrap();
        let scale = base.suite.p.matrix().frobenius_norm().max(1.0);
        prop_assert!(base.suite.p.distance(&turned.suite.p) <= 1e-9 * scale);
        prop_assert!(base.suite.c.distance(&turned.suite.c) <= 1e-9 * scale);
        let scale = base.eta_plus.matrix().frobenius_norm().max(1.0);
        prop_assert!(base.eta_plus.matrix().distance(turned.eta_plus.matrix()) <= 1e-9 * scale);
    }

    #[test]
    fn eta_normalization_is_idempotent(n in 2usize..=5, seed: u64) {
        let g = random_real_spectrum(n, seed).unwrap();
        let eta = eta_plus_of(&g.d);
        let cols = g.d.columns();
        let tol = Tolerance::default();
        let (once, signs) = eta_normalize(&cols, &eta, &tol).unwrap();
        let (twice, signs2) = eta_normalize(&once, &eta, &tol).unwrap();
        prop_assert_eq!(signs, signs2);
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn analysis_is_deterministic(n in 2usize..=6, seed: u64) {
        let g = random_real_spectrum(n, seed).unwrap();
        let eta = eta_plus_of(&g.d);
        let a = analyze_real(&g.h, &eta, &SpectralOptions::default()).unwrap();
        let b = analyze_real(&g.h, &eta, &SpectralOptions::default()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn forward_construction_is_pseudo_hermitian(n in 1usize..=8, seed: u64) {
        let g = random_real_spectrum(n, seed).unwrap();
        let eta = eta_plus_of(&g.d);
        prop_assert!(pseudo_hermiticity_residual(&g.h, &eta).unwrap() <= 1e-8);
    }

    #[test]
    fn conjugate_pairs_get_pair_metric(pairs in 1usize..=3, seed: u64) {
        let g = random_conjugate_paired(pairs, seed).unwrap();
        let a = analyze_conjugate_paired(&g.h, &Tolerance::default()).unwrap();
        prop_assert!(a.residual <= 1e-8);
        prop_assert!(a.eta_bar.flags().hermitian);
    }
}
