use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

use super::*;
use crate::funclass::{cube, power, recip, square, ScalarFunctionSpec};
use crate::rng::seeded;
use crate::Relation;

fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
    let mut rng = seeded(seed);
    HermitianMatrix::from_matrix(&gaussian_matrix(n, n, &mut rng))
}

fn close(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) {
    let d = a.max_abs_diff(b);
    assert!(d <= tol, "matrices differ by {d:e}\n{a}\n{b}");
}

#[test]
fn eig_of_diagonal_sorts_and_permutes() {
    let e = hermitian_eig(&HermitianMatrix::diag(&[3.0, 1.0])).unwrap();
    assert_eq!(e.eigenvalues, vec![1.0, 3.0]);
    let u = &e.eigenvectors;
    assert!((u.get(1, 0).norm() - 1.0).abs() < 1e-15);
    assert!((u.get(0, 1).norm() - 1.0).abs() < 1e-15);
}

#[test]
fn eig_of_two_by_two_matches_characteristic_polynomial() {
    let e = hermitian_eig(&HermitianMatrix::from_real_rows(&[
        &[2.0, 1.0],
        &[1.0, 1.0],
    ]))
    .unwrap();
    let s5 = 5f64.sqrt();
    assert!((e.eigenvalues[0] - (3.0 - s5) / 2.0).abs() < 1e-14);
    assert!((e.eigenvalues[1] - (3.0 + s5) / 2.0).abs() < 1e-14);
}

#[test]
fn eig_of_zero_matrix() {
    let e = hermitian_eig(&HermitianMatrix::zeros(4)).unwrap();
    assert!(e.eigenvalues.iter().all(|&l| l == 0.0));
    assert!(e.unitarity_residual() < 1e-15);
}

#[test]
fn eig_residuals_on_a_thousand_random_matrices() {
    for k in 0..1000u64 {
        let n = 1 + (k % 12) as usize;
        let h = random_hermitian(n, 1000 + k);
        let e = hermitian_eig(&h).unwrap();
        let scale = h.norm2().max(1.0);
        assert!(
            e.reconstruction_residual(&h) <= EIG_RTOL * scale,
            "n={n} seed={k}"
        );
        assert!(e.unitarity_residual() <= EIG_RTOL, "n={n} seed={k}");
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn eigenvalues_agree_with_nalgebra() {
    for k in 0..50u64 {
        let n = 1 + (k % 9) as usize;
        let h = random_hermitian(n, 77 + k);
        let m = DMatrix::from_fn(n, n, |i, j| {
            let z = h.get(i, j);
            Complex::new(z.re, z.im)
        });
        let mut theirs: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        let ours = hermitian_eig(&h).unwrap().eigenvalues;
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-11 * h.norm2().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn eig_handles_repeated_and_clustered_eigenvalues() {
    let mut rng = seeded(5);
    let u = haar_unitary(6, &mut rng);
    let d = HermitianMatrix::diag(&[1.0, 1.0, 1.0, 1.0 + 1e-13, 2.0, 2.0]);
    let h = d.congruence(&u.adjoint());
    let e = hermitian_eig(&h).unwrap();
    assert!(e.reconstruction_residual(&h) <= 1e-12);
    assert!((e.eigenvalues[0] - 1.0).abs() < 1e-12 && (e.eigenvalues[5] - 2.0).abs() < 1e-12);
}

#[test]
fn functional_calculus_examples() {
    close(
        &apply_function(&square(), &HermitianMatrix::diag(&[1.0, 2.0])).unwrap(),
        &HermitianMatrix::diag(&[1.0, 4.0]),
        1e-14,
    );
    close(
        &apply_function(
            &cube(),
            &HermitianMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]),
        )
        .unwrap(),
        &HermitianMatrix::from_real_rows(&[&[13.0, 8.0], &[8.0, 5.0]]),
        1e-12,
    );
    close(
        &apply_function(&recip(), &HermitianMatrix::diag(&[3.0, 1.0])).unwrap(),
        &HermitianMatrix::diag(&[1.0 / 3.0, 1.0]),
        1e-15,
    );
}

#[test]
fn domain_violations_are_reported() {
    let err = apply_function(&recip(), &HermitianMatrix::diag(&[1.0, 0.0])).unwrap_err();
    match err {
        crate::Error::DomainViolation { offending, .. } => assert_eq!(offending, vec![0.0]),
        e => panic!("unexpected {e}"),
    }
    // within the closed slack, clamped to the endpoint
    let v = apply_function(&power(0.5), &HermitianMatrix::diag(&[-1e-13, 4.0])).unwrap();
    assert_eq!(v.get(0, 0).re, 0.0);
    assert!(apply_function(&power(0.5), &HermitianMatrix::diag(&[-1e-9, 4.0])).is_err());
}

#[test]
fn operator_abs_examples() {
    close(
        &operator_abs(&HermitianMatrix::diag(&[2.0, -1.0])).unwrap(),
        &HermitianMatrix::diag(&[2.0, 1.0]),
        1e-15,
    );
    close(
        &operator_abs(&HermitianMatrix::from_real_rows(&[
            &[0.0, 1.0],
            &[1.0, 0.0],
        ]))
        .unwrap(),
        &HermitianMatrix::identity(2),
        1e-14,
    );
    let a = random_psd(4, (0.1, 3.0), 8).unwrap();
    close(&operator_abs(&a).unwrap(), &a, 1e-12);
}

#[test]
fn loewner_examples() {
    let v = loewner_compare(
        &HermitianMatrix::identity(3),
        &HermitianMatrix::scalar(3, 2.0),
        1e-8,
    )
    .unwrap();
    assert_eq!(v.relation, Relation::PositiveSemidefinite);
    assert!((v.lambda_min - 1.0).abs() < 1e-15);

    let d = HermitianMatrix::from_real_rows(&[&[9.0, 7.0], &[7.0, 5.0]]).scale(0.25);
    assert_eq!(
        LoewnerVerdict::of(&d, 1e-8).unwrap().relation,
        Relation::Indefinite
    );
    let d = HermitianMatrix::diag(&[-4.0 / 12.0, -11.0 / 12.0]);
    assert_eq!(
        LoewnerVerdict::of(&d, 1e-8).unwrap().relation,
        Relation::NegativeSemidefinite
    );
}

#[test]
fn loewner_tolerance_boundary_is_inclusive() {
    let v = LoewnerVerdict::from_extremes(-1e-8, 0.5, 1e-8);
    assert_eq!(v.relation, Relation::PositiveSemidefinite);
    let v = LoewnerVerdict::from_extremes(-3e-8, 2.0, 1e-8);
    assert_eq!(v.tolerance_used, 2e-8);
    assert_eq!(v.relation, Relation::Indefinite);
}

#[test]
fn random_psd_examples() {
    let p = random_psd(1, (2.0, 2.0), 3).unwrap();
    assert_eq!(p.get(0, 0).re, 2.0);
    let a = random_psd(3, (0.0, 1.0), 42).unwrap();
    let b = random_psd(3, (0.0, 1.0), 42).unwrap();
    assert_eq!(a, b);
    for seed in 0..50 {
        let p = random_psd(5, (0.5, 2.0), seed).unwrap();
        assert!(hermitian_eig(&p).unwrap().lambda_min() >= 0.5 - 1e-12);
    }
}

#[test]
fn contraction_isometry_projection_examples() {
    let id = ComplexMatrix::identity(3);
    assert!(is_contraction(&id, 1e-10));
    assert!(is_isometry(&id, 1e-10).unwrap());
    assert!(is_projection(&id, 1e-10).unwrap());

    let half = ComplexMatrix::identity(2).scale(std::f64::consts::FRAC_1_SQRT_2);
    assert!(is_contraction(&half, 1e-10));
    assert!(!is_isometry(&half, 1e-10).unwrap());

    let l: f64 = 0.3;
    let col = ComplexMatrix::from_real_rows(&[&[l.sqrt()], &[(1.0 - l).sqrt()]]);
    assert!(is_isometry(&col, 1e-10).unwrap());
    assert!(is_isometry(&col.adjoint(), 1e-10).is_err());
}

#[test]
fn hermitian_construction_is_exact() {
    let mut rng = seeded(11);
    let h = HermitianMatrix::from_matrix(&gaussian_matrix(5, 5, &mut rng));
    assert!(h.is_exactly_hermitian());
    let json = serde_json::to_string(&h).unwrap();
    let back: HermitianMatrix = serde_json::from_str(&json).unwrap();
    assert_eq!(back, h);
}

#[test]
fn non_hermitian_documents_are_rejected() {
    let doc = r#"{"dim": 2, "entries": [[1,0],[2,0],[3,0],[1,0]]}"#;
    assert!(serde_json::from_str::<HermitianMatrix>(doc).is_err());
    let doc = r#"{"rows": 1, "cols": 2, "entries": [[1,0]]}"#;
    assert!(serde_json::from_str::<ComplexMatrix>(doc).is_err());
}

fn identity_spec() -> ScalarFunctionSpec {
    ScalarFunctionSpec::new("t", crate::funclass::Interval::closed(-1e300, 1e300), |t| t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identity_function_fixes_matrices(n in 1usize..8, seed in any::<u64>()) {
        let h = random_hermitian(n, seed);
        let out = apply_function(&identity_spec(), &h).unwrap();
        prop_assert!(out.max_abs_diff(&h) <= 1e-12 * h.norm2().max(1.0));
    }

    #[test]
    fn calculus_commutes_with_unitary_conjugation(n in 1usize..7, seed in any::<u64>()) {
        let a = random_psd(n, (0.0, 3.0), seed).unwrap();
        let u = random_unitary(n, seed ^ 0xabc).unwrap();
        let f = cube();
        let lhs = apply_function(&f, &a.congruence(&u)).unwrap();
        let rhs = apply_function(&f, &a).unwrap().congruence(&u);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9);
    }

    #[test]
    fn abs_squared_is_square(n in 1usize..8, seed in any::<u64>()) {
        let h = random_hermitian(n, seed);
        let abs = operator_abs(&h).unwrap();
        let lhs = abs.as_matrix().matmul(abs.as_matrix());
        let rhs = h.as_matrix().matmul(h.as_matrix());
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9 * h.norm2().max(1.0).powi(2));
    }

    #[test]
    fn loewner_compare_is_antisymmetric(n in 1usize..6, s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = random_hermitian(n, s1);
        let b = random_hermitian(n, s2);
        let ab = loewner_compare(&a, &b, 1e-8).unwrap();
        let ba = loewner_compare(&b, &a, 1e-8).unwrap();
        prop_assert_eq!(ab.relation.reversed(), ba.relation);
        let z = loewner_compare(&a, &a, 1e-8).unwrap();
        prop_assert_eq!(z.relation, Relation::Zero);
    }

    #[test]
    fn powers_below_one_are_monotone(n in 1usize..6, seed in any::<u64>(), k in 0usize..=10) {
        let r = k as f64 / 10.0;
        let b = random_psd(n, (0.0, 2.0), seed).unwrap();
        let a = b.add(&random_psd(n, (0.0, 1.0), seed ^ 1).unwrap());
        let f = power(r);
        let v = loewner_compare(&apply_function(&f, &b).unwrap(), &apply_function(&f, &a).unwrap(), 1e-8).unwrap();
        prop_assert!(v.holds_psd(), "r = {}: {:?}", r, v);
    }
}
