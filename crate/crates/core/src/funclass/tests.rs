use proptest::prelude::*;

use super::*;
use crate::linalg::{random_psd, HermitianMatrix};
use crate::{Error, Relation};

#[test]
fn scalar_deficit_examples() {
    assert_eq!(
        scalar_superquadratic_deficit(&square(), 1.0, 3.0).unwrap(),
        0.0
    );
    assert_eq!(
        scalar_superquadratic_deficit(&cube(), 1.0, 0.0).unwrap(),
        1.0
    );
    let f = affine(1.0, 2.0);
    assert_eq!(scalar_superquadratic_deficit(&f, 1.5, 1.5).unwrap(), -2.0);
}

#[test]
fn scalar_deficit_errors() {
    let no_derivative = ScalarFunctionSpec::new("t^2", Interval::closed_ray(0.0), |t| t * t);
    assert!(matches!(
        scalar_superquadratic_deficit(&no_derivative, 1.0, 2.0),
        Err(Error::MissingDerivative { .. })
    ));
    assert!(matches!(
        scalar_superquadratic_deficit(&square(), -1.0, 2.0),
        Err(Error::DomainViolation { .. })
    ));
}

#[test]
fn scalar_superquadratic_grid() {
    let grid = |lo: f64, hi: f64| (0..100).map(move |k| lo + (hi - lo) * k as f64 / 99.0);
    for f in [square(), cube()] {
        for x in grid(0.0, 4.0) {
            for t in grid(0.0, 4.0) {
                assert!(
                    scalar_superquadratic_deficit(&f, x, t).unwrap() >= -1e-9,
                    "{} at ({x}, {t})",
                    f.name()
                );
            }
        }
    }
    let f = tlogt();
    for x in grid(0.01, 0.99) {
        for t in grid(0.01, 0.99) {
            assert!(
                scalar_superquadratic_deficit(&f, x, t).unwrap() >= -1e-9,
                "t log t at ({x}, {t})"
            );
        }
    }
    // t^(1/2) is not superquadratic in the scalar sense
    let f = power(0.5);
    let worst = grid(0.01, 4.0)
        .flat_map(|x| grid(0.0, 4.0).map(move |t| (x, t)))
        .map(|(x, t)| scalar_superquadratic_deficit(&f, x, t).unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(worst < -1e-3);
}

#[test]
fn operator_deficit_examples() {
    let a = HermitianMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]);
    let b = HermitianMatrix::diag(&[1.0, 0.0]);
    assert!(operator_superquadratic_deficit(&square(), &a, &b, 0.5)
        .unwrap()
        .verdict
        .holds_psd());
    let r = operator_superquadratic_deficit(&cube(), &a, &b, 0.5).unwrap();
    assert_eq!(r.verdict.relation, Relation::Indefinite);
    let same = operator_superquadratic_deficit(&cube(), &a, &a, 0.3).unwrap();
    assert!(same.deficit.norm2() < 1e-12);
    assert_eq!(same.verdict.relation, Relation::Zero);
}

#[test]
fn convex_deficit_examples() {
    let a = random_psd(3, (0.0, 4.0), 1).unwrap();
    let b = random_psd(3, (0.0, 4.0), 2).unwrap();
    assert!(operator_convex_deficit(&square(), &a, &b, 0.5)
        .unwrap()
        .verdict
        .holds_psd());
    assert!(operator_convex_deficit(&power(0.5), &a, &b, 0.4)
        .unwrap()
        .verdict
        .holds_nsd());
    for alpha in [0.0, 1.0] {
        assert!(
            operator_convex_deficit(&cube(), &a, &b, alpha)
                .unwrap()
                .deficit
                .norm2()
                < 1e-12
        );
    }
    assert!(operator_convex_deficit(&cube(), &a, &b, 1.5).is_err());
}

#[test]
fn builtins_resolve_and_validate() {
    for id in [
        "square",
        "cube",
        "recip",
        "tlogt",
        "power:0.5",
        "power:-1",
        "affine:2:-1",
        "neg:cube",
    ] {
        let f = ScalarFunctionSpec::builtin(id).unwrap();
        assert_eq!(f.id(), id);
        let (lo, hi) = f.sampling_range();
        f.validate(lo, hi).unwrap();
    }
    assert!(matches!(
        ScalarFunctionSpec::builtin("sine"),
        Err(Error::UnknownFunction(_))
    ));
    assert!(ScalarFunctionSpec::builtin("power:x").is_err());
    let neg = ScalarFunctionSpec::builtin("neg:affine:1:1").unwrap();
    assert_eq!(neg.claimed_class(), ClaimedClass::OperatorSuperquadratic);
    assert_eq!(neg.eval(2.0), -3.0);
}

#[test]
fn wrong_derivatives_fail_validation() {
    let f =
        ScalarFunctionSpec::new("t^2", Interval::closed_ray(0.0), |t| t * t).with_derivative(|t| t);
    assert!(matches!(
        f.validate(0.0, 2.0),
        Err(Error::VerificationFailed(_))
    ));
    assert!(square().validate(-1.0, 1.0).is_err());
}

#[test]
fn interval_boundary_rules() {
    let closed = Interval::closed(0.0, 1.0);
    assert!(closed.contains(-1e-12) && closed.contains(1.0 + 1e-12));
    assert!(!closed.contains(-1e-11));
    let open = Interval::open_ray(0.0);
    assert!(!open.contains(1e-7) && open.contains(1e-6));
    assert!(!open.contains_zero());
}

#[test]
fn reports_round_trip() {
    let a = random_psd(3, (0.0, 4.0), 3).unwrap();
    let b = random_psd(3, (0.0, 4.0), 4).unwrap();
    let r = operator_superquadratic_deficit(&cube(), &a, &b, 0.37).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let back: DeficitReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.recompute_verdict().unwrap(), r.verdict);
}

#[test]
fn classification_of_the_builtin_table() {
    let cfg = SamplingConfig {
        trials: 300,
        ..SamplingConfig::default()
    };
    let expect = [
        ("square", "supported-quadratic"),
        ("cube", "refuted"),
        ("recip", "refuted"),
        ("tlogt", "supported-superquadratic"),
        ("power:0.5", "supported-subquadratic"),
        ("affine:1:2", "supported-subquadratic"),
        ("neg:affine:1:2", "supported-superquadratic"),
    ];
    for (id, want) in expect {
        let f = ScalarFunctionSpec::builtin(id).unwrap();
        let r = classify(&f, &cfg).unwrap();
        assert_eq!(r.verdict.name(), want, "{id}");
        assert_eq!(r.trials_run, 300, "{id}");
    }
}

#[test]
fn refutations_carry_regenerable_witnesses() {
    let cfg = SamplingConfig {
        trials: 50,
        ..SamplingConfig::default()
    };
    let r = classify(&cube(), &cfg).unwrap();
    let ClassVerdict::Refuted {
        superquadratic_witness: Some(w),
        ..
    } = &r.verdict
    else {
        panic!("cube must be refuted: {:?}", r.verdict)
    };
    assert!(!w.verdict.holds_psd());
    assert_eq!(w.verdict.lambda_min, r.worst_min_eigenvalue);

    let r = classify(&recip(), &cfg).unwrap();
    assert_eq!(r.records[0].digest.fixture.as_deref(), Some("recip-pair"));
    assert!(matches!(r.verdict, ClassVerdict::Refuted { .. }));
}

#[test]
fn proposition_checks() {
    let cfg = SamplingConfig {
        trials: 200,
        ..SamplingConfig::default()
    };
    let p = check_propositions(&tlogt(), &cfg).unwrap();
    assert!(p.consistent());
    let p2 = p
        .checks
        .iter()
        .find(|c| c.name == "convex-nonpositive")
        .unwrap();
    assert_eq!((p2.applies, p2.holds), (true, Some(true)));

    let p = check_propositions(&power(0.5), &cfg).unwrap();
    let p3 = p
        .checks
        .iter()
        .find(|c| c.name == "concave-nonnegative")
        .unwrap();
    assert_eq!((p3.applies, p3.holds), (true, Some(true)));

    let p = check_propositions(&recip(), &cfg).unwrap();
    assert!(p.convex_supported && p.nonnegative_on_grid);
    assert!(matches!(p.superquadratic, ClassVerdict::Refuted { .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn one_by_one_matches_scalar_formula(a in 0.0f64..4.0, b in 0.0f64..4.0, alpha in 0.0f64..=1.0) {
        let f = cube();
        let g = |t: f64| t * t * t;
        let want = alpha * (g(a) - g((1.0 - alpha) * (a - b).abs()))
            + (1.0 - alpha) * (g(b) - g(alpha * (a - b).abs()))
            - g(alpha * a + (1.0 - alpha) * b);
        let got = operator_superquadratic_deficit(&f, &HermitianMatrix::scalar(1, a), &HermitianMatrix::scalar(1, b), alpha)
            .unwrap()
            .deficit
            .get(0, 0)
            .re;
        prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
    }

    #[test]
    fn commuting_square_deficit_vanishes(a in 0.0f64..4.0, b in 0.0f64..4.0, alpha in 0.0f64..=1.0) {
        let f = square();
        let d = operator_superquadratic_deficit(&f, &HermitianMatrix::diag(&[a, b]), &HermitianMatrix::diag(&[b, a]), alpha)
            .unwrap();
        prop_assert!(d.deficit.norm2() <= 1e-12 * (a + b).max(1.0).powi(2));
    }
}
