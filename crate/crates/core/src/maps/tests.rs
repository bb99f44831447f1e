use proptest::prelude::*;

use super::*;
use crate::linalg::{hermitian_eig, loewner_compare, random_psd, random_unitary};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn en_examples() {
    assert_eq!(build_en(1).unwrap(), ComplexMatrix::identity(1));
    let e2 = build_en(2).unwrap();
    assert!(e2.max_abs_diff(&ComplexMatrix::diag(&[c(-1.0, 0.0), c(1.0, 0.0)])) < 1e-15);
    let e4 = build_en(4).unwrap();
    let want = ComplexMatrix::diag(&[c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0), c(1.0, 0.0)]);
    assert!(e4.max_abs_diff(&want) < 1e-15);
    for n in 1..=16 {
        assert!(isometry_defect(&build_en(n).unwrap()) < 1e-14);
    }
    assert!(build_en(0).is_err());
}

#[test]
fn pinch_examples() {
    let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
    assert_eq!(
        pinch(&a).unwrap(),
        ComplexMatrix::diag(&[c(1.0, 0.0), c(4.0, 0.0)])
    );
    let d = ComplexMatrix::diag(&[c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 0.0)]);
    assert_eq!(pinch(&d).unwrap(), d);
    let mut rng = seeded(3);
    let a = gaussian_matrix(3, 3, &mut rng);
    assert!(pinch_average(&a).unwrap().max_abs_diff(&diagonal_part(&a)) < 1e-13);
}

#[test]
fn block_pinch_keeps_diagonal_blocks() {
    let mut rng = seeded(4);
    let a = gaussian_matrix(6, 6, &mut rng);
    let p = block_pinch(&a, 3, 2).unwrap();
    for bi in 0..3 {
        for bj in 0..3 {
            let blk = p.block(2 * bi, 2 * bj, 2, 2);
            if bi == bj {
                assert!(blk.max_abs_diff(&a.block(2 * bi, 2 * bj, 2, 2)) < 1e-13);
            } else {
                assert!(blk.max_abs() < 1e-13);
            }
        }
    }
}

#[test]
fn projection_family_examples() {
    let f1 = build_projection_family(1).unwrap();
    assert_eq!(f1.projections()[0], HermitianMatrix::identity(1));

    let f2 = build_projection_family(2).unwrap();
    let p1 = HermitianMatrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]);
    let p2 = HermitianMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
    assert!(f2.projections()[0].max_abs_diff(&p1) < 1e-15);
    assert!(f2.projections()[1].max_abs_diff(&p2) < 1e-15);

    for n in 1..=16 {
        let fam = build_projection_family(n).unwrap();
        for p in fam.projections() {
            assert!((p.as_matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn invalid_families_are_rejected() {
    let half = HermitianMatrix::scalar(2, 0.5);
    assert!(matches!(
        ProjectionFamily::new(vec![half.clone(), half]),
        Err(Error::NotAResolution { .. })
    ));
    let e = HermitianMatrix::diag(&[1.0, 0.0]);
    assert!(ProjectionFamily::new(vec![e.clone(), e]).is_err());
    assert!(ProjectionFamily::new(vec![HermitianMatrix::diag(&[1.0, 0.0])]).is_err());
}

#[test]
fn completion_of_a_unitary_block_is_itself() {
    let u = random_unitary(3, 9).unwrap();
    let w = complete_column_to_unitary(std::slice::from_ref(&u)).unwrap();
    assert!(w.max_abs_diff(&u) < 1e-10);
}

#[test]
fn completion_of_a_scalar_column() {
    let l: f64 = 0.3;
    let col = [
        ComplexMatrix::from_real_rows(&[&[l.sqrt()]]),
        ComplexMatrix::from_real_rows(&[&[(1.0 - l).sqrt()]]),
    ];
    let u = complete_column_to_unitary(&col).unwrap();
    assert_eq!((u.rows(), u.cols()), (2, 2));
    assert!(isometry_defect(&u) < 1e-12);
    assert!((u.get(0, 1).re - l.sqrt()).abs() < 1e-12);
    assert!((u.get(1, 1).re - (1.0 - l).sqrt()).abs() < 1e-12);
}

#[test]
fn completion_extends_strict_contractions() {
    let col = [
        ComplexMatrix::identity(2).scale(0.5),
        ComplexMatrix::identity(2).scale(0.5),
    ];
    let u = complete_column_to_unitary(&col).unwrap();
    assert_eq!(u.rows(), 6);
    assert!(isometry_defect(&u) < 1e-10);
    assert!(u.block(0, 4, 2, 2).max_abs_diff(&col[0]) < 1e-12);
    let defect = u.block(4, 4, 2, 2);
    assert!(defect.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5f64.sqrt())) < 1e-12);

    let too_big = [
        ComplexMatrix::identity(2),
        ComplexMatrix::identity(2).scale(0.5),
    ];
    assert!(matches!(
        complete_column_to_unitary(&too_big),
        Err(Error::NotUnital { .. })
    ));
}

#[test]
fn block_construction_examples() {
    let a = HermitianMatrix::diag(&[3.0, 1.0]);
    let b = HermitianMatrix::diag(&[1.0, 2.0]);
    let blk = build_dilation_blocks(&a, &b, 0.5).unwrap();
    let cxc = blk.x.congruence(&blk.c);
    let top = cxc.as_matrix().block(0, 0, 2, 2);
    assert!(top.max_abs_diff(HermitianMatrix::diag(&[2.0, 1.5]).as_matrix()) < 1e-12);

    let blk1 = build_dilation_blocks(&a, &b, 1.0).unwrap();
    assert!(blk1.x.congruence(&blk1.c).max_abs_diff(&blk1.x) < 1e-15);

    let pcxcp = cxc.congruence(blk.p.as_matrix());
    assert!(pcxcp.as_matrix().block(2, 2, 2, 2).max_abs() < 1e-15);
    assert!(build_dilation_blocks(&a, &HermitianMatrix::identity(3), 0.5).is_err());
}

#[test]
fn off_diagonal_blocks_carry_the_difference() {
    let a = random_psd(3, (0.0, 2.0), 1).unwrap();
    let b = random_psd(3, (0.0, 2.0), 2).unwrap();
    let l = 0.3;
    let blk = build_dilation_blocks(&a, &b, l).unwrap();
    let off = blk.x.congruence(&blk.c).as_matrix().block(0, 3, 3, 3);
    let want = b.sub(&a).scale((l * (1.0 - l)).sqrt());
    assert!(off.max_abs_diff(want.as_matrix()) < 1e-12);
}

#[test]
fn apply_map_examples() {
    let l: f64 = 0.3;
    let x = [c(l.sqrt(), 0.0), c((1.0 - l).sqrt(), 0.0)];
    let vs = PositiveUnitalMap::vector_state(&x).unwrap();
    let out = vs.apply(&HermitianMatrix::diag(&[5.0, 2.0])).unwrap();
    assert!((out.get(0, 0).re - (l * 5.0 + (1.0 - l) * 2.0)).abs() < 1e-14);

    let p = PositiveUnitalMap::pinching(4).unwrap();
    assert_eq!(
        p.apply(&HermitianMatrix::identity(4)).unwrap(),
        HermitianMatrix::identity(4)
    );

    let u = random_unitary(3, 5).unwrap();
    let k = PositiveUnitalMap::kraus(vec![u.clone()]).unwrap();
    let a = random_psd(3, (0.0, 4.0), 6).unwrap();
    let out = k.apply(&a).unwrap();
    assert!(out.max_abs_diff(&a.congruence(&u)) < 1e-14);
    let (s1, s2) = (hermitian_eig(&out).unwrap(), hermitian_eig(&a).unwrap());
    for (x, y) in s1.eigenvalues.iter().zip(&s2.eigenvalues) {
        assert!((x - y).abs() < 1e-12);
    }
    assert!(matches!(
        k.apply(&HermitianMatrix::identity(2)),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn map_validation() {
    let half = ComplexMatrix::identity(2).scale(0.5);
    assert!(matches!(
        PositiveUnitalMap::kraus(vec![half]),
        Err(Error::NotUnital { .. })
    ));
    let u = random_unitary(2, 1).unwrap();
    assert!(matches!(
        PositiveUnitalMap::mixed_unitary(vec![0.7, 0.7], vec![u.clone(), u.clone()]),
        Err(Error::NotNormalized { .. })
    ));
    let not_unitary = ComplexMatrix::identity(2).scale(2.0);
    assert!(matches!(
        PositiveUnitalMap::mixed_unitary(vec![1.0], vec![not_unitary]),
        Err(Error::NotIsometry { .. })
    ));
}

#[test]
fn maps_round_trip_through_json() {
    let mut rng = seeded(21);
    for kind in [
        MapKind::Pinching,
        MapKind::BlockPinching,
        MapKind::Isometry,
        MapKind::Kraus,
        MapKind::MixedUnitary,
        MapKind::VectorState,
    ] {
        let out = if kind == MapKind::VectorState { 1 } else { 4 };
        let m = random_map(kind, 4, out, 3, 2, &mut rng).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: PositiveUnitalMap = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m, "{json}");
    }
}

#[test]
fn descriptors_build_deterministically() {
    let doc = r#"{"variant": "kraus", "dim": 3, "seed": 4, "terms": 2}"#;
    let d: MapDescriptor = serde_json::from_str(doc).unwrap();
    assert_eq!(d.build().unwrap(), d.build().unwrap());
    let doc = r#"{"variant": "mixed-unitary", "dim": 2, "weights": [0.25, 0.75]}"#;
    let d: MapDescriptor = serde_json::from_str(doc).unwrap();
    assert_eq!(d.build().unwrap().kind(), "mixed-unitary");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn three_pinching_paths_agree(n in 1usize..=16, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = HermitianMatrix::from_matrix(&gaussian_matrix(n, n, &mut rng));
        let via_pinch = pinch(a.as_matrix()).unwrap();
        let via_map = PositiveUnitalMap::pinching(n).unwrap().apply(&a).unwrap();
        let direct = diagonal_part(a.as_matrix());
        prop_assert!(via_pinch.max_abs_diff(&direct) <= 1e-12);
        prop_assert!(via_map.as_matrix().max_abs_diff(&direct) <= 1e-12);
        prop_assert!(pinch_average(a.as_matrix()).unwrap().max_abs_diff(&direct) <= 1e-12);
    }

    #[test]
    fn completed_columns_are_unitary(n in 1usize..4, d in 1usize..4, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let u = haar_unitary(n * d, &mut rng);
        let col: Vec<ComplexMatrix> = (0..n).map(|k| u.block(k * d, 0, d, d)).collect();
        let w = complete_column_to_unitary(&col).unwrap();
        prop_assert!(isometry_defect(&w) <= 1e-10);
        for (k, ck) in col.iter().enumerate() {
            prop_assert!(w.block(k * d, (n - 1) * d, d, d).max_abs_diff(ck) <= 1e-10);
        }
    }

    #[test]
    fn maps_preserve_order(kind in 0usize..5, n in 2usize..5, seed in any::<u64>()) {
        let kinds = [MapKind::Pinching, MapKind::BlockPinching, MapKind::Isometry, MapKind::Kraus, MapKind::MixedUnitary];
        let mut rng = seeded(seed);
        let map = random_map(kinds[kind], n, n, 3, 1, &mut rng).unwrap();
        let b = random_psd(n, (0.0, 2.0), seed ^ 7).unwrap();
        let a = b.add(&random_psd(n, (0.0, 1.0), seed ^ 8).unwrap());
        let v = loewner_compare(&map.apply(&b).unwrap(), &map.apply(&a).unwrap(), 1e-8).unwrap();
        prop_assert!(v.holds_psd());
    }
}
