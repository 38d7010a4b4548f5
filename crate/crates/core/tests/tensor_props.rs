use std::f64::consts::{FRAC_PI_3, PI};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use yieldconvex::convex_analysis::random_rotation;
use yieldconvex::tensor::*;

fn tensor() -> impl Strategy<Value = SymmetricTensor3> {
    prop::array::uniform6(-10.0f64..10.0)
        .prop_map(|c| SymmetricTensor3::new(c[0], c[1], c[2], c[3], c[4], c[5]))
}

#[test]
fn uniaxial_lode_angles() {
    let t = invariants(&SymmetricTensor3::diag(1.0, 0.0, 0.0)).unwrap();
    assert!((t.p + 1.0 / 3.0).abs() < 1e-15);
    assert!((t.q - 1.0).abs() < 1e-15);
    assert_eq!(t.theta, Some(0.0));
    let c = invariants(&SymmetricTensor3::diag(-1.0, 0.0, 0.0)).unwrap();
    assert!((c.theta.unwrap() - FRAC_PI_3).abs() < 1e-15);
    let shear = invariants(&SymmetricTensor3::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0)).unwrap();
    assert!((shear.q - 3f64.sqrt()).abs() < 1e-14);
    assert!((shear.theta.unwrap() - PI / 6.0).abs() < 1e-12);
    assert_eq!(
        invariants(&SymmetricTensor3::identity()).unwrap().theta,
        None
    );
}

#[test]
fn axis_ids_of_coordinate_directions() {
    let cases = [
        ([1.0, 0.0, 0.0], DeviatoricLocus::AxisThetaZero(1)),
        ([0.0, 1.0, 0.0], DeviatoricLocus::AxisThetaZero(2)),
        ([0.0, 0.0, 1.0], DeviatoricLocus::AxisThetaZero(3)),
        ([-1.0, 0.0, 0.0], DeviatoricLocus::AxisThetaPiThird(1)),
        ([0.0, -1.0, 0.0], DeviatoricLocus::AxisThetaPiThird(2)),
        ([0.0, 0.0, -1.0], DeviatoricLocus::AxisThetaPiThird(3)),
    ];
    for (s, expected) in cases {
        assert_eq!(
            classify_locus(&DeviatoricPair::from_principal(s)),
            expected,
            "{s:?}"
        );
    }
    let inside = DeviatoricPair::from_principal([1.0, -0.6, -0.4]);
    assert_eq!(h_sign(&inside).unwrap(), -1.0);
    assert_eq!(classify_locus(&inside), DeviatoricLocus::Interior(1));
}

#[test]
fn plane_angle_sectors_alternate_h_sign() {
    for k in 1..=6u8 {
        let psi = (k as f64 - 0.5) * FRAC_PI_3;
        let s = DeviatoricPair::from_polar(1.0, psi);
        assert_eq!(classify_locus(&s), DeviatoricLocus::Interior(k));
        let expected = if k % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(h_sign(&s).unwrap(), expected);
        assert!((s.lode_angle() - PI / 6.0).abs() < 1e-12);
    }
}

#[test]
fn spectral_decomposition_reconstructs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let r = random_rotation(&mut rng);
        let a = SymmetricTensor3::diag(0.3, 0.3, -1.2).rotate(&r);
        let (vals, vecs) = spectral_decomposition(&a);
        assert!((SymmetricTensor3::from_spectral(vals, &vecs) - a).norm() < 1e-12);
        let pv = principal_values(&a);
        for i in 0..3 {
            assert!((pv[i] - vals[i]).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn invariants_are_rotation_invariant(a in tensor(), seed in 0u64..1_000_000) {
        let r = random_rotation(&mut ChaCha8Rng::seed_from_u64(seed));
        let i0 = invariants(&a).unwrap();
        let i1 = invariants(&a.rotate(&r)).unwrap();
        let scale = a.norm() + 1.0;
        prop_assert!((i0.p - i1.p).abs() <= 1e-12 * scale);
        prop_assert!((i0.q - i1.q).abs() <= 1e-12 * scale);
        if let (Some(t0), Some(t1)) = (i0.theta, i1.theta) {
            prop_assert!((t0 - t1).abs() <= 1e-7, "{} {}", t0, t1);
            prop_assert!((0.0..=FRAC_PI_3).contains(&t0));
        }
    }

    #[test]
    fn invariants_roundtrip(p in -5.0f64..5.0, q in 0.01f64..5.0, theta in 0.0f64..=FRAC_PI_3) {
        let s = principal_from_invariants(p, q, theta).unwrap();
        prop_assert!(s[0] >= s[1] && s[1] >= s[2]);
        let inv = invariants(&SymmetricTensor3::diag(s[0], s[1], s[2])).unwrap();
        prop_assert!((inv.p - p).abs() < 1e-12);
        prop_assert!((inv.q - q).abs() < 1e-12);
        prop_assert!((inv.theta.unwrap() - theta).abs() < 1e-7);
    }

    #[test]
    fn lode_angle_matches_arccos_formula(s1 in -2.0f64..2.0, s2 in -2.0f64..2.0) {
        let s = DeviatoricPair::new(s1, s2);
        prop_assume!(s.q() > 1e-3);
        let inv = invariants(&SymmetricTensor3::diag(s1, s2, s.s3())).unwrap();
        prop_assert!((s.lode_angle() - inv.theta.unwrap()).abs() < 1e-7);
    }

    #[test]
    fn principal_values_sum_to_trace(a in tensor()) {
        let v = principal_values(&a);
        prop_assert!(v[0] >= v[1] - 1e-12 && v[1] >= v[2] - 1e-12);
        prop_assert!((v[0] + v[1] + v[2] - a.trace()).abs() <= 1e-10 * (a.norm() + 1.0));
        prop_assert!((v[0] * v[1] * v[2] - a.det()).abs() <= 1e-9 * (a.norm() + 1.0).powi(3));
    }

    #[test]
    fn canonical_pair_lies_in_first_sector(a in tensor()) {
        let s = canonical_pair(&a);
        prop_assume!(s.q() > 1e-9);
        let psi = s.plane_angle();
        prop_assert!(psi <= FRAC_PI_3 + 1e-9 || psi >= 2.0 * PI - 1e-9, "{}", psi);
    }
}
