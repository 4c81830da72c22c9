use proptest::prelude::*;
use thn_core::automorphism::{
    admissible_parameter_count, block_parameter_count, is_automorphism, preserves_center, random_automorphism,
    random_automorphism_f64, random_automorphism_with, symplectic_rotation, symplectic_rotation_cs, AutSampling,
};
use thn_core::metric::seeded_rng;
use thn_core::{assemble, build_thn, q, AutParams, Error, Matrix, Rational};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_samples_are_automorphisms(n in 1usize..=3, seed in any::<u64>()) {
        let g = build_thn(n).unwrap();
        let f = random_automorphism(n, seed).unwrap();
        prop_assert!(is_automorphism(f.matrix(), &g, 0.0));
        prop_assert!(preserves_center(f.matrix(), n, 0.0));
    }

    #[test]
    fn group_closure(n in 1usize..=2, a in any::<u64>(), b in any::<u64>()) {
        let g = build_thn(n).unwrap();
        let f = random_automorphism(n, a).unwrap();
        let h = random_automorphism_with(n, b, AutSampling::UnitScale).unwrap();
        prop_assert!(is_automorphism(f.compose(&h).matrix(), &g, 0.0));
        let inv = f.inverse(0.0).unwrap();
        prop_assert!(is_automorphism(inv.matrix(), &g, 0.0));
        prop_assert_eq!(f.compose(&inv).into_matrix(), Matrix::identity(g.dim()));
    }

    #[test]
    fn float_samples_are_well_conditioned(n in 1usize..=4, seed in any::<u64>()) {
        let g = build_thn(n).unwrap();
        let f = random_automorphism_f64(n, &mut seeded_rng(seed)).unwrap();
        prop_assert!(is_automorphism(f.matrix(), &g, 1e-10));
        prop_assert!(f.matrix().max_abs() < 50.0);
        let inv = f.inverse(1e-12).unwrap();
        prop_assert!(inv.matrix().max_abs() < 200.0, "{}", inv.matrix().max_abs());
        prop_assert!(f.compose(&inv).matrix().approx_eq(&Matrix::identity(g.dim()), 1e-10));
    }

    #[test]
    fn rotations_are_automorphisms(angles in prop::collection::vec(-3.2f64..3.2, 1..=3)) {
        let n = angles.len();
        let f = symplectic_rotation(&angles, n).unwrap();
        prop_assert!(is_automorphism(f.matrix(), &build_thn(n).unwrap(), 1e-12));
    }
}

#[test]
fn pythagorean_rotation_is_exact() {
    let f = symplectic_rotation_cs(&[(q(3, 5), q(4, 5)), (q(5, 13), q(-12, 13))]).unwrap();
    assert!(is_automorphism(f.matrix(), &build_thn(2).unwrap(), 0.0));
}

#[test]
fn u1_only_for_n1() {
    let mut p = AutParams::<Rational>::identity(1);
    p.u1 = vec![q(1, 1), q(-2, 3)];
    assert!(assemble(p, 1).is_ok());
    let mut p = AutParams::<Rational>::identity(2);
    p.u1[0] = q(1, 1);
    assert!(matches!(assemble(p, 2), Err(Error::InvalidParams(_))));
}

#[test]
fn non_symplectic_block_is_rejected() {
    let mut p = AutParams::<Rational>::identity(1);
    p.fbar1[(0, 0)] = q(2, 1);
    assert!(assemble(p, 1).is_err());
    assert_eq!(assemble(AutParams::<Rational>::identity(1), 0).unwrap_err(), Error::InvalidN);
}

#[test]
fn parameter_counts() {
    assert_eq!(admissible_parameter_count(1), block_parameter_count(1));
    for n in 2..=4 {
        assert_eq!(block_parameter_count(n) - admissible_parameter_count(n), 2 * n);
    }
    for n in 1..=3 {
        assert_eq!(admissible_parameter_count(n), build_thn(n).unwrap().derivation_algebra().len());
    }
}

#[test]
fn sampler_avoids_singular_first_block() {
    let g = build_thn(1).unwrap();
    for seed in [190, 237, 238, 386] {
        assert!(is_automorphism(random_automorphism(1, seed).unwrap().matrix(), &g, 0.0));
    }
}
