use proptest::prelude::*;
use thn_core::automorphism::{random_automorphism, random_automorphism_f64};
use thn_core::complex::{
    abelian_witness, ad_route_integrable, is_abelian_complex_structure, is_integrable, is_integrable_tol, nijenhuis_witness,
    normalize_complex_structure, normalize_complex_structure_rounded, solve_integrable_family, NormalizationMethod,
};
use thn_core::matrix::std_symplectic;
use thn_core::metric::seeded_rng;
use thn_core::{build_thn, j0, AlmostComplexStructure, Error, Matrix, Rational};

fn mixed_sign(n: usize) -> AlmostComplexStructure<Rational> {
    let mut m = j0::<Rational>(n).unwrap().matrix().clone();
    m.set_block(0, 0, &std_symplectic::<Rational>(n).neg());
    AlmostComplexStructure::new(m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn integrability_is_natural(n in 1usize..=2, seed in any::<u64>()) {
        let g = build_thn(n).unwrap();
        let f = random_automorphism(n, seed).unwrap();
        let good = j0::<Rational>(n).unwrap().conjugate(f.matrix(), 0.0).unwrap();
        prop_assert!(is_integrable(&good, &g).unwrap());
        prop_assert!(ad_route_integrable(&good, &g, 0.0).unwrap());
        prop_assert!(!is_abelian_complex_structure(&good, &g).unwrap());
        let bad = mixed_sign(n).conjugate(f.matrix(), 0.0).unwrap();
        prop_assert!(!is_integrable(&bad, &g).unwrap());
        prop_assert!(nijenhuis_witness(&bad, &g, 0.0).unwrap().is_some());
    }

    #[test]
    fn family_members_normalize(n in 1usize..=3, seed in any::<u64>()) {
        let fam = solve_integrable_family(n).unwrap();
        let m = fam.sample(&mut seeded_rng(seed));
        let j = m.structure().unwrap();
        let r = normalize_complex_structure(&j, n).unwrap();
        prop_assert_eq!(r.epsilon, m.epsilon);
        prop_assert_eq!(r.method, NormalizationMethod::Family);
        let back = j0::<Rational>(n).unwrap().matrix().scale(&Rational::from_integer(r.epsilon.into()));
        prop_assert_eq!(j.conjugate(r.automorphism.matrix(), 0.0).unwrap().matrix().clone(), back);
    }

    #[test]
    fn float_conjugates_normalize(n in 1usize..=2, seed in any::<u64>()) {
        let g = build_thn(n).unwrap();
        let f = random_automorphism_f64(n, &mut seeded_rng(seed)).unwrap();
        let j = j0::<f64>(n).unwrap().neg().conjugate(f.matrix(), 1e-12).unwrap();
        prop_assert!(is_integrable_tol(&j, &g, 1e-9).unwrap());
        let r = normalize_complex_structure(&j, n).unwrap();
        let target = j0::<f64>(n).unwrap().matrix().scale(&f64::from(r.epsilon));
        prop_assert!(j.conjugate(r.automorphism.matrix(), 1e-12).unwrap().matrix().approx_eq(&target, 1e-8));
    }
}

#[test]
fn rounded_normalization_of_exact_conjugates() {
    for n in 1..=2 {
        let j = j0::<Rational>(n).unwrap().conjugate(random_automorphism(n, 9).unwrap().matrix(), 0.0).unwrap();
        let r = normalize_complex_structure_rounded(&j, n).unwrap();
        assert_eq!(r.epsilon, 1);
        assert!(r.residual <= 1e-9);
    }
}

#[test]
fn j0_is_not_abelian() {
    for n in 1..=3 {
        let g = build_thn(n).unwrap();
        let j = j0::<Rational>(n).unwrap();
        let (a, b) = abelian_witness(&j, &g, 0.0).unwrap().expect("witness");
        let ja = j.apply(&thn_core::lie::basis_vector(g.dim(), a));
        let jb = j.apply(&thn_core::lie::basis_vector(g.dim(), b));
        let lhs = g.bracket(&ja, &jb).unwrap();
        let rhs = g.bracket(&thn_core::lie::basis_vector::<Rational>(g.dim(), a), &thn_core::lie::basis_vector(g.dim(), b)).unwrap();
        assert_ne!(lhs, rhs);
    }
}

#[test]
fn not_integrable_is_reported() {
    assert_eq!(normalize_complex_structure(&mixed_sign(1), 1).unwrap_err(), Error::NotIntegrable);
    let mut m = Matrix::<Rational>::identity(6);
    m[(0, 0)] = Rational::from_integer(2.into());
    assert!(AlmostComplexStructure::new(m).is_err());
}
