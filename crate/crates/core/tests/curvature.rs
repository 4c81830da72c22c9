mod common;

use common::rational_metric;
use proptest::prelude::*;
use thn_core::automorphism::random_automorphism;
use thn_core::curvature::{analyze, levi_civita, ricci_from_riemann, ricci_nilpotent_formula, riemann, signature};
use thn_core::{build_thn, pairing_metric, Matrix, Rational, Signature};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn structural_identities(s in rational_metric(6)) {
        let g = build_thn(1).unwrap();
        let r = analyze(&g, &s, 0.0).unwrap();
        prop_assert!(r.connection_ok);
        prop_assert!(r.bianchi_ok);
        prop_assert!(r.routes_agree);
    }

    #[test]
    fn ricci_routes_agree_n2(s in rational_metric(10)) {
        let g = build_thn(2).unwrap();
        let rt = riemann(&levi_civita(&g, &s).unwrap(), &g);
        prop_assert_eq!(ricci_from_riemann(&rt), ricci_nilpotent_formula(&g, &s).unwrap().total());
    }

    #[test]
    fn ricci_is_natural(s in rational_metric(6), seed in any::<u64>()) {
        let g = build_thn(1).unwrap();
        let f = random_automorphism(1, seed).unwrap();
        let pulled = f.matrix().congruence(&s);
        let ric = |m: &Matrix<Rational>| ricci_from_riemann(&riemann(&levi_civita(&g, m).unwrap(), &g));
        prop_assert_eq!(ric(&pulled), f.matrix().congruence(&ric(&s)));
    }
}

#[test]
fn pairing_metric_is_flat() {
    for n in 1..=3 {
        let g = build_thn(n).unwrap();
        let p = pairing_metric::<Rational>(n).unwrap();
        let r = analyze(&g, p.matrix(), 0.0).unwrap();
        assert!(r.flat);
        assert!(r.ricci.is_zero(0.0));
        assert_eq!(signature(p.matrix()), Signature::new(2 * n + 1, 2 * n + 1, 0));
    }
}

#[test]
fn positive_metric_is_not_flat() {
    let g = build_thn(1).unwrap();
    let r = analyze(&g, &Matrix::<Rational>::identity(6), 0.0).unwrap();
    assert!(!r.flat);
    assert!(!r.ricci.is_zero(0.0));
}

#[test]
fn degenerate_metric_is_rejected() {
    let g = build_thn(1).unwrap();
    assert!(levi_civita(&g, &Matrix::<Rational>::zeros(6, 6)).is_err());
}
