mod common;

use common::rational_vec;
use proptest::prelude::*;
use thn_core::lie::{heisenberg_cotangent_permutation, AlgebraRecord};
use thn_core::{build_heisenberg, build_thn, cotangent_algebra, q, Error, LieAlgebra, Rational, ThnBasis};

fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_antisymmetric_and_jacobi((n, x, y, w) in (1usize..=3).prop_flat_map(|n| {
        let d = 4 * n + 2;
        (Just(n), rational_vec(d), rational_vec(d), rational_vec(d))
    })) {
        let g = build_thn(n).unwrap();
        let xy = g.bracket(&x, &y).unwrap();
        let yx = g.bracket(&y, &x).unwrap();
        prop_assert!(xy.iter().zip(&yx).all(|(a, b)| a == &-b.clone()));
        let j = add(
            &add(&g.bracket(&x, &g.bracket(&y, &w).unwrap()).unwrap(), &g.bracket(&y, &g.bracket(&w, &x).unwrap()).unwrap()),
            &g.bracket(&w, &g.bracket(&x, &y).unwrap()).unwrap(),
        );
        prop_assert!(j.iter().all(|v| *v == q(0, 1)));
    }

    #[test]
    fn bracket_is_bilinear(x in rational_vec(10), y in rational_vec(10), w in rational_vec(10), s in common::small_rational()) {
        let g = build_thn(2).unwrap();
        let lhs = g.bracket(&add(&x, &w.iter().map(|v| v * &s).collect::<Vec<_>>()), &y).unwrap();
        let rhs: Vec<Rational> = g.bracket(&x, &y).unwrap().iter().zip(g.bracket(&w, &y).unwrap()).map(|(a, b)| a + b * &s).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn brackets_land_in_center(x in rational_vec(6), y in rational_vec(6)) {
        let g = build_thn(1).unwrap();
        let b = ThnBasis::new(1);
        let v = g.bracket(&x, &y).unwrap();
        prop_assert!(v[..b.half()].iter().all(|x| *x == q(0, 1)));
    }
}

#[test]
fn derivation_dimensions() {
    let dims: Vec<usize> = (1..=3).map(|n| build_thn(n).unwrap().derivation_algebra().len()).collect();
    assert_eq!(dims, vec![18, 41, 78]);
}

#[test]
fn derivations_satisfy_leibniz() {
    let g = build_thn(2).unwrap();
    let d = g.dim();
    for der in g.derivation_algebra().iter().take(12) {
        for i in 0..d {
            for j in i + 1..d {
                let bi = thn_core::lie::basis_vector::<Rational>(d, i);
                let bj = thn_core::lie::basis_vector::<Rational>(d, j);
                let lhs = der.mul_vec(&g.bracket(&bi, &bj).unwrap());
                let rhs = add(&g.bracket(&der.mul_vec(&bi), &bj).unwrap(), &g.bracket(&bi, &der.mul_vec(&bj)).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn cotangent_of_heisenberg_is_thn() {
    for n in 1..=3 {
        let h = build_heisenberg(n).unwrap();
        assert_eq!(h.center().len(), 1);
        let cot = cotangent_algebra(&h);
        let p = heisenberg_cotangent_permutation(n);
        assert!(cot.is_homomorphism_into(&build_thn(n).unwrap(), &p, 0.0));
        assert!(cot.is_two_step_nilpotent());
    }
}

#[test]
fn record_roundtrip_through_json() {
    let g = build_thn(2).unwrap();
    let text = serde_json::to_string(&g.to_record()).unwrap();
    let rec: AlgebraRecord = serde_json::from_str(&text).unwrap();
    let back = LieAlgebra::from_record(&rec).unwrap();
    assert_eq!(back.constants(), g.constants());
    assert_eq!(back.basis_names(), g.basis_names());
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["dim"], 10);
    assert!(v["constants"].as_array().unwrap().iter().all(|c| c[0].as_u64().unwrap() >= 1));
}

#[test]
fn invalid_inputs() {
    assert_eq!(build_thn(0).unwrap_err(), Error::InvalidN);
    let g = build_thn(1).unwrap();
    assert!(g.bracket::<Rational>(&[q(1, 1)], &[q(1, 1)]).is_err());
}
