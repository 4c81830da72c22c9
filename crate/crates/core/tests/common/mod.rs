#![allow(dead_code)]

use proptest::prelude::*;
use thn_core::{q, Matrix, Rational};

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-5i64..=5, 1i64..=4).prop_map(|(a, b)| q(a, b))
}

pub fn rational_vec(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(small_rational(), len)
}

/// `AᵀDA` with `A` unipotent upper triangular and `D` a diagonal of
/// nonzero entries, so the inverse stays small.
pub fn rational_metric(dim: usize) -> impl Strategy<Value = Matrix<Rational>> {
    let upper = prop::collection::vec(-1i64..=1, dim * dim);
    let diag = prop::collection::vec(prop_oneof![Just(1i64), Just(2), Just(-1), Just(-3)], dim);
    (upper, diag).prop_map(move |(u, d)| {
        let a = Matrix::from_fn(dim, dim, |r, c| match r.cmp(&c) {
            std::cmp::Ordering::Equal => q(1, 1),
            std::cmp::Ordering::Less => q(u[r * dim + c], 1),
            std::cmp::Ordering::Greater => q(0, 1),
        });
        let dm = Matrix::diagonal(&d.iter().map(|&x| q(x, 1)).collect::<Vec<_>>());
        a.transpose().mul(&dm).mul(&a)
    })
}
