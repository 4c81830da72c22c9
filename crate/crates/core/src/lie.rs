//! Lie algebras given by structure constants.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::echelon::{sparse_from_terms, Echelon, SparseRow};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par;
use crate::scalar::{parse_rational, q, rational_to_string, Rational, Scalar};

/// Index helper for the basis `e_1..e_n, f_1..f_n, z*, e*_1..e*_n, f*_1..f*_n, z`
/// of the cotangent Heisenberg algebra (all indices zero-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThnBasis {
    pub n: usize,
}

impl ThnBasis {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
    pub fn dim(&self) -> usize {
        4 * self.n + 2
    }
    /// Size of each of the two diagonal blocks.
    pub fn half(&self) -> usize {
        2 * self.n + 1
    }
    pub fn e(&self, i: usize) -> usize {
        i
    }
    pub fn f(&self, i: usize) -> usize {
        self.n + i
    }
    pub fn zs(&self) -> usize {
        2 * self.n
    }
    pub fn es(&self, i: usize) -> usize {
        2 * self.n + 1 + i
    }
    pub fn fs(&self, i: usize) -> usize {
        3 * self.n + 1 + i
    }
    pub fn z(&self) -> usize {
        4 * self.n + 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    n: Option<usize>,
    basis_names: Vec<String>,
    /// `table[i][j]` = sparse coordinates of `[b_i, b_j]`
    table: Vec<Vec<SparseRow>>,
}

/// Serializable form: `constants` holds `[i, j, k, "p/q"]` with 1-based indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraRecord {
    pub dim: usize,
    pub n: Option<usize>,
    pub basis_names: Vec<String>,
    pub constants: Vec<(usize, usize, usize, String)>,
}

pub fn basis_vector<T: Scalar>(dim: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); dim];
    v[i] = T::one();
    v
}

impl LieAlgebra {
    /// Builds an algebra from `(i, j, k, c)` meaning `[b_i, b_j] ∋ c b_k`.
    /// Entries may be given for either or both orders of `(i, j)`; both orders
    /// must then agree up to sign.
    pub fn new(
        dim: usize,
        n: Option<usize>,
        basis_names: Vec<String>,
        constants: impl IntoIterator<Item = (usize, usize, usize, Rational)>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidStructure("dimension must be positive".into()));
        }
        if basis_names.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: basis_names.len() });
        }
        let mut given: BTreeMap<(usize, usize, usize), Rational> = BTreeMap::new();
        for (i, j, k, c) in constants {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidStructure(format!("index out of range in ({i}, {j}, {k})")));
            }
            if c.is_zero() {
                continue;
            }
            if i == j {
                return Err(Error::InvalidStructure(format!("nonzero [b{i}, b{i}]")));
            }
            *given.entry((i, j, k)).or_insert_with(Rational::zero) += c;
        }
        let mut upper: BTreeMap<(usize, usize, usize), Rational> = BTreeMap::new();
        for (&(i, j, k), c) in &given {
            let (key, val) = if i < j { ((i, j, k), c.clone()) } else { ((j, i, k), -c.clone()) };
            if let Some(prev) = upper.get(&key) {
                if *prev != val {
                    return Err(Error::InvalidStructure(format!("constants not antisymmetric at ({i}, {j}, {k})")));
                }
            } else {
                upper.insert(key, val);
            }
        }
        let mut table = vec![vec![SparseRow::new(); dim]; dim];
        for ((i, j, k), c) in upper {
            table[i][j].push((k, c.clone()));
            table[j][i].push((k, -c));
        }
        Ok(Self { dim, n, basis_names, table })
    }

    pub fn abelian(dim: usize) -> Self {
        let names = (1..=dim).map(|i| format!("x{i}")).collect();
        Self::new(dim, None, names, []).expect("abelian algebra is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> Option<usize> {
        self.n
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    /// Nonzero constants with `i < j`.
    pub fn constants(&self) -> Vec<(usize, usize, usize, Rational)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for (k, c) in &self.table[i][j] {
                    out.push((i, j, *k, c.clone()));
                }
            }
        }
        out
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Rational {
        self.table[i][j].iter().find(|(kk, _)| *kk == k).map_or_else(Rational::zero, |(_, c)| c.clone())
    }

    /// Sparse coordinates of `[b_i, b_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &SparseRow {
        &self.table[i][j]
    }

    pub fn bracket<T: Scalar>(&self, a: &[T], b: &[T]) -> Result<Vec<T>> {
        self.check_len(a.len())?;
        self.check_len(b.len())?;
        let mut out = vec![T::zero(); self.dim];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let ab = ai.mul_ref(bj);
                for (k, c) in &self.table[i][j] {
                    out[*k].add_mul_assign(&ab, &T::from_rational(c));
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `ad(a)`: column `j` is `[a, b_j]`.
    pub fn ad_matrix<T: Scalar>(&self, a: &[T]) -> Result<Matrix<T>> {
        self.check_len(a.len())?;
        let mut m = Matrix::<T>::zeros(self.dim, self.dim);
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for j in 0..self.dim {
                for (k, c) in &self.table[i][j] {
                    m[(*k, j)].add_mul_assign(ai, &T::from_rational(c));
                }
            }
        }
        Ok(m)
    }

    pub fn basis_ad<T: Scalar>(&self, i: usize) -> Matrix<T> {
        self.ad_matrix(&basis_vector::<T>(self.dim, i)).expect("basis vector has algebra dimension")
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(|row| row.iter().all(Vec::is_empty))
    }

    /// Exhaustive exact Jacobi check over basis triples.
    pub fn jacobi_holds(&self) -> bool {
        let d = self.dim;
        par::all_range(d, |i| {
            (i..d).all(|j| {
                (j..d).all(|k| {
                    let bi = basis_vector::<Rational>(d, i);
                    let bj = basis_vector::<Rational>(d, j);
                    let bk = basis_vector::<Rational>(d, k);
                    let t1 = self.bracket(&bi, &self.bracket(&bj, &bk).unwrap()).unwrap();
                    let t2 = self.bracket(&bj, &self.bracket(&bk, &bi).unwrap()).unwrap();
                    let t3 = self.bracket(&bk, &self.bracket(&bi, &bj).unwrap()).unwrap();
                    t1.iter().zip(&t2).zip(&t3).all(|((a, b), c)| (a + b + c).is_zero())
                })
            })
        })
    }

    /// True when `[g, [g, g]] = 0`.
    pub fn is_two_step_nilpotent(&self) -> bool {
        let d = self.dim;
        par::all_range(d, |i| {
            (0..d).all(|j| {
                let bij = self.bracket(&basis_vector::<Rational>(d, i), &basis_vector(d, j)).unwrap();
                (0..d).all(|k| self.bracket(&basis_vector::<Rational>(d, k), &bij).unwrap().iter().all(Zero::is_zero))
            })
        })
    }

    /// Basis of the center (exact).
    pub fn center(&self) -> Vec<Vec<Rational>> {
        // x is central iff ad(b_i) x = 0 for every i
        let d = self.dim;
        let rows: Vec<SparseRow> = par::flat_map_range(d, |i| {
            let ad: Matrix<Rational> = self.basis_ad(i);
            (0..d).map(|k| sparse_from_terms((0..d).map(|j| (j, ad[(k, j)].clone())))).collect()
        });
        Echelon::from_rows(d, &rows).nullspace()
    }

    /// Basis (reduced echelon rows) of `[g, g]` (exact).
    pub fn derived_subalgebra(&self) -> Vec<Vec<Rational>> {
        let d = self.dim;
        let rows: Vec<SparseRow> =
            (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).map(|(i, j)| self.table[i][j].clone()).collect();
        Echelon::from_rows(d, &rows).row_basis()
    }

    /// Basis of `Der(g)` over the rationals.
    pub fn derivation_algebra(&self) -> Vec<Matrix<Rational>> {
        let d = self.dim;
        let var = |r: usize, c: usize| r * d + c;
        let rows: Vec<SparseRow> = par::flat_map_range(d, |i| {
            let mut out = Vec::new();
            for j in i + 1..d {
                for k in 0..d {
                    // D[b_i,b_j] - [D b_i, b_j] - [b_i, D b_j], component k
                    let mut terms = Vec::new();
                    for (m, c) in &self.table[i][j] {
                        terms.push((var(k, *m), c.clone()));
                    }
                    for r in 0..d {
                        for (kk, c) in &self.table[r][j] {
                            if *kk == k {
                                terms.push((var(r, i), -c.clone()));
                            }
                        }
                        for (kk, c) in &self.table[i][r] {
                            if *kk == k {
                                terms.push((var(r, j), -c.clone()));
                            }
                        }
                    }
                    let row = sparse_from_terms(terms);
                    if !row.is_empty() {
                        out.push(row);
                    }
                }
            }
            out
        });
        Echelon::from_rows(d * d, &rows)
            .nullspace()
            .into_iter()
            .map(|v| Matrix::from_vec(d, d, v).expect("d*d entries"))
            .collect()
    }

    /// True when `M[b_i, b_j] = [M b_i, M b_j]` (into `target`) for all basis pairs.
    pub fn is_homomorphism_into<T: Scalar>(&self, target: &LieAlgebra, m: &Matrix<T>, tol: f64) -> bool {
        if m.rows() != target.dim || m.cols() != self.dim {
            return false;
        }
        let cols: Vec<Vec<T>> = (0..self.dim).map(|c| m.column(c)).collect();
        par::all_range(self.dim, |i| {
            (i + 1..self.dim).all(|j| {
                let mut lhs = vec![T::zero(); target.dim];
                for (k, c) in &self.table[i][j] {
                    let ck = T::from_rational(c);
                    for (r, v) in cols[*k].iter().enumerate() {
                        lhs[r].add_mul_assign(&ck, v);
                    }
                }
                let rhs = target.bracket(&cols[i], &cols[j]).expect("dimensions checked");
                lhs.iter().zip(&rhs).all(|(a, b)| a.sub_ref(b).is_negligible(tol))
            })
        })
    }

    pub fn to_record(&self) -> AlgebraRecord {
        AlgebraRecord {
            dim: self.dim,
            n: self.n,
            basis_names: self.basis_names.clone(),
            constants: self
                .constants()
                .into_iter()
                .map(|(i, j, k, c)| (i + 1, j + 1, k + 1, rational_to_string(&c)))
                .collect(),
        }
    }

    pub fn from_record(rec: &AlgebraRecord) -> Result<Self> {
        let mut constants = Vec::with_capacity(rec.constants.len());
        for (i, j, k, c) in &rec.constants {
            if *i == 0 || *j == 0 || *k == 0 {
                return Err(Error::Parse("structure constant indices are 1-based".into()));
            }
            let c = parse_rational(c).ok_or_else(|| Error::Parse(format!("bad rational {c:?}")))?;
            constants.push((i - 1, j - 1, k - 1, c));
        }
        Self::new(rec.dim, rec.n, rec.basis_names.clone(), constants)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: len });
        }
        Ok(())
    }
}

/// Heisenberg algebra `h(2n+1)` on `e_1..e_n, f_1..f_n, z` with `[e_i, f_i] = z`.
pub fn build_heisenberg(n: usize) -> Result<LieAlgebra> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    let mut names: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
    names.extend((1..=n).map(|i| format!("f{i}")));
    names.push("z".into());
    let constants = (0..n).map(|i| (i, n + i, 2 * n, q(1, 1)));
    LieAlgebra::new(2 * n + 1, Some(n), names, constants)
}

/// Cotangent algebra `T*h(2n+1)` in the basis order of [`ThnBasis`].
///
/// Nonzero brackets: `[e_i, f_i] = z`, `[z*, e_i] = f*_i`, `[z*, f_i] = -e*_i`.
pub fn build_thn(n: usize) -> Result<LieAlgebra> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    let b = ThnBasis::new(n);
    let mut names: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
    names.extend((1..=n).map(|i| format!("f{i}")));
    names.push("z*".into());
    names.extend((1..=n).map(|i| format!("e{i}*")));
    names.extend((1..=n).map(|i| format!("f{i}*")));
    names.push("z".into());
    let mut constants = Vec::new();
    for i in 0..n {
        constants.push((b.e(i), b.f(i), b.z(), q(1, 1)));
        constants.push((b.zs(), b.e(i), b.fs(i), q(1, 1)));
        constants.push((b.zs(), b.f(i), b.es(i), q(-1, 1)));
    }
    LieAlgebra::new(b.dim(), Some(n), names, constants)
}

/// Semidirect product `g ⋉ g*` through the coadjoint action
/// `ad*(x)(φ) = -φ ∘ ad(x)`. Basis: that of `g`, then the dual basis.
pub fn cotangent_algebra(g: &LieAlgebra) -> LieAlgebra {
    let d = g.dim();
    let mut names = g.basis_names().to_vec();
    names.extend(g.basis_names().iter().map(|s| format!("{s}*")));
    let mut constants = Vec::new();
    for (i, j, k, c) in g.constants() {
        constants.push((i, j, k, c.clone()));
        // [x_i, φ^k] = -c_ij^k φ^j and [x_j, φ^k] = +c_ij^k φ^i
        constants.push((i, d + k, d + j, -c.clone()));
        constants.push((j, d + k, d + i, c));
    }
    LieAlgebra::new(2 * d, g.n(), names, constants).expect("cotangent of a valid algebra is valid")
}

/// Permutation matrix taking the basis of `cotangent_algebra(build_heisenberg(n))`
/// (`e, f, z, e*, f*, z*`) to the basis of `build_thn(n)` (`e, f, z*, e*, f*, z`).
pub fn heisenberg_cotangent_permutation(n: usize) -> Matrix<Rational> {
    let b = ThnBasis::new(n);
    let d = b.dim();
    let target = |src: usize| match src {
        s if s == 2 * n => b.z(),
        s if s == d - 1 => b.zs(),
        s => s,
    };
    Matrix::from_fn(d, d, |r, c| if r == target(c) { q(1, 1) } else { q(0, 1) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thn_brackets() {
        let g = build_thn(1).unwrap();
        let b = ThnBasis::new(1);
        assert_eq!(g.structure_constant(b.e(0), b.f(0), b.z()), q(1, 1));
        assert_eq!(g.structure_constant(b.zs(), b.e(0), b.fs(0)), q(1, 1));
        assert_eq!(g.structure_constant(b.f(0), b.zs(), b.es(0)), q(1, 1));
        assert!(g.jacobi_holds());
        assert!(g.is_two_step_nilpotent());
    }

    #[test]
    fn zero_n_rejected() {
        assert_eq!(build_thn(0).unwrap_err(), Error::InvalidN);
        assert_eq!(build_heisenberg(0).unwrap_err(), Error::InvalidN);
    }

    #[test]
    fn record_round_trip() {
        let g = build_thn(2).unwrap();
        assert_eq!(LieAlgebra::from_record(&g.to_record()).unwrap(), g);
    }

    #[test]
    fn inconsistent_constants_rejected() {
        let names = vec!["a".into(), "b".into(), "c".into()];
        let bad = LieAlgebra::new(3, None, names, [(0, 1, 2, q(1, 1)), (1, 0, 2, q(1, 1))]);
        assert!(bad.is_err());
    }
}
