//! Incremental sparse row echelon form over exact rationals.
//!
//! Constraint systems here (derivations, closed invariant forms, ad-invariance)
//! have hundreds of unknowns but only a handful of nonzeros per row, so rows
//! are kept sparse and fully reduced against each other. Independent chunks of
//! rows are reduced in parallel and then merged.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::par;
use crate::scalar::Rational;

/// Sparse row: `(column, value)` pairs sorted by column, no explicit zeros.
pub type SparseRow = Vec<(usize, Rational)>;

#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    /// pivot column -> row with a 1 at the pivot and zeros at every other pivot column
    rows: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, rows: BTreeMap::new() }
    }

    /// Builds the echelon form of `rows`, reducing chunks concurrently.
    pub fn from_rows(ncols: usize, rows: &[SparseRow]) -> Self {
        par::chunked_reduce(
            rows,
            64,
            || Echelon::new(ncols),
            |mut acc, row| {
                acc.insert(row.clone());
                acc
            },
            Echelon::merge,
        )
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rank()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Reduces `row` against the current pivots.
    pub fn reduce(&self, row: &SparseRow) -> SparseRow {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (c, v) in row {
            if let Some(pivot_row) = self.rows.get(c) {
                for (pc, pv) in pivot_row {
                    let e = acc.entry(*pc).or_insert_with(Rational::zero);
                    *e -= v * pv;
                }
            }
            let e = acc.entry(*c).or_insert_with(Rational::zero);
            *e += v;
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// Adds a row; returns false when it was already in the row space.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let mut r = self.reduce(&row);
        let Some((lead, lead_val)) = r.first().cloned() else { return false };
        if !lead_val.is_one() {
            for (_, v) in &mut r {
                *v /= &lead_val;
            }
        }
        for pivot_row in self.rows.values_mut() {
            let Ok(pos) = pivot_row.binary_search_by_key(&lead, |(c, _)| *c) else { continue };
            let factor = pivot_row[pos].1.clone();
            *pivot_row = axpy_sparse(pivot_row, &r, &factor);
        }
        self.rows.insert(lead, r);
        true
    }

    pub fn merge(mut self, other: Echelon) -> Echelon {
        if other.rank() > self.rank() {
            return other.merge(self);
        }
        for (_, row) in other.rows {
            self.insert(row);
        }
        self
    }

    pub fn contains(&self, row: &SparseRow) -> bool {
        self.reduce(row).is_empty()
    }

    /// Dense reduced rows spanning the row space, ordered by pivot.
    pub fn row_basis(&self) -> Vec<Vec<Rational>> {
        self.rows
            .values()
            .map(|row| {
                let mut v = vec![Rational::zero(); self.ncols];
                for (c, x) in row {
                    v[*c] = x.clone();
                }
                v
            })
            .collect()
    }

    /// Basis of the solution space `{x : row · x = 0 for every row}`.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        (0..self.ncols)
            .filter(|c| !self.rows.contains_key(c))
            .map(|free| {
                let mut v = vec![Rational::zero(); self.ncols];
                v[free] = Rational::one();
                for (p, row) in &self.rows {
                    if let Ok(pos) = row.binary_search_by_key(&free, |(c, _)| *c) {
                        v[*p] = -row[pos].1.clone();
                    }
                }
                v
            })
            .collect()
    }
}

/// Solution set `{point + Σ t_k direction_k}` of an affine system.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSpace {
    pub point: Vec<Rational>,
    pub directions: Vec<Vec<Rational>>,
}

impl AffineSpace {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    /// True when `v` lies in the space.
    pub fn contains(&self, v: &[Rational]) -> bool {
        let ncols = self.point.len();
        let diff: Vec<Rational> = v.iter().zip(&self.point).map(|(a, b)| a - b).collect();
        let dirs: Vec<SparseRow> = self.directions.iter().map(|d| sparse_from_dense(d)).collect();
        Echelon::from_rows(ncols, &dirs).contains(&sparse_from_dense(&diff))
    }

    /// Equality as sets.
    pub fn same_as(&self, other: &AffineSpace) -> bool {
        if self.dim() != other.dim() || !self.contains(&other.point) {
            return false;
        }
        other.directions.iter().all(|d| {
            let shifted: Vec<Rational> = self.point.iter().zip(d).map(|(a, b)| a + b).collect();
            self.contains(&shifted)
        })
    }
}

/// Solves `A x = b` given as `(row of A, b entry)` pairs; `None` if inconsistent.
pub fn solve_affine(ncols: usize, rows: &[(SparseRow, Rational)]) -> Option<AffineSpace> {
    let augmented: Vec<SparseRow> = rows
        .iter()
        .map(|(r, b)| {
            let mut row = r.clone();
            if !b.is_zero() {
                row.push((ncols, b.clone()));
            }
            row
        })
        .collect();
    let e = Echelon::from_rows(ncols + 1, &augmented);
    if e.rows.contains_key(&ncols) {
        return None;
    }
    let mut point = vec![Rational::zero(); ncols];
    for (p, row) in &e.rows {
        if let Some((_, b)) = row.iter().find(|(c, _)| *c == ncols) {
            point[*p] = b.clone();
        }
    }
    let directions = e
        .nullspace()
        .into_iter()
        .filter(|v| v[ncols].is_zero())
        .map(|mut v| {
            v.truncate(ncols);
            v
        })
        .collect();
    Some(AffineSpace { point, directions })
}

/// `a - factor * b` for sparse rows.
fn axpy_sparse(a: &SparseRow, b: &SparseRow, factor: &Rational) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(usize::MAX, |e| e.0);
        let cb = b.get(j).map_or(usize::MAX, |e| e.0);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            out.push((cb, -(factor * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - factor * &b[j].1;
            if !v.is_zero() {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Converts a dense coefficient vector to sparse form.
pub fn sparse_from_dense(v: &[Rational]) -> SparseRow {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

/// Builds a sparse row from possibly repeated `(column, value)` terms.
pub fn sparse_from_terms(terms: impl IntoIterator<Item = (usize, Rational)>) -> SparseRow {
    let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
    for (c, v) in terms {
        *acc.entry(c).or_insert_with(Rational::zero) += v;
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::scalar::q;

    #[test]
    fn agrees_with_dense_rref() {
        let dense = vec![
            vec![q(1, 1), q(2, 1), q(0, 1), q(-1, 1)],
            vec![q(2, 1), q(4, 1), q(1, 1), q(0, 1)],
            vec![q(3, 1), q(6, 1), q(1, 1), q(-1, 1)],
        ];
        let rows: Vec<SparseRow> = dense.iter().map(|r| sparse_from_dense(r)).collect();
        let e = Echelon::from_rows(4, &rows);
        let m = Matrix::from_rows(&dense).unwrap();
        assert_eq!(e.rank(), m.rank(0.0));
        for v in e.nullspace() {
            assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
        }
        assert_eq!(e.nullspace().len(), 2);
    }

    #[test]
    fn affine_solution() {
        // x + y = 2, y - z = 1
        let rows = vec![
            (vec![(0, q(1, 1)), (1, q(1, 1))], q(2, 1)),
            (vec![(1, q(1, 1)), (2, q(-1, 1))], q(1, 1)),
        ];
        let sol = solve_affine(3, &rows).unwrap();
        assert_eq!(sol.dim(), 1);
        assert!(sol.contains(&[q(1, 1), q(1, 1), q(0, 1)]));
        assert!(!sol.contains(&[q(0, 1), q(0, 1), q(0, 1)]));
        assert!(solve_affine(1, &[(vec![], q(1, 1))]).is_none());
    }

    #[test]
    fn duplicate_terms_are_summed() {
        let r = sparse_from_terms([(2, q(1, 1)), (0, q(3, 1)), (2, q(-1, 1))]);
        assert_eq!(r, vec![(0, q(3, 1))]);
    }
}
