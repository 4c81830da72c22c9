//! Levi-Civita connection, Riemann and Ricci tensors of left-invariant
//! metrics, and inertia of symmetric forms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::matrix::Matrix;
use crate::par;
use crate::scalar::Scalar;

/// Inertia `(p, q, z)`: positive, negative and zero directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub fn new(positive: usize, negative: usize, zero: usize) -> Self {
        Self { positive, negative, zero }
    }
}

/// Inertia by symmetric `LDLᵀ` with 1×1 and 2×2 pivots. Exact for rational
/// input; for floats entries below `1e-10 · max|a|` count as zero.
pub fn signature<T: Scalar>(m: &Matrix<T>) -> Signature {
    let tol = if T::EXACT { 0.0 } else { 1e-10 * m.max_abs().max(f64::MIN_POSITIVE) };
    let mut a = m.symmetrized();
    let mut sig = Signature::new(0, 0, 0);
    loop {
        let k = a.rows();
        if k == 0 {
            return sig;
        }
        let diag = pick_diag(&a, tol);
        let off = pick_off(&a, tol);
        let use_single = match (&diag, &off) {
            (Some(d), Some((i, j))) if !T::EXACT => a[(*d, *d)].to_f64().abs() >= 0.6404 * a[(*i, *j)].to_f64().abs(),
            (Some(_), _) => true,
            (None, _) => false,
        };
        if use_single {
            let p = diag.expect("checked");
            let pivot = a[(p, p)].clone();
            if pivot.is_positive() {
                sig.positive += 1;
            } else {
                sig.negative += 1;
            }
            let rest: Vec<usize> = (0..k).filter(|&r| r != p).collect();
            a = Matrix::from_fn(k - 1, k - 1, |r, c| {
                let (r, c) = (rest[r], rest[c]);
                a[(r, c)].sub_ref(&a[(r, p)].mul_ref(&a[(p, c)]).div_ref(&pivot))
            });
        } else if let Some((i, j)) = off {
            let (p, b, r) = (a[(i, i)].clone(), a[(i, j)].clone(), a[(j, j)].clone());
            let det = p.mul_ref(&r).sub_ref(&b.mul_ref(&b));
            if det.is_negative() {
                sig.positive += 1;
                sig.negative += 1;
            } else if p.add_ref(&r).is_positive() {
                sig.positive += 2;
            } else {
                sig.negative += 2;
            }
            let rest: Vec<usize> = (0..k).filter(|&x| x != i && x != j).collect();
            a = Matrix::from_fn(k - 2, k - 2, |x, y| {
                let (x, y) = (rest[x], rest[y]);
                let (xi, xj, yi, yj) = (&a[(x, i)], &a[(x, j)], &a[(i, y)], &a[(j, y)]);
                // C P⁻¹ Cᵀ with P⁻¹ = [[r, -b], [-b, p]] / det
                let t = xi.mul_ref(&r).mul_ref(yi).sub_ref(&xi.mul_ref(&b).mul_ref(yj)).sub_ref(&xj.mul_ref(&b).mul_ref(yi))
                    .add_ref(&xj.mul_ref(&p).mul_ref(yj));
                a[(x, y)].sub_ref(&t.div_ref(&det))
            });
        } else {
            sig.zero += k;
            return sig;
        }
    }
}

fn pick_diag<T: Scalar>(a: &Matrix<T>, tol: f64) -> Option<usize> {
    let cands = (0..a.rows()).filter(|&i| !a[(i, i)].is_negligible(tol));
    if T::EXACT {
        cands.into_iter().next()
    } else {
        cands.max_by(|&x, &y| a[(x, x)].to_f64().abs().total_cmp(&a[(y, y)].to_f64().abs()))
    }
}

fn pick_off<T: Scalar>(a: &Matrix<T>, tol: f64) -> Option<(usize, usize)> {
    let k = a.rows();
    let cands = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).filter(|&(i, j)| !a[(i, j)].is_negligible(tol));
    if T::EXACT {
        cands.into_iter().next()
    } else {
        cands.max_by(|&(a1, b1), &(a2, b2)| a[(a1, b1)].to_f64().abs().total_cmp(&a[(a2, b2)].to_f64().abs()))
    }
}

/// Inertia from float eigenvalues, used as a cross-check.
pub fn signature_eigen(m: &Matrix<f64>, tol: f64) -> Signature {
    let eig = nalgebra::SymmetricEigen::new(crate::metric::to_na(&m.symmetrized()));
    let mut sig = Signature::new(0, 0, 0);
    for &v in eig.eigenvalues.iter() {
        if v > tol {
            sig.positive += 1;
        } else if v < -tol {
            sig.negative += 1;
        } else {
            sig.zero += 1;
        }
    }
    sig
}

/// `gamma[i][j]` holds the coordinates of `∇_{b_i} b_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection<T> {
    pub gamma: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> Connection<T> {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// Matrix of `∇_{b_i}`: column `j` is `∇_{b_i} b_j`.
    pub fn operator(&self, i: usize) -> Matrix<T> {
        let d = self.dim();
        Matrix::from_fn(d, d, |r, c| self.gamma[i][c][r].clone())
    }

    /// `∇_x y` for arbitrary vectors.
    pub fn covariant(&self, x: &[T], y: &[T]) -> Vec<T> {
        let d = self.dim();
        let mut out = vec![T::zero(); d];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let w = xi.mul_ref(yj);
                for (o, g) in out.iter_mut().zip(&self.gamma[i][j]) {
                    o.add_mul_assign(&w, g);
                }
            }
        }
        out
    }

    pub fn is_torsion_free(&self, g: &LieAlgebra, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            (i + 1..d).all(|j| {
                let mut br = vec![T::zero(); d];
                for (k, c) in g.bracket_basis(i, j) {
                    br[*k] = T::from_rational(c);
                }
                (0..d).all(|k| self.gamma[i][j][k].sub_ref(&self.gamma[j][i][k]).sub_ref(&br[k]).is_negligible(tol))
            })
        })
    }

    /// `⟨∇_x y, z⟩ + ⟨y, ∇_x z⟩ = 0` on basis triples.
    pub fn is_metric(&self, s: &Matrix<T>, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            let lowered: Vec<Vec<T>> = (0..d).map(|j| s.mul_vec(&self.gamma[i][j])).collect();
            (0..d).all(|j| (j..d).all(|k| lowered[j][k].add_ref(&lowered[k][j]).is_negligible(tol)))
        })
    }
}

/// Levi-Civita connection via the Koszul formula
/// `2⟨∇_x y, z⟩ = ⟨[x,y],z⟩ − ⟨[y,z],x⟩ + ⟨[z,x],y⟩`.
pub fn levi_civita<T: Scalar>(g: &LieAlgebra, s: &Matrix<T>) -> Result<Connection<T>> {
    let d = g.dim();
    if s.rows() != d || !s.is_square() {
        return Err(Error::DimensionMismatch { expected: d, got: s.rows() });
    }
    let tol = if T::EXACT { 0.0 } else { 1e-13 };
    let s_inv = s.inverse(tol * s.max_abs()).map_err(|_| Error::DegenerateMetric)?;
    // lowered[i][j][k] = ⟨[b_i, b_j], b_k⟩
    let lowered: Vec<Vec<Vec<T>>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut v = vec![T::zero(); d];
                    for (m, c) in g.bracket_basis(i, j) {
                        let c = T::from_rational(c);
                        for (k, vk) in v.iter_mut().enumerate() {
                            vk.add_mul_assign(&c, &s[(*m, k)]);
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    let half = T::from_frac(1, 2);
    let gamma = par::map_range(d, |i| {
        (0..d)
            .map(|j| {
                let koszul: Vec<T> = (0..d)
                    .map(|k| lowered[i][j][k].sub_ref(&lowered[j][k][i]).add_ref(&lowered[k][i][j]).mul_ref(&half))
                    .collect();
                s_inv.mul_vec(&koszul)
            })
            .collect()
    });
    Ok(Connection { gamma })
}

/// `r[i][j]` is the matrix of `R(b_i, b_j) = [∇_i, ∇_j] − ∇_{[b_i, b_j]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannTensor<T> {
    pub r: Vec<Vec<Matrix<T>>>,
}

impl<T: Scalar> RiemannTensor<T> {
    pub fn dim(&self) -> usize {
        self.r.len()
    }

    /// Coordinate `l` of `R(b_i, b_j) b_k`.
    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> &T {
        &self.r[i][j][(l, k)]
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.r.iter().all(|row| row.iter().all(|m| m.is_zero(tol)))
    }

    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| self.r[i][j].add(&self.r[j][i]).is_zero(tol)))
    }

    /// `R(x,y)z + R(y,z)x + R(z,x)y = 0` on basis triples.
    pub fn bianchi_holds(&self, tol: f64) -> bool {
        let d = self.dim();
        par::all_range(d, |i| {
            (0..d).all(|j| {
                (0..d).all(|k| {
                    (0..d).all(|l| {
                        self.r[i][j][(l, k)].add_ref(&self.r[j][k][(l, i)]).add_ref(&self.r[k][i][(l, j)]).is_negligible(tol)
                    })
                })
            })
        })
    }

    /// First nonzero component `(k, l)` of `R(b_i, b_j)`, as `(k, l, value)`.
    pub fn witness(&self, i: usize, j: usize, tol: f64) -> Option<(usize, usize, T)> {
        let m = &self.r[i][j];
        let d = self.dim();
        (0..d).flat_map(|k| (0..d).map(move |l| (k, l))).find(|&(k, l)| !m[(l, k)].is_negligible(tol)).map(|(k, l)| (k, l, m[(l, k)].clone()))
    }
}

pub fn riemann<T: Scalar>(conn: &Connection<T>, g: &LieAlgebra) -> RiemannTensor<T> {
    let d = g.dim();
    let ops: Vec<Matrix<T>> = (0..d).map(|i| conn.operator(i)).collect();
    let upper: Vec<Vec<Matrix<T>>> = par::map_range(d, |i| {
        (i + 1..d)
            .map(|j| {
                let mut m = ops[i].mul(&ops[j]).sub(&ops[j].mul(&ops[i]));
                for (k, c) in g.bracket_basis(i, j) {
                    m = m.sub(&ops[*k].scale(&T::from_rational(c)));
                }
                m
            })
            .collect()
    });
    let mut r = vec![vec![Matrix::zeros(d, d); d]; d];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, m) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            r[j][i] = m.neg();
            r[i][j] = m;
        }
    }
    RiemannTensor { r }
}

/// `ρ(y, z) = tr(x ↦ R(x, y) z)`.
pub fn ricci_from_riemann<T: Scalar>(rt: &RiemannTensor<T>) -> Matrix<T> {
    let d = rt.dim();
    Matrix::from_fn(d, d, |j, k| {
        let mut acc = T::zero();
        for i in 0..d {
            acc = acc.add_ref(&rt.r[i][j][(i, k)]);
        }
        acc
    })
}

/// The two summands of `ρ(u,v) = −¼ tr(j_u j_v) − ½ tr(ad_u ad*_v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RicciSplit<T> {
    /// `−¼ tr(j_u ∘ j_v)` with `j_u v = ad*_v u`
    pub j_term: Matrix<T>,
    /// `−½ tr(ad_u ∘ ad*_v)`
    pub ad_term: Matrix<T>,
}

impl<T: Scalar> RicciSplit<T> {
    pub fn total(&self) -> Matrix<T> {
        self.j_term.add(&self.ad_term)
    }
}

/// Ricci tensor of a nilpotent metric Lie algebra through metric adjoints
/// `ad*_u = S⁻¹ ad_uᵀ S`.
pub fn ricci_nilpotent_formula<T: Scalar>(g: &LieAlgebra, s: &Matrix<T>) -> Result<RicciSplit<T>> {
    let d = g.dim();
    if s.rows() != d || !s.is_square() {
        return Err(Error::DimensionMismatch { expected: d, got: s.rows() });
    }
    let tol = if T::EXACT { 0.0 } else { 1e-13 };
    let s_inv = s.inverse(tol * s.max_abs()).map_err(|_| Error::DegenerateMetric)?;
    let ads: Vec<Matrix<T>> = (0..d).map(|i| g.basis_ad::<T>(i)).collect();
    let adj: Vec<Matrix<T>> = ads.iter().map(|a| s_inv.mul(&a.transpose().mul(s))).collect();
    // j_a: column k = ad*_{b_k} b_a
    let js: Vec<Matrix<T>> = (0..d).map(|a| Matrix::from_fn(d, d, |r, k| adj[k][(r, a)].clone())).collect();
    let trace_prod = |x: &Matrix<T>, y: &Matrix<T>| {
        let mut acc = T::zero();
        for r in 0..d {
            for c in 0..d {
                acc.add_mul_assign(&x[(r, c)], &y[(c, r)]);
            }
        }
        acc
    };
    let quarter = T::from_frac(-1, 4);
    let half = T::from_frac(-1, 2);
    let rows: Vec<Vec<(T, T)>> = par::map_range(d, |u| {
        (0..d).map(|v| (trace_prod(&js[u], &js[v]).mul_ref(&quarter), trace_prod(&ads[u], &adj[v]).mul_ref(&half))).collect()
    });
    Ok(RicciSplit {
        j_term: Matrix::from_fn(d, d, |u, v| rows[u][v].0.clone()),
        ad_term: Matrix::from_fn(d, d, |u, v| rows[u][v].1.clone()),
    })
}

/// Everything the curvature engine certifies for one metric.
#[derive(Clone, Debug)]
pub struct CurvatureReport<T> {
    pub connection: Connection<T>,
    pub riemann: RiemannTensor<T>,
    pub ricci: Matrix<T>,
    pub ricci_split: RicciSplit<T>,
    pub connection_ok: bool,
    pub bianchi_ok: bool,
    pub routes_agree: bool,
    pub flat: bool,
}

pub fn analyze<T: Scalar>(g: &LieAlgebra, s: &Matrix<T>, tol: f64) -> Result<CurvatureReport<T>> {
    let connection = levi_civita(g, s)?;
    let riemann = riemann(&connection, g);
    let ricci = ricci_from_riemann(&riemann);
    let ricci_split = ricci_nilpotent_formula(g, s)?;
    let connection_ok = connection.is_torsion_free(g, tol) && connection.is_metric(s, tol);
    let bianchi_ok = riemann.bianchi_holds(tol) && riemann.is_antisymmetric(tol);
    let routes_agree = ricci.approx_eq(&ricci_split.total(), tol);
    let flat = riemann.is_zero(tol);
    Ok(CurvatureReport { connection, riemann, ricci, ricci_split, connection_ok, bianchi_ok, routes_agree, flat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{build_thn, ThnBasis};
    use crate::scalar::{q, Rational};

    #[test]
    fn inertia_examples() {
        assert_eq!(signature(&Matrix::<Rational>::identity(6)), Signature::new(6, 0, 0));
        let hyperbolic = Matrix::from_rows(&[vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]]).unwrap();
        assert_eq!(signature(&hyperbolic), Signature::new(1, 1, 0));
        let rank_one = Matrix::from_rows(&[vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]]).unwrap();
        assert_eq!(signature(&rank_one), Signature::new(1, 0, 1));
    }

    #[test]
    fn identity_metric_connection_n1() {
        let g = build_thn(1).unwrap();
        let b = ThnBasis::new(1);
        let conn = levi_civita(&g, &Matrix::<Rational>::identity(6)).unwrap();
        assert_eq!(conn.gamma[b.e(0)][b.f(0)][b.z()], q(1, 2));
        assert_eq!(conn.gamma[b.e(0)][b.z()][b.f(0)], q(-1, 2));
        assert!(conn.is_torsion_free(&g, 0.0) && conn.is_metric(&Matrix::identity(6), 0.0));
    }

    #[test]
    fn abelian_connection_vanishes() {
        let g = LieAlgebra::abelian(4);
        let s = Matrix::<Rational>::diagonal(&[q(1, 1), q(-2, 1), q(3, 1), q(5, 7)]);
        let conn = levi_civita(&g, &s).unwrap();
        assert!(conn.gamma.iter().flatten().flatten().all(|v| *v == q(0, 1)));
    }

    #[test]
    fn routes_agree_for_identity_metric() {
        let g = build_thn(1).unwrap();
        let rep = analyze(&g, &Matrix::<Rational>::identity(6), 0.0).unwrap();
        assert!(rep.routes_agree && rep.bianchi_ok && rep.connection_ok);
        assert!(!rep.ricci.is_zero(0.0));
    }
}
