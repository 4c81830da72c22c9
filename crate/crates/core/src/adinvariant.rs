//! Ad-invariant metrics on `T*h(2n+1)`: the duality pairing, the full solution
//! space, normalization and flatness.

use num_traits::Zero;
use rand::Rng;

use crate::automorphism::{assemble, AutParams, Automorphism};
use crate::curvature::{levi_civita, riemann};
use crate::echelon::{sparse_from_terms, Echelon, SparseRow};
use crate::error::{Error, Result};
use crate::lie::{build_thn, LieAlgebra, ThnBasis};
use crate::matrix::Matrix;
use crate::metric::{act, BilinearForm};
use crate::par;
use crate::scalar::{q, Rational, Scalar};

/// `⟨(x, x*), (y, y*)⟩ = x*(y) + y*(x)`.
pub fn pairing_metric<T: Scalar>(n: usize) -> Result<BilinearForm<T>> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    let h = ThnBasis::new(n).half();
    let mut m = Matrix::zeros(2 * h, 2 * h);
    for i in 0..h {
        m[(i, h + i)] = T::one();
        m[(h + i, i)] = T::one();
    }
    BilinearForm::new(m)
}

/// `⟨[x,y],z⟩ + ⟨y,[x,z]⟩ = 0` on every basis triple.
pub fn is_ad_invariant<T: Scalar>(s: &BilinearForm<T>, g: &LieAlgebra) -> Result<bool> {
    is_ad_invariant_tol(s, g, 0.0)
}

pub fn is_ad_invariant_tol<T: Scalar>(s: &BilinearForm<T>, g: &LieAlgebra, tol: f64) -> Result<bool> {
    let d = g.dim();
    if s.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: s.dim() });
    }
    Ok(par::all_range(d, |x| {
        let ad = g.basis_ad::<T>(x);
        ad.transpose().mul(s.matrix()).add(&s.matrix().mul(&ad)).is_zero(tol)
    }))
}

fn sym_index(d: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * d - a * (a + 1) / 2 + b
}

fn sym_from_vector(d: usize, v: &[Rational]) -> Matrix<Rational> {
    Matrix::from_fn(d, d, |a, b| v[sym_index(d, a, b)].clone())
}

/// Exact basis of the symmetric matrices `S` with `ad_xᵀ S + S ad_x = 0`.
pub fn ad_invariant_solution_space(n: usize) -> Result<Vec<Matrix<Rational>>> {
    let g = build_thn(n)?;
    let d = g.dim();
    let nvars = d * (d + 1) / 2;
    let rows: Vec<SparseRow> = par::flat_map_range(d, |x| {
        let mut out = Vec::new();
        for y in 0..d {
            for z in y..d {
                let mut terms = Vec::new();
                for (k, c) in g.bracket_basis(x, y) {
                    terms.push((sym_index(d, *k, z), c.clone()));
                }
                for (k, c) in g.bracket_basis(x, z) {
                    terms.push((sym_index(d, y, *k), c.clone()));
                }
                let row = sparse_from_terms(terms);
                if !row.is_empty() {
                    out.push(row);
                }
            }
        }
        out
    });
    let e = Echelon::from_rows(nvars, &rows);
    Ok(e.nullspace().iter().map(|v| sym_from_vector(d, v)).collect())
}

/// `[[S̄, αE], [αE, 0]]` in the `(g, g*)` splitting.
#[derive(Clone, Debug, PartialEq)]
pub struct AdInvariantForm<T> {
    pub sbar: Matrix<T>,
    pub alpha: T,
}

impl<T: Scalar> AdInvariantForm<T> {
    pub fn new(sbar: Matrix<T>, alpha: T) -> Result<Self> {
        if !sbar.is_square() || sbar.rows().is_multiple_of(2) {
            return Err(Error::InvalidStructure("Sbar must be (2n+1)x(2n+1)".into()));
        }
        if !sbar.is_symmetric(0.0) {
            return Err(Error::NotSymmetric);
        }
        Ok(Self { sbar, alpha })
    }

    pub fn n(&self) -> usize {
        self.sbar.rows() / 2
    }

    pub fn matrix(&self) -> Matrix<T> {
        let h = self.sbar.rows();
        let mut m = Matrix::zeros(2 * h, 2 * h);
        m.set_block(0, 0, &self.sbar);
        for i in 0..h {
            m[(i, h + i)] = self.alpha.clone();
            m[(h + i, i)] = self.alpha.clone();
        }
        m
    }

    /// Reads the template off a full matrix, `None` if it does not fit.
    pub fn from_matrix(m: &Matrix<T>, tol: f64) -> Option<Self> {
        if !m.is_square() || !m.rows().is_multiple_of(2) || m.rows() < 2 {
            return None;
        }
        let h = m.rows() / 2;
        let alpha = m[(0, h)].clone();
        let off = m.block(0, h, h, h);
        let ok = m.block(h, h, h, h).is_zero(tol)
            && off.approx_eq(&Matrix::identity(h).scale(&alpha), tol)
            && m.block(h, 0, h, h).approx_eq(&off, tol)
            && m.is_symmetric(tol);
        ok.then(|| Self { sbar: m.block(0, 0, h, h), alpha })
    }
}

/// `F` with `act(F, S) = pairing_metric(n)`: `F̄1 = E`, `f1 = 1/α`, `f4 = 1`,
/// `F3 = −S̄ F1 / 2α`.
pub fn normalize_ad_invariant<T: Scalar>(s: &AdInvariantForm<T>) -> Result<Automorphism<T>> {
    let n = s.n();
    if n == 0 {
        return Err(Error::InvalidN);
    }
    if s.alpha.is_negligible(if T::EXACT { 0.0 } else { 1e-12 }) {
        return Err(Error::Degenerate);
    }
    let h = 2 * n + 1;
    let inv_alpha = T::one().div_ref(&s.alpha);
    let mut f1 = Matrix::identity(h);
    f1[(h - 1, h - 1)] = inv_alpha.clone();
    let f3 = s.sbar.mul(&f1).scale(&inv_alpha.mul_ref(&T::from_frac(-1, 2)));
    assemble(AutParams { f1: inv_alpha, f3, ..AutParams::identity(n) }, n)
}

/// Normalizes and checks `act(F, S)` against the pairing metric.
pub fn normalize_and_check<T: Scalar>(s: &AdInvariantForm<T>, tol: f64) -> Result<(Automorphism<T>, bool)> {
    let f = normalize_ad_invariant(s)?;
    let form = BilinearForm::new(s.matrix())?;
    let target = pairing_metric::<T>(s.n())?;
    let ok = act(&f, &form)?.matrix().approx_eq(target.matrix(), tol);
    Ok((f, ok))
}

/// Outcome of the two flatness routes for the pairing metric.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct FlatnessCertificate {
    /// `ad_{[b_i,b_j]} = 0` for all pairs, so `−¼ ad_{[u,v]}` vanishes
    pub bracket_route: bool,
    /// full Riemann tensor of the Levi-Civita connection is zero
    pub riemann_route: bool,
    /// `R(b_i, b_j) = −¼ ad_{[b_i,b_j]}` entrywise
    pub routes_agree: bool,
    /// `∇_x y = ½[x,y]` on basis pairs
    pub half_bracket_connection: bool,
}

impl FlatnessCertificate {
    pub fn flat(&self) -> bool {
        self.bracket_route && self.riemann_route && self.routes_agree
    }
}

pub fn certify_flat(n: usize) -> Result<FlatnessCertificate> {
    let g = build_thn(n)?;
    let d = g.dim();
    let p = pairing_metric::<Rational>(n)?;
    let ads: Vec<Matrix<Rational>> = (0..d).map(|i| g.basis_ad(i)).collect();
    let ad_of_bracket = |i: usize, j: usize| {
        let mut m = Matrix::zeros(d, d);
        for (k, c) in g.bracket_basis(i, j) {
            m = m.add(&ads[*k].scale(c));
        }
        m
    };
    let bracket_route = par::all_range(d, |i| (0..d).all(|j| ad_of_bracket(i, j).is_zero(0.0)));
    let conn = levi_civita(&g, p.matrix())?;
    let rt = riemann(&conn, &g);
    let riemann_route = rt.is_zero(0.0);
    let quarter = q(-1, 4);
    let routes_agree = par::all_range(d, |i| (0..d).all(|j| rt.r[i][j] == ad_of_bracket(i, j).scale(&quarter)));
    let half = q(1, 2);
    let half_bracket_connection = par::all_range(d, |i| {
        (0..d).all(|j| {
            let mut expect = vec![Rational::zero(); d];
            for (k, c) in g.bracket_basis(i, j) {
                expect[*k] = c * &half;
            }
            conn.gamma[i][j] == expect
        })
    });
    Ok(FlatnessCertificate { bracket_route, riemann_route, routes_agree, half_bracket_connection })
}

/// Random ad-invariant form with small rational entries and `α ≠ 0`.
pub fn random_ad_invariant(n: usize, rng: &mut impl Rng) -> AdInvariantForm<Rational> {
    let h = 2 * n + 1;
    let mut sbar = Matrix::zeros(h, h);
    for r in 0..h {
        for c in r..h {
            let v = q(rng.gen_range(-5..=5), rng.gen_range(1..=4));
            sbar[(r, c)] = v.clone();
            sbar[(c, r)] = v;
        }
    }
    let mut alpha = Rational::zero();
    while alpha.is_zero() {
        alpha = q(rng.gen_range(-6..=6), rng.gen_range(1..=3));
    }
    AdInvariantForm { sbar, alpha }
}

/// Expected dimension of the solution space: `(2n+1)(2n+2)/2 + 1`.
pub fn template_dimension(n: usize) -> usize {
    (2 * n + 1) * (2 * n + 2) / 2 + 1
}

/// True when every basis element fits the template.
pub fn solution_space_matches_template(basis: &[Matrix<Rational>]) -> bool {
    basis.iter().all(|m| AdInvariantForm::from_matrix(m, 0.0).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{signature, Signature};
    use crate::metric::seeded_rng;
    use num_traits::One;

    #[test]
    fn pairing_examples() {
        let p = pairing_metric::<Rational>(1).unwrap();
        let b = ThnBasis::new(1);
        assert_eq!(p.matrix()[(b.e(0), b.es(0))], Rational::one());
        assert_eq!(p.matrix()[(b.e(0), b.e(0))], Rational::zero());
        assert_eq!(signature(p.matrix()), Signature::new(3, 3, 0));
        let g = build_thn(1).unwrap();
        assert!(is_ad_invariant(&p, &g).unwrap());
        let id = BilinearForm::new(Matrix::<Rational>::identity(6)).unwrap();
        assert!(!is_ad_invariant(&id, &g).unwrap());
        assert!(is_ad_invariant(&id, &LieAlgebra::abelian(6)).unwrap());
    }

    #[test]
    fn solution_dims() {
        for n in 1..=2 {
            let basis = ad_invariant_solution_space(n).unwrap();
            assert_eq!(basis.len(), template_dimension(n));
            assert!(solution_space_matches_template(&basis));
        }
    }

    #[test]
    fn normalizer_examples() {
        let id = AdInvariantForm { sbar: Matrix::zeros(3, 3), alpha: Rational::one() };
        assert_eq!(normalize_ad_invariant(&id).unwrap().matrix(), &Matrix::identity(6));
        let s = AdInvariantForm { sbar: Matrix::identity(3), alpha: q(2, 1) };
        assert!(normalize_and_check(&s, 0.0).unwrap().1);
        let mut rng = seeded_rng(3);
        let mut r = random_ad_invariant(2, &mut rng);
        r.alpha = q(-3, 1);
        assert!(normalize_and_check(&r, 0.0).unwrap().1);
        let z = AdInvariantForm { sbar: Matrix::identity(3), alpha: Rational::zero() };
        assert!(matches!(normalize_ad_invariant(&z), Err(Error::Degenerate)));
    }

    #[test]
    fn flat() {
        let c = certify_flat(1).unwrap();
        assert!(c.flat() && c.half_bracket_connection);
    }
}
