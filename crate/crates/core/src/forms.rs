//! Left-invariant 1-, 2- and 3-forms, closed `J0`-invariant 2-forms and the
//! pseudo-Kähler metrics they define.

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::complex::{j0, AlmostComplexStructure};
use crate::curvature::{levi_civita, ricci_from_riemann, ricci_nilpotent_formula, riemann, signature, Signature};
use crate::echelon::{sparse_from_dense, sparse_from_terms, Echelon, SparseRow};
use crate::error::{Error, Result};
use crate::lie::{build_thn, LieAlgebra, ThnBasis};
use crate::matrix::Matrix;
use crate::metric::BilinearForm;
use crate::par;
use crate::scalar::{q, rational_to_string, Rational, Scalar};

/// `Ω(a, b) = aᵀ M b` with `M` antisymmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm<T> {
    matrix: Matrix<T>,
}

impl<T: Scalar> TwoForm<T> {
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        let tol = if T::EXACT { 0.0 } else { 1e-12 * (1.0 + matrix.max_abs()) };
        if !matrix.is_antisymmetric(tol) {
            return Err(Error::InvalidStructure("2-form matrix is not antisymmetric".into()));
        }
        Ok(Self { matrix })
    }

    pub fn zero(dim: usize) -> Self {
        Self { matrix: Matrix::zeros(dim, dim) }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn eval(&self, a: &[T], b: &[T]) -> T {
        self.matrix.bilinear(a, b)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.add(&other.matrix) }
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { matrix: self.matrix.scale(s) }
    }

    /// Upper-triangle entries `(a < b)` in row order.
    pub fn coordinates(&self) -> Vec<T> {
        let d = self.dim();
        (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).map(|(a, b)| self.matrix[(a, b)].clone()).collect()
    }

    pub fn from_coordinates(dim: usize, v: &[T]) -> Self {
        let mut m = Matrix::zeros(dim, dim);
        for (a, b) in pairs(dim) {
            let x = v[pair_index(dim, a, b)].clone();
            m[(b, a)] = -x.clone();
            m[(a, b)] = x;
        }
        Self { matrix: m }
    }
}

fn pairs(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..d).flat_map(move |a| (a + 1..d).map(move |b| (a, b)))
}

fn pair_index(d: usize, a: usize, b: usize) -> usize {
    a * d - a * (a + 1) / 2 + (b - a - 1)
}

/// `(α ∧ β)(x, y) = α(x) β(y) − α(y) β(x)`.
pub fn wedge<T: Scalar>(alpha: &[T], beta: &[T]) -> TwoForm<T> {
    let d = alpha.len();
    TwoForm { matrix: Matrix::from_fn(d, d, |r, c| alpha[r].mul_ref(&beta[c]).sub_ref(&alpha[c].mul_ref(&beta[r]))) }
}

/// Alternating table `t[(a, b, c)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeForm<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> ThreeForm<T> {
    pub fn get(&self, a: usize, b: usize, c: usize) -> &T {
        &self.data[(a * self.dim + b) * self.dim + c]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|v| v.is_negligible(tol))
    }

    pub fn is_alternating(&self, tol: f64) -> bool {
        let d = self.dim;
        (0..d).all(|a| {
            (0..d).all(|b| {
                (0..d).all(|c| {
                    let v = self.get(a, b, c);
                    v.add_ref(self.get(b, a, c)).is_negligible(tol) && v.add_ref(self.get(a, c, b)).is_negligible(tol)
                })
            })
        })
    }
}

/// `dα(x, y) = α([x, y])`.
pub fn d_one_form<T: Scalar>(alpha: &[T], g: &LieAlgebra) -> Result<TwoForm<T>> {
    let d = g.dim();
    if alpha.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: alpha.len() });
    }
    Ok(TwoForm {
        matrix: Matrix::from_fn(d, d, |a, b| {
            let mut acc = T::zero();
            for (k, c) in g.bracket_basis(a, b) {
                acc = acc.add_ref(&T::from_rational(c).mul_ref(&alpha[*k]));
            }
            acc
        }),
    })
}

/// `dΩ(x, y, w) = Ω([x,y], w) − Ω([x,w], y) + Ω([y,w], x)`.
pub fn d_two_form<T: Scalar>(omega: &TwoForm<T>, g: &LieAlgebra) -> Result<ThreeForm<T>> {
    let d = g.dim();
    if omega.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: omega.dim() });
    }
    let m = omega.matrix();
    let term = |a: usize, b: usize, c: usize| {
        let mut acc = T::zero();
        for (k, coef) in g.bracket_basis(a, b) {
            acc = acc.add_ref(&T::from_rational(coef).mul_ref(&m[(*k, c)]));
        }
        acc
    };
    let slabs: Vec<Vec<T>> = par::map_range(d, |a| {
        let mut out = Vec::with_capacity(d * d);
        for b in 0..d {
            for c in 0..d {
                out.push(term(a, b, c).sub_ref(&term(a, c, b)).add_ref(&term(b, c, a)));
            }
        }
        out
    });
    Ok(ThreeForm { dim: d, data: slabs.concat() })
}

/// `Ω(JX, JY) = Ω(X, Y)`.
pub fn j_invariant<T: Scalar>(omega: &TwoForm<T>, j: &AlmostComplexStructure<T>, tol: f64) -> bool {
    j.matrix().congruence(omega.matrix()).approx_eq(omega.matrix(), if T::EXACT { 0.0 } else { tol })
}

pub fn is_closed<T: Scalar>(omega: &TwoForm<T>, g: &LieAlgebra, tol: f64) -> Result<bool> {
    Ok(d_two_form(omega, g)?.is_zero(if T::EXACT { 0.0 } else { tol }))
}

pub fn is_nondegenerate<T: Scalar>(omega: &TwoForm<T>, tol: f64) -> bool {
    let m = omega.matrix();
    if T::EXACT {
        !m.determinant(0.0).is_zero()
    } else {
        m.rank(tol * (1.0 + m.max_abs())) == m.rows()
    }
}

/// Exact basis of the closed `J0`-invariant 2-forms.
pub fn closed_invariant_space(n: usize) -> Result<Vec<TwoForm<Rational>>> {
    let g = build_thn(n)?;
    let j = j0::<Rational>(n)?;
    let d = g.dim();
    let nvars = d * (d - 1) / 2;
    // Ω_ab as a sparse combination of the unknowns
    let entry = |a: usize, b: usize| -> Option<(usize, Rational)> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some((pair_index(d, a, b), Rational::one())),
            std::cmp::Ordering::Greater => Some((pair_index(d, b, a), -Rational::one())),
            std::cmp::Ordering::Equal => None,
        }
    };
    let jm = j.matrix();
    let jcols: Vec<Vec<(usize, Rational)>> = (0..d).map(|c| (0..d).filter(|&r| !jm[(r, c)].is_zero()).map(|r| (r, jm[(r, c)].clone())).collect()).collect();
    let mut rows: Vec<SparseRow> = pairs(d)
        .map(|(a, b)| {
            let mut terms = Vec::new();
            for (ra, ca) in &jcols[a] {
                for (rb, cb) in &jcols[b] {
                    if let Some((v, s)) = entry(*ra, *rb) {
                        terms.push((v, s * ca * cb));
                    }
                }
            }
            terms.push((pair_index(d, a, b), -Rational::one()));
            sparse_from_terms(terms)
        })
        .collect();
    let closed: Vec<SparseRow> = par::flat_map_range(d, |a| {
        let mut out = Vec::new();
        for b in a + 1..d {
            for c in b + 1..d {
                let mut terms = Vec::new();
                let mut push = |x: usize, y: usize, w: usize, sign: i64| {
                    for (k, coef) in g.bracket_basis(x, y) {
                        if let Some((v, s)) = entry(*k, w) {
                            terms.push((v, s * coef * Rational::from_integer(sign.into())));
                        }
                    }
                };
                push(a, b, c, 1);
                push(a, c, b, -1);
                push(b, c, a, 1);
                let row = sparse_from_terms(terms);
                if !row.is_empty() {
                    out.push(row);
                }
            }
        }
        out
    });
    rows.extend(closed);
    let e = Echelon::from_rows(nvars, &rows);
    Ok(e.nullspace().iter().map(|v| TwoForm::from_coordinates(d, v)).collect())
}

/// Dimension of the closed `J0`-invariant 2-forms: 5 for `n = 1`, `2n² + 1` otherwise.
pub fn closed_invariant_dimension(n: usize) -> usize {
    if n == 1 {
        5
    } else {
        2 * n * n + 1
    }
}

/// Coefficients of a closed `J0`-invariant 2-form:
///
/// `Σ A1_ij (e^i∧e^j + f^i∧f^j) + Σ A2_ij e^i∧f^j + Σ K_ij (e^i∧e*^j + f^i∧f*^j)
///  + Σ L_ij (e^i∧f*^j − f^i∧e*^j) − μ/2 Σ (e^i∧e*^i + f^i∧f*^i) + μ ζ*∧ζ`
///
/// plus, for `n = 1` only, `a1 (e^1∧ζ* − f^1∧ζ) + a2 (f^1∧ζ* + e^1∧ζ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaParams<T> {
    /// antisymmetric
    pub a1: Matrix<T>,
    /// symmetric
    pub a2: Matrix<T>,
    /// antisymmetric
    pub k: Matrix<T>,
    /// symmetric
    pub l: Matrix<T>,
    pub mu: T,
    /// `(a1, a2)` of the extra `n = 1` terms
    pub extra: [T; 2],
}

impl<T: Scalar> OmegaParams<T> {
    pub fn zero(n: usize) -> Self {
        Self {
            a1: Matrix::zeros(n, n),
            a2: Matrix::zeros(n, n),
            k: Matrix::zeros(n, n),
            l: Matrix::zeros(n, n),
            mu: T::zero(),
            extra: [T::zero(), T::zero()],
        }
    }

    pub fn mu_only(n: usize, mu: T) -> Self {
        Self { mu, ..Self::zero(n) }
    }

    pub fn n(&self) -> usize {
        self.a1.rows()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.n();
        let tol = if T::EXACT { 0.0 } else { tol };
        for (name, m) in [("A1", &self.a1), ("A2", &self.a2), ("K", &self.k), ("L", &self.l)] {
            if (m.rows(), m.cols()) != (n, n) {
                return Err(Error::InvalidParams(format!("{name} must be {n}x{n}")));
            }
        }
        if !self.a1.is_antisymmetric(tol) || !self.k.is_antisymmetric(tol) {
            return Err(Error::InvalidParams("A1 and K must be antisymmetric".into()));
        }
        if !self.a2.is_symmetric(tol) || !self.l.is_symmetric(tol) {
            return Err(Error::InvalidParams("A2 and L must be symmetric".into()));
        }
        if n != 1 && self.extra.iter().any(|x| !x.is_negligible(tol)) {
            return Err(Error::InvalidParams("extra terms exist only for n = 1".into()));
        }
        Ok(())
    }

    /// `n(n−1)/2 + n(n+1)/2 + n(n−1)/2 + n(n+1)/2 + 1`, plus 2 when `n = 1`.
    pub fn parameter_count(n: usize) -> usize {
        2 * n * n + 1 + if n == 1 { 2 } else { 0 }
    }

    pub fn to_f64(&self) -> OmegaParams<f64> {
        OmegaParams {
            a1: self.a1.to_f64(),
            a2: self.a2.to_f64(),
            k: self.k.to_f64(),
            l: self.l.to_f64(),
            mu: self.mu.to_f64(),
            extra: [self.extra[0].to_f64(), self.extra[1].to_f64()],
        }
    }
}

/// Dual basis covector of index `i`.
pub fn covector<T: Scalar>(dim: usize, i: usize) -> Vec<T> {
    crate::lie::basis_vector(dim, i)
}

/// Assembles the form, then asserts it is closed and `J0`-invariant.
pub fn build_omega<T: Scalar>(p: &OmegaParams<T>) -> Result<TwoForm<T>> {
    p.validate(1e-12)?;
    let n = p.n();
    let b = ThnBasis::new(n);
    let d = b.dim();
    let cv = |i: usize| covector::<T>(d, i);
    let mut omega = TwoForm::zero(d);
    let mut add = |coef: &T, form: TwoForm<T>| {
        if !coef.is_zero() {
            omega = omega.add(&form.scale(coef));
        }
    };
    for i in 0..n {
        for jx in 0..n {
            add(&p.a1[(i, jx)], wedge(&cv(b.e(i)), &cv(b.e(jx))).add(&wedge(&cv(b.f(i)), &cv(b.f(jx)))));
            add(&p.a2[(i, jx)], wedge(&cv(b.e(i)), &cv(b.f(jx))));
            add(&p.k[(i, jx)], wedge(&cv(b.e(i)), &cv(b.es(jx))).add(&wedge(&cv(b.f(i)), &cv(b.fs(jx)))));
            add(&p.l[(i, jx)], wedge(&cv(b.e(i)), &cv(b.fs(jx))).add(&wedge(&cv(b.f(i)), &cv(b.es(jx))).scale(&-T::one())));
        }
        let half_mu = p.mu.mul_ref(&T::from_frac(-1, 2));
        add(&half_mu, wedge(&cv(b.e(i)), &cv(b.es(i))).add(&wedge(&cv(b.f(i)), &cv(b.fs(i)))));
    }
    add(&p.mu, wedge(&cv(b.zs()), &cv(b.z())));
    if n == 1 {
        add(&p.extra[0], wedge(&cv(b.e(0)), &cv(b.zs())).add(&wedge(&cv(b.f(0)), &cv(b.z())).scale(&-T::one())));
        add(&p.extra[1], wedge(&cv(b.f(0)), &cv(b.zs())).add(&wedge(&cv(b.e(0)), &cv(b.z()))));
    }
    let g = build_thn(n)?;
    let tol = 1e-10 * (1.0 + omega.matrix().max_abs());
    if !is_closed(&omega, &g, tol)? || !j_invariant(&omega, &j0(n)?, tol) {
        return Err(Error::InvalidParams("form is not closed and J0-invariant".into()));
    }
    Ok(omega)
}

/// Forms obtained from unit parameters, one per free coefficient.
pub fn template_basis(n: usize) -> Result<Vec<TwoForm<Rational>>> {
    let mut out = Vec::new();
    let unit = |i: usize, jx: usize, sym: bool| {
        let mut m = Matrix::zeros(n, n);
        m[(i, jx)] = Rational::one();
        m[(jx, i)] = if sym { Rational::one() } else { -Rational::one() };
        m
    };
    for i in 0..n {
        for jx in i..n {
            if jx > i {
                out.push(OmegaParams { a1: unit(i, jx, false), ..OmegaParams::zero(n) });
                out.push(OmegaParams { k: unit(i, jx, false), ..OmegaParams::zero(n) });
            }
            out.push(OmegaParams { a2: unit(i, jx, true), ..OmegaParams::zero(n) });
            out.push(OmegaParams { l: unit(i, jx, true), ..OmegaParams::zero(n) });
        }
    }
    out.push(OmegaParams::mu_only(n, Rational::one()));
    if n == 1 {
        out.push(OmegaParams { extra: [Rational::one(), Rational::zero()], ..OmegaParams::zero(1) });
        out.push(OmegaParams { extra: [Rational::zero(), Rational::one()], ..OmegaParams::zero(1) });
    }
    out.iter().map(build_omega).collect()
}

/// True when every form lies in the span of `spanning`.
pub fn all_in_span(forms: &[TwoForm<Rational>], spanning: &[TwoForm<Rational>]) -> bool {
    let Some(first) = spanning.first().or(forms.first()) else { return true };
    let nvars = first.coordinates().len();
    let rows: Vec<SparseRow> = spanning.iter().map(|f| sparse_from_dense(&f.coordinates())).collect();
    let e = Echelon::from_rows(nvars, &rows);
    forms.iter().all(|f| e.contains(&sparse_from_dense(&f.coordinates())))
}

/// `⟨X, Y⟩ = Ω(J0 X, Y)`, i.e. the matrix `J0ᵀ Ω = −J0 Ω`.
pub fn pseudo_kahler_metric<T: Scalar>(omega: &TwoForm<T>, n: usize) -> Result<BilinearForm<T>> {
    let j = j0::<T>(n)?;
    if omega.dim() != j.dim() {
        return Err(Error::DimensionMismatch { expected: j.dim(), got: omega.dim() });
    }
    let tol = if T::EXACT { 0.0 } else { 1e-12 };
    if !is_nondegenerate(omega, tol) {
        return Err(Error::DegenerateOmega);
    }
    let s = j.matrix().transpose().mul(omega.matrix());
    let alt = j.matrix().mul(omega.matrix()).neg();
    if !s.approx_eq(&alt, tol) {
        return Err(Error::InvalidStructure("J0 is not orthogonal".into()));
    }
    BilinearForm::new(s).map_err(|_| Error::InvalidStructure("Ω is not J0-invariant".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureWitness {
    pub x: String,
    pub y: String,
    pub z: String,
    pub w: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KahlerCertificate {
    pub symmetric: bool,
    pub hermitian: bool,
    /// `Ω(X, Y) = S(X, J0 Y)`
    pub roundtrip: bool,
    pub ricci_zero: bool,
    pub ricci_routes_agree: bool,
    pub j_term_zero: bool,
    pub ad_term_zero: bool,
    pub flat: bool,
    /// nonzero component `⟨R(x, y) z, w⟩` with `(x, y) = (e1, f1)`
    pub witness: Option<CurvatureWitness>,
    pub signature: Signature,
}

impl KahlerCertificate {
    pub fn ok(&self) -> bool {
        self.symmetric && self.hermitian && self.roundtrip && self.ricci_zero && self.ricci_routes_agree && self.j_term_zero && self.ad_term_zero
    }
}

/// Exact certificate for the metric built from `p`.
pub fn certify_pseudo_kahler(p: &OmegaParams<Rational>) -> Result<KahlerCertificate> {
    let n = p.n();
    let omega = build_omega(p)?;
    certify_form(&omega, n)
}

pub fn certify_form(omega: &TwoForm<Rational>, n: usize) -> Result<KahlerCertificate> {
    let g = build_thn(n)?;
    let b = ThnBasis::new(n);
    let j = j0::<Rational>(n)?;
    let s = pseudo_kahler_metric(omega, n)?;
    let sm = s.matrix();
    let symmetric = sm.is_symmetric(0.0);
    let hermitian = j.matrix().congruence(sm) == *sm;
    let roundtrip = sm.mul(j.matrix()) == *omega.matrix();
    let conn = levi_civita(&g, sm)?;
    let rt = riemann(&conn, &g);
    let ricci = ricci_from_riemann(&rt);
    let split = ricci_nilpotent_formula(&g, sm)?;
    let ricci_zero = ricci.is_zero(0.0) && split.total().is_zero(0.0);
    let ricci_routes_agree = ricci == split.total();
    let flat = rt.is_zero(0.0);
    let witness = lower_witness(&rt.r[b.e(0)][b.f(0)], sm).map(|(zc, wc, v)| {
        let names = g.basis_names();
        CurvatureWitness { x: names[b.e(0)].clone(), y: names[b.f(0)].clone(), z: names[zc].clone(), w: names[wc].clone(), value: rational_to_string(&v) }
    });
    Ok(KahlerCertificate {
        symmetric,
        hermitian,
        roundtrip,
        ricci_zero,
        ricci_routes_agree,
        j_term_zero: split.j_term.is_zero(0.0),
        ad_term_zero: split.ad_term.is_zero(0.0),
        flat,
        witness,
        signature: signature(sm),
    })
}

/// First nonzero `⟨R z, w⟩ = (S R)_{wz}` of an operator `R`.
fn lower_witness(r: &Matrix<Rational>, s: &Matrix<Rational>) -> Option<(usize, usize, Rational)> {
    let low = s.mul(r);
    let d = low.rows();
    (0..d).flat_map(|z| (0..d).map(move |w| (z, w))).find(|&(z, w)| !low[(w, z)].is_zero()).map(|(z, w)| (z, w, low[(w, z)].clone()))
}

fn rand_q(rng: &mut impl Rng) -> Rational {
    q(rng.gen_range(-5..=5), rng.gen_range(1..=3))
}

pub fn random_omega_params(n: usize, rng: &mut impl Rng) -> OmegaParams<Rational> {
    let mut p = OmegaParams::zero(n);
    for i in 0..n {
        for jx in i..n {
            let (x, y) = (rand_q(rng), rand_q(rng));
            p.a2[(i, jx)] = x.clone();
            p.a2[(jx, i)] = x;
            p.l[(i, jx)] = y.clone();
            p.l[(jx, i)] = y;
            if jx > i {
                let (u, v) = (rand_q(rng), rand_q(rng));
                p.a1[(i, jx)] = u.clone();
                p.a1[(jx, i)] = -u;
                p.k[(i, jx)] = v.clone();
                p.k[(jx, i)] = -v;
            }
        }
    }
    p.mu = rand_q(rng);
    if n == 1 {
        p.extra = [rand_q(rng), rand_q(rng)];
    }
    p
}

/// Resamples until `Ω` is nondegenerate.
pub fn random_nondegenerate_params(n: usize, rng: &mut impl Rng) -> Result<OmegaParams<Rational>> {
    loop {
        let p = random_omega_params(n, rng);
        if is_nondegenerate(&build_omega(&p)?, 0.0) {
            return Ok(p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::seeded_rng;

    #[test]
    fn one_form_table() {
        for n in 1..=3 {
            let g = build_thn(n).unwrap();
            let b = ThnBasis::new(n);
            let d = b.dim();
            let cv = |i| covector::<Rational>(d, i);
            for i in 0..n {
                assert!(d_one_form(&cv(b.e(i)), &g).unwrap().matrix().is_zero(0.0));
                assert!(d_one_form(&cv(b.f(i)), &g).unwrap().matrix().is_zero(0.0));
                assert_eq!(d_one_form(&cv(b.es(i)), &g).unwrap(), wedge(&cv(b.f(i)), &cv(b.zs())));
                assert_eq!(d_one_form(&cv(b.fs(i)), &g).unwrap(), wedge(&cv(b.e(i)), &cv(b.zs())).scale(&-Rational::one()));
            }
            assert!(d_one_form(&cv(b.zs()), &g).unwrap().matrix().is_zero(0.0));
            let mut dz = TwoForm::zero(d);
            for i in 0..n {
                dz = dz.add(&wedge(&cv(b.e(i)), &cv(b.f(i))));
            }
            assert_eq!(d_one_form(&cv(b.z()), &g).unwrap(), dz);
        }
    }

    #[test]
    fn d_squared_vanishes() {
        let g = build_thn(2).unwrap();
        for i in 0..g.dim() {
            let a = d_one_form(&covector::<Rational>(g.dim(), i), &g).unwrap();
            let dd = d_two_form(&a, &g).unwrap();
            assert!(dd.is_zero(0.0) && dd.is_alternating(0.0));
        }
    }

    #[test]
    fn invariance_examples() {
        let b = ThnBasis::new(1);
        let j = j0::<Rational>(1).unwrap();
        let cv = |i| covector::<Rational>(6, i);
        assert!(j_invariant(&wedge(&cv(b.zs()), &cv(b.z())), &j, 0.0));
        assert!(j_invariant(&wedge(&cv(b.e(0)), &cv(b.f(0))), &j, 0.0));
        assert!(!j_invariant(&wedge(&cv(b.e(0)), &cv(b.z())), &j, 0.0));
    }

    #[test]
    fn closed_invariant_dims() {
        for n in 1..=3 {
            let space = closed_invariant_space(n).unwrap();
            assert_eq!(space.len(), closed_invariant_dimension(n));
            let template = template_basis(n).unwrap();
            assert_eq!(template.len(), OmegaParams::<Rational>::parameter_count(n));
            assert!(all_in_span(&space, &template) && all_in_span(&template, &space));
        }
    }

    #[test]
    fn build_examples() {
        assert!(build_omega(&OmegaParams::<Rational>::zero(2)).unwrap().matrix().is_zero(0.0));
        let mu = build_omega(&OmegaParams::mu_only(2, Rational::one())).unwrap();
        assert!(is_nondegenerate(&mu, 0.0));
        let mut p = OmegaParams::<Rational>::zero(2);
        p.l[(0, 0)] = Rational::one();
        assert!(!is_nondegenerate(&build_omega(&p).unwrap(), 0.0));
        assert!(!is_nondegenerate(&TwoForm::<Rational>::zero(6), 0.0));
    }

    #[test]
    fn mu_only_certificate() {
        let c = certify_pseudo_kahler(&OmegaParams::mu_only(1, Rational::one())).unwrap();
        assert!(c.ok(), "{c:?}");
        assert!(!c.flat && c.witness.is_some());
    }

    #[test]
    fn random_certificates() {
        let mut rng = seeded_rng(5);
        for n in 1..=2 {
            for _ in 0..3 {
                let p = random_nondegenerate_params(n, &mut rng).unwrap();
                let c = certify_pseudo_kahler(&p).unwrap();
                assert!(c.ok(), "{c:?}");
            }
        }
    }
}
