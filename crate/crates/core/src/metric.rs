//! Inner products on `T*h(2n+1)`, the automorphism action on them and the
//! reduction of Riemannian metrics to canonical form.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automorphism::{assemble, is_automorphism, symplectic_rotation_cs, AutParams, Automorphism};
use crate::curvature::{signature, Signature};
use crate::echelon::{sparse_from_dense, Echelon};
use crate::error::{Error, Result};
use crate::lie::{build_thn, LieAlgebra, ThnBasis};
use crate::matrix::{std_symplectic, Matrix};
use crate::scalar::{Rational, Scalar};

/// Residual bound for a reduction to count as sound.
pub const REDUCTION_TOL: f64 = 1e-9;
/// Residual above which a reduction is rejected outright.
pub const REDUCTION_FAIL_TOL: f64 = 1e-6;
/// Tolerance for comparing invariants across independent reductions.
pub const COMPARE_TOL: f64 = 1e-6;
/// Values closer than this (relative) are treated as coincident.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct BilinearForm<T> {
    matrix: Matrix<T>,
}

impl<T: Scalar> BilinearForm<T> {
    /// Accepts a symmetric matrix (exactly, or within `1e-12` relative for
    /// floats, in which case it is symmetrized).
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), got: matrix.cols() });
        }
        let tol = if T::EXACT { 0.0 } else { 1e-12 * (1.0 + matrix.max_abs()) };
        if !matrix.is_symmetric(tol) {
            return Err(Error::NotSymmetric);
        }
        let matrix = if T::EXACT { matrix } else { matrix.symmetrized() };
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn eval(&self, x: &[T], y: &[T]) -> T {
        self.matrix.bilinear(x, y)
    }

    pub fn signature(&self) -> Signature {
        signature(&self.matrix)
    }

    pub fn to_f64(&self) -> BilinearForm<f64> {
        BilinearForm { matrix: self.matrix.to_f64() }
    }
}

/// `S' = Fᵀ S F`.
pub fn act<T: Scalar>(f: &Automorphism<T>, s: &BilinearForm<T>) -> Result<BilinearForm<T>> {
    if f.matrix().rows() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: f.matrix().rows() });
    }
    Ok(BilinearForm { matrix: f.matrix().congruence(&s.matrix) })
}

/// `diag(σ_1..σ_n, 1, S̄4, ω4)` data with `σ_1 ≥ … ≥ σ_n = 1`,
/// `(S̄4)_{i, n+i} = 0` and `ω4 > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalMetric {
    pub n: usize,
    pub sigma: Vec<f64>,
    pub s4bar: Matrix<f64>,
    pub omega4: f64,
}

impl CanonicalMetric {
    pub fn reconstruct(&self) -> Matrix<f64> {
        let b = ThnBasis::new(self.n);
        let mut m = Matrix::zeros(b.dim(), b.dim());
        for i in 0..self.n {
            m[(b.e(i), b.e(i))] = self.sigma[i];
            m[(b.f(i), b.f(i))] = self.sigma[i];
        }
        m[(b.zs(), b.zs())] = 1.0;
        m.set_block(b.es(0), b.es(0), &self.s4bar);
        m[(b.z(), b.z())] = self.omega4;
        m
    }

    /// Positions `(r, c)`, `r ≤ c`, of `S̄4` that the template leaves free.
    pub fn free_s4bar_positions(n: usize) -> Vec<(usize, usize)> {
        (0..2 * n).flat_map(|r| (r..2 * n).map(move |c| (r, c))).filter(|&(r, c)| !(r < n && c == n + r)).collect()
    }

    /// Number of free real parameters in the template: `n − 1` values of σ,
    /// the unconstrained entries of `S̄4`, and `ω4`.
    pub fn template_parameter_count(n: usize) -> usize {
        (n - 1) + Self::free_s4bar_positions(n).len() + 1
    }

    /// First violated template constraint, if any.
    pub fn template_violation(&self, tol: f64) -> Option<String> {
        let n = self.n;
        if self.sigma.len() != n {
            return Some("wrong number of sigma values".into());
        }
        if self.sigma.windows(2).any(|w| w[0] < w[1] - tol) {
            return Some("sigma not sorted descending".into());
        }
        if (self.sigma[n - 1] - 1.0).abs() > tol {
            return Some(format!("sigma_n = {} != 1", self.sigma[n - 1]));
        }
        if let Some(i) = (0..n).find(|&i| self.s4bar[(i, n + i)].abs() > tol) {
            return Some(format!("S4bar[{}][{}] = {:e} != 0", i + 1, n + i + 1, self.s4bar[(i, n + i)]));
        }
        if let Some(i) = (0..n).find(|&i| self.s4bar[(i, i)] < self.s4bar[(n + i, n + i)] - tol) {
            return Some(format!("S4bar[{0}][{0}] < S4bar[{1}][{1}]", i + 1, n + i + 1));
        }
        if n == 1 && self.omega4 > self.s4bar[(1, 1)] + tol {
            return Some("omega4 exceeds S4bar[2][2]".into());
        }
        if self.omega4 <= 0.0 {
            return Some("omega4 not positive".into());
        }
        if !self.s4bar.is_symmetric(tol) {
            return Some("S4bar not symmetric".into());
        }
        None
    }

    /// σ values within [`TIE_TOL`] of each other, or a plane of `S̄4` whose two
    /// diagonal entries coincide: the residual symmetry is then larger than the
    /// finite sign group and the canonical form is not a complete invariant.
    pub fn is_degenerate(&self) -> bool {
        let scale = 1.0 + self.s4bar.max_abs();
        let ties = self.sigma.windows(2).any(|w| (w[0] - w[1]).abs() <= TIE_TOL * w[0].abs().max(1.0));
        let flat_plane = (0..self.n).any(|i| (self.s4bar[(i, i)] - self.s4bar[(self.n + i, self.n + i)]).abs() <= TIE_TOL * scale);
        ties || flat_plane
    }
}

/// Dimension of the metric moduli: `n(2n+1)`.
pub fn free_parameter_count(n: usize) -> usize {
    n * (2 * n + 1)
}

pub(crate) fn to_na(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
}

pub(crate) fn from_na(m: &DMatrix<f64>) -> Matrix<f64> {
    Matrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// `(M^{1/2}, M^{-1/2})` for symmetric positive-definite `M`.
fn sqrt_pair(m: &Matrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let eig = SymmetricEigen::new(to_na(m));
    let scale = eig.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if eig.eigenvalues.iter().any(|&v| v <= 1e-14 * scale.max(1.0)) {
        return Err(Error::NonPositiveDefinite);
    }
    let q = &eig.eigenvectors;
    let sq = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let isq = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    Ok((q * sq * q.transpose(), q * isq * q.transpose()))
}

pub fn is_positive_definite(m: &Matrix<f64>) -> bool {
    m.is_symmetric(1e-12 * (1.0 + m.max_abs())) && nalgebra::Cholesky::new(to_na(&m.symmetrized())).is_some()
}

/// Symplectic diagonalization: returns `F̄` with `F̄ᵀ J F̄ = J` and
/// `F̄ᵀ M F̄ = diag(σ, σ)`, σ sorted descending.
pub fn williamson(m: &Matrix<f64>) -> Result<(Matrix<f64>, Vec<f64>)> {
    if !m.is_square() || !m.rows().is_multiple_of(2) || m.rows() == 0 {
        return Err(Error::DimensionMismatch { expected: 2 * (m.rows() / 2).max(1), got: m.rows() });
    }
    if !m.is_symmetric(1e-12 * (1.0 + m.max_abs())) {
        return Err(Error::NotSymmetric);
    }
    let n = m.rows() / 2;
    let (_, isq) = sqrt_pair(m)?;
    let j = to_na(&std_symplectic::<f64>(n));
    let a = &isq * &j * &isq;
    let b = a.transpose() * &a;
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));

    let mut us: Vec<nalgebra::DVector<f64>> = Vec::new();
    let mut ws: Vec<nalgebra::DVector<f64>> = Vec::new();
    let mut ss: Vec<f64> = Vec::new();
    for &k in &order {
        if us.len() == n {
            break;
        }
        let mut x = eig.eigenvectors.column(k).into_owned();
        for _ in 0..2 {
            for v in us.iter().chain(ws.iter()) {
                let c = v.dot(&x);
                x -= v * c;
            }
        }
        let norm = x.norm();
        if norm < 1e-6 {
            continue;
        }
        let u = x / norm;
        let au = &a * &u;
        let s = au.norm();
        let w = au / s;
        us.push(u);
        ws.push(w);
        ss.push(s);
    }
    if us.len() != n {
        return Err(Error::ToleranceFailure { residual: 1.0, tol: REDUCTION_TOL });
    }
    let sigma: Vec<f64> = ss.iter().map(|s| 1.0 / s).collect();
    let o = DMatrix::from_columns(&us.iter().chain(ws.iter()).cloned().collect::<Vec<_>>());
    let dhalf = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(2 * n, sigma.iter().chain(sigma.iter()).map(|s| s.sqrt())));
    let fbar = from_na(&(isq * o * dhalf));

    let jm = std_symplectic::<f64>(n);
    let scale = 1.0 + m.max_abs() * fbar.max_abs().powi(2);
    let diag: Vec<f64> = sigma.iter().chain(sigma.iter()).copied().collect();
    let residual = fbar.congruence(&jm).max_abs_diff(&jm).max(fbar.congruence(m).max_abs_diff(&Matrix::diagonal(&diag))) / scale;
    if residual > REDUCTION_TOL {
        return Err(Error::ToleranceFailure { residual, tol: REDUCTION_TOL });
    }
    Ok((fbar, sigma))
}

/// Outcome of [`reduce_to_canonical`].
#[derive(Clone, Debug)]
pub struct Reduction {
    pub canonical: CanonicalMetric,
    pub automorphism: Automorphism<f64>,
    /// `max |FᵀSF − reconstruct| / max(1, max |reconstruct|)`
    pub residual: f64,
}

struct Chain {
    f: Matrix<f64>,
    s: Matrix<f64>,
}

impl Chain {
    fn apply(&mut self, step: Automorphism<f64>) {
        self.s = step.matrix().congruence(&self.s).symmetrized();
        self.f = self.f.mul(step.matrix());
    }
}

fn assemble_step(params: AutParams<f64>, n: usize) -> Result<Automorphism<f64>> {
    assemble(params, n).map_err(|e| match e {
        Error::InvalidParams(_) => Error::ToleranceFailure { residual: f64::NAN, tol: REDUCTION_FAIL_TOL },
        other => other,
    })
}

/// Reduces a Riemannian metric to `diag(D(σ), 1, S̄4, ω4)` by an automorphism.
pub fn reduce_to_canonical(s: &BilinearForm<f64>, n: usize) -> Result<Reduction> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    let b = ThnBasis::new(n);
    let (h, m) = (b.half(), 2 * n);
    if s.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: b.dim(), got: s.dim() });
    }
    if !is_positive_definite(s.matrix()) {
        return Err(Error::NonPositiveDefinite);
    }
    let mut chain = Chain { f: Matrix::identity(b.dim()), s: s.matrix().clone() };

    // S2 -> 0
    let s2 = chain.s.block(0, h, h, h);
    let s4 = chain.s.block(h, h, h, h);
    let f3 = s4.inverse(1e-14).map_err(|_| Error::NonPositiveDefinite)?.mul(&s2.transpose()).neg();
    chain.apply(assemble_step(AutParams { f3, ..AutParams::identity(n) }, n)?);

    if n == 1 {
        // the first half generates freely: S1 -> 1, then diagonalize S4
        let (_, isq) = sqrt_pair(&chain.s.block(0, 0, h, h))?;
        chain.apply(free_extension(&from_na(&isq))?);
        let eig = SymmetricEigen::new(to_na(&chain.s.block(h, h, h, h)));
        let mut order: Vec<usize> = (0..h).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
        let q = Matrix::from_fn(h, h, |r, c| eig.eigenvectors[(r, order[c])]);
        chain.apply(free_extension(&q)?);
    } else {
        // t4 -> 0
        let s4 = chain.s.block(h, h, h, h);
        let mut params = AutParams::identity(n);
        let omega4 = s4[(m, m)];
        params.v1 = (0..m).map(|i| s4[(i, m)] / omega4).collect();
        chain.apply(assemble_step(params, n)?);

        // Williamson on S̄1, then σ_n = 1 and ω1 = 1
        let (fw, sigma) = williamson(&chain.s.block(0, 0, m, m))?;
        let sigma_n = sigma[n - 1];
        let omega1 = chain.s[(m, m)];
        let params = AutParams {
            fbar1: fw.scale(&(1.0 / sigma_n.sqrt())),
            f4: 1.0 / sigma_n,
            f1: 1.0 / omega1.sqrt(),
            ..AutParams::identity(n)
        };
        chain.apply(assemble_step(params, n)?);

        // rotate each plane so that (S̄4)_{i, n+i} = 0
        let cs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let a = chain.s[(b.es(i), b.es(i))];
                let d = chain.s[(b.fs(i), b.fs(i))];
                let off = chain.s[(b.es(i), b.fs(i))];
                let phi = 0.5 * (-2.0 * off).atan2(a - d);
                (phi.cos(), phi.sin())
            })
            .collect();
        chain.apply(symplectic_rotation_cs(&cs).map_err(|_| Error::ToleranceFailure { residual: f64::NAN, tol: REDUCTION_FAIL_TOL })?);

        // fix the residual sign freedom
        let s4bar = chain.s.block(b.es(0), b.es(0), m, m);
        let (eps, reflect) = best_sign_pattern(&s4bar, n);
        if reflect {
            let mut fbar = Matrix::identity(m);
            for i in n..m {
                fbar[(i, i)] = -1.0;
            }
            chain.apply(assemble_step(AutParams { fbar1: fbar, f4: -1.0, ..AutParams::identity(n) }, n)?);
        }
        if eps.iter().any(|&e| e < 0.0) {
            let cs: Vec<(f64, f64)> = eps.iter().map(|&e| (e, 0.0)).collect();
            chain.apply(symplectic_rotation_cs(&cs)?);
        }
    }

    let canonical = CanonicalMetric {
        n,
        sigma: (0..n).map(|i| chain.s[(b.e(i), b.e(i))]).collect(),
        s4bar: chain.s.block(b.es(0), b.es(0), m, m),
        omega4: chain.s[(b.z(), b.z())],
    };
    let target = canonical.reconstruct();
    let residual = chain.s.max_abs_diff(&target) / target.max_abs().max(1.0);
    if residual > REDUCTION_FAIL_TOL || !residual.is_finite() {
        return Err(Error::ToleranceFailure { residual, tol: REDUCTION_FAIL_TOL });
    }
    let automorphism =
        Automorphism::from_matrix(chain.f, n, 1e-9).map_err(|_| Error::ToleranceFailure { residual, tol: REDUCTION_FAIL_TOL })?;
    Ok(Reduction { canonical, automorphism, residual })
}

/// For `n = 1` the first half `(e, f, z*)` generates freely, so any
/// invertible `F1` extends to an automorphism with `F3 = 0`.
fn free_extension(f1: &Matrix<f64>) -> Result<Automorphism<f64>> {
    let g = build_thn(1)?;
    let mut m = Matrix::zeros(6, 6);
    m.set_block(0, 0, f1);
    // e* = [f, z*], f* = [z*, e], z = [e, f]
    for (a, b, k) in [(1, 2, 3), (2, 0, 4), (0, 1, 5)] {
        let col = g.bracket(&m.column(a), &m.column(b))?;
        for (r, v) in col.into_iter().enumerate() {
            m[(r, k)] = v;
        }
    }
    let tol = 1e-12 * (1.0 + m.max_abs()).powi(2);
    Automorphism::from_matrix(m, 1, tol).map_err(|_| Error::ToleranceFailure { residual: f64::NAN, tol: REDUCTION_FAIL_TOL })
}

/// Sign group acting on `S̄4`: flipping plane `i` multiplies rows/columns
/// `e*_i, f*_i` by `ε_i`; the reflection additionally flips every `e*_i`.
fn apply_signs(s4bar: &Matrix<f64>, n: usize, eps: &[f64], reflect: bool) -> Matrix<f64> {
    let sign = |r: usize| {
        let plane = r % n;
        let flip = if reflect && r < n { -1.0 } else { 1.0 };
        eps[plane] * flip
    };
    Matrix::from_fn(2 * n, 2 * n, |r, c| s4bar[(r, c)] * sign(r) * sign(c))
}

fn sign_patterns(n: usize) -> impl Iterator<Item = (Vec<f64>, bool)> {
    (0..1usize << (n + 1)).map(move |mask| {
        let eps = (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
        (eps, mask >> n & 1 == 1)
    })
}

fn lex_greater(a: &Matrix<f64>, b: &Matrix<f64>, tol: f64) -> bool {
    for r in 0..a.rows() {
        for c in r..a.cols() {
            let (x, y) = (a[(r, c)], b[(r, c)]);
            if (x - y).abs() > tol {
                return x > y;
            }
        }
    }
    false
}

fn best_sign_pattern(s4bar: &Matrix<f64>, n: usize) -> (Vec<f64>, bool) {
    let tol = TIE_TOL * (1.0 + s4bar.max_abs());
    let mut best = (vec![1.0; n], false);
    let mut best_m = s4bar.clone();
    for (eps, reflect) in sign_patterns(n) {
        let cand = apply_signs(s4bar, n, &eps, reflect);
        if lex_greater(&cand, &best_m, tol) {
            best_m = cand;
            best = (eps, reflect);
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    Distinct,
    Inconclusive,
}

/// Compares two canonical forms up to the finite residual sign group.
/// Degenerate forms never yield `Distinct`.
pub fn compare_canonical(a: &CanonicalMetric, b: &CanonicalMetric, tol: f64) -> Equivalence {
    if a.n != b.n {
        return Equivalence::Distinct;
    }
    let sigma_match = a.sigma.iter().zip(&b.sigma).all(|(x, y)| (x - y).abs() <= tol * x.abs().max(1.0));
    if !sigma_match {
        return Equivalence::Distinct;
    }
    let scale = 1.0 + a.s4bar.max_abs().max(b.s4bar.max_abs());
    let omega_match = (a.omega4 - b.omega4).abs() <= tol * scale;
    let s4_match = sign_patterns(a.n).any(|(eps, reflect)| apply_signs(&b.s4bar, b.n, &eps, reflect).max_abs_diff(&a.s4bar) <= tol * scale);
    if omega_match && s4_match {
        Equivalence::Equivalent
    } else if a.is_degenerate() || b.is_degenerate() {
        Equivalence::Inconclusive
    } else {
        Equivalence::Distinct
    }
}

/// Decides whether two Riemannian metrics lie in the same automorphism orbit.
pub fn equivalent(a: &BilinearForm<f64>, b: &BilinearForm<f64>, n: usize) -> Result<Equivalence> {
    let ra = reduce_to_canonical(a, n)?;
    let rb = reduce_to_canonical(b, n)?;
    Ok(compare_canonical(&ra.canonical, &rb.canonical, COMPARE_TOL))
}

/// Random symmetric positive-definite matrix `AᵀA + E/2` with entries of `A` in `[-1, 1]`.
pub fn random_positive_definite(dim: usize, rng: &mut impl Rng) -> Matrix<f64> {
    let a = Matrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    a.transpose().mul(&a).add(&Matrix::identity(dim).scale(&0.5)).symmetrized()
}

/// Random canonical metric with well separated σ values.
pub fn random_canonical(n: usize, rng: &mut impl Rng) -> CanonicalMetric {
    let mut sigma: Vec<f64> = Vec::with_capacity(n);
    let mut next = 1.0;
    for _ in 0..n {
        sigma.push(next);
        next += rng.gen_range(0.5..2.0);
    }
    sigma.reverse();
    let mut s4bar = random_positive_definite(2 * n, rng);
    for i in 0..n {
        s4bar[(i, n + i)] = 0.0;
        s4bar[(n + i, i)] = 0.0;
        let bump = 2.0 * n as f64;
        s4bar[(i, i)] += bump + 1.0 + i as f64;
        s4bar[(n + i, n + i)] += bump;
        let gap = s4bar[(n + i, n + i)] - s4bar[(i, i)];
        if gap > 0.0 {
            s4bar[(i, i)] += gap + 0.5;
        }
    }
    let mut omega4 = rng.gen_range(0.5..3.0);
    if n == 1 {
        let mut t = [s4bar[(0, 0)], s4bar[(1, 1)], omega4];
        t.sort_by(|a, b| b.total_cmp(a));
        [s4bar[(0, 0)], s4bar[(1, 1)], omega4] = t;
    }
    CanonicalMetric { n, sigma, s4bar, omega4 }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `dim Sym − rank {DᵀS + SD : D ∈ Der(g)}` at `S`: the local codimension of
/// the automorphism orbit through `S` inside all symmetric forms.
pub fn orbit_codimension(s: &Matrix<Rational>, g: &LieAlgebra) -> usize {
    let d = g.dim();
    let positions: Vec<(usize, usize)> = (0..d).flat_map(|r| (r..d).map(move |c| (r, c))).collect();
    let rows: Vec<_> = g
        .derivation_algebra()
        .iter()
        .map(|der| {
            let t = der.transpose().mul(s).add(&s.mul(der));
            sparse_from_dense(&positions.iter().map(|&(r, c)| t[(r, c)].clone()).collect::<Vec<_>>())
        })
        .collect();
    positions.len() - Echelon::from_rows(positions.len(), &rows).rank()
}

/// `orbit_codimension` at a fixed rational positive-definite point of `T*h(2n+1)`.
pub fn generic_orbit_codimension(n: usize, seed: u64) -> Result<usize> {
    let g = build_thn(n)?;
    let mut rng = seeded_rng(seed);
    let d = g.dim();
    let a = Matrix::from_fn(d, d, |_, _| Rational::from_i64(rng.gen_range(-3..=3)));
    let s = a.transpose().mul(&a).add(&Matrix::identity(d));
    Ok(orbit_codimension(&s, &g))
}

/// Checks the post-conditions of a reduction against the input.
pub fn verify_reduction(s: &BilinearForm<f64>, r: &Reduction, n: usize, aut_tol: f64) -> Result<f64> {
    let g = build_thn(n)?;
    if !is_automorphism(r.automorphism.matrix(), &g, aut_tol) {
        return Err(Error::InvalidParams("reduction map is not an automorphism".into()));
    }
    let target = r.canonical.reconstruct();
    Ok(r.automorphism.matrix().congruence(s.matrix()).max_abs_diff(&target) / target.max_abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn williamson_examples() {
        let (_, s) = williamson(&Matrix::diagonal(&[4.0, 1.0])).unwrap();
        assert!((s[0] - 2.0).abs() < 1e-12);
        let (_, s) = williamson(&Matrix::diagonal(&[9.0, 1.0, 1.0, 1.0])).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-12 && (s[1] - 1.0).abs() < 1e-12);
        let (f, s) = williamson(&Matrix::identity(6)).unwrap();
        assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(f.congruence(&std_symplectic(3)).max_abs_diff(&std_symplectic(3)) < 1e-12);
    }

    #[test]
    fn identity_is_canonical() {
        for n in 1..=3 {
            let s = BilinearForm::new(Matrix::identity(4 * n + 2)).unwrap();
            let r = reduce_to_canonical(&s, n).unwrap();
            assert!(r.canonical.sigma.iter().all(|v| (v - 1.0).abs() < 1e-9));
            assert!(r.canonical.s4bar.max_abs_diff(&Matrix::identity(2 * n)) < 1e-9);
            assert!((r.canonical.omega4 - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn parameter_count_matches_template() {
        for n in 1..=5 {
            assert_eq!(CanonicalMetric::template_parameter_count(n), free_parameter_count(n));
        }
    }

    #[test]
    fn random_n1_reduces() {
        let mut rng = seeded_rng(3);
        for _ in 0..20 {
            let s = BilinearForm::new(random_positive_definite(6, &mut rng)).unwrap();
            let r = reduce_to_canonical(&s, 1).unwrap();
            assert!(r.residual < REDUCTION_TOL, "residual {}", r.residual);
            assert_eq!(r.canonical.template_violation(1e-9), None);
            assert!(verify_reduction(&s, &r, 1, 1e-9).unwrap() < REDUCTION_TOL);
        }
    }
}
