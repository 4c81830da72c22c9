//! Automorphisms of `T*h(2n+1)` in lower block-triangular form
//! `F = [[F1, 0], [F3, F4]]` with `F1 = [[F̄1, v1], [u1ᵀ, f1]]`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lie::{build_thn, LieAlgebra, ThnBasis};
use crate::matrix::{std_symplectic, Matrix};
use crate::scalar::{q, Rational, Scalar};

/// Tolerance for float construction checks.
pub const CONSTRUCTION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct AutParams<T> {
    pub fbar1: Matrix<T>,
    pub u1: Vec<T>,
    pub v1: Vec<T>,
    pub f1: T,
    pub f4: T,
    pub f3: Matrix<T>,
}

impl<T: Scalar> AutParams<T> {
    pub fn identity(n: usize) -> Self {
        Self {
            fbar1: Matrix::identity(2 * n),
            u1: vec![T::zero(); 2 * n],
            v1: vec![T::zero(); 2 * n],
            f1: T::one(),
            f4: T::one(),
            f3: Matrix::zeros(2 * n + 1, 2 * n + 1),
        }
    }

    pub fn to_f64(&self) -> AutParams<f64> {
        AutParams {
            fbar1: self.fbar1.to_f64(),
            u1: self.u1.iter().map(Scalar::to_f64).collect(),
            v1: self.v1.iter().map(Scalar::to_f64).collect(),
            f1: self.f1.to_f64(),
            f4: self.f4.to_f64(),
            f3: self.f3.to_f64(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Automorphism<T> {
    matrix: Matrix<T>,
    params: Option<AutParams<T>>,
}

impl<T: Scalar> Automorphism<T> {
    pub fn identity(n: usize) -> Self {
        Self { matrix: Matrix::identity(4 * n + 2), params: Some(AutParams::identity(n)) }
    }

    /// Wraps a matrix after verifying it is an automorphism of `T*h(2n+1)`.
    pub fn from_matrix(m: Matrix<T>, n: usize, tol: f64) -> Result<Self> {
        let g = build_thn(n)?;
        if !is_automorphism(&m, &g, tol) {
            return Err(Error::InvalidParams("matrix does not preserve brackets".into()));
        }
        Ok(Self { matrix: m, params: None })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn params(&self) -> Option<&AutParams<T>> {
        self.params.as_ref()
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.mul(&other.matrix), params: None }
    }

    pub fn inverse(&self, tol: f64) -> Result<Self> {
        Ok(Self { matrix: self.matrix.inverse(tol)?, params: None })
    }

    pub fn to_f64(&self) -> Automorphism<f64> {
        Automorphism { matrix: self.matrix.to_f64(), params: self.params.as_ref().map(AutParams::to_f64) }
    }
}

/// True iff `m` is invertible and `m[b_i, b_j] = [m b_i, m b_j]` for all basis pairs.
pub fn is_automorphism<T: Scalar>(m: &Matrix<T>, g: &LieAlgebra, tol: f64) -> bool {
    if !m.is_square() || m.rows() != g.dim() {
        return false;
    }
    let invertible = if T::EXACT { !m.determinant(0.0).is_zero() } else { m.rank(1e-12 * (1.0 + m.max_abs())) == m.rows() };
    invertible && g.is_homomorphism_into(g, m, tol)
}

/// True when `m` maps `span(e*_i, f*_i, z)` into itself.
pub fn preserves_center<T: Scalar>(m: &Matrix<T>, n: usize, tol: f64) -> bool {
    let h = ThnBasis::new(n).half();
    m.block(0, h, h, h).is_zero(tol)
}

fn check_params<T: Scalar>(p: &AutParams<T>, n: usize, tol: f64) -> Result<()> {
    let (m, h) = (2 * n, 2 * n + 1);
    if (p.fbar1.rows(), p.fbar1.cols()) != (m, m) {
        return Err(Error::DimensionMismatch { expected: m, got: p.fbar1.rows() });
    }
    if p.u1.len() != m || p.v1.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: p.u1.len().min(p.v1.len()) });
    }
    if (p.f3.rows(), p.f3.cols()) != (h, h) {
        return Err(Error::DimensionMismatch { expected: h, got: p.f3.rows() });
    }
    if p.f1.is_negligible(tol) || p.f4.is_negligible(tol) {
        return Err(Error::InvalidParams("f1 and f4 must be nonzero".into()));
    }
    let j = std_symplectic::<T>(n);
    let lhs = p.fbar1.congruence(&j);
    let tol_scaled = tol * (1.0 + p.fbar1.max_abs()).powi(2);
    if !lhs.approx_eq(&j.scale(&p.f4), tol_scaled) {
        return Err(Error::InvalidParams("Fbar1^T J Fbar1 != f4 J".into()));
    }
    Ok(())
}

/// Assembles the full matrix from block data; `F4` is determined by the rest.
/// The result is re-verified against the bracket before returning.
pub fn assemble<T: Scalar>(params: AutParams<T>, n: usize) -> Result<Automorphism<T>> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    let tol = if T::EXACT { 0.0 } else { CONSTRUCTION_TOL };
    check_params(&params, n, tol)?;
    let (m, h) = (2 * n, 2 * n + 1);
    let j = std_symplectic::<T>(n);
    let fbar_inv_t = params.fbar1.inverse(tol)?.transpose();

    let mut f1 = Matrix::zeros(h, h);
    f1.set_block(0, 0, &params.fbar1);
    for i in 0..m {
        f1[(i, m)] = params.v1[i].clone();
        f1[(m, i)] = params.u1[i].clone();
    }
    f1[(m, m)] = params.f1.clone();

    let jv = j.mul_vec(&params.v1);
    let ju = j.mul_vec(&params.u1);
    let outer = Matrix::from_fn(m, m, |r, c| jv[r].mul_ref(&ju[c]));
    let top = fbar_inv_t.scale(&params.f1.mul_ref(&params.f4)).sub(&outer);
    let col = fbar_inv_t.mul_vec(&params.u1);
    let row = fbar_inv_t.transpose().mul_vec(&params.v1);
    let mut f4 = Matrix::zeros(h, h);
    f4.set_block(0, 0, &top);
    for i in 0..m {
        f4[(i, m)] = -params.f4.mul_ref(&col[i]);
        f4[(m, i)] = -params.f4.mul_ref(&row[i]);
    }
    f4[(m, m)] = params.f4.clone();

    let mut full = Matrix::zeros(2 * h, 2 * h);
    full.set_block(0, 0, &f1);
    full.set_block(h, 0, &params.f3);
    full.set_block(h, h, &f4);

    let g = build_thn(n)?;
    let check_tol = tol * (1.0 + full.max_abs()).powi(2);
    if !is_automorphism(&full, &g, check_tol) {
        let hint = if n >= 2 && params.u1.iter().any(|x| !x.is_negligible(tol)) {
            "u1 must vanish for n >= 2"
        } else {
            "bracket preservation failed"
        };
        return Err(Error::InvalidParams(hint.into()));
    }
    Ok(Automorphism { matrix: full, params: Some(params) })
}

/// Rotation in each `(e_i, f_i)` plane: `e_i ↦ c e_i − s f_i`, `f_i ↦ s e_i + c f_i`,
/// given as `(cos, sin)` pairs with `c² + s² = 1`.
pub fn symplectic_rotation_cs<T: Scalar>(cs: &[(T, T)]) -> Result<Automorphism<T>> {
    let n = cs.len();
    if n == 0 {
        return Err(Error::InvalidN);
    }
    let mut fbar = Matrix::zeros(2 * n, 2 * n);
    for (i, (c, s)) in cs.iter().enumerate() {
        fbar[(i, i)] = c.clone();
        fbar[(n + i, i)] = -s.clone();
        fbar[(i, n + i)] = s.clone();
        fbar[(n + i, n + i)] = c.clone();
    }
    assemble(AutParams { fbar1: fbar, ..AutParams::identity(n) }, n)
}

/// Symplectic rotation by the given angles (one per plane).
pub fn symplectic_rotation(angles: &[f64], n: usize) -> Result<Automorphism<f64>> {
    if angles.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: angles.len() });
    }
    symplectic_rotation_cs(&angles.iter().map(|a| (a.cos(), a.sin())).collect::<Vec<_>>())
}

/// Which parameters a random sample may vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AutSampling {
    /// Every admissible parameter random.
    General,
    /// `f4 = 1`: symplectic `F̄1`, other blocks random.
    UnitScale,
    /// `f4 = 1`, `u1 = v1 = 0`, `F3 = 0`.
    BlockDiagonal,
}

fn small_rational(rng: &mut impl Rng, nonzero: bool) -> Rational {
    const DENOMS: [i64; 3] = [1, 2, 3];
    loop {
        let v = q(rng.gen_range(-3..=3), DENOMS[rng.gen_range(0..DENOMS.len())]);
        if !nonzero || !v.is_zero() {
            return v;
        }
    }
}

/// Random symplectic `2n×2n` matrix: a product of rational transvections
/// `x ↦ x + t ω(v, x) v`.
pub fn random_symplectic(n: usize, rng: &mut impl Rng) -> Matrix<Rational> {
    let j = std_symplectic::<Rational>(n);
    let mut m = Matrix::identity(2 * n);
    for _ in 0..(2 * n + 1) {
        let v: Vec<Rational> = (0..2 * n).map(|_| q(rng.gen_range(-1..=1), 1)).collect();
        let t = small_rational(rng, true);
        let vjt = j.transpose().mul_vec(&v);
        let tr = Matrix::from_fn(2 * n, 2 * n, |r, c| {
            let base = if r == c { Rational::one() } else { Rational::zero() };
            base + &t * &v[r] * &vjt[c]
        });
        m = tr.mul(&m);
    }
    m
}

/// Random automorphism parameters with small rational entries.
pub fn random_aut_params(n: usize, rng: &mut impl Rng, mode: AutSampling) -> AutParams<Rational> {
    let m = 2 * n;
    let mut fbar = random_symplectic(n, rng);
    let mut f4 = Rational::one();
    if mode == AutSampling::General {
        let c = [q(1, 1), q(2, 1), q(1, 2), q(-1, 1)][rng.gen_range(0..4)].clone();
        fbar = fbar.scale(&c);
        f4 = &c * &c;
        if rng.gen_bool(0.5) {
            // diag(E, -E) is anti-symplectic
            for r in n..m {
                for col in 0..m {
                    fbar[(r, col)] = -fbar[(r, col)].clone();
                }
            }
            f4 = -f4;
        }
    }
    let mut params = AutParams { fbar1: fbar, f4, ..AutParams::identity(n) };
    if mode != AutSampling::BlockDiagonal {
        params.f1 = small_rational(rng, true);
        params.v1 = (0..m).map(|_| small_rational(rng, false)).collect();
        if n == 1 {
            let w = params.fbar1.inverse(0.0).expect("symplectic up to scale").mul_vec(&params.v1);
            loop {
                params.u1 = (0..m).map(|_| small_rational(rng, false)).collect();
                if crate::matrix::dot(&params.u1, &w) != params.f1 {
                    break;
                }
            }
        }
        params.f3 = Matrix::from_fn(m + 1, m + 1, |_, _| small_rational(rng, false));
    }
    params
}

/// Deterministic random automorphism for a seed.
pub fn random_automorphism(n: usize, seed: u64) -> Result<Automorphism<Rational>> {
    random_automorphism_with(n, seed, AutSampling::General)
}

pub fn random_automorphism_with(n: usize, seed: u64, mode: AutSampling) -> Result<Automorphism<Rational>> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    assemble(random_aut_params(n, &mut rng, mode), n)
}

/// Float automorphism with bounded condition number: `F̄1` is a product of
/// plane rotations, an orthogonal `diag(Q, Q)` and a symplectic dilation;
/// the remaining blocks have entries in `[-1, 1]`.
pub fn random_automorphism_f64(n: usize, rng: &mut impl Rng) -> Result<Automorphism<f64>> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    let m = 2 * n;
    let rotation = |rng: &mut dyn rand::RngCore| {
        let angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        symplectic_rotation(&angles, n).map(|a| a.matrix().block(0, 0, m, m))
    };
    let mut fbar = rotation(rng)?;
    for i in 0..n {
        for k in i + 1..n {
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let mut g = Matrix::<f64>::identity(m);
            for off in [0, n] {
                let (a, b) = (i + off, k + off);
                g[(a, a)] = t.cos();
                g[(b, b)] = t.cos();
                g[(a, b)] = -t.sin();
                g[(b, a)] = t.sin();
            }
            fbar = fbar.mul(&g);
        }
    }
    let d = Matrix::from_fn(m, m, |r, c| if r != c { 0.0 } else { 1.0 });
    let mut d = d;
    for i in 0..n {
        let x: f64 = rng.gen_range(0.7..1.4);
        d[(i, i)] = x;
        d[(n + i, n + i)] = 1.0 / x;
    }
    fbar = fbar.mul(&d).mul(&rotation(rng)?);
    let c: f64 = rng.gen_range(0.7..1.4);
    let mut f4 = c * c;
    fbar = fbar.scale(&c);
    if rng.gen_bool(0.5) {
        for r in n..m {
            for col in 0..m {
                fbar[(r, col)] = -fbar[(r, col)];
            }
        }
        f4 = -f4;
    }
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let mut params = AutParams { fbar1: fbar, f4, f1: sign * rng.gen_range(0.7..1.4), ..AutParams::identity(n) };
    params.v1 = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    if n == 1 {
        // det F1 = det F̄1 (f1 − u1ᵀ F̄1⁻¹ v1): keep the second factor away from 0
        let w = params.fbar1.inverse(1e-12)?.mul_vec(&params.v1);
        loop {
            params.u1 = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if (params.f1 - crate::matrix::dot(&params.u1, &w)).abs() >= 0.5 * params.f1.abs() {
                break;
            }
        }
    }
    params.f3 = Matrix::from_fn(m + 1, m + 1, |_, _| rng.gen_range(-1.0..1.0));
    assemble(params, n)
}

/// Degrees of freedom in the block parameters as the block form counts them:
/// `n(2n+1) + (2n+1)² + 2n + 2n + 2`.
pub fn block_parameter_count(n: usize) -> usize {
    n * (2 * n + 1) + (2 * n + 1).pow(2) + 2 * n + 2 * n + 2
}

/// Degrees of freedom of parameters that `assemble` accepts: `u1` is only
/// free for `n = 1`.
pub fn admissible_parameter_count(n: usize) -> usize {
    if n == 1 {
        block_parameter_count(1)
    } else {
        block_parameter_count(n) - 2 * n
    }
}
