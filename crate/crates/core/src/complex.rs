//! Almost complex structures on `T*h(2n+1)`: Nijenhuis tensor, integrability,
//! the integrable block family, normalization to `±J0`, Hermitian metrics.

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::automorphism::{assemble, is_automorphism, AutParams, Automorphism};
use crate::curvature::signature;
use crate::echelon::{solve_affine, sparse_from_terms, AffineSpace, SparseRow};
use crate::error::{Error, Result};
use crate::lie::{basis_vector, build_thn, LieAlgebra, ThnBasis};
use crate::matrix::{std_symplectic, Matrix};
use crate::metric::{BilinearForm, CanonicalMetric};
use crate::par;
use crate::scalar::{q, Rational, Scalar};

/// Float tolerance for structural zero tests.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Float tolerance for the final `F⁻¹JF = εJ0` residual.
pub const NORMALIZE_TOL: f64 = 1e-9;

fn tol_for<T: Scalar>(tol: f64) -> f64 {
    if T::EXACT {
        0.0
    } else {
        tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlmostComplexStructure<T> {
    matrix: Matrix<T>,
}

impl<T: Scalar> AlmostComplexStructure<T> {
    /// Checks `J² = −Id` (exactly, or within `1e-12` relative for floats).
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), got: matrix.cols() });
        }
        let d = matrix.rows();
        let tol = tol_for::<T>(1e-12 * (1.0 + matrix.max_abs()).powi(2));
        if !matrix.mul(&matrix).add(&Matrix::identity(d)).is_zero(tol) {
            return Err(Error::NotAlmostComplex);
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        self.matrix.mul_vec(v)
    }

    pub fn neg(&self) -> Self {
        Self { matrix: self.matrix.neg() }
    }

    /// `F⁻¹ J F`.
    pub fn conjugate(&self, f: &Matrix<T>, tol: f64) -> Result<Self> {
        let inv = f.inverse(tol)?;
        Ok(Self { matrix: inv.mul(&self.matrix).mul(f) })
    }

    pub fn to_f64(&self) -> AlmostComplexStructure<f64> {
        AlmostComplexStructure { matrix: self.matrix.to_f64() }
    }
}

/// `J0`: `e_i ↦ f_i`, `f_i ↦ −e_i`, `e*_i ↦ f*_i`, `f*_i ↦ −e*_i`, `z* ↦ −z`, `z ↦ z*`.
pub fn j0<T: Scalar>(n: usize) -> Result<AlmostComplexStructure<T>> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    let b = ThnBasis::new(n);
    let mut m = Matrix::zeros(b.dim(), b.dim());
    for i in 0..n {
        m[(b.f(i), b.e(i))] = T::one();
        m[(b.e(i), b.f(i))] = -T::one();
        m[(b.fs(i), b.es(i))] = T::one();
        m[(b.es(i), b.fs(i))] = -T::one();
    }
    m[(b.z(), b.zs())] = -T::one();
    m[(b.zs(), b.z())] = T::one();
    AlmostComplexStructure::new(m)
}

/// `N(a,b) = [a,b] + J[Ja,b] + J[a,Jb] − [Ja,Jb]`.
pub fn nijenhuis<T: Scalar>(j: &AlmostComplexStructure<T>, g: &LieAlgebra, a: &[T], b: &[T]) -> Result<Vec<T>> {
    if j.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: j.dim() });
    }
    let (ja, jb) = (j.apply(a), j.apply(b));
    let t1 = g.bracket(a, b)?;
    let t2 = j.apply(&g.bracket(&ja, b)?);
    let t3 = j.apply(&g.bracket(a, &jb)?);
    let t4 = g.bracket(&ja, &jb)?;
    Ok((0..g.dim()).map(|k| t1[k].add_ref(&t2[k]).add_ref(&t3[k]).sub_ref(&t4[k])).collect())
}

/// First basis pair with `N(b_i, b_j) ≠ 0`.
pub fn nijenhuis_witness<T: Scalar>(j: &AlmostComplexStructure<T>, g: &LieAlgebra, tol: f64) -> Result<Option<(usize, usize)>> {
    let d = g.dim();
    if j.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: j.dim() });
    }
    let tol = tol_for::<T>(tol);
    let hit = par::find_first(d, |a| {
        let ba = basis_vector::<T>(d, a);
        (a + 1..d).find(|&b| {
            let n = nijenhuis(j, g, &ba, &basis_vector(d, b)).expect("dimensions checked");
            n.iter().any(|v| !v.is_negligible(tol))
        })
    });
    Ok(hit)
}

/// Operator form: `ad(X) + J ad(JX) + J ad(X) J − ad(JX) J = 0` for every basis `X`.
pub fn ad_route_integrable<T: Scalar>(j: &AlmostComplexStructure<T>, g: &LieAlgebra, tol: f64) -> Result<bool> {
    let d = g.dim();
    if j.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: j.dim() });
    }
    let tol = tol_for::<T>(tol);
    let jm = j.matrix();
    let results: Vec<Result<bool>> = par::map_range(d, |x| {
        let ad_x = g.basis_ad::<T>(x);
        let ad_jx = g.ad_matrix(&jm.column(x))?;
        let op = ad_x.add(&jm.mul(&ad_jx)).add(&jm.mul(&ad_x).mul(jm)).sub(&ad_jx.mul(jm));
        Ok(op.is_zero(tol))
    });
    results.into_iter().try_fold(true, |acc, r| Ok(acc && r?))
}

/// Integrability by both the Nijenhuis basis scan and the operator identity;
/// disagreement is reported as an error.
pub fn is_integrable<T: Scalar>(j: &AlmostComplexStructure<T>, g: &LieAlgebra) -> Result<bool> {
    is_integrable_tol(j, g, STRUCTURE_TOL)
}

/// `tol` is relative to `(1 + max|J|)²` in float mode.
pub fn is_integrable_tol<T: Scalar>(j: &AlmostComplexStructure<T>, g: &LieAlgebra, tol: f64) -> Result<bool> {
    let tol = tol * (1.0 + j.matrix().max_abs()).powi(2);
    let scan = nijenhuis_witness(j, g, tol)?.is_none();
    let op = ad_route_integrable(j, g, tol)?;
    if scan != op {
        return Err(Error::RouteMismatch(format!("Nijenhuis scan says {scan}, operator identity says {op}")));
    }
    Ok(scan)
}

/// First basis pair with `[b_i,b_j] ≠ [Jb_i, Jb_j]`, `None` if `J` is abelian.
pub fn abelian_witness<T: Scalar>(j: &AlmostComplexStructure<T>, g: &LieAlgebra, tol: f64) -> Result<Option<(usize, usize)>> {
    let d = g.dim();
    if j.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: j.dim() });
    }
    let tol = tol_for::<T>(tol);
    let jm = j.matrix();
    let hit = par::find_first(d, |a| {
        (0..d).find(|&b| {
            let lhs = g.bracket(&basis_vector::<T>(d, a), &basis_vector(d, b)).expect("dimensions checked");
            let rhs = g.bracket(&jm.column(a), &jm.column(b)).expect("dimensions checked");
            lhs.iter().zip(&rhs).any(|(x, y)| !x.sub_ref(y).is_negligible(tol))
        })
    });
    Ok(hit)
}

pub fn is_abelian_complex_structure<T: Scalar>(j: &AlmostComplexStructure<T>, g: &LieAlgebra) -> Result<bool> {
    Ok(abelian_witness(j, g, STRUCTURE_TOL)?.is_none())
}

/// `JᵀSJ = S` within `tol`.
pub fn is_hermitian<T: Scalar>(j: &AlmostComplexStructure<T>, s: &BilinearForm<T>, tol: f64) -> Result<bool> {
    if j.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: j.dim() });
    }
    Ok(j.matrix().congruence(s.matrix()).approx_eq(s.matrix(), tol_for::<T>(tol)))
}

/// One member of the integrable family: `J1 = J4 = diag(εJ, 0)`, corner `n2`,
/// `J3 = [[J̄3, 0], [0, −1/n2]]` with `J̄3 J + J J̄3 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMember<T> {
    pub epsilon: i8,
    pub n2: T,
    pub jbar3: Matrix<T>,
}

impl<T: Scalar> FamilyMember<T> {
    pub fn n(&self) -> usize {
        self.jbar3.rows() / 2
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let tol = tol_for::<T>(tol);
        if self.epsilon != 1 && self.epsilon != -1 {
            return Err(Error::InvalidParams("epsilon must be +1 or -1".into()));
        }
        if self.n2.is_negligible(tol) {
            return Err(Error::InvalidParams("n2 must be nonzero".into()));
        }
        let n = self.n();
        if n == 0 || self.jbar3.rows() != 2 * n || !self.jbar3.is_square() {
            return Err(Error::InvalidParams("Jbar3 must be 2n x 2n".into()));
        }
        let j = std_symplectic::<T>(n);
        if !self.jbar3.mul(&j).add(&j.mul(&self.jbar3)).is_zero(tol) {
            return Err(Error::InvalidParams("Jbar3 must anticommute with J".into()));
        }
        Ok(())
    }

    pub fn matrix(&self) -> Matrix<T> {
        let n = self.n();
        let b = ThnBasis::new(n);
        let h = b.half();
        let ej = std_symplectic::<T>(n).scale(&T::from_i64(self.epsilon as i64));
        let mut m = Matrix::zeros(b.dim(), b.dim());
        m.set_block(0, 0, &ej);
        m.set_block(h, h, &ej);
        m.set_block(h, 0, &self.jbar3);
        m[(b.zs(), b.z())] = self.n2.clone();
        m[(b.z(), b.zs())] = -T::one().div_ref(&self.n2);
        m
    }

    pub fn structure(&self) -> Result<AlmostComplexStructure<T>> {
        self.validate(STRUCTURE_TOL)?;
        AlmostComplexStructure::new(self.matrix())
    }

    /// Reads the family parameters back from a matrix, `None` if it does not fit.
    pub fn extract(j: &Matrix<T>, n: usize, tol: f64) -> Option<Self> {
        let b = ThnBasis::new(n);
        if j.rows() != b.dim() {
            return None;
        }
        let eps_entry = j[(b.f(0), b.e(0))].clone();
        let epsilon = if eps_entry.sub_ref(&T::one()).is_negligible(tol_for::<T>(tol)) {
            1
        } else if eps_entry.add_ref(&T::one()).is_negligible(tol_for::<T>(tol)) {
            -1
        } else {
            return None;
        };
        let member = Self { epsilon, n2: j[(b.zs(), b.z())].clone(), jbar3: j.block(b.half(), 0, 2 * n, 2 * n) };
        member.validate(tol).ok()?;
        member.matrix().approx_eq(j, tol_for::<T>(tol)).then_some(member)
    }
}

/// The integrable family in parametric form.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrableFamily {
    pub n: usize,
}

impl IntegrableFamily {
    pub fn constraints(&self) -> &'static [&'static str] {
        &["epsilon in {+1, -1}", "n2 != 0", "Jbar3 J + J Jbar3 = 0"]
    }

    pub fn member<T: Scalar>(&self, epsilon: i8, n2: T, jbar3: Matrix<T>) -> Result<AlmostComplexStructure<T>> {
        FamilyMember { epsilon, n2, jbar3 }.structure()
    }

    /// `J̄3 = [[A, B], [B, −A]]` with small rational `A`, `B`, random `ε` and `n2`.
    pub fn sample(&self, rng: &mut impl Rng) -> FamilyMember<Rational> {
        let n = self.n;
        let entry = |rng: &mut dyn rand::RngCore| q(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        let a = Matrix::from_fn(n, n, |_, _| entry(rng));
        let bm = Matrix::from_fn(n, n, |_, _| entry(rng));
        let mut jbar3 = Matrix::zeros(2 * n, 2 * n);
        jbar3.set_block(0, 0, &a);
        jbar3.set_block(0, n, &bm);
        jbar3.set_block(n, 0, &bm);
        jbar3.set_block(n, n, &a.neg());
        let mut n2 = Rational::zero();
        while n2.is_zero() {
            n2 = q(rng.gen_range(-5..=5), rng.gen_range(1..=3));
        }
        let epsilon = if rng.gen_bool(0.5) { 1 } else { -1 };
        FamilyMember { epsilon, n2, jbar3 }
    }
}

pub fn solve_integrable_family(n: usize) -> Result<IntegrableFamily> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    Ok(IntegrableFamily { n })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormalizationMethod {
    Family,
    General,
}

#[derive(Clone, Debug)]
pub struct ComplexNormalization<T> {
    pub automorphism: Automorphism<T>,
    pub epsilon: i8,
    pub method: NormalizationMethod,
    /// `max |J F − ε F J0|` divided by `max|J| · max|F|`
    pub residual: f64,
}

/// `F` and `ε` with `F⁻¹ J F = ε J0`.
pub fn normalize_complex_structure<T: Scalar>(j: &AlmostComplexStructure<T>, n: usize) -> Result<ComplexNormalization<T>> {
    let g = build_thn(n)?;
    if j.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: j.dim() });
    }
    if !is_integrable(j, &g)? {
        return Err(Error::NotIntegrable);
    }
    let (f, epsilon, method) = match FamilyMember::extract(j.matrix(), n, STRUCTURE_TOL) {
        Some(m) => (family_normalizer(&m)?, m.epsilon, NormalizationMethod::Family),
        None => {
            let (f, eps) = general_normalizer(j, &g, n)?;
            (f, eps, NormalizationMethod::General)
        }
    };
    let target = j0::<T>(n)?.matrix().scale(&T::from_i64(epsilon as i64));
    let scale = j.matrix().max_abs() * f.matrix().max_abs();
    let residual = j.matrix().mul(f.matrix()).sub(&f.matrix().mul(&target)).max_abs() / scale;
    let limit = if T::EXACT { 0.0 } else { NORMALIZE_TOL };
    if residual > limit {
        return Err(Error::ToleranceFailure { residual, tol: limit });
    }
    Ok(ComplexNormalization { automorphism: f, epsilon, method, residual })
}

/// `F̄1 = J`, `u1 = v1 = 0`, `f1 = ε n2`, `f4 = 1`, `F3 = [[ε J̄3 / 2, 0], [0, 0]]`.
pub fn family_normalizer<T: Scalar>(m: &FamilyMember<T>) -> Result<Automorphism<T>> {
    let n = m.n();
    let eps = T::from_i64(m.epsilon as i64);
    let mut f3 = Matrix::zeros(2 * n + 1, 2 * n + 1);
    f3.set_block(0, 0, &m.jbar3.scale(&eps.mul_ref(&T::from_frac(1, 2))));
    let params = AutParams { fbar1: std_symplectic(n), f1: eps.mul_ref(&m.n2), f3, ..AutParams::identity(n) };
    assemble(params, n)
}

fn columns<T: Scalar>(vs: &[Vec<T>]) -> Matrix<T> {
    Matrix::from_columns(vs).expect("equal lengths")
}

fn in_span<T: Scalar>(basis: &[Vec<T>], v: &[T], tol: f64) -> bool {
    if basis.is_empty() {
        return v.iter().all(|x| x.is_negligible(tol));
    }
    columns(basis).solve_any(v, tol).is_some_and(|x| {
        let back = columns(basis).mul_vec(&x);
        back.iter().zip(v).all(|(a, b)| a.sub_ref(b).is_negligible(tol.max(0.0) * 10.0))
    })
}

fn not_in_family(msg: &str) -> Error {
    Error::NotInFamily(msg.into())
}

/// Adapted frame before the final square roots: `e_i`, `f_i = J e_i` spanning
/// the complement, with `[e_i, f_j] = δ_ij norms2_i z'`.
#[derive(Clone, Debug)]
struct Frame<T> {
    e: Vec<Vec<T>>,
    f: Vec<Vec<T>>,
    norms2: Vec<T>,
    z_line: Vec<T>,
}

impl<T: Scalar> Frame<T> {
    fn to_f64(&self) -> Frame<f64> {
        let conv = |vs: &[Vec<T>]| vs.iter().map(|v| v.iter().map(Scalar::to_f64).collect()).collect();
        Frame { e: conv(&self.e), f: conv(&self.f), norms2: self.norms2.iter().map(Scalar::to_f64).collect(), z_line: self.z_line.iter().map(Scalar::to_f64).collect() }
    }
}

fn general_normalizer<T: Scalar>(j: &AlmostComplexStructure<T>, g: &LieAlgebra, n: usize) -> Result<(Automorphism<T>, i8)> {
    let frame = build_frame(j, g, n)?;
    let norms = frame.norms2.iter().map(|v| v.sqrt_checked().ok_or(Error::IrrationalNormalization)).collect::<Result<Vec<T>>>()?;
    Ok((finish_frame(&frame, &norms, j, g, n)?, 1))
}

/// Builds an adapted basis directly from `J` and the bracket: the center `C`,
/// `W = C ∩ JC`, a `J`-invariant complement `X` of `C + JC` whose brackets
/// are multiples of one central vector `z'`, and a Hermitian orthogonal basis
/// of `X`.
fn build_frame<T: Scalar>(j: &AlmostComplexStructure<T>, g: &LieAlgebra, n: usize) -> Result<Frame<T>> {
    let b = ThnBasis::new(n);
    let (d, h) = (b.dim(), b.half());
    let tol = tol_for::<T>(STRUCTURE_TOL * (1.0 + j.matrix().max_abs()));
    let jm = j.matrix();
    let eps = T::one();

    let cross = jm.block(0, h, h, h);
    let w_coords = cross.nullspace(tol);
    if w_coords.len() != 2 * n {
        return Err(not_in_family("C ∩ JC does not have dimension 2n"));
    }
    let embed = |c: &[T]| {
        let mut v = vec![T::zero(); d];
        v[h..].clone_from_slice(c);
        v
    };
    let w: Vec<Vec<T>> = w_coords.iter().map(|c| embed(c)).collect();
    let k = (0..h)
        .max_by(|&a, &b2| {
            let na = (0..h).map(|r| cross[(r, a)].to_f64().abs()).fold(0.0, f64::max);
            let nb = (0..h).map(|r| cross[(r, b2)].to_f64().abs()).fold(0.0, f64::max);
            na.total_cmp(&nb)
        })
        .expect("h > 0");
    let z0 = basis_vector::<T>(d, h + k);

    // C coordinates relative to (w_1..w_2n, z')
    let mut c_basis: Vec<Vec<T>> = w_coords.clone();
    c_basis.push(basis_vector(h, k));
    let c_inv = columns(&c_basis).inverse(tol).map_err(|_| not_in_family("z' lies in C ∩ JC"))?;
    let c_coords = |v: &[T]| c_inv.mul_vec(&v[h..]);

    let mut u: Vec<Vec<T>> = (0..h).map(|i| basis_vector(d, h + i)).collect();
    u.push(j.apply(&z0));
    let mut x0: Vec<Vec<T>> = Vec::new();
    let mut current = u.clone();
    for y in 0..d {
        if x0.len() == 2 * n {
            break;
        }
        let v = basis_vector::<T>(d, y);
        if in_span(&current, &v, tol) {
            continue;
        }
        let jv = j.apply(&v);
        current.push(v.clone());
        current.push(jv.clone());
        x0.push(v);
        x0.push(jv);
    }
    if x0.len() != 2 * n {
        return Err(not_in_family("no J-invariant complement of C + JC"));
    }
    let (m, nu) = (2 * n, u.len());
    let u_mat = columns(&u);
    let ju: Vec<Vec<T>> = u.iter().map(|v| u_mat.solve_any(&j.apply(v), tol).expect("C + JC is J-invariant")).collect();
    // J on x0: x_{2t} ↦ x_{2t+1} ↦ −x_{2t}
    let a_of = |l: usize, kk: usize| -> T {
        if kk.is_multiple_of(2) && l == kk + 1 {
            T::one()
        } else if kk % 2 == 1 && l + 1 == kk {
            -T::one()
        } else {
            T::zero()
        }
    };
    let var = |kk: usize, mm: usize| kk * nu + mm;
    // the central line is z' = z0 + w with w ∈ W unknown as well
    let wvar = |r: usize| m * nu + r;
    let nvars = m * nu + m;
    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut rhs: Vec<T> = Vec::new();
    for kk in 0..m {
        for p in 0..nu {
            let mut row = vec![T::zero(); nvars];
            for l in 0..m {
                let a = a_of(l, kk);
                if !a.is_zero() {
                    row[var(l, p)] = row[var(l, p)].add_ref(&a);
                }
            }
            for mm in 0..nu {
                row[var(kk, mm)] = row[var(kk, mm)].sub_ref(&ju[mm][p]);
            }
            rows.push(row);
            rhs.push(T::zero());
        }
    }
    let ux: Vec<Vec<Vec<T>>> = u.iter().map(|um| x0.iter().map(|x| c_coords(&g.bracket(um, x).expect("dims"))).collect()).collect();
    for kk in 0..m {
        for l in kk + 1..m {
            let base = c_coords(&g.bracket(&x0[kk], &x0[l])?);
            for r in 0..m {
                let mut row = vec![T::zero(); nvars];
                for mm in 0..nu {
                    // [φx_k, x_l] − [φx_l, x_k]
                    row[var(kk, mm)] = row[var(kk, mm)].add_ref(&ux[mm][l][r]);
                    row[var(l, mm)] = row[var(l, mm)].sub_ref(&ux[mm][kk][r]);
                }
                row[wvar(r)] = -base[m].clone();
                rows.push(row);
                rhs.push(-base[r].clone());
            }
        }
    }
    let sys = Matrix::from_rows(&rows)?;
    let phi = sys.solve_any(&rhs, tol).ok_or_else(|| not_in_family("no complement with brackets along one central line"))?;
    let xt: Vec<Vec<T>> = (0..m)
        .map(|kk| {
            let mut v = x0[kk].clone();
            for mm in 0..nu {
                let c = &phi[var(kk, mm)];
                if !c.is_zero() {
                    for (vi, ui) in v.iter_mut().zip(&u[mm]) {
                        vi.add_mul_assign(c, ui);
                    }
                }
            }
            v
        })
        .collect();
    let mut z_line = z0.clone();
    for (r, wr) in w.iter().enumerate() {
        for (zi, wi) in z_line.iter_mut().zip(wr) {
            zi.add_mul_assign(&phi[wvar(r)], wi);
        }
    }
    let mut c_basis = w_coords.clone();
    c_basis.push(z_line[h..].to_vec());
    let c_inv = columns(&c_basis).inverse(tol).map_err(|_| not_in_family("central line lies in C ∩ JC"))?;
    let c_coords = |v: &[T]| c_inv.mul_vec(&v[h..]);

    let mut omega = Matrix::<T>::zeros(m, m);
    for kk in 0..m {
        for l in 0..m {
            let c = c_coords(&g.bracket(&xt[kk], &xt[l])?);
            if c[..m].iter().any(|v| !v.is_negligible(tol * 10.0)) {
                return Err(not_in_family("corrected brackets leave the central line"));
            }
            omega[(kk, l)] = c[m].clone();
        }
    }
    let a_mat = Matrix::from_fn(m, m, a_of);
    let mut herm = omega.mul(&a_mat).scale(&eps).symmetrized();
    let sig = if T::EXACT { signature(&herm) } else { crate::curvature::signature_eigen(&herm.to_f64(), tol) };
    let sign = if sig.positive == m {
        T::one()
    } else if sig.negative == m {
        -T::one()
    } else {
        return Err(not_in_family("Hermitian form on the complement is indefinite"));
    };
    herm = herm.scale(&sign);

    let ip = |x: &[T], y: &[T]| herm.bilinear(x, y);
    let mut es: Vec<Vec<T>> = Vec::new();
    let mut norms2: Vec<T> = Vec::new();
    for start in 0..m {
        if es.len() == n {
            break;
        }
        let mut v = basis_vector::<T>(m, start);
        for (e, nrm) in es.iter().zip(&norms2) {
            let ae = a_mat.mul_vec(e);
            let (c1, c2) = (ip(&v, e).div_ref(nrm), ip(&v, &ae).div_ref(nrm));
            for i in 0..m {
                let t = v[i].sub_ref(&c1.mul_ref(&e[i])).sub_ref(&c2.mul_ref(&ae[i]));
                v[i] = t;
            }
        }
        let norm2 = ip(&v, &v);
        if norm2.is_negligible(tol) {
            continue;
        }
        es.push(v);
        norms2.push(norm2);
    }
    if es.len() != n {
        return Err(not_in_family("Hermitian basis incomplete"));
    }
    let xmat = columns(&xt);
    let e = es.iter().map(|e| xmat.mul_vec(e)).collect();
    let f = es.iter().map(|e| xmat.mul_vec(&a_mat.mul_vec(e)).iter().map(|x| x.mul_ref(&eps)).collect()).collect();
    let z_line = z_line.iter().map(|x| x.mul_ref(&sign)).collect();
    Ok(Frame { e, f, norms2, z_line })
}

/// Scales the frame by `1/norms` and completes it to the image of the standard basis.
fn finish_frame<T: Scalar>(frame: &Frame<T>, norms: &[T], j: &AlmostComplexStructure<T>, g: &LieAlgebra, n: usize) -> Result<Automorphism<T>> {
    let unit = |vs: &[Vec<T>]| -> Vec<Vec<T>> { vs.iter().zip(norms).map(|(v, s)| v.iter().map(|x| x.div_ref(s)).collect()).collect() };
    let e_full = unit(&frame.e);
    let f_full = unit(&frame.f);
    let zp = frame.z_line.clone();
    let zsp = j.apply(&zp);
    let es_full: Vec<Vec<T>> = f_full.iter().map(|f| g.bracket(&zsp, f).map(|v| v.into_iter().map(|x| -x).collect())).collect::<Result<_>>()?;
    let fs_full: Vec<Vec<T>> = e_full.iter().map(|e| g.bracket(&zsp, e)).collect::<Result<_>>()?;
    let mut cols = e_full;
    cols.extend(f_full);
    cols.push(zsp);
    cols.extend(es_full);
    cols.extend(fs_full);
    cols.push(zp);
    let f = columns(&cols);
    let check = tol_for::<T>(STRUCTURE_TOL * (1.0 + f.max_abs()).powi(2));
    if !is_automorphism(&f, g, check) {
        return Err(not_in_family("adapted basis is not an automorphism image"));
    }
    Automorphism::from_matrix(f, n, check)
}

/// Rational input, exact everywhere except the final square roots: the
/// frame is built over the rationals and only its normalization is rounded.
pub fn normalize_complex_structure_rounded(j: &AlmostComplexStructure<Rational>, n: usize) -> Result<ComplexNormalization<f64>> {
    match normalize_complex_structure(j, n) {
        Ok(r) => {
            return Ok(ComplexNormalization { automorphism: r.automorphism.to_f64(), epsilon: r.epsilon, method: r.method, residual: r.residual });
        }
        Err(Error::IrrationalNormalization) => {}
        Err(e) => return Err(e),
    }
    let g = build_thn(n)?;
    let frame = build_frame(j, &g, n)?.to_f64();
    let norms: Vec<f64> = frame.norms2.iter().map(|v| v.sqrt()).collect();
    let jf = j.to_f64();
    let f = finish_frame(&frame, &norms, &jf, &g, n)?;
    let target = j0::<f64>(n)?;
    let scale = jf.matrix().max_abs() * f.matrix().max_abs();
    let residual = jf.matrix().mul(f.matrix()).sub(&f.matrix().mul(target.matrix())).max_abs() / scale;
    if residual > NORMALIZE_TOL {
        return Err(Error::ToleranceFailure { residual, tol: NORMALIZE_TOL });
    }
    Ok(ComplexNormalization { automorphism: f, epsilon: 1, method: NormalizationMethod::General, residual })
}

/// Variables of the canonical metric template: `σ_1..σ_{n−1}`, the free
/// entries of `S̄4`, then `ω4`; `σ_n = 1` and the `z*` entry are fixed.
fn template_affine(n: usize) -> (Matrix<Rational>, Vec<Matrix<Rational>>) {
    let b = ThnBasis::new(n);
    let d = b.dim();
    let mut s0 = Matrix::zeros(d, d);
    s0[(b.e(n - 1), b.e(n - 1))] = Rational::one();
    s0[(b.f(n - 1), b.f(n - 1))] = Rational::one();
    s0[(b.zs(), b.zs())] = Rational::one();
    let mut gens = Vec::new();
    for i in 0..n - 1 {
        let mut m = Matrix::zeros(d, d);
        m[(b.e(i), b.e(i))] = Rational::one();
        m[(b.f(i), b.f(i))] = Rational::one();
        gens.push(m);
    }
    for (r, c) in CanonicalMetric::free_s4bar_positions(n) {
        let mut m = Matrix::zeros(d, d);
        m[(b.es(0) + r, b.es(0) + c)] = Rational::one();
        m[(b.es(0) + c, b.es(0) + r)] = Rational::one();
        gens.push(m);
    }
    let mut m = Matrix::zeros(d, d);
    m[(b.z(), b.z())] = Rational::one();
    gens.push(m);
    (s0, gens)
}

fn rows_from_linear(entries: impl Fn(&Matrix<Rational>) -> Matrix<Rational>, s0: &Matrix<Rational>, gens: &[Matrix<Rational>]) -> Vec<(SparseRow, Rational)> {
    let e0 = entries(s0);
    let eg: Vec<Matrix<Rational>> = gens.iter().map(&entries).collect();
    let mut rows = Vec::new();
    for r in 0..e0.rows() {
        for c in 0..e0.cols() {
            let row = sparse_from_terms(eg.iter().enumerate().map(|(k, m)| (k, m[(r, c)].clone())));
            rows.push((row, -e0[(r, c)].clone()));
        }
    }
    rows
}

/// Template metric with the given coordinates: the `n − 1` leading σ values,
/// the free entries of `S̄4` (in `free_s4bar_positions` order), then `ω4`.
pub fn hermitian_template_metric(n: usize, coords: &[Rational]) -> Result<Matrix<Rational>> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    let (s0, gens) = template_affine(n);
    if coords.len() != gens.len() {
        return Err(Error::DimensionMismatch { expected: gens.len(), got: coords.len() });
    }
    Ok(gens.iter().zip(coords).fold(s0, |acc, (g, c)| acc.add(&g.scale(c))))
}

/// Canonical-template metrics that are Hermitian for `J0`.
pub fn hermitian_template_space(n: usize) -> Result<AffineSpace> {
    let (s0, gens) = template_affine(n);
    let j = j0::<Rational>(n)?;
    let rows = rows_from_linear(|s| j.matrix().congruence(s).sub(s), &s0, &gens);
    solve_affine(gens.len(), &rows).ok_or_else(|| Error::InvalidStructure("no Hermitian template metric".into()))
}

/// `ω4 = 1` and `J S̄4 = S̄4 J` in the same variables.
pub fn hermitian_family_space(n: usize) -> Result<AffineSpace> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    let (s0, gens) = template_affine(n);
    let b = ThnBasis::new(n);
    let jm = std_symplectic::<Rational>(n);
    let commutator = |s: &Matrix<Rational>| {
        let s4 = s.block(b.es(0), b.es(0), 2 * n, 2 * n);
        jm.mul(&s4).sub(&s4.mul(&jm))
    };
    let mut rows = rows_from_linear(commutator, &s0, &gens);
    let last = gens.len() - 1;
    rows.push((vec![(last, Rational::one())], Rational::one()));
    solve_affine(gens.len(), &rows).ok_or_else(|| Error::InvalidStructure("inconsistent family constraints".into()))
}
