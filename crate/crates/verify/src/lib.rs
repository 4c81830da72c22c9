//! Reference computations used by the acceptance run. Everything here is
//! written directly from the bracket relations with dense loops and shares no
//! solver code with `thn-core`.

use num_traits::{One, Zero};
use thn_core::{Matrix, Rational};

/// Index layout `e_1..e_n, f_1..f_n, z*, e*_1..e*_n, f*_1..f*_n, z`.
#[derive(Clone, Copy, Debug)]
pub struct Layout {
    pub n: usize,
}

impl Layout {
    pub fn dim(&self) -> usize {
        4 * self.n + 2
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

fn r(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// Dense structure constants: `c[i][j][k]` is the `b_k` coefficient of `[b_i, b_j]`.
pub type Constants = Vec<Vec<Vec<Rational>>>;

pub fn structure(n: usize) -> Constants {
    let b = Layout { n };
    let d = b.dim();
    let mut c = vec![vec![vec![Rational::zero(); d]; d]; d];
    let mut set = |i: usize, j: usize, k: usize, v: i64| {
        c[i][j][k] = r(v);
        c[j][i][k] = r(-v);
    };
    for i in 0..n {
        set(b.e(i), b.f(i), b.z(), 1);
        set(b.zs(), b.e(i), b.fs(i), 1);
        set(b.zs(), b.f(i), b.es(i), -1);
    }
    c
}

pub fn bracket(c: &Constants, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let d = c.len();
    let mut out = vec![Rational::zero(); d];
    for i in (0..d).filter(|&i| !x[i].is_zero()) {
        for j in (0..d).filter(|&j| !y[j].is_zero()) {
            let w = &x[i] * &y[j];
            for k in 0..d {
                if !c[i][j][k].is_zero() {
                    out[k] += &w * &c[i][j][k];
                }
            }
        }
    }
    out
}

pub fn unit(d: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); d];
    v[i] = Rational::one();
    v
}

/// The complex structure `e ↦ f ↦ −e`, `e* ↦ f* ↦ −e*`, `z* ↦ −z`, `z ↦ z*`.
pub fn j0(n: usize) -> Matrix<Rational> {
    let b = Layout { n };
    let mut j = Matrix::zeros(b.dim(), b.dim());
    for i in 0..n {
        j[(b.f(i), b.e(i))] = r(1);
        j[(b.e(i), b.f(i))] = r(-1);
        j[(b.fs(i), b.es(i))] = r(1);
        j[(b.es(i), b.fs(i))] = r(-1);
    }
    j[(b.z(), b.zs())] = r(-1);
    j[(b.zs(), b.z())] = r(1);
    j
}

/// Incrementally maintained reduced row echelon form over `Q`.
pub struct RowSpace {
    ncols: usize,
    rows: Vec<(usize, Vec<Rational>)>,
}

impl RowSpace {
    pub fn new(ncols: usize) -> Self {
        RowSpace { ncols, rows: Vec::new() }
    }

    pub fn insert(&mut self, mut v: Vec<Rational>) {
        assert_eq!(v.len(), self.ncols);
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (a, b) in v.iter_mut().zip(row) {
                    if !b.is_zero() {
                        *a -= &f * b;
                    }
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else { return };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (a, b) in row.iter_mut().zip(&v) {
                    if !b.is_zero() {
                        *a -= &f * b;
                    }
                }
            }
        }
        self.rows.push((p, v));
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rows.len()
    }

    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let pivots: Vec<usize> = self.rows.iter().map(|(p, _)| *p).collect();
        (0..self.ncols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = unit(self.ncols, free);
                for (p, row) in &self.rows {
                    v[*p] = -row[free].clone();
                }
                v
            })
            .collect()
    }
}

pub fn rank_of(vectors: &[Vec<Rational>]) -> usize {
    let Some(first) = vectors.first() else { return 0 };
    let mut rs = RowSpace::new(first.len());
    for v in vectors {
        rs.insert(v.clone());
    }
    rs.rank()
}

pub fn in_span(v: &[Vec<Rational>], spanning: &[Vec<Rational>]) -> bool {
    let base = rank_of(spanning);
    v.iter().all(|x| {
        let mut all = spanning.to_vec();
        all.push(x.clone());
        rank_of(&all) == base
    })
}

/// `dim Der`: unknown `D` with `D[x,y] = [Dx,y] + [x,Dy]` on basis pairs.
pub fn derivation_dimension(n: usize) -> usize {
    let c = structure(n);
    let d = c.len();
    let var = |a: usize, b: usize| a * d + b;
    let mut rs = RowSpace::new(d * d);
    for i in 0..d {
        for j in i + 1..d {
            for k in 0..d {
                let mut row = vec![Rational::zero(); d * d];
                for a in 0..d {
                    if !c[i][j][a].is_zero() {
                        row[var(k, a)] += &c[i][j][a];
                    }
                    if !c[a][j][k].is_zero() {
                        row[var(a, i)] -= &c[a][j][k];
                    }
                    if !c[i][a][k].is_zero() {
                        row[var(a, j)] -= &c[i][a][k];
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rs.insert(row);
                }
            }
        }
    }
    rs.nullity()
}

fn sym_positions(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect()
}

/// Basis of symmetric `S` with `⟨[x,y],w⟩ + ⟨y,[x,w]⟩ = 0`.
pub fn ad_invariant_space(n: usize) -> Vec<Matrix<Rational>> {
    let c = structure(n);
    let d = c.len();
    let pos = sym_positions(d);
    let var = |a: usize, b: usize| pos.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
    let mut rs = RowSpace::new(pos.len());
    for cx in &c {
        for y in 0..d {
            for w in 0..d {
                let mut row = vec![Rational::zero(); pos.len()];
                for (k, ck) in cx[y].iter().enumerate() {
                    if !ck.is_zero() {
                        row[var(k, w)] += ck;
                    }
                    if !cx[w][k].is_zero() {
                        row[var(y, k)] += &cx[w][k];
                    }
                }
                if row.iter().any(|v| !v.is_zero()) {
                    rs.insert(row);
                }
            }
        }
    }
    rs.nullspace()
        .into_iter()
        .map(|v| {
            let mut m = Matrix::zeros(d, d);
            for (k, &(a, b)) in pos.iter().enumerate() {
                m[(a, b)] = v[k].clone();
                m[(b, a)] = v[k].clone();
            }
            m
        })
        .collect()
}

pub fn pair_positions(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect()
}

/// Coordinates `Ω[a][b]`, `a < b`, of an antisymmetric matrix.
pub fn pair_coordinates(m: &Matrix<Rational>) -> Vec<Rational> {
    pair_positions(m.rows()).into_iter().map(|(a, b)| m[(a, b)].clone()).collect()
}

/// Closed `J0`-invariant 2-forms as pair coordinates.
pub fn closed_invariant_space(n: usize) -> Vec<Vec<Rational>> {
    let c = structure(n);
    let j = j0(n);
    let d = c.len();
    let pos = pair_positions(d);
    let idx = |a: usize, b: usize| pos.iter().position(|&p| p == (a, b)).unwrap();
    // Ω[a][b] as (variable, sign)
    let entry = |a: usize, b: usize| -> Option<(usize, i64)> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some((idx(a, b), 1)),
            std::cmp::Ordering::Greater => Some((idx(b, a), -1)),
            std::cmp::Ordering::Equal => None,
        }
    };
    let mut rs = RowSpace::new(pos.len());
    for &(a, b) in &pos {
        let mut row = vec![Rational::zero(); pos.len()];
        for p in 0..d {
            if j[(p, a)].is_zero() {
                continue;
            }
            for q in 0..d {
                if j[(q, b)].is_zero() {
                    continue;
                }
                if let Some((v, s)) = entry(p, q) {
                    row[v] += &j[(p, a)] * &j[(q, b)] * r(s);
                }
            }
        }
        row[idx(a, b)] -= r(1);
        if row.iter().any(|v| !v.is_zero()) {
            rs.insert(row);
        }
    }
    for a in 0..d {
        for b in a + 1..d {
            for w in b + 1..d {
                let mut row = vec![Rational::zero(); pos.len()];
                for (x, y, other, sign) in [(a, b, w, 1), (a, w, b, -1), (b, w, a, 1)] {
                    for (k, ck) in c[x][y].iter().enumerate() {
                        if ck.is_zero() {
                            continue;
                        }
                        if let Some((v, s)) = entry(k, other) {
                            row[v] += ck * r(s * sign);
                        }
                    }
                }
                if row.iter().any(|v| !v.is_zero()) {
                    rs.insert(row);
                }
            }
        }
    }
    rs.nullspace()
}

fn wedge(d: usize, a: usize, b: usize) -> Matrix<Rational> {
    let mut m = Matrix::zeros(d, d);
    m[(a, b)] = r(1);
    m[(b, a)] = r(-1);
    m
}

/// Pair coordinates of the literal reference family: `A1` antisymmetric on
/// `e^i∧e^j + f^i∧f^j`, `A2` symmetric on `e^i∧f^j`, `K` antisymmetric on
/// `e^i∧e*^j + f^i∧f*^j`, `d_i e^i∧f*^i`, and the `μ` term; for `n = 1` also
/// the two extra terms involving `ζ*` and `ζ`.
pub fn literal_template(n: usize) -> Vec<Vec<Rational>> {
    let b = Layout { n };
    let d = b.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(wedge(d, b.e(i), b.e(j)).add(&wedge(d, b.f(i), b.f(j))));
            out.push(wedge(d, b.e(i), b.es(j)).add(&wedge(d, b.f(i), b.fs(j))).sub(&wedge(d, b.e(j), b.es(i))).sub(&wedge(d, b.f(j), b.fs(i))));
        }
        for j in i..n {
            let m = if i == j { wedge(d, b.e(i), b.f(i)) } else { wedge(d, b.e(i), b.f(j)).add(&wedge(d, b.e(j), b.f(i))) };
            out.push(m);
        }
        out.push(wedge(d, b.e(i), b.fs(i)));
    }
    let mut mu = wedge(d, b.zs(), b.z());
    let half = Rational::new(1.into(), 2.into());
    for i in 0..n {
        mu = mu.sub(&wedge(d, b.e(i), b.es(i)).add(&wedge(d, b.f(i), b.fs(i))).scale(&half));
    }
    out.push(mu);
    if n == 1 {
        out.push(wedge(d, b.e(0), b.zs()).sub(&wedge(d, b.f(0), b.z())));
        out.push(wedge(d, b.f(0), b.zs()).add(&wedge(d, b.e(0), b.z())));
    }
    out.iter().map(pair_coordinates).collect()
}

/// `N(x,y) = [Jx,Jy] − J[Jx,y] − J[x,Jy] − [x,y]` vanishes on basis pairs.
pub fn nijenhuis_vanishes(c: &Constants, j: &Matrix<Rational>) -> bool {
    let d = c.len();
    (0..d).all(|a| {
        (a + 1..d).all(|b| {
            let (x, y) = (unit(d, a), unit(d, b));
            let (jx, jy) = (j.mul_vec(&x), j.mul_vec(&y));
            let t1 = bracket(c, &jx, &jy);
            let t2 = j.mul_vec(&bracket(c, &jx, &y));
            let t3 = j.mul_vec(&bracket(c, &x, &jy));
            let t4 = bracket(c, &x, &y);
            (0..d).all(|k| (&t1[k] - &t2[k] - &t3[k] - &t4[k]).is_zero())
        })
    })
}

/// `F[x,y] = [Fx,Fy]` on basis pairs and `F` invertible.
pub fn is_automorphism_exact(c: &Constants, f: &Matrix<Rational>) -> bool {
    let d = c.len();
    let cols: Vec<Vec<Rational>> = (0..d).map(|i| f.column(i)).collect();
    let hom = (0..d).all(|a| (a + 1..d).all(|b| f.mul_vec(&c[a][b]) == bracket(c, &cols[a], &cols[b])));
    hom && rank_of(&cols) == d
}

/// `max |F[x,y] − [Fx,Fy]|` over basis pairs, float.
pub fn bracket_defect(c: &Constants, f: &Matrix<f64>) -> f64 {
    let d = c.len();
    let cf: Vec<Vec<Vec<f64>>> = c.iter().map(|row| row.iter().map(|v| v.iter().map(thn_core::Scalar::to_f64).collect()).collect()).collect();
    let col = |i: usize| f.column(i);
    let mut worst = 0.0_f64;
    for a in 0..d {
        for b in a + 1..d {
            let lhs = f.mul_vec(&cf[a][b]);
            let (x, y) = (col(a), col(b));
            let mut rhs = vec![0.0; d];
            for i in 0..d {
                for j in 0..d {
                    let w = x[i] * y[j];
                    if w != 0.0 {
                        for k in 0..d {
                            rhs[k] += w * cf[i][j][k];
                        }
                    }
                }
            }
            for k in 0..d {
                worst = worst.max((lhs[k] - rhs[k]).abs());
            }
        }
    }
    worst
}

/// Levi-Civita operators `∇_{b_i}` (column `j` is `∇_{b_i} b_j`) from
/// `∇_x y = ½([x,y] − ad*_x y − ad*_y x)`, `ad*_x = S⁻¹ ad_xᵀ S`.
pub fn connection(c: &Constants, s: &Matrix<Rational>) -> Vec<Matrix<Rational>> {
    let d = c.len();
    let s_inv = s.inverse(0.0).expect("nondegenerate metric");
    let ad: Vec<Matrix<Rational>> = (0..d).map(|i| Matrix::from_fn(d, d, |k, j| c[i][j][k].clone())).collect();
    let adstar: Vec<Matrix<Rational>> = ad.iter().map(|a| s_inv.mul(&a.transpose()).mul(s)).collect();
    let half = Rational::new(1.into(), 2.into());
    (0..d)
        .map(|i| Matrix::from_fn(d, d, |k, j| (&c[i][j][k] - &adstar[i][(k, j)] - &adstar[j][(k, i)]) * &half))
        .collect()
}

/// `R(b_i, b_j) = [∇_i, ∇_j] − ∇_{[b_i,b_j]}` for `i < j` (row-major).
pub fn curvature(c: &Constants, nabla: &[Matrix<Rational>]) -> Vec<Vec<Matrix<Rational>>> {
    let d = c.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut m = nabla[i].mul(&nabla[j]).sub(&nabla[j].mul(&nabla[i]));
                    for k in 0..d {
                        if !c[i][j][k].is_zero() {
                            m = m.sub(&nabla[k].scale(&c[i][j][k]));
                        }
                    }
                    m
                })
                .collect()
        })
        .collect()
}

/// `ρ(y,z) = Σ_i (R(b_i, y) z)_i`.
pub fn ricci(rt: &[Vec<Matrix<Rational>>]) -> Matrix<Rational> {
    let d = rt.len();
    Matrix::from_fn(d, d, |j, k| (0..d).fold(Rational::zero(), |acc, i| acc + &rt[i][j][(i, k)]))
}

/// `(positive, negative)` counts of the pairing `⟨b_i, b_{h+i}⟩ = 1`,
/// diagonalized by `b_i ± b_{h+i}`.
pub fn pairing_inertia(p: &Matrix<Rational>) -> Option<(usize, usize)> {
    let d = p.rows();
    let h = d / 2;
    let mut basis = Vec::new();
    for i in 0..h {
        for sign in [1, -1] {
            let mut v = unit(d, i);
            v[h + i] = r(sign);
            basis.push(v);
        }
    }
    if rank_of(&basis) != d {
        return None;
    }
    let mut counts = (0, 0);
    for (a, x) in basis.iter().enumerate() {
        for (b, y) in basis.iter().enumerate() {
            let v = p.bilinear(x, y);
            if a != b && !v.is_zero() {
                return None;
            }
            if a == b {
                if v > Rational::zero() {
                    counts.0 += 1;
                } else if v < Rational::zero() {
                    counts.1 += 1;
                }
            }
        }
    }
    Some(counts)
}
