//! Quadratic relations among exact polynomial 1-forms on the affine chart
//! of CP^m.
//!
//! With `M = CP^m` and `H` a hyperplane, sections of `O(nH)` restrict to
//! polynomials of total degree at most `n` on the affine chart, so the
//! image `V` of the exterior differential is spanned by the differentials
//! of the non-constant monomials and `dim V = C(n+m, m) − 1`. The
//! restricted cup product sends `F_a ⊙ F_b` to the polynomial symmetric
//! 2-tensor `dF_a ⊙ dF_b`; its kernel elements are exactly the quadratic
//! relations that seed Weierstrass data. Everything up to the square roots
//! of the diagonalization runs in exact rational arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checks::{check_rank, RANK_REL_TOL};
use crate::data::{DataError, WeierstrassData};
use crate::exact::GaussianRational;
use crate::expr::{ExprError, HoloExpr};
use crate::C64;

/// Default cap on `dim Sym² V` (size guard for the exact elimination).
pub const SYM2_CAP: usize = 20_000;
/// Floating residual tolerance on `Σ dF_j ⊙ dF_j` after diagonalization.
pub const DIAG_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum RelationError {
    #[error("dim Sym²V = {dim} exceeds the size guard {cap}")]
    SizeGuard { dim: usize, cap: usize },
    #[error("expression is not a polynomial")]
    NotPolynomial,
    #[error("polynomial degree {degree} exceeds the basis bound n = {n}")]
    DegreeTooHigh { degree: u32, n: usize },
    #[error("the matrix is not a quadratic relation: μ'(γ) ≠ 0")]
    NotInKernel,
    #[error("diagonalization residual {achieved} exceeds tolerance {tol}")]
    ResidualTooLarge { achieved: f64, tol: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Data(#[from] DataError),
}

fn binomial(a: usize, b: usize) -> usize {
    if b > a {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..b.min(a - b) {
        r = r * (a - i) / (i + 1);
    }
    r
}

/// All exponent vectors of length `m` with total degree in `lo..=hi`,
/// graded-lexicographic, deterministic.
fn monomials_in(m: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    fn fill(m: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == m - 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            fill(m, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for d in lo..=hi {
        fill(m, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Basis of `V`: non-constant monomials of degree `1..=n` in `m` variables.
#[derive(Debug, Clone)]
pub struct PolyBasis {
    pub m: usize,
    pub n: usize,
    pub monomials: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
}

impl PolyBasis {
    pub fn new(m: usize, n: usize) -> Self {
        assert!(m >= 1 && n >= 1);
        let monomials = monomials_in(m, 1, n as u32);
        let index = monomials.iter().cloned().zip(0..).collect();
        let basis = PolyBasis { m, n, monomials, index };
        debug_assert_eq!(basis.dim(), binomial(n + m, m) - 1);
        basis
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    /// The monomial as an expression.
    pub fn monomial_expr(&self, idx: usize) -> HoloExpr {
        let mut acc = HoloExpr::one(self.m);
        for (j, &e) in self.monomials[idx].iter().enumerate() {
            if e > 0 {
                acc = acc.mul(&HoloExpr::var(j, self.m).unwrap().pow(e));
            }
        }
        acc
    }
}

/// Target space: polynomial symmetric 2-tensors `p(z) dz_j ⊙ dz_k` with
/// `deg p <= 2n − 2`.
#[derive(Debug, Clone)]
pub struct SymTensorSpace {
    pub m: usize,
    pub max_degree: u32,
    monomials: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
}

impl SymTensorSpace {
    fn new(m: usize, n: usize) -> Self {
        let max_degree = (2 * n).saturating_sub(2) as u32;
        let monomials = monomials_in(m, 0, max_degree);
        let index = monomials.iter().cloned().zip(0..).collect();
        SymTensorSpace { m, max_degree, monomials, index }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len() * self.m * (self.m + 1) / 2
    }

    fn row(&self, mono: &[u32], j: usize, k: usize) -> usize {
        debug_assert!(j <= k);
        let mono_idx = self.index[mono];
        let pair = crate::jet::tri_index(self.m, j, k);
        mono_idx * (self.m * (self.m + 1) / 2) + pair
    }
}

/// The matrix of `μ'_n` over the monomial bases: one column per unordered
/// pair of `V`-basis elements, integer entries, stored sparse by column.
#[derive(Debug, Clone)]
pub struct MuMatrix {
    pub basis: PolyBasis,
    pub tensor: SymTensorSpace,
    /// `(a, b)` with `a <= b`, in deterministic column order.
    pub pairs: Vec<(usize, usize)>,
    cols: Vec<BTreeMap<usize, BigInt>>,
}

impl MuMatrix {
    pub fn ncols(&self) -> usize {
        self.pairs.len()
    }

    pub fn nrows(&self) -> usize {
        self.tensor.dim()
    }
}

/// Assemble `μ'_n`: the column for `(F_a, F_b)` holds the coefficients of
/// `dF_a ⊙ dF_b = Σ_{j,k} ∂_j F_a ∂_k F_b dz_j ⊙ dz_k`.
pub fn build_mu(m: usize, n: usize, cap: usize) -> Result<MuMatrix, RelationError> {
    let basis = PolyBasis::new(m, n);
    let dim_v = basis.dim();
    let dim_sym2 = dim_v * (dim_v + 1) / 2;
    if dim_sym2 > cap {
        return Err(RelationError::SizeGuard { dim: dim_sym2, cap });
    }
    let tensor = SymTensorSpace::new(m, n);
    let mut pairs = Vec::with_capacity(dim_sym2);
    let mut cols = Vec::with_capacity(dim_sym2);
    for a in 0..dim_v {
        for b in a..dim_v {
            let mut col: BTreeMap<usize, BigInt> = BTreeMap::new();
            let ea = &basis.monomials[a];
            let eb = &basis.monomials[b];
            for j in 0..m {
                if ea[j] == 0 {
                    continue;
                }
                for k in 0..m {
                    if eb[k] == 0 {
                        continue;
                    }
                    // ∂_j(z^ea) ∂_k(z^eb) = ea_j eb_k z^(ea+eb-e_j-e_k)
                    let coeff = BigInt::from(ea[j]) * BigInt::from(eb[k]);
                    let mut mono: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                    mono[j] -= 1;
                    mono[k] -= 1;
                    let row = tensor.row(&mono, j.min(k), j.max(k));
                    *col.entry(row).or_insert_with(BigInt::zero) += coeff;
                }
            }
            col.retain(|_, v| !v.is_zero());
            pairs.push((a, b));
            cols.push(col);
        }
    }
    Ok(MuMatrix { basis, tensor, pairs, cols })
}

/// A symmetric matrix `γ` over the `V`-basis with `μ'(γ) = 0`,
/// representing the quadratic relation `Σ γ_ab dF_a ⊙ dF_b = 0`.
#[derive(Debug, Clone)]
pub struct QuadraticRelation {
    pub m: usize,
    pub n: usize,
    pub gamma: Vec<Vec<GaussianRational>>,
}

impl QuadraticRelation {
    /// From a coefficient vector over the unordered-pair column basis:
    /// `γ_aa = c_aa`, `γ_ab = γ_ba = c_ab / 2`.
    pub fn from_pair_vector(mu: &MuMatrix, v: &[GaussianRational]) -> Self {
        let d = mu.basis.dim();
        let half = GaussianRational::new(
            BigRational::new(BigInt::one(), BigInt::from(2)),
            BigRational::zero(),
        );
        let mut gamma = vec![vec![GaussianRational::zero(); d]; d];
        for (idx, &(a, b)) in mu.pairs.iter().enumerate() {
            if a == b {
                gamma[a][a] = v[idx].clone();
            } else {
                let val = &v[idx] * &half;
                gamma[a][b] = val.clone();
                gamma[b][a] = val;
            }
        }
        QuadraticRelation { m: mu.basis.m, n: mu.basis.n, gamma }
    }

    /// Back to the pair-column coefficients.
    pub fn to_pair_vector(&self, mu: &MuMatrix) -> Vec<GaussianRational> {
        let two = GaussianRational::from_integer(2);
        mu.pairs
            .iter()
            .map(|&(a, b)| {
                if a == b {
                    self.gamma[a][a].clone()
                } else {
                    &self.gamma[a][b] * &two
                }
            })
            .collect()
    }

    /// Exact kernel membership: `μ · vec(γ) = 0` with no tolerance.
    pub fn is_in_kernel(&self, mu: &MuMatrix) -> bool {
        let v = self.to_pair_vector(mu);
        let mut acc: BTreeMap<usize, GaussianRational> = BTreeMap::new();
        for (col, coeff) in mu.cols.iter().zip(&v) {
            if coeff.is_zero() {
                continue;
            }
            for (row, entry) in col {
                let term = coeff * &GaussianRational::from_rational(BigRational::from(entry.clone()));
                let slot = acc.entry(*row).or_insert_with(GaussianRational::zero);
                *slot += &term;
            }
        }
        acc.values().all(GaussianRational::is_zero)
    }

    pub fn rank(&self) -> usize {
        exact_rank(&self.gamma)
    }
}

fn exact_rank(mat: &[Vec<GaussianRational>]) -> usize {
    let mut work: Vec<Vec<GaussianRational>> = mat.to_vec();
    let rows = work.len();
    let cols = if rows == 0 { 0 } else { work[0].len() };
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !work[r][col].is_zero()) else {
            continue;
        };
        work.swap(row, p);
        let pivot = work[row][col].clone();
        for r in (row + 1)..rows {
            if work[r][col].is_zero() {
                continue;
            }
            let factor = &work[r][col] / &pivot;
            for c in col..cols {
                let delta = &factor * &work[row][c];
                work[r][c] -= &delta;
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Exact nullspace of `μ'` by fraction-free (Bareiss) elimination over the
/// integers, with rational back-substitution. Deterministic pivot order.
pub fn kernel(mu: &MuMatrix) -> Vec<QuadraticRelation> {
    let rows = mu.nrows();
    let cols = mu.ncols();
    // Dense integer copy, row-major.
    let mut mat: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); cols]; rows];
    for (c, col) in mu.cols.iter().enumerate() {
        for (&r, v) in col {
            mat[r][c] = v.clone();
        }
    }
    // Bareiss forward elimination to echelon form.
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, p);
        for r in (row + 1)..rows {
            for c in (col + 1)..cols {
                let num = &mat[row][col] * &mat[r][c] - &mat[r][col] * &mat[row][c];
                mat[r][c] = num / &prev; // exact by the Bareiss identity
            }
            mat[r][col] = BigInt::zero();
        }
        prev = mat[row][col].clone();
        pivots.push((row, col));
        row += 1;
        if row == rows {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();

    let mut relations = Vec::with_capacity(free_cols.len());
    for &f in &free_cols {
        let mut x = vec![BigRational::zero(); cols];
        x[f] = BigRational::one();
        for &(r, c) in pivots.iter().rev() {
            let mut s = BigRational::zero();
            for j in (c + 1)..cols {
                if !mat[r][j].is_zero() && !x[j].is_zero() {
                    s += BigRational::from(mat[r][j].clone()) * &x[j];
                }
            }
            x[c] = -s / BigRational::from(mat[r][c].clone());
        }
        // Clear denominators for a tidy integer representative.
        let lcm = x
            .iter()
            .filter(|v| !v.is_zero())
            .fold(BigInt::one(), |acc, v| num_integer::lcm(acc, v.denom().clone()));
        let v: Vec<GaussianRational> = x
            .iter()
            .map(|r| GaussianRational::from_rational(r * BigRational::from(lcm.clone())))
            .collect();
        let rel = QuadraticRelation::from_pair_vector(mu, &v);
        debug_assert!(rel.is_in_kernel(mu));
        relations.push(rel);
    }
    relations
}

/// Build the relation `Σ_i sign_i · dP_i ⊙ dQ_i = 0` candidate from
/// polynomial primitives, expressed over the given basis. The relation is
/// *not* assumed to hold; check with [`QuadraticRelation::is_in_kernel`].
pub fn relation_from_pairs(
    basis: &PolyBasis,
    pairs: &[(HoloExpr, HoloExpr, i64)],
) -> Result<QuadraticRelation, RelationError> {
    let d = basis.dim();
    let coeff_vector = |p: &HoloExpr| -> Result<Vec<GaussianRational>, RelationError> {
        let poly = p.to_polynomial().ok_or(RelationError::NotPolynomial)?;
        let mut v = vec![GaussianRational::zero(); d];
        for (exps, (re, im)) in poly {
            let degree: u32 = exps.iter().sum();
            if degree == 0 {
                continue; // constants die under d
            }
            let idx = basis
                .index_of(&exps)
                .ok_or(RelationError::DegreeTooHigh { degree, n: basis.n })?;
            v[idx] = GaussianRational::new(re, im);
        }
        Ok(v)
    };
    let half = GaussianRational::new(
        BigRational::new(BigInt::one(), BigInt::from(2)),
        BigRational::zero(),
    );
    let mut gamma = vec![vec![GaussianRational::zero(); d]; d];
    for (p, q, sign) in pairs {
        let cp = coeff_vector(p)?;
        let cq = coeff_vector(q)?;
        let s = GaussianRational::from_integer(*sign);
        for a in 0..d {
            if cp[a].is_zero() && cq[a].is_zero() {
                continue;
            }
            for b in 0..d {
                let sym = &(&(&cp[a] * &cq[b]) + &(&cq[a] * &cp[b])) * &half;
                let term = &s * &sym;
                gamma[a][b] += &term;
            }
        }
    }
    Ok(QuadraticRelation { m: basis.m, n: basis.n, gamma })
}

/// Result of the congruence diagonalization of a relation: `rank(γ)` exact
/// polynomial primitives `F_j` with `Σ dF_j ⊙ dF_j = 0`. Square roots of
/// the pivots are the only floating step; `achieved_residual` certifies it.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub primitives: Vec<HoloExpr>,
    pub rank: usize,
    pub achieved_residual: f64,
}

/// Congruence-diagonalize a kernel element: symmetric pivoting on the
/// largest-magnitude diagonal entry, with the hyperbolic-pair
/// transformation `(u+v, u−v)` when the whole diagonal vanishes.
pub fn diagonalize(
    rel: &QuadraticRelation,
    mu: &MuMatrix,
    check_points: &[Vec<C64>],
) -> Result<Diagonalization, RelationError> {
    if !rel.is_in_kernel(mu) {
        return Err(RelationError::NotInKernel);
    }
    let d = mu.basis.dim();
    let mut gamma = rel.gamma.clone();
    // Current "variables" as exact combinations of basis monomials.
    let mut vars: Vec<Vec<GaussianRational>> = (0..d)
        .map(|a| {
            let mut v = vec![GaussianRational::zero(); d];
            v[a] = GaussianRational::one();
            v
        })
        .collect();
    let mut active: Vec<usize> = (0..d).collect();
    // (pivot scalar, exact linear form over monomials)
    let mut squares: Vec<(GaussianRational, Vec<GaussianRational>)> = Vec::new();

    loop {
        // Largest-magnitude nonzero diagonal entry among active indices.
        let pivot = active
            .iter()
            .copied()
            .filter(|&i| !gamma[i][i].is_zero())
            .max_by(|&a, &b| {
                gamma[a][a]
                    .approx_magnitude()
                    .partial_cmp(&gamma[b][b].approx_magnitude())
                    .unwrap()
                    .then(b.cmp(&a))
            });
        if let Some(i) = pivot {
            let pivot_val = gamma[i][i].clone();
            // ℓ = Σ_a (γ_ia / γ_ii) · var_a; then γ ← γ − γ_ii ℓ ℓᵀ.
            let mut form = vec![GaussianRational::zero(); d];
            let ratios: Vec<(usize, GaussianRational)> = active
                .iter()
                .copied()
                .filter(|&a| !gamma[i][a].is_zero())
                .map(|a| (a, &gamma[i][a] / &pivot_val))
                .collect();
            for (a, ratio) in &ratios {
                for c in 0..d {
                    let t = ratio * &vars[*a][c];
                    form[c] += &t;
                }
            }
            squares.push((pivot_val.clone(), form));
            let row_i: Vec<GaussianRational> = gamma[i].clone();
            for &a in &active {
                if row_i[a].is_zero() {
                    continue;
                }
                for &b in &active {
                    if row_i[b].is_zero() {
                        continue;
                    }
                    let delta = &(&row_i[a] * &row_i[b]) / &pivot_val;
                    gamma[a][b] -= &delta;
                }
            }
            active.retain(|&a| a != i);
            continue;
        }
        // Diagonal all zero: look for an off-diagonal entry.
        let mut best: Option<(usize, usize, f64)> = None;
        for (ui, &u) in active.iter().enumerate() {
            for &v in &active[ui + 1..] {
                if gamma[u][v].is_zero() {
                    continue;
                }
                let mag = gamma[u][v].approx_magnitude();
                if best.map(|(_, _, bm)| mag > bm).unwrap_or(true) {
                    best = Some((u, v, mag));
                }
            }
        }
        let Some((u, v, _)) = best else { break };
        // Basis change b_u = var_u + var_v, b_v = var_u − var_v;
        // coordinates transform by R with rows/cols u, v = ±1/2.
        let new_u: Vec<GaussianRational> =
            (0..d).map(|c| &vars[u][c] + &vars[v][c]).collect();
        let new_v: Vec<GaussianRational> =
            (0..d).map(|c| &vars[u][c] - &vars[v][c]).collect();
        vars[u] = new_u;
        vars[v] = new_v;
        let half = GaussianRational::new(
            BigRational::new(BigInt::one(), BigInt::from(2)),
            BigRational::zero(),
        );
        // Rows.
        for c in 0..d {
            let ru = gamma[u][c].clone();
            let rv = gamma[v][c].clone();
            gamma[u][c] = &half * &(&ru + &rv);
            gamma[v][c] = &half * &(&ru - &rv);
        }
        // Columns.
        for r in 0..d {
            let cu = gamma[r][u].clone();
            let cv = gamma[r][v].clone();
            gamma[r][u] = &half * &(&cu + &cv);
            gamma[r][v] = &half * &(&cu - &cv);
        }
    }

    // Exactness bookkeeping: rank(γ) must equal the number of squares and
    // the emitted forms must be independent.
    let rank = squares.len();
    debug_assert_eq!(rank, rel.rank());
    let form_matrix: Vec<Vec<GaussianRational>> =
        squares.iter().map(|(_, f)| f.clone()).collect();
    assert_eq!(exact_rank(&form_matrix), rank, "diagonalization forms must be independent");

    // F_j = sqrt(pivot_j) · ℓ_j, floating from here on.
    let m = mu.basis.m;
    let primitives: Vec<HoloExpr> = squares
        .iter()
        .map(|(scalar, form)| {
            let root = scalar.to_c64().sqrt();
            let mut acc = HoloExpr::zero(m);
            for (a, coeff) in form.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let c = root * coeff.to_c64();
                let term = HoloExpr::constant_f64(c.re, c.im, m).mul(&mu.basis.monomial_expr(a));
                acc = acc.add(&term);
            }
            acc
        })
        .collect();

    let achieved_residual = isotropy_residual(&primitives, m, check_points)?;
    if achieved_residual > DIAG_RESIDUAL_TOL {
        return Err(RelationError::ResidualTooLarge {
            achieved: achieved_residual,
            tol: DIAG_RESIDUAL_TOL,
        });
    }
    Ok(Diagonalization { primitives, rank, achieved_residual })
}

/// Max entry magnitude of `Σ_j dF_j ⊙ dF_j` over the sample points.
pub fn isotropy_residual(
    primitives: &[HoloExpr],
    m: usize,
    points: &[Vec<C64>],
) -> Result<f64, ExprError> {
    let grads: Vec<Vec<HoloExpr>> = primitives
        .iter()
        .map(|p| (0..m).map(|j| p.differentiate(j)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst = 0.0f64;
    for z in points {
        for j in 0..m {
            for k in j..m {
                let mut s = C64::ZERO;
                for g in &grads {
                    s += g[j].eval(z)? * g[k].eval(z)?;
                }
                worst = worst.max(s.norm());
            }
        }
    }
    Ok(worst)
}

/// Assemble Weierstrass data `φ = Re(F_1, ..., F_k) + const` from
/// diagonalized primitives. With `ensure_immersion`, the rank condition is
/// restored by appending the chart pairs `(z_j, −i z_j)`, whose forms
/// contribute `dz_j² − dz_j² = 0` to the conformality tensor.
pub fn emit_map(
    primitives: &[HoloExpr],
    m: usize,
    ensure_immersion: bool,
    sample_points: &[Vec<C64>],
) -> Result<WeierstrassData, RelationError> {
    let mut prims: Vec<HoloExpr> = primitives.to_vec();
    let needs_pairs = if prims.is_empty() {
        true
    } else {
        let data = WeierstrassData::from_primitives(prims.clone(), vec![C64::ZERO; m])?;
        !check_rank(&data, sample_points, RANK_REL_TOL)?.pass
    };
    if needs_pairs {
        if !ensure_immersion {
            return Err(RelationError::Data(DataError::Schema(
                "emitted forms are rank-deficient; rerun with ensure_immersion".into(),
            )));
        }
        let minus_i = HoloExpr::i(m).neg();
        for j in 0..m {
            let zj = HoloExpr::var(j, m)?;
            prims.push(zj.clone());
            prims.push(minus_i.mul(&zj));
        }
    }
    Ok(WeierstrassData::from_primitives(prims, vec![C64::ZERO; m])?)
}

/// One row of the dimension report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimRow {
    pub n: usize,
    pub dim_v: usize,
    pub dim_sym2v: usize,
    pub dim_target: usize,
    pub rank: usize,
    pub kernel: usize,
}

/// Dimension counts and exact ranks of `μ'_n` over a degree range.
pub fn dimension_report(
    m: usize,
    n_range: std::ops::RangeInclusive<usize>,
    cap: usize,
) -> Result<Vec<DimRow>, RelationError> {
    n_range
        .map(|n| {
            let mu = build_mu(m, n, cap)?;
            let dim_v = mu.basis.dim();
            let dim_sym2v = mu.ncols();
            let dim_target = mu.nrows();
            let kernel_dim = kernel(&mu).len();
            Ok(DimRow {
                n,
                dim_v,
                dim_sym2v,
                dim_target,
                rank: dim_sym2v - kernel_dim,
                kernel: kernel_dim,
            })
        })
        .collect()
}

/// CSV rendering with the fixed header `n,dimV,dimSym2V,dimTarget,rank,kernel`.
pub fn report_csv(rows: &[DimRow]) -> String {
    let mut out = String::from("n,dimV,dimSym2V,dimTarget,rank,kernel\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, r.dim_v, r.dim_sym2v, r.dim_target, r.rank, r.kernel
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Serialization: gamma entries as [re_num, re_den, im_num, im_den] strings.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RelationDto {
    m: usize,
    n: usize,
    gamma: Vec<Vec<[String; 4]>>,
}

impl QuadraticRelation {
    pub fn to_json(&self) -> String {
        let dto = RelationDto {
            m: self.m,
            n: self.n,
            gamma: self
                .gamma
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| {
                            [
                                v.re.numer().to_string(),
                                v.re.denom().to_string(),
                                v.im.numer().to_string(),
                                v.im.denom().to_string(),
                            ]
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dto).expect("relation serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, DataError> {
        let dto: RelationDto = serde_json::from_str(text)?;
        let parse = |s: &str| -> Result<BigInt, DataError> {
            s.parse().map_err(|_| DataError::Schema(format!("bad integer {s:?}")))
        };
        let gamma = dto
            .gamma
            .iter()
            .map(|row| {
                row.iter()
                    .map(|[rn, rd, im_n, im_d]| {
                        Ok(GaussianRational::new(
                            BigRational::new(parse(rn)?, parse(rd)?),
                            BigRational::new(parse(im_n)?, parse(im_d)?),
                        ))
                    })
                    .collect::<Result<Vec<_>, DataError>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QuadraticRelation { m: dto.m, n: dto.n, gamma })
    }

    /// Serialize a list of relations (e.g. a kernel basis).
    pub fn list_to_json(relations: &[QuadraticRelation]) -> String {
        let dtos: Vec<serde_json::Value> = relations
            .iter()
            .map(|r| serde_json::from_str(&r.to_json()).unwrap())
            .collect();
        serde_json::to_string_pretty(&dtos).unwrap()
    }
}
