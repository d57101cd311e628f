//! Induced geometry of a Weierstrass immersion: pulled-back metric in
//! real coordinates, second fundamental form, circularity, and mean
//! curvature of complex directions.
//!
//! Real-coordinate convention, fixed once: `z_k = x_k + i y_k`, frame
//! order `(x_1, ..., x_m, y_1, ..., y_m)`, `J(∂x_k) = ∂y_k`. With
//! `ω_ij = α_ij + i β_ij` the real jacobian of `f = Re ∫ ω` is
//! `Df = [A | -B]` where `A = (α_ij)` and `B = (β_ij)` are `n x m`, so the
//! induced metric is
//!
//! ```text
//! g = [[AᵀA, -AᵀB], [-BᵀA, BᵀB]].
//! ```
//!
//! Vanishing of the conformality tensor forces `AᵀA = BᵀB` and makes the
//! cross block `AᵀB` antisymmetric (its diagonal vanishes; for `m = 1` the
//! whole block is zero, which recovers the classical minimal-surface
//! statement). Those two identities, together with positivity and
//! J-invariance, are what make the induced metric Kähler.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::checks::conformality;
use crate::data::WeierstrassData;
use crate::expr::ExprError;
use crate::immerse::{immerse, ImmerseError};
use crate::C64;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Immerse(#[from] ImmerseError),
    #[error("tangent space is rank-deficient at the requested point")]
    RankDeficient,
}

/// The complex structure `J` in the `(x_1..x_m, y_1..y_m)` frame:
/// `J ∂x_k = ∂y_k`, `J ∂y_k = -∂x_k`.
pub fn j_matrix(m: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        j[(m + k, k)] = 1.0;
        j[(k, m + k)] = -1.0;
    }
    j
}

/// Real coefficient matrices of the forms and the metric assembled from
/// them (same arithmetic path as the block fields).
#[derive(Debug, Clone)]
pub struct MetricBlocks {
    /// `A = Re(ω_ij)`, `n x m`.
    pub a: DMatrix<f64>,
    /// `B = Im(ω_ij)`, `n x m`.
    pub b: DMatrix<f64>,
    /// `AᵀA`, `m x m`.
    pub aa: DMatrix<f64>,
    /// `AᵀB`.
    pub ab: DMatrix<f64>,
    /// `BᵀA`.
    pub ba: DMatrix<f64>,
    /// `BᵀB`.
    pub bb: DMatrix<f64>,
    /// `[[AᵀA, -AᵀB], [-BᵀA, BᵀB]]`, `2m x 2m`.
    pub metric: DMatrix<f64>,
}

impl MetricBlocks {
    /// `‖AᵀB + BᵀA‖_max`: the cross-block identity implied by conformality
    /// (the cross block must be antisymmetric).
    pub fn cross_block_residual(&self) -> f64 {
        (&self.ab + &self.ba).amax()
    }

    /// `‖AᵀA − BᵀB‖_max`: the diagonal-block identity implied by conformality.
    pub fn diag_block_residual(&self) -> f64 {
        (&self.aa - &self.bb).amax()
    }

    /// `‖JᵀgJ − g‖_max`: J-invariance of the induced metric.
    pub fn j_invariance_residual(&self) -> f64 {
        let m = self.aa.nrows();
        let j = j_matrix(m);
        (j.transpose() * &self.metric * &j - &self.metric).amax()
    }

    /// Smallest eigenvalue of the metric (positive definiteness).
    pub fn min_eigenvalue(&self) -> f64 {
        self.metric
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Real jacobian `Df = [A | -B]`, `n x 2m`.
    pub fn jacobian(&self) -> DMatrix<f64> {
        let (n, m) = (self.a.nrows(), self.a.ncols());
        let mut df = DMatrix::zeros(n, 2 * m);
        df.view_mut((0, 0), (n, m)).copy_from(&self.a);
        df.view_mut((0, m), (n, m)).copy_from(&(-&self.b));
        df
    }
}

/// Split the coefficient matrix at `z` into its real blocks and assemble
/// the induced metric.
pub fn metric_blocks(data: &WeierstrassData, z: &[C64]) -> Result<MetricBlocks, ExprError> {
    let coeffs = data.coeff_matrix(z)?;
    let a = coeffs.map(|c| c.re);
    let b = coeffs.map(|c| c.im);
    let aa = a.transpose() * &a;
    let ab = a.transpose() * &b;
    let ba = b.transpose() * &a;
    let bb = b.transpose() * &b;
    let m = a.ncols();
    let mut metric = DMatrix::zeros(2 * m, 2 * m);
    metric.view_mut((0, 0), (m, m)).copy_from(&aa);
    metric.view_mut((0, m), (m, m)).copy_from(&(-&ab));
    metric.view_mut((m, 0), (m, m)).copy_from(&(-&ba));
    metric.view_mut((m, m), (m, m)).copy_from(&bb);
    Ok(MetricBlocks { a, b, aa, ab, ba, bb, metric })
}

/// Second fundamental form at a point, expressed in the coordinate frame
/// `(∂x_1..∂x_m, ∂y_1..∂y_m)` and an orthonormal normal frame.
#[derive(Debug, Clone)]
pub struct SecondFundamentalForm {
    /// One symmetric `2m x 2m` matrix per normal direction.
    pub components: Vec<DMatrix<f64>>,
    /// Orthonormal normal frame vectors in `R^n`.
    pub normal_frame: Vec<Vec<f64>>,
    pub blocks: MetricBlocks,
}

impl SecondFundamentalForm {
    fn frame_dim(&self) -> usize {
        self.blocks.aa.nrows() * 2
    }

    /// `B(X, Y)` as a vector over the normal frame components.
    pub fn apply(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.frame_dim();
        self.components
            .iter()
            .map(|comp| {
                let mut s = 0.0;
                for a in 0..d {
                    for b in 0..d {
                        s += comp[(a, b)] * x[a] * y[b];
                    }
                }
                s
            })
            .collect()
    }

    /// `max_{a,b} ‖B(e_a, J e_b) − B(J e_a, e_b)‖` over the coordinate frame.
    pub fn circularity_residual(&self) -> f64 {
        let d = self.frame_dim();
        let m = d / 2;
        let j = j_matrix(m);
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                let mut norm2 = 0.0;
                for comp in &self.components {
                    // (B J)_{ab} - (Jᵀ B)_{ab}
                    let mut lhs = 0.0;
                    let mut rhs = 0.0;
                    for c in 0..d {
                        lhs += comp[(a, c)] * j[(c, b)];
                        rhs += j[(c, a)] * comp[(c, b)];
                    }
                    norm2 += (lhs - rhs) * (lhs - rhs);
                }
                worst = worst.max(norm2.sqrt());
            }
        }
        worst
    }

    /// `‖B(v̂, v̂) + B(Jv̂, Jv̂)‖` for a complex tangent direction `v`,
    /// normalized in the induced metric.
    pub fn mean_curvature_of_direction(&self, v: &[C64]) -> f64 {
        let m = v.len();
        let mut x = vec![0.0; 2 * m];
        let mut jx = vec![0.0; 2 * m];
        for k in 0..m {
            x[k] = v[k].re;
            x[m + k] = v[k].im;
            jx[k] = -v[k].im;
            jx[m + k] = v[k].re;
        }
        let g = &self.blocks.metric;
        let mut norm2 = 0.0;
        for a in 0..2 * m {
            for b in 0..2 * m {
                norm2 += g[(a, b)] * x[a] * x[b];
            }
        }
        let scale = 1.0 / norm2;
        let bxx = self.apply(&x, &x);
        let bjj = self.apply(&jx, &jx);
        bxx.iter()
            .zip(&bjj)
            .map(|(p, q)| (p + q) * scale)
            .map(|t| t * t)
            .sum::<f64>()
            .sqrt()
    }
}

/// Compute the second fundamental form from exact jets: the real Hessian
/// of `Re P_i` is determined by the complex Hessian `∂ω_ij/∂z_k`, and the
/// normal projection removes the orthonormalized tangent image.
pub fn second_fundamental_form(
    data: &WeierstrassData,
    z: &[C64],
) -> Result<SecondFundamentalForm, GeometryError> {
    let m = data.arity;
    let n = data.n();
    let blocks = metric_blocks(data, z)?;
    let df = blocks.jacobian();

    // Orthonormal tangent frame by modified Gram-Schmidt on the jacobian
    // columns, then completion by the standard basis.
    let mut tangent: Vec<Vec<f64>> = Vec::with_capacity(2 * m);
    for c in 0..2 * m {
        let mut v: Vec<f64> = (0..n).map(|r| df[(r, c)]).collect();
        for t in &tangent {
            let dot: f64 = v.iter().zip(t).map(|(a, b)| a * b).sum();
            for (vi, ti) in v.iter_mut().zip(t) {
                *vi -= dot * ti;
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(GeometryError::RankDeficient);
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        tangent.push(v);
    }
    let mut normal_frame: Vec<Vec<f64>> = Vec::with_capacity(n - 2 * m);
    for e in 0..n {
        if normal_frame.len() == n - 2 * m {
            break;
        }
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        for t in tangent.iter().chain(&normal_frame) {
            let dot: f64 = v.iter().zip(t).map(|(a, b)| a * b).sum();
            for (vi, ti) in v.iter_mut().zip(t) {
                *vi -= dot * ti;
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            normal_frame.push(v);
        }
    }

    // Ambient real Hessians from the complex jets: for the primitive P of
    // each form, ∂²ReP/∂x_j∂x_k = Re H_jk, ∂²/∂x_j∂y_k = -Im H_jk,
    // ∂²/∂y_j∂y_k = -Re H_jk, with H the (symmetrized) complex Hessian.
    let jets = data.form_jets(z)?;
    let mut components: Vec<DMatrix<f64>> =
        vec![DMatrix::zeros(2 * m, 2 * m); normal_frame.len()];
    let mut hvec = vec![0.0; n];
    for aj in 0..2 * m {
        for bk in aj..2 * m {
            for (i, jet) in jets.iter().enumerate() {
                let (j, x_j) = if aj < m { (aj, true) } else { (aj - m, false) };
                let (k, x_k) = if bk < m { (bk, true) } else { (bk - m, false) };
                let h = jet.hess_sym(j, k);
                hvec[i] = match (x_j, x_k) {
                    (true, true) => h.re,
                    (true, false) | (false, true) => -h.im,
                    (false, false) => -h.re,
                };
            }
            for (q, nvec) in normal_frame.iter().enumerate() {
                let val: f64 = nvec.iter().zip(&hvec).map(|(a, b)| a * b).sum();
                components[q][(aj, bk)] = val;
                components[q][(bk, aj)] = val;
            }
        }
    }

    Ok(SecondFundamentalForm { components, normal_frame, blocks })
}

/// Per-point diagnostics bundle.
#[derive(Debug, Clone)]
pub struct GeometryReport {
    pub point: Vec<C64>,
    pub conformality_residual: f64,
    pub jacobian_rank: usize,
    pub smallest_singular_value: f64,
    pub blocks: MetricBlocks,
    pub circularity_residual: f64,
    pub mean_curvature_norms: Vec<f64>,
}

/// Full diagnostics at one point, with mean curvature along the supplied
/// complex directions.
pub fn geometry_report(
    data: &WeierstrassData,
    z: &[C64],
    directions: &[Vec<C64>],
) -> Result<GeometryReport, GeometryError> {
    let conf = conformality(data, z)?.residual();
    let coeffs = data.coeff_matrix(z)?;
    let svd = coeffs.svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > crate::checks::RANK_REL_TOL * smax)
        .count();
    let sff = second_fundamental_form(data, z)?;
    let mean_curvature_norms = directions
        .iter()
        .map(|v| sff.mean_curvature_of_direction(v))
        .collect();
    let circularity_residual = sff.circularity_residual();
    Ok(GeometryReport {
        point: z.to_vec(),
        conformality_residual: conf,
        jacobian_rank: rank,
        smallest_singular_value: smin,
        blocks: sff.blocks.clone(),
        circularity_residual,
        mean_curvature_norms,
    })
}

/// Finite-difference mean curvature of the restricted surface
/// `t ↦ f(z + t v)` at `t = 0`, step `h`. Independent of the jet path;
/// used both by the verification command and as a test oracle.
pub fn line_restriction_mean_curvature(
    data: &WeierstrassData,
    z: &[C64],
    v: &[C64],
    h: f64,
) -> Result<f64, ImmerseError> {
    let m = data.arity;
    let at = |u: f64, w: f64| -> Result<Vec<f64>, ImmerseError> {
        let t = C64::new(u, w);
        let q: Vec<C64> = (0..m).map(|j| z[j] + t * v[j]).collect();
        immerse(data, &q)
    };
    let n = data.n();
    let center = at(0.0, 0.0)?;
    let pu = at(h, 0.0)?;
    let mu = at(-h, 0.0)?;
    let pw = at(0.0, h)?;
    let mw = at(0.0, -h)?;
    let pp = at(h, h)?;
    let pm = at(h, -h)?;
    let mp = at(-h, h)?;
    let mm = at(-h, -h)?;

    let mut su = vec![0.0; n];
    let mut sw = vec![0.0; n];
    let mut suu = vec![0.0; n];
    let mut sww = vec![0.0; n];
    let mut suw = vec![0.0; n];
    for i in 0..n {
        su[i] = (pu[i] - mu[i]) / (2.0 * h);
        sw[i] = (pw[i] - mw[i]) / (2.0 * h);
        suu[i] = (pu[i] - 2.0 * center[i] + mu[i]) / (h * h);
        sww[i] = (pw[i] - 2.0 * center[i] + mw[i]) / (h * h);
        suw[i] = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let e = dot(&su, &su);
    let f = dot(&su, &sw);
    let g = dot(&sw, &sw);
    let denom = 2.0 * (e * g - f * f);
    let mut hv: Vec<f64> = (0..n)
        .map(|i| (g * suu[i] - 2.0 * f * suw[i] + e * sww[i]) / denom)
        .collect();
    // Remove the tangential part.
    let mut t1 = su.clone();
    let n1 = dot(&t1, &t1).sqrt();
    t1.iter_mut().for_each(|x| *x /= n1);
    let mut t2 = sw.clone();
    let d12 = dot(&t2, &t1);
    for i in 0..n {
        t2[i] -= d12 * t1[i];
    }
    let n2 = dot(&t2, &t2).sqrt();
    t2.iter_mut().for_each(|x| *x /= n2);
    let c1 = dot(&hv, &t1);
    let c2 = dot(&hv, &t2);
    for i in 0..n {
        hv[i] -= c1 * t1[i] + c2 * t2[i];
    }
    Ok(dot(&hv, &hv).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::sample_polydisk;
    use crate::expr::HoloExpr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn graph_data() -> WeierstrassData {
        let m = 2;
        let mk = |s: &str| HoloExpr::parse(s, m).unwrap();
        let i = HoloExpr::i(m);
        let prims = vec![
            mk("z1*z2"),
            i.neg().mul(&mk("z1*z2")),
            mk("z1"),
            i.neg().mul(&mk("z1")),
            mk("z2"),
            i.neg().mul(&mk("z2")),
        ];
        WeierstrassData::from_primitives(prims, vec![C64::ZERO; m]).unwrap()
    }

    fn chart_data() -> WeierstrassData {
        let m = 2;
        let mk = |s: &str| HoloExpr::parse(s, m).unwrap();
        let i = HoloExpr::i(m);
        let prims = vec![
            mk("z1"),
            i.neg().mul(&mk("z1")),
            mk("z2"),
            i.neg().mul(&mk("z2")),
        ];
        WeierstrassData::from_primitives(prims, vec![C64::ZERO; m]).unwrap()
    }

    #[test]
    fn conformal_data_satisfies_block_identities() {
        let data = graph_data();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for z in sample_polydisk(2, 20, 2.0, &mut rng) {
            let blocks = metric_blocks(&data, &z).unwrap();
            assert!(blocks.cross_block_residual() < 1e-10);
            assert!(blocks.diag_block_residual() < 1e-10);
            assert!(blocks.j_invariance_residual() < 1e-10);
        }
    }

    #[test]
    fn chart_metric_is_identity() {
        let data = chart_data();
        let z = [C64::new(0.3, 0.4), C64::new(-1.0, 0.2)];
        let blocks = metric_blocks(&data, &z).unwrap();
        assert!(blocks.ab.amax() < 1e-15);
        assert!(blocks.ba.amax() < 1e-15);
        assert!((blocks.metric.clone() - DMatrix::<f64>::identity(4, 4)).amax() < 1e-15);
        assert!(blocks.min_eigenvalue() > 0.5);
    }

    #[test]
    fn non_conformal_data_breaks_diag_identity() {
        // (dz1, dz2): AᵀA = I, BᵀB = 0.
        let m = 2;
        let prims = vec![
            HoloExpr::parse("z1", m).unwrap(),
            HoloExpr::parse("z2", m).unwrap(),
        ];
        let data = WeierstrassData::from_primitives(prims, vec![C64::ZERO; m]).unwrap();
        let z = [C64::new(0.3, 0.4), C64::new(-1.0, 0.2)];
        let blocks = metric_blocks(&data, &z).unwrap();
        assert!(blocks.diag_block_residual() > 0.5);
    }

    #[test]
    fn affine_data_has_zero_sff() {
        let data = chart_data();
        let z = [C64::new(0.5, -0.3), C64::new(0.1, 0.9)];
        let sff = second_fundamental_form(&data, &z).unwrap();
        for comp in &sff.components {
            assert!(comp.amax() < 1e-14);
        }
        assert!(sff.circularity_residual() < 1e-14);
    }

    #[test]
    fn holomorphic_graph_is_circular_and_pluriminimal() {
        let data = graph_data();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dirs: Vec<Vec<C64>> = (0..5)
            .map(|_| sample_polydisk(2, 1, 1.0, &mut rng).pop().unwrap())
            .collect();
        for z in sample_polydisk(2, 10, 1.5, &mut rng) {
            let sff = second_fundamental_form(&data, &z).unwrap();
            assert!(sff.circularity_residual() < 1e-9);
            for v in &dirs {
                assert!(sff.mean_curvature_of_direction(v) < 1e-9);
            }
        }
    }

    #[test]
    fn jet_sff_matches_finite_difference_mean_curvature() {
        let data = graph_data();
        let z = [C64::new(0.4, 0.1), C64::new(-0.2, 0.6)];
        let v = [C64::new(1.0, 0.5), C64::new(-0.3, 0.8)];
        // Both routes should report (near-)zero mean curvature here; the
        // finite-difference route is fully independent of the jets.
        let fd = line_restriction_mean_curvature(&data, &z, &v, 1e-4).unwrap();
        assert!(fd < 1e-6, "finite-difference mean curvature {fd}");
        let sff = second_fundamental_form(&data, &z).unwrap();
        assert!(sff.mean_curvature_of_direction(&v) < 1e-9);
    }

    #[test]
    fn rank_deficient_tangent_is_an_error() {
        let m = 2;
        let i = HoloExpr::i(m);
        let p = HoloExpr::parse("z1", m).unwrap();
        let prims = vec![p.clone(), i.neg().mul(&p)];
        let data = WeierstrassData::from_primitives(prims, vec![C64::ZERO; m]).unwrap();
        let z = [C64::new(0.3, 0.4), C64::new(-1.0, 0.2)];
        assert!(matches!(
            second_fundamental_form(&data, &z),
            Err(GeometryError::RankDeficient)
        ));
    }
}
