//! The three conditions under which `f(Q) = Re ∫ (ω_1, ..., ω_n) + const`
//! is a pluriminimal immersion: closedness of the forms, vanishing of the
//! conformality tensor `Σ ω_i ⊗ ω_i`, and maximal rank of the coefficient
//! matrix `(ω_ik)`.

use nalgebra::DMatrix;
use rand::Rng;

use crate::data::WeierstrassData;
use crate::expr::ExprError;
use crate::C64;

/// Default tolerance for the closedness residual.
pub const CLOSED_TOL: f64 = 1e-10;
/// Default tolerance on the conformality residual.
pub const CONFORMALITY_TOL: f64 = 1e-12;
/// Relative singular-value cutoff deciding the numerical rank.
pub const RANK_REL_TOL: f64 = 1e-9;

/// Values of the conformality tensor `Ω(∂_j, ∂_k)` at a point,
/// symmetric `m x m`.
#[derive(Debug, Clone)]
pub struct ConformalityTensor {
    pub entries: DMatrix<C64>,
}

impl ConformalityTensor {
    /// Largest entry magnitude; zero exactly when the tensor vanishes.
    pub fn residual(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }
}

/// `Ω_jk(z) = Σ_i ω_ij(z) ω_ik(z)`.
pub fn conformality(data: &WeierstrassData, z: &[C64]) -> Result<ConformalityTensor, ExprError> {
    let m = data.arity;
    let coeffs = data.coeff_matrix(z)?;
    let mut entries = DMatrix::zeros(m, m);
    for j in 0..m {
        for k in j..m {
            let mut sum = C64::ZERO;
            for i in 0..data.n() {
                sum += coeffs[(i, j)] * coeffs[(i, k)];
            }
            entries[(j, k)] = sum;
            entries[(k, j)] = sum;
        }
    }
    Ok(ConformalityTensor { entries })
}

/// Maximum conformality residual over a set of sample points.
pub fn conformality_residual(
    data: &WeierstrassData,
    points: &[Vec<C64>],
) -> Result<f64, ExprError> {
    let mut worst = 0.0f64;
    for z in points {
        worst = worst.max(conformality(data, z)?.residual());
    }
    Ok(worst)
}

/// Outcome of the closedness check (condition a).
#[derive(Debug, Clone)]
pub struct ClosednessReport {
    pub worst_residual: f64,
    /// `(form index, j, k, point)` realizing the worst residual.
    pub worst_site: Option<(usize, usize, usize, Vec<C64>)>,
    pub tolerance: f64,
    pub pass: bool,
}

/// For each form, `max |∂ω_j/∂z_k − ∂ω_k/∂z_j|` over the samples, taken
/// from exact jets. When primitives are present this is a consistency
/// check rather than a filter.
pub fn check_closed(
    data: &WeierstrassData,
    points: &[Vec<C64>],
    tolerance: f64,
) -> Result<ClosednessReport, ExprError> {
    assert!(!points.is_empty(), "closedness check needs at least one sample point");
    let m = data.arity;
    let mut worst = 0.0f64;
    let mut site = None;
    for z in points {
        let jets = data.form_jets(z)?;
        for (i, jet) in jets.iter().enumerate() {
            for j in 0..m {
                for k in (j + 1)..m {
                    let res = (jet.hess[j][k] - jet.hess[k][j]).norm();
                    if res > worst {
                        worst = res;
                        site = Some((i, j, k, z.clone()));
                    }
                }
            }
        }
    }
    Ok(ClosednessReport { worst_residual: worst, worst_site: site, tolerance, pass: worst < tolerance })
}

/// Outcome of the maximal-rank check (condition c).
#[derive(Debug, Clone)]
pub struct RankReport {
    pub required_rank: usize,
    /// Smallest rank observed over the samples.
    pub worst_rank: usize,
    /// `(σ_min, σ_max)` at the worst point.
    pub worst_singular_values: (f64, f64),
    pub worst_point: Vec<C64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Numerical rank of `(ω_ik(z))` at each sample: singular values above
/// `rel_tol * σ_max` count. Failure is a report outcome, not an error.
pub fn check_rank(
    data: &WeierstrassData,
    points: &[Vec<C64>],
    rel_tol: f64,
) -> Result<RankReport, ExprError> {
    assert!(!points.is_empty());
    let m = data.arity;
    let mut worst_rank = usize::MAX;
    let mut worst_sv = (f64::INFINITY, f64::INFINITY);
    let mut worst_point = points[0].clone();
    for z in points {
        let mat = data.coeff_matrix(z)?;
        let svd = mat.svd(false, false);
        let sv = &svd.singular_values;
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        let rank = if smax == 0.0 {
            0
        } else {
            sv.iter().filter(|&&s| s > rel_tol * smax).count()
        };
        let key = if smax > 0.0 { smin / smax } else { 0.0 };
        let worst_key = if worst_sv.1 > 0.0 && worst_sv.1.is_finite() {
            worst_sv.0 / worst_sv.1
        } else {
            f64::INFINITY
        };
        if rank < worst_rank || (rank == worst_rank && key < worst_key) {
            worst_rank = rank;
            worst_sv = (smin, smax);
            worst_point = z.clone();
        }
    }
    Ok(RankReport {
        required_rank: m,
        worst_rank,
        worst_singular_values: worst_sv,
        worst_point,
        tolerance: rel_tol,
        pass: worst_rank >= m,
    })
}

/// Draw `count` points from the polydisk of the given radius, uniformly in
/// each real/imaginary part. Deterministic for a fixed RNG.
pub fn sample_polydisk<R: Rng>(m: usize, count: usize, radius: f64, rng: &mut R) -> Vec<Vec<C64>> {
    (0..count)
        .map(|_| {
            (0..m)
                .map(|_| {
                    C64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::OneForm;
    use crate::expr::HoloExpr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn data_from_coeffs(m: usize, rows: &[&[&str]]) -> WeierstrassData {
        let forms = rows
            .iter()
            .map(|row| {
                OneForm::new(row.iter().map(|s| HoloExpr::parse(s, m).unwrap()).collect()).unwrap()
            })
            .collect();
        WeierstrassData::new(forms, None, vec![C64::ZERO; m], vec![0.0; rows.len()]).unwrap()
    }

    fn pts(m: usize, count: usize) -> Vec<Vec<C64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        sample_polydisk(m, count, 2.0, &mut rng)
    }

    #[test]
    fn isotropic_pair_has_zero_conformality() {
        // (dz1, i dz1): 1 + i^2 = 0.
        let data = data_from_coeffs(2, &[&["1", "0"], &["1i", "0"]]);
        for z in pts(2, 5) {
            assert!(conformality(&data, &z).unwrap().residual() < 1e-15);
        }
    }

    #[test]
    fn independent_forms_give_identity_tensor() {
        let data = data_from_coeffs(2, &[&["1", "0"], &["0", "1"]]);
        let t = conformality(&data, &pts(2, 1)[0]).unwrap();
        assert!((t.entries[(0, 0)] - C64::ONE).norm() < 1e-15);
        assert!((t.entries[(1, 1)] - C64::ONE).norm() < 1e-15);
        assert!(t.entries[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn closed_form_passes() {
        // z2 dz1 + z1 dz2 = d(z1 z2).
        let data = data_from_coeffs(2, &[&["z2", "z1"]]);
        let rep = check_closed(&data, &pts(2, 10), CLOSED_TOL).unwrap();
        assert!(rep.pass, "residual {}", rep.worst_residual);
    }

    #[test]
    fn non_closed_form_fails_with_unit_residual() {
        // z2 dz1: ∂z2/∂z2 = 1 vs ∂0/∂z1 = 0.
        let data = data_from_coeffs(2, &[&["z2", "0"]]);
        let rep = check_closed(&data, &pts(2, 10), CLOSED_TOL).unwrap();
        assert!(!rep.pass);
        assert!((rep.worst_residual - 1.0).abs() < 1e-12);
        let (form, j, k, _) = rep.worst_site.unwrap();
        assert_eq!((form, j, k), (0, 0, 1));
    }

    #[test]
    fn rank_deficient_pair_fails() {
        let data = data_from_coeffs(2, &[&["1", "0"], &["1i", "0"]]);
        let rep = check_rank(&data, &pts(2, 10), RANK_REL_TOL).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.worst_rank, 1);
    }

    #[test]
    fn chart_pairs_have_full_rank() {
        let data = data_from_coeffs(
            2,
            &[&["1", "0"], &["1i", "0"], &["0", "1"], &["0", "1i"]],
        );
        let rep = check_rank(&data, &pts(2, 10), RANK_REL_TOL).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.worst_rank, 2);
    }
}
