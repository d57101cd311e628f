//! The explicit pluriminimal `C^2 -> R^6` families.
//!
//! Starting from the quadratic relation
//! `dP_1 ⊙ dP_2 = dP_3 ⊙ dP_4 + dP_5 ⊙ dP_6` with the ansatz
//! `P_1 = z_1 z_2`, `P_3 = z_1`, `P_5 = z_2`, the remaining functions are
//! determined by two arbitrary entire functions `f`, `g` of one variable:
//!
//! ```text
//! P_2 = -(g'(z_1) + f'(z_2)) / 2
//! P_4 = f(z_2) - z_2 (g'(z_1) + f'(z_2)) / 2
//! P_6 = g(z_1) - z_1 (g'(z_1) + f'(z_2)) / 2
//! ```
//!
//! Each pair `(Q_1, Q_2)` of primitives contributes the components
//! `(Re(Q_1+Q_2), Im(Q_1−Q_2))`, i.e. the forms `d(Q_1+Q_2)` and
//! `−i·d(Q_1−Q_2)`, which add `4 dQ_1 ⊙ dQ_2` to the conformality tensor.
//! Pairing `(P_1, −P_2), (P_3, P_4), (P_5, P_6)` therefore makes the total
//! `4(−dP_1⊙dP_2 + dP_3⊙dP_4 + dP_5⊙dP_6) = 0`. The sign flip on `P_2` is
//! essential; the unflipped pairing leaves a residual of `8 dP_1 ⊙ dP_2`.

use thiserror::Error;

use crate::data::{DataError, WeierstrassData};
use crate::expr::{ExprError, HoloExpr};
use crate::C64;

/// Tolerance on the pointwise residual of the quadratic relation.
pub const RELATION_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("input functions must have arity 1 (got {0})")]
    BadArity(usize),
    #[error("quadratic relation residual {residual} exceeds tolerance {tol}")]
    RelationViolated { residual: f64, tol: f64 },
}

/// The two free entire functions of one variable that parametrize the family.
#[derive(Debug, Clone)]
pub struct FamilyInput {
    pub f: HoloExpr,
    pub g: HoloExpr,
}

impl FamilyInput {
    pub fn new(f: HoloExpr, g: HoloExpr) -> Result<Self, FamilyError> {
        if f.arity() != 1 {
            return Err(FamilyError::BadArity(f.arity()));
        }
        if g.arity() != 1 {
            return Err(FamilyError::BadArity(g.arity()));
        }
        Ok(FamilyInput { f, g })
    }

    pub fn parse(f: &str, g: &str) -> Result<Self, FamilyError> {
        Ok(FamilyInput { f: HoloExpr::parse(f, 1)?, g: HoloExpr::parse(g, 1)? })
    }
}

/// The six holomorphic functions of the quadratic relation, arity 2.
#[derive(Debug, Clone)]
pub struct SixFunctions {
    /// `[P_1, ..., P_6]`.
    pub p: [HoloExpr; 6],
}

impl SixFunctions {
    /// Pointwise residual of `dP_1⊙dP_2 − dP_3⊙dP_4 − dP_5⊙dP_6` (max
    /// symmetric-tensor entry magnitude over the samples).
    pub fn relation_residual(&self, points: &[Vec<C64>]) -> Result<f64, ExprError> {
        let m = 2;
        let grads: Vec<[HoloExpr; 2]> = self
            .p
            .iter()
            .map(|p| {
                Ok::<_, ExprError>([p.differentiate(0)?, p.differentiate(1)?])
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut worst = 0.0f64;
        for z in points {
            let vals: Vec<[C64; 2]> = grads
                .iter()
                .map(|g| Ok::<_, ExprError>([g[0].eval(z)?, g[1].eval(z)?]))
                .collect::<Result<Vec<_>, _>>()?;
            for j in 0..m {
                for k in j..m {
                    let pair = |a: usize, b: usize| {
                        (vals[a][j] * vals[b][k] + vals[a][k] * vals[b][j]) * 0.5
                    };
                    let res = pair(0, 1) - pair(2, 3) - pair(4, 5);
                    worst = worst.max(res.norm());
                }
            }
        }
        Ok(worst)
    }

    /// Residuals of the three defining equations
    /// `z_2 (P_2)_1 = (P_4)_1`, `z_1 (P_2)_2 = (P_6)_2`,
    /// `z_2 (P_2)_2 + z_1 (P_2)_1 = (P_4)_2 + (P_6)_1`.
    pub fn system_residual(&self, points: &[Vec<C64>]) -> Result<f64, ExprError> {
        let d = |i: usize, j: usize| self.p[i].differentiate(j);
        let p2_1 = d(1, 0)?;
        let p2_2 = d(1, 1)?;
        let p4_1 = d(3, 0)?;
        let p4_2 = d(3, 1)?;
        let p6_1 = d(5, 0)?;
        let p6_2 = d(5, 1)?;
        let mut worst = 0.0f64;
        for z in points {
            let (z1, z2) = (z[0], z[1]);
            let r1 = z2 * p2_1.eval(z)? - p4_1.eval(z)?;
            let r2 = z1 * p2_2.eval(z)? - p6_2.eval(z)?;
            let r3 = z2 * p2_2.eval(z)? + z1 * p2_1.eval(z)?
                - p4_2.eval(z)?
                - p6_1.eval(z)?;
            worst = worst.max(r1.norm()).max(r2.norm()).max(r3.norm());
        }
        Ok(worst)
    }
}

/// Instantiate the solution formulas for the given `(f, g)`.
pub fn solve_family(input: &FamilyInput) -> Result<SixFunctions, FamilyError> {
    let m = 2;
    let z1 = HoloExpr::var(0, m)?;
    let z2 = HoloExpr::var(1, m)?;
    // g'(z1), f'(z2) viewed on C^2.
    let g1 = input.g.differentiate(0)?.remap_vars(&[0], m)?;
    let f2 = input.f.differentiate(0)?.remap_vars(&[1], m)?;
    let f_of_z2 = input.f.remap_vars(&[1], m)?;
    let g_of_z1 = input.g.remap_vars(&[0], m)?;
    // h = (g'(z1) + f'(z2)) / 2
    let h = g1.add(&f2).scale_rational(1, 2);

    let p1 = z1.mul(&z2);
    let p2 = h.neg();
    let p3 = z1.clone();
    let p4 = f_of_z2.sub(&z2.mul(&h));
    let p5 = z2.clone();
    let p6 = g_of_z1.sub(&z1.mul(&h));
    Ok(SixFunctions { p: [p1, p2, p3, p4, p5, p6] })
}

/// Split the six functions into isotropic pairs and assemble Weierstrass
/// data realizing the immersion. Rejects inputs whose quadratic relation
/// does not hold.
pub fn split_pairs(six: &SixFunctions, check_points: &[Vec<C64>]) -> Result<WeierstrassData, FamilyError> {
    let residual = six.relation_residual(check_points)?;
    if residual > RELATION_TOL {
        return Err(FamilyError::RelationViolated { residual, tol: RELATION_TOL });
    }
    build_data(six, true)
}

/// The deliberately unflipped pairing; its conformality residual is
/// `|8 dP_1 ⊙ dP_2|`. Kept public as the guard for the sign convention.
pub fn split_pairs_sign_flipped(six: &SixFunctions) -> Result<WeierstrassData, FamilyError> {
    build_data(six, false)
}

fn build_data(six: &SixFunctions, negate_p2: bool) -> Result<WeierstrassData, FamilyError> {
    let m = 2;
    let p2 = if negate_p2 { six.p[1].neg() } else { six.p[1].clone() };
    let pairs = [
        (six.p[0].clone(), p2),
        (six.p[2].clone(), six.p[3].clone()),
        (six.p[4].clone(), six.p[5].clone()),
    ];
    let minus_i = HoloExpr::i(m).neg();
    let mut primitives = Vec::with_capacity(6);
    for (q1, q2) in pairs {
        // Components Re(Q1+Q2) and Im(Q1−Q2) = Re(−i(Q1−Q2)).
        primitives.push(q1.add(&q2));
        primitives.push(minus_i.mul(&q1.sub(&q2)));
    }
    Ok(WeierstrassData::from_primitives(primitives, vec![C64::ZERO; m])?)
}

/// Convenience: full pipeline from `(f, g)` to verified-shape data.
pub fn family_data(input: &FamilyInput, check_points: &[Vec<C64>]) -> Result<WeierstrassData, FamilyError> {
    split_pairs(&solve_family(input)?, check_points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::{
        check_closed, check_rank, conformality_residual, sample_polydisk, CLOSED_TOL, RANK_REL_TOL,
    };
    use crate::immerse::immerse;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pts(count: usize) -> Vec<Vec<C64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        sample_polydisk(2, count, 2.0, &mut rng)
    }

    #[test]
    fn furuhata_solutions_are_exact() {
        // f = t^3, g = 0.
        use num_bigint::BigInt;
        use num_rational::BigRational;
        let rat = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let zero = BigRational::from_integer(BigInt::from(0));

        // f = t^3, g = 0.
        let input = FamilyInput::parse("z1^3", "0").unwrap();
        let six = solve_family(&input).unwrap();
        assert_eq!(six.p[1].to_string(), "-1.5*z2^2");
        // Coefficient-exact after expansion: P_2 = -3 z2^2 / 2,
        // P_4 = -z2^3 / 2, P_6 = -3 z1 z2^2 / 2.
        let p2 = six.p[1].to_polynomial().unwrap();
        assert_eq!(p2.len(), 1);
        assert_eq!(p2[&vec![0, 2]], (rat(-3, 2), zero.clone()));
        let p4 = six.p[3].to_polynomial().unwrap();
        assert_eq!(p4.len(), 1);
        assert_eq!(p4[&vec![0, 3]], (rat(-1, 2), zero.clone()));
        let p6 = six.p[5].to_polynomial().unwrap();
        assert_eq!(p6.len(), 1);
        assert_eq!(p6[&vec![1, 2]], (rat(-3, 2), zero.clone()));
        assert!(six.system_residual(&pts(100)).unwrap() < 1e-12);
        assert!(six.relation_residual(&pts(100)).unwrap() < 1e-12);
    }

    #[test]
    fn zero_functions_give_holomorphic_graph() {
        let input = FamilyInput::parse("0", "0").unwrap();
        let six = solve_family(&input).unwrap();
        for idx in [1, 3, 5] {
            assert_eq!(six.p[idx].to_string(), "0");
        }
        let data = split_pairs(&six, &pts(10)).unwrap();
        let f = immerse(&data, &[C64::new(1.0, 1.0), C64::new(2.0, 0.0)]).unwrap();
        let expect = [2.0, 2.0, 1.0, 1.0, 2.0, 0.0];
        for (a, b) in f.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_inputs_solve_the_system() {
        let input = FamilyInput::parse("z1^2", "z1^2").unwrap();
        let six = solve_family(&input).unwrap();
        // P_2 = -(2 z1 + 2 z2)/2 = -(z1 + z2).
        let z = [C64::new(0.7, -0.2), C64::new(1.3, 0.5)];
        let v = six.p[1].eval(&z).unwrap();
        assert!((v + z[0] + z[1]).norm() < 1e-14);
        assert!(six.system_residual(&pts(100)).unwrap() < 1e-12);
    }

    #[test]
    fn family_passes_theorem_conditions() {
        let input = FamilyInput::parse("z1^3", "0").unwrap();
        let data = family_data(&input, &pts(20)).unwrap();
        let sample = pts(100);
        assert!(conformality_residual(&data, &sample).unwrap() < 1e-12);
        assert!(check_closed(&data, &sample, CLOSED_TOL).unwrap().pass);
        assert!(check_rank(&data, &sample, RANK_REL_TOL).unwrap().pass);
    }

    #[test]
    fn sign_flipped_pairing_is_rejected_by_conformality() {
        let input = FamilyInput::parse("z1^3", "0").unwrap();
        let six = solve_family(&input).unwrap();
        let flipped = split_pairs_sign_flipped(&six).unwrap();
        let res = conformality_residual(&flipped, &pts(20)).unwrap();
        assert!(res > 0.1, "flipped pairing should leave a large residual, got {res}");
    }

    #[test]
    fn transcendental_inputs_verify_clean() {
        let input = FamilyInput::parse("exp(z1)", "sin(z1)").unwrap();
        let data = family_data(&input, &pts(20)).unwrap();
        let sample = pts(50);
        assert!(conformality_residual(&data, &sample).unwrap() < 1e-11);
        assert!(check_closed(&data, &sample, CLOSED_TOL).unwrap().pass);
        assert!(check_rank(&data, &sample, RANK_REL_TOL).unwrap().pass);
    }

    #[test]
    fn furuhata_is_not_cauchy_riemann_for_standard_pairing() {
        // Pair the six components as (1,2), (3,4), (5,6) into C^3 and
        // check the Cauchy-Riemann equations; the map is pluriminimal but
        // not holomorphic for this pairing.
        let input = FamilyInput::parse("z1^3", "0").unwrap();
        let data = family_data(&input, &pts(20)).unwrap();
        let z = [C64::new(0.8, 0.3), C64::new(-0.4, 1.1)];
        let blocks = crate::geometry::metric_blocks(&data, &z).unwrap();
        let df = blocks.jacobian();
        // CR for pair (2r, 2r+1) w.r.t. variable k: ∂u/∂x = ∂v/∂y, ∂u/∂y = -∂v/∂x.
        let mut worst = 0.0f64;
        for r in 0..3 {
            for k in 0..2 {
                let du_dx = df[(2 * r, k)];
                let du_dy = df[(2 * r, 2 + k)];
                let dv_dx = df[(2 * r + 1, k)];
                let dv_dy = df[(2 * r + 1, 2 + k)];
                worst = worst.max((du_dx - dv_dy).abs()).max((du_dy + dv_dx).abs());
            }
        }
        assert!(worst > 0.1, "CR residual unexpectedly small: {worst}");
    }
}
