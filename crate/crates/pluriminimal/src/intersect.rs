//! Multistart search for self-intersections of a Weierstrass immersion:
//! distinct domain points `p ≠ q` with `f(p) = f(q)`.
//!
//! The search minimizes `‖f(p) − f(q)‖²` over pairs subject to a minimum
//! separation `‖p − q‖ ≥ δ`, handled as a quadratic penalty with doubling
//! weight. Each start runs gradient descent (gradients are exact, taken
//! from the form coefficients) followed by a Gauss-Newton polish on the
//! residual `f(p) − f(q)`. A candidate only counts when an independent
//! re-evaluation through the quadrature path confirms the image distance.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::data::WeierstrassData;
use crate::expr::ExprError;
use crate::geometry::metric_blocks;
use crate::immerse::{immerse_via_primitives, immerse_via_quadrature, ImmerseError};
use crate::C64;

#[derive(Debug, Error)]
pub enum IntersectError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Immerse(#[from] ImmerseError),
    #[error("self-intersection search requires primitives")]
    MissingPrimitives,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Number of random starts.
    pub starts: usize,
    /// Gradient-descent iteration cap per start.
    pub max_iters: usize,
    /// RNG seed; fixed seed gives a fully deterministic search.
    pub seed: u64,
    /// Starts are drawn from the polydisk of this radius.
    pub radius: f64,
    /// Required separation `‖p − q‖` of a reported pair.
    pub min_separation: f64,
    /// Image distance below which a pair counts as an intersection.
    pub distance_target: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            starts: 64,
            max_iters: 400,
            seed: 0,
            radius: 3.0,
            min_separation: 0.1,
            distance_target: 1e-8,
        }
    }
}

/// A certified intersection pair.
#[derive(Debug, Clone)]
pub struct SelfIntersection {
    pub p: Vec<C64>,
    pub q: Vec<C64>,
    /// Image distance `‖f(p) − f(q)‖`, confirmed by quadrature.
    pub distance: f64,
    /// Domain separation `‖p − q‖`.
    pub separation: f64,
}

struct Objective<'a> {
    data: &'a WeierstrassData,
    m: usize,
    delta: f64,
}

impl<'a> Objective<'a> {
    fn unpack(&self, u: &DVector<f64>) -> (Vec<C64>, Vec<C64>) {
        let m = self.m;
        let p = (0..m).map(|k| C64::new(u[k], u[m + k])).collect();
        let q = (0..m).map(|k| C64::new(u[2 * m + k], u[3 * m + k])).collect();
        (p, q)
    }

    fn image_diff(&self, u: &DVector<f64>) -> Result<DVector<f64>, IntersectError> {
        let (p, q) = self.unpack(u);
        let fp = immerse_via_primitives(self.data, &p)?;
        let fq = immerse_via_primitives(self.data, &q)?;
        Ok(DVector::from_iterator(fp.len(), fp.iter().zip(&fq).map(|(a, b)| a - b)))
    }

    fn separation(&self, u: &DVector<f64>) -> f64 {
        let m = self.m;
        (0..2 * m).map(|k| (u[k] - u[2 * m + k]).powi(2)).sum::<f64>().sqrt()
    }

    fn value(&self, u: &DVector<f64>, weight: f64) -> Result<f64, IntersectError> {
        let d = self.image_diff(u)?;
        let gap = (self.delta - self.separation(u)).max(0.0);
        Ok(d.norm_squared() + weight * gap * gap)
    }

    /// Jacobian of `f(p) − f(q)` w.r.t. the packed real coordinates,
    /// `n x 4m`, from the exact real jacobians `[A | -B]`.
    fn jacobian(&self, u: &DVector<f64>) -> Result<DMatrix<f64>, IntersectError> {
        let (p, q) = self.unpack(u);
        let jp = metric_blocks(self.data, &p)?.jacobian();
        let jq = metric_blocks(self.data, &q)?.jacobian();
        let n = jp.nrows();
        let m = self.m;
        let mut jac = DMatrix::zeros(n, 4 * m);
        jac.view_mut((0, 0), (n, 2 * m)).copy_from(&jp);
        jac.view_mut((0, 2 * m), (n, 2 * m)).copy_from(&(-jq));
        Ok(jac)
    }

    fn gradient(&self, u: &DVector<f64>, weight: f64) -> Result<DVector<f64>, IntersectError> {
        let d = self.image_diff(u)?;
        let jac = self.jacobian(u)?;
        let mut grad = 2.0 * jac.transpose() * d;
        let r = self.separation(u);
        if r < self.delta && r > 1e-12 {
            let m = self.m;
            let c = -2.0 * weight * (self.delta - r) / r;
            for k in 0..2 * m {
                let diff = u[k] - u[2 * m + k];
                grad[k] += c * diff;
                grad[2 * m + k] -= c * diff;
            }
        }
        Ok(grad)
    }
}

/// Search for a self-intersection. Returns the best certified pair, or
/// `None` when the budget is exhausted without one (not an error).
pub fn self_intersect(
    data: &WeierstrassData,
    config: &SearchConfig,
) -> Result<Option<SelfIntersection>, IntersectError> {
    if data.primitives.is_none() {
        return Err(IntersectError::MissingPrimitives);
    }
    let m = data.arity;
    let obj = Objective { data, m, delta: config.min_separation };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<SelfIntersection> = None;

    for _ in 0..config.starts {
        let mut u = DVector::from_iterator(
            4 * m,
            (0..4 * m).map(|_| rng.gen_range(-config.radius..config.radius)),
        );
        let mut weight = 1.0;
        for _outer in 0..20 {
            descend(&obj, &mut u, weight, config.max_iters)?;
            gauss_newton_polish(&obj, &mut u, 30)?;
            if obj.separation(&u) >= config.delta_slack() {
                break;
            }
            weight *= 2.0;
        }
        let separation = obj.separation(&u);
        if separation < config.min_separation {
            continue;
        }
        let d = obj.image_diff(&u)?.norm();
        if d >= config.distance_target {
            continue;
        }
        // Independent certification through the quadrature path.
        let (p, q) = obj.unpack(&u);
        let fp = immerse_via_quadrature(data, &p, 1e-13)?;
        let fq = immerse_via_quadrature(data, &q, 1e-13)?;
        let certified: f64 = fp
            .iter()
            .zip(&fq)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if certified >= config.distance_target {
            continue;
        }
        let candidate = SelfIntersection { p, q, distance: certified, separation };
        match &best {
            Some(b) if b.distance <= candidate.distance => {}
            _ => best = Some(candidate),
        }
    }
    Ok(best)
}

impl SearchConfig {
    // Small slack so the penalty loop stops once the constraint is met
    // with margin rather than exactly on the boundary.
    fn delta_slack(&self) -> f64 {
        self.min_separation * (1.0 - 1e-9)
    }
}

fn descend(
    obj: &Objective<'_>,
    u: &mut DVector<f64>,
    weight: f64,
    max_iters: usize,
) -> Result<(), IntersectError> {
    let mut step = 1.0;
    let mut value = obj.value(u, weight)?;
    for _ in 0..max_iters {
        let grad = obj.gradient(u, weight)?;
        let gnorm2 = grad.norm_squared();
        if gnorm2 < 1e-24 || value < 1e-22 {
            break;
        }
        // Backtracking line search with Armijo condition.
        let mut accepted = false;
        for _ in 0..40 {
            let trial = &*u - step * &grad;
            let tv = obj.value(&trial, weight)?;
            if tv <= value - 1e-4 * step * gnorm2 {
                *u = trial;
                value = tv;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(())
}

/// Gauss-Newton on the residual `f(p) − f(q)` only; the separation
/// constraint is re-checked by the caller.
fn gauss_newton_polish(
    obj: &Objective<'_>,
    u: &mut DVector<f64>,
    max_iters: usize,
) -> Result<(), IntersectError> {
    for _ in 0..max_iters {
        let d = obj.image_diff(u)?;
        if d.norm() < 1e-14 {
            break;
        }
        let jac = obj.jacobian(u)?;
        let svd = jac.svd(true, true);
        let Ok(delta) = svd.solve(&d, 1e-10) else { break };
        let trial = &*u - &delta;
        if obj.image_diff(&trial)?.norm() >= d.norm() {
            break;
        }
        *u = trial;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{family_data, FamilyInput};
    use crate::checks::sample_polydisk;
    use rand::SeedableRng;

    fn pts(count: usize) -> Vec<Vec<C64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        sample_polydisk(2, count, 2.0, &mut rng)
    }

    fn furuhata() -> WeierstrassData {
        family_data(&FamilyInput::parse("z1^3", "0").unwrap(), &pts(10)).unwrap()
    }

    fn trivial() -> WeierstrassData {
        family_data(&FamilyInput::parse("0", "0").unwrap(), &pts(10)).unwrap()
    }

    #[test]
    fn furuhata_has_a_certified_intersection() {
        let data = furuhata();
        let found = self_intersect(&data, &SearchConfig::default()).unwrap();
        let hit = found.expect("Furuhata data should self-intersect");
        assert!(hit.separation >= 0.1);
        assert!(hit.distance < 1e-8, "distance {}", hit.distance);
    }

    #[test]
    fn injective_graph_finds_nothing() {
        let data = trivial();
        let config = SearchConfig { starts: 16, ..Default::default() };
        assert!(self_intersect(&data, &config).unwrap().is_none());
    }

    #[test]
    fn distance_is_translation_invariant() {
        let data = furuhata();
        let mut shifted = data.clone();
        shifted.constant = vec![3.0; 6];
        let config = SearchConfig { starts: 8, seed: 42, ..Default::default() };
        let a = self_intersect(&data, &config).unwrap();
        let b = self_intersect(&shifted, &config).unwrap();
        match (a, b) {
            (Some(a), Some(b)) => {
                assert!((a.distance - b.distance).abs() < 1e-9);
                for (x, y) in a.p.iter().zip(&b.p) {
                    assert!((x - y).norm() < 1e-6);
                }
            }
            (None, None) => panic!("expected the 8-start budget to find a pair"),
            _ => panic!("translation changed the outcome"),
        }
    }
}
