//! Evaluation of the Weierstrass immersion
//! `f(Q) = Re ∫_P^Q (ω_1, ..., ω_n) + const`.
//!
//! With primitives the integral collapses to endpoint differences. Without
//! them each form is integrated along the straight segment from the
//! basepoint with adaptive Gauss-Legendre quadrature; since all data is
//! entire on C^m and the forms are closed, the segment choice is immaterial
//! (the dogleg route exists to verify exactly that).

use thiserror::Error;

use crate::data::WeierstrassData;
use crate::expr::ExprError;
use crate::C64;

/// Absolute quadrature tolerance.
pub const QUADRATURE_TOL: f64 = 1e-12;

const MAX_DEPTH: u32 = 30;

#[derive(Debug, Error)]
pub enum ImmerseError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("quadrature did not converge to {tol} (best error estimate {achieved})")]
    NonConvergence { tol: f64, achieved: f64 },
}

// 7/15-point Gauss-Legendre nodes and weights on [-1, 1].
const GL7_X: [f64; 7] = [
    -0.9491079123427585,
    -0.7415311855993945,
    -0.4058451513773972,
    0.0,
    0.4058451513773972,
    0.7415311855993945,
    0.9491079123427585,
];
const GL7_W: [f64; 7] = [
    0.1294849661688697,
    0.2797053914892766,
    0.3818300505051189,
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892766,
    0.1294849661688697,
];
const GL15_X: [f64; 15] = [
    -0.9879925180204854,
    -0.9372733924007060,
    -0.8482065834104272,
    -0.7244177313601701,
    -0.5709721726085388,
    -0.3941513470775634,
    -0.2011940939974345,
    0.0,
    0.2011940939974345,
    0.3941513470775634,
    0.5709721726085388,
    0.7244177313601701,
    0.8482065834104272,
    0.9372733924007060,
    0.9879925180204854,
];
const GL15_W: [f64; 15] = [
    0.0307532419961173,
    0.0703660474881081,
    0.1071592204671719,
    0.1395706779261543,
    0.1662692058169939,
    0.1861610000155622,
    0.1984314853271116,
    0.2025782419255613,
    0.1984314853271116,
    0.1861610000155622,
    0.1662692058169939,
    0.1395706779261543,
    0.1071592204671719,
    0.0703660474881081,
    0.0307532419961173,
];

/// Evaluate the immersion at `q`. Prefers the primitive path.
pub fn immerse(data: &WeierstrassData, q: &[C64]) -> Result<Vec<f64>, ImmerseError> {
    if data.primitives.is_some() {
        Ok(immerse_via_primitives(data, q)?)
    } else {
        immerse_via_quadrature(data, q, QUADRATURE_TOL)
    }
}

/// `Re(P_i(Q) − P_i(basepoint)) + const_i`.
pub fn immerse_via_primitives(data: &WeierstrassData, q: &[C64]) -> Result<Vec<f64>, ExprError> {
    let prims = data
        .primitives
        .as_ref()
        .expect("immerse_via_primitives requires primitives");
    prims
        .iter()
        .zip(&data.constant)
        .map(|(p, c)| Ok((p.eval(q)? - p.eval(&data.basepoint)?).re + c))
        .collect()
}

/// Straight-segment quadrature from the basepoint to `q`.
pub fn immerse_via_quadrature(
    data: &WeierstrassData,
    q: &[C64],
    tol: f64,
) -> Result<Vec<f64>, ImmerseError> {
    let integrals = integrate_segment(data, &data.basepoint, q, tol)?;
    Ok(integrals
        .iter()
        .zip(&data.constant)
        .map(|(v, c)| v.re + c)
        .collect())
}

/// Two-segment route through `mid`; agrees with the straight segment for
/// closed forms.
pub fn immerse_via_dogleg(
    data: &WeierstrassData,
    mid: &[C64],
    q: &[C64],
    tol: f64,
) -> Result<Vec<f64>, ImmerseError> {
    let leg1 = integrate_segment(data, &data.basepoint, mid, tol)?;
    let leg2 = integrate_segment(data, mid, q, tol)?;
    Ok(leg1
        .iter()
        .zip(&leg2)
        .zip(&data.constant)
        .map(|((a, b), c)| (a + b).re + c)
        .collect())
}

/// `∫ ω_i` along the straight segment `from -> to`, for every form.
pub fn integrate_segment(
    data: &WeierstrassData,
    from: &[C64],
    to: &[C64],
    tol: f64,
) -> Result<Vec<C64>, ImmerseError> {
    let m = data.arity;
    let dir: Vec<C64> = (0..m).map(|j| to[j] - from[j]).collect();
    let n = data.n();
    // Integrand for all forms at parameter t: Σ_j ω_ij(z(t)) dir_j.
    let eval_at = |t: f64| -> Result<Vec<C64>, ImmerseError> {
        let z: Vec<C64> = (0..m).map(|j| from[j] + dir[j] * t).collect();
        let mat = data.coeff_matrix(&z)?;
        Ok((0..n)
            .map(|i| (0..m).map(|j| mat[(i, j)] * dir[j]).sum())
            .collect())
    };
    let mut total = vec![C64::ZERO; n];
    adaptive(&eval_at, 0.0, 1.0, tol, 0, &mut total)?;
    Ok(total)
}

fn gauss<F>(f: &F, a: f64, b: f64, xs: &[f64], ws: &[f64]) -> Result<Vec<C64>, ImmerseError>
where
    F: Fn(f64) -> Result<Vec<C64>, ImmerseError>,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc: Option<Vec<C64>> = None;
    for (&x, &w) in xs.iter().zip(ws) {
        let vals = f(mid + half * x)?;
        match &mut acc {
            None => acc = Some(vals.iter().map(|v| v * w * half).collect()),
            Some(acc) => {
                for (a, v) in acc.iter_mut().zip(&vals) {
                    *a += v * w * half;
                }
            }
        }
    }
    Ok(acc.unwrap())
}

fn adaptive<F>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    out: &mut [C64],
) -> Result<(), ImmerseError>
where
    F: Fn(f64) -> Result<Vec<C64>, ImmerseError>,
{
    let coarse = gauss(f, a, b, &GL7_X, &GL7_W)?;
    let fine = gauss(f, a, b, &GL15_X, &GL15_W)?;
    let err = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (c - f).norm())
        .fold(0.0, f64::max);
    if err <= tol * (b - a) || depth >= MAX_DEPTH {
        if depth >= MAX_DEPTH && err > tol * (b - a) {
            return Err(ImmerseError::NonConvergence { tol, achieved: err });
        }
        for (o, v) in out.iter_mut().zip(&fine) {
            *o += v;
        }
        return Ok(());
    }
    let mid = 0.5 * (a + b);
    adaptive(f, a, mid, tol, depth + 1, out)?;
    adaptive(f, mid, b, tol, depth + 1, out)
}
