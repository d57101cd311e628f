//! Export of minimal-surface slices as text meshes.
//!
//! A pluriminimal immersion restricts to a minimal surface along every
//! holomorphic curve in the domain. Given a curve `c: disk → Cᵐ` (one
//! expression per domain variable, all in the single parameter `t`), the
//! exporter samples `t` on a uniform grid over `[−1,1]²`, maps each node
//! through `c` and the immersion, projects to three chosen coordinates of
//! `Rⁿ`, and writes an OBJ-style vertex/quad-face list. Output bytes are a
//! pure function of the input, so fixed configs reproduce exactly.

use thiserror::Error;

use crate::data::WeierstrassData;
use crate::expr::{ExprError, HoloExpr};
use crate::immerse::{immerse, ImmerseError};
use crate::C64;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("curve has {got} components but the data has arity {arity}")]
    CurveArity { got: usize, arity: usize },
    #[error("curve expressions must have arity 1 (parameter t)")]
    CurveParameter,
    #[error("projection index {index} out of range for target dimension {n}")]
    ProjectionRange { index: usize, n: usize },
    #[error("projection indices must be distinct")]
    ProjectionDistinct,
    #[error("resolution must be at least 2")]
    Resolution,
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Immerse(#[from] ImmerseError),
}

/// A gridded holomorphic slice of the domain and how to draw it.
#[derive(Debug, Clone)]
pub struct MeshSlice {
    /// One arity-1 expression per domain variable: `z_k = curve_k(t)`.
    pub curve: Vec<HoloExpr>,
    /// Grid points per side over `t ∈ [−1,1]²`.
    pub resolution: usize,
    /// Zero-based coordinate indices of `Rⁿ` to keep.
    pub projection: [usize; 3],
}

impl MeshSlice {
    fn validate(&self, data: &WeierstrassData) -> Result<(), MeshError> {
        if self.curve.len() != data.arity {
            return Err(MeshError::CurveArity { got: self.curve.len(), arity: data.arity });
        }
        if self.curve.iter().any(|c| c.arity() != 1) {
            return Err(MeshError::CurveParameter);
        }
        if self.resolution < 2 {
            return Err(MeshError::Resolution);
        }
        let n = data.n();
        for &index in &self.projection {
            if index >= n {
                return Err(MeshError::ProjectionRange { index, n });
            }
        }
        if self.projection[0] == self.projection[1]
            || self.projection[0] == self.projection[2]
            || self.projection[1] == self.projection[2]
        {
            return Err(MeshError::ProjectionDistinct);
        }
        Ok(())
    }

    fn grid_parameter(&self, i: usize, j: usize) -> C64 {
        let step = 2.0 / (self.resolution - 1) as f64;
        C64::new(-1.0 + i as f64 * step, -1.0 + j as f64 * step)
    }
}

/// Full-dimensional image points of the slice, row-major over the grid
/// (`j` outer over Im t, `i` inner over Re t).
pub fn slice_points(
    data: &WeierstrassData,
    slice: &MeshSlice,
) -> Result<Vec<Vec<f64>>, MeshError> {
    slice.validate(data)?;
    let res = slice.resolution;
    let mut points = Vec::with_capacity(res * res);
    for j in 0..res {
        for i in 0..res {
            let t = [slice.grid_parameter(i, j)];
            let z: Vec<C64> = slice
                .curve
                .iter()
                .map(|c| c.eval(&t))
                .collect::<Result<_, _>>()?;
            points.push(immerse(data, &z)?);
        }
    }
    Ok(points)
}

/// Render the slice as an OBJ-style text mesh: `v x y z` lines followed by
/// one 1-indexed quad `f` line per grid cell.
pub fn mesh_surface(data: &WeierstrassData, slice: &MeshSlice) -> Result<String, MeshError> {
    let points = slice_points(data, slice)?;
    let res = slice.resolution;
    let [px, py, pz] = slice.projection;
    let mut out = String::new();
    for p in &points {
        out.push_str(&format!("v {} {} {}\n", p[px], p[py], p[pz]));
    }
    for j in 0..res - 1 {
        for i in 0..res - 1 {
            let a = j * res + i + 1;
            let b = j * res + i + 2;
            let c = (j + 1) * res + i + 2;
            let d = (j + 1) * res + i + 1;
            out.push_str(&format!("f {a} {b} {c} {d}\n"));
        }
    }
    Ok(out)
}

/// Discrete-Laplacian residual of the slice map over interior grid nodes.
///
/// Each coordinate of the slice is the real part of a holomorphic function
/// of `t`, hence harmonic; a conformal harmonic map is minimal. The
/// five-point stencil residual `‖Σ neighbors − 4·center‖ / h²` is the
/// discrete mean-curvature oracle for exported meshes.
pub fn harmonicity_residual(
    data: &WeierstrassData,
    slice: &MeshSlice,
) -> Result<f64, MeshError> {
    let points = slice_points(data, slice)?;
    let res = slice.resolution;
    let h = 2.0 / (res - 1) as f64;
    let n = data.n();
    let mut worst = 0.0f64;
    for j in 1..res - 1 {
        for i in 1..res - 1 {
            let center = &points[j * res + i];
            let mut norm2 = 0.0;
            for coord in 0..n {
                let lap = points[j * res + i + 1][coord]
                    + points[j * res + i - 1][coord]
                    + points[(j + 1) * res + i][coord]
                    + points[(j - 1) * res + i][coord]
                    - 4.0 * center[coord];
                norm2 += (lap / (h * h)).powi(2);
            }
            worst = worst.max(norm2.sqrt());
        }
    }
    Ok(worst)
}
