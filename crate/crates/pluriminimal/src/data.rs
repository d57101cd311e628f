//! Weierstrass data: a tuple of holomorphic (1,0)-forms on C^m, with
//! optional primitives, a basepoint, and the additive constant of the
//! immersion formula.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{ExprError, HoloExpr};
use crate::jet::eval_jet2;
use crate::C64;

#[derive(Debug, Error)]
pub enum DataError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid data: {0}")]
    Schema(String),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// A holomorphic (1,0)-form `ω = Σ_j ω_j dz_j` with entire coefficients.
#[derive(Debug, Clone)]
pub struct OneForm {
    coeffs: Vec<HoloExpr>,
}

impl OneForm {
    pub fn new(coeffs: Vec<HoloExpr>) -> Result<Self, DataError> {
        if coeffs.is_empty() {
            return Err(DataError::Schema("a 1-form needs at least one coefficient".into()));
        }
        let m = coeffs[0].arity();
        if coeffs.len() != m || coeffs.iter().any(|c| c.arity() != m) {
            return Err(DataError::Schema(
                "1-form coefficient count must equal the shared arity".into(),
            ));
        }
        Ok(OneForm { coeffs })
    }

    /// Exterior differential of a primitive: `dP = Σ ∂P/∂z_j dz_j`.
    pub fn differential_of(primitive: &HoloExpr) -> Result<Self, DataError> {
        let m = primitive.arity();
        let coeffs = (0..m)
            .map(|j| primitive.differentiate(j))
            .collect::<Result<Vec<_>, _>>()?;
        OneForm::new(coeffs)
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[HoloExpr] {
        &self.coeffs
    }

    /// Coefficient values `(ω_1(z), ..., ω_m(z))`.
    pub fn eval(&self, z: &[C64]) -> Result<Vec<C64>, ExprError> {
        self.coeffs.iter().map(|c| c.eval(z)).collect()
    }
}

/// The data `(ω_1, ..., ω_n)` of the Weierstrass formula
/// `f(Q) = Re ∫_P^Q (ω_1, ..., ω_n) + const`.
#[derive(Debug, Clone)]
pub struct WeierstrassData {
    pub arity: usize,
    pub forms: Vec<OneForm>,
    /// Primitives `P_i` with `dP_i = ω_i`, when available. All data this
    /// crate generates carries them.
    pub primitives: Option<Vec<HoloExpr>>,
    pub basepoint: Vec<C64>,
    pub constant: Vec<f64>,
}

impl WeierstrassData {
    pub fn new(
        forms: Vec<OneForm>,
        primitives: Option<Vec<HoloExpr>>,
        basepoint: Vec<C64>,
        constant: Vec<f64>,
    ) -> Result<Self, DataError> {
        if forms.is_empty() {
            return Err(DataError::Schema("need at least one form".into()));
        }
        let m = forms[0].arity();
        if forms.iter().any(|f| f.arity() != m) {
            return Err(DataError::Schema("all forms must share the same arity".into()));
        }
        if basepoint.len() != m {
            return Err(DataError::Schema("basepoint length must equal arity".into()));
        }
        if constant.len() != forms.len() {
            return Err(DataError::Schema("constant length must equal the number of forms".into()));
        }
        if let Some(prims) = &primitives {
            if prims.len() != forms.len() || prims.iter().any(|p| p.arity() != m) {
                return Err(DataError::Schema(
                    "primitives must match the forms in count and arity".into(),
                ));
            }
        }
        Ok(WeierstrassData { arity: m, forms, primitives, basepoint, constant })
    }

    /// Build data directly from primitives; forms are their differentials.
    pub fn from_primitives(
        primitives: Vec<HoloExpr>,
        basepoint: Vec<C64>,
    ) -> Result<Self, DataError> {
        let forms = primitives
            .iter()
            .map(OneForm::differential_of)
            .collect::<Result<Vec<_>, _>>()?;
        let n = forms.len();
        WeierstrassData::new(forms, Some(primitives), basepoint, vec![0.0; n])
    }

    /// Target dimension `n`.
    pub fn n(&self) -> usize {
        self.forms.len()
    }

    /// A totally real immersion needs `n >= 2m`; violation is a warning,
    /// not an error.
    pub fn totally_real_warning(&self) -> Option<String> {
        (self.n() < 2 * self.arity).then(|| {
            format!(
                "n = {} < 2m = {}: the data cannot define a totally real immersion",
                self.n(),
                2 * self.arity
            )
        })
    }

    /// The complex coefficient matrix `(ω_ij(z))`, `n x m`.
    pub fn coeff_matrix(&self, z: &[C64]) -> Result<DMatrix<C64>, ExprError> {
        let (n, m) = (self.n(), self.arity);
        let mut mat = DMatrix::zeros(n, m);
        for (i, form) in self.forms.iter().enumerate() {
            for (j, v) in form.eval(z)?.into_iter().enumerate() {
                mat[(i, j)] = v;
            }
        }
        Ok(mat)
    }

    /// Worst mismatch between `differentiate(P_i, j)` and the stored form
    /// coefficients over the given points. `None` when no primitives.
    pub fn primitive_consistency(&self, points: &[Vec<C64>]) -> Result<Option<f64>, ExprError> {
        let Some(prims) = &self.primitives else {
            return Ok(None);
        };
        let mut worst = 0.0f64;
        for (p, form) in prims.iter().zip(&self.forms) {
            for j in 0..self.arity {
                let dp = p.differentiate(j)?;
                for z in points {
                    let a = dp.eval(z)?;
                    let b = form.coeffs()[j].eval(z)?;
                    worst = worst.max((a - b).norm());
                }
            }
        }
        Ok(Some(worst))
    }

    /// Value and complex Hessian of each primitive, recovered from the jets
    /// of the form coefficients (no primitives needed): the gradient of
    /// `P_i` is the coefficient row of `ω_i` and its Hessian is the
    /// coefficient jacobian `∂ω_ij/∂z_k`.
    pub fn form_jets(&self, z: &[C64]) -> Result<Vec<FormJet>, ExprError> {
        let m = self.arity;
        self.forms
            .iter()
            .map(|form| {
                let mut grad = vec![C64::ZERO; m];
                let mut hess = vec![vec![C64::ZERO; m]; m];
                for j in 0..m {
                    let jet = eval_jet2(&form.coeffs()[j], z)?;
                    grad[j] = jet.value;
                    for k in 0..m {
                        hess[j][k] = jet.grad[k];
                    }
                }
                Ok(FormJet { grad, hess })
            })
            .collect()
    }
}

/// Per-form first and second derivative data of the underlying primitive
/// at a point: `grad[j] = ω_j(z)`, `hess[j][k] = ∂ω_j/∂z_k`.
#[derive(Debug, Clone)]
pub struct FormJet {
    pub grad: Vec<C64>,
    pub hess: Vec<Vec<C64>>,
}

impl FormJet {
    /// Symmetrized Hessian entry (closedness makes the two orders agree).
    pub fn hess_sym(&self, j: usize, k: usize) -> C64 {
        (self.hess[j][k] + self.hess[k][j]) * 0.5
    }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct OneFormDto {
    coeffs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct DataDto {
    arity: usize,
    basepoint: Vec<[f64; 2]>,
    constant: Vec<f64>,
    forms: Vec<OneFormDto>,
    primitives: Option<Vec<String>>,
}

impl WeierstrassData {
    pub fn to_json(&self) -> Result<String, DataError> {
        let dto = DataDto {
            arity: self.arity,
            basepoint: self.basepoint.iter().map(|z| [z.re, z.im]).collect(),
            constant: self.constant.clone(),
            forms: self
                .forms
                .iter()
                .map(|f| OneFormDto { coeffs: f.coeffs().iter().map(|c| c.to_string()).collect() })
                .collect(),
            primitives: self
                .primitives
                .as_ref()
                .map(|ps| ps.iter().map(|p| p.to_string()).collect()),
        };
        Ok(serde_json::to_string_pretty(&dto)?)
    }

    pub fn from_json(text: &str) -> Result<Self, DataError> {
        let dto: DataDto = serde_json::from_str(text)?;
        let m = dto.arity;
        let forms = dto
            .forms
            .iter()
            .map(|f| {
                let coeffs = f
                    .coeffs
                    .iter()
                    .map(|s| HoloExpr::parse(s, m))
                    .collect::<Result<Vec<_>, _>>()?;
                OneForm::new(coeffs)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let primitives = dto
            .primitives
            .map(|ps| ps.iter().map(|s| HoloExpr::parse(s, m)).collect::<Result<Vec<_>, _>>())
            .transpose()?;
        let basepoint = dto.basepoint.iter().map(|&[re, im]| C64::new(re, im)).collect();
        WeierstrassData::new(forms, primitives, basepoint, dto.constant)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), DataError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, DataError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_data() -> WeierstrassData {
        // Realification of (z1 z2, z1, z2).
        let m = 2;
        let p1 = HoloExpr::parse("z1*z2", m).unwrap();
        let i = HoloExpr::i(m);
        let prims = vec![
            p1.clone(),
            i.neg().mul(&p1),
            HoloExpr::parse("z1", m).unwrap(),
            i.neg().mul(&HoloExpr::parse("z1", m).unwrap()),
            HoloExpr::parse("z2", m).unwrap(),
            i.neg().mul(&HoloExpr::parse("z2", m).unwrap()),
        ];
        WeierstrassData::from_primitives(prims, vec![C64::ZERO; m]).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let data = graph_data();
        let text = data.to_json().unwrap();
        let back = WeierstrassData::from_json(&text).unwrap();
        assert_eq!(back.arity, 2);
        assert_eq!(back.n(), 6);
        let z = [C64::new(0.4, -0.2), C64::new(1.1, 0.3)];
        let a = data.coeff_matrix(&z).unwrap();
        let b = back.coeff_matrix(&z).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn primitive_consistency_is_tight() {
        let data = graph_data();
        let pts = vec![vec![C64::new(0.3, 0.9), C64::new(-1.2, 0.4)]];
        let worst = data.primitive_consistency(&pts).unwrap().unwrap();
        assert!(worst < 1e-10);
    }

    #[test]
    fn totally_real_warning_fires_below_2m() {
        let m = 2;
        let prims = vec![HoloExpr::parse("z1", m).unwrap(), HoloExpr::parse("z2", m).unwrap()];
        let data = WeierstrassData::from_primitives(prims, vec![C64::ZERO; m]).unwrap();
        assert!(data.totally_real_warning().is_some());
        assert!(graph_data().totally_real_warning().is_none());
    }
}
