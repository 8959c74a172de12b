use serde::{Deserialize, Serialize};

use super::ModelError;

/// Absolute tolerance on `γ1 = 2(γ2 + γ3)`.
pub const GAMMA_RELATION_TOL: f64 = 1e-12;

/// Coefficients of
///
/// ```text
/// u_t - μ u_xxt = α1 u_x + α2 u_xxx + α3 u u_x + β1 u_x u_xx + β2 u u_xxx
///               + γ1 u u_x u_xx + γ2 u² u_xxx + γ3 u_x³ + α4 u² u_x + α5 u³ u_x
/// ```
///
/// `alpha4` and `alpha5` extend the family with the higher-order local
/// transport terms needed by the free-surface model; both default to zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelCoefficients {
    pub mu: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub alpha4: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub alpha5: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl ModelCoefficients {
    pub fn zero() -> Self {
        Self {
            mu: 0.0,
            alpha1: 0.0,
            alpha2: 0.0,
            alpha3: 0.0,
            beta1: 0.0,
            beta2: 0.0,
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            alpha4: 0.0,
            alpha5: 0.0,
        }
    }

    /// Whether the cubic terms form an exact derivative, `γ1 = 2(γ2 + γ3)`.
    pub fn is_conservative(&self) -> bool {
        (self.gamma1 - 2.0 * (self.gamma2 + self.gamma3)).abs() <= GAMMA_RELATION_TOL
    }

    /// Coefficients of the time-reversed equation: every right-hand side term flips sign.
    pub fn time_reversed(&self) -> Self {
        Self {
            mu: self.mu,
            alpha1: -self.alpha1,
            alpha2: -self.alpha2,
            alpha3: -self.alpha3,
            beta1: -self.beta1,
            beta2: -self.beta2,
            gamma1: -self.gamma1,
            gamma2: -self.gamma2,
            gamma3: -self.gamma3,
            alpha4: -self.alpha4,
            alpha5: -self.alpha5,
        }
    }

    /// Keeps only the terms linear in `u`.
    pub fn linear_part(&self) -> Self {
        Self {
            mu: self.mu,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            ..Self::zero()
        }
    }

    pub(crate) fn all_finite(&self) -> bool {
        [
            self.mu,
            self.alpha1,
            self.alpha2,
            self.alpha3,
            self.beta1,
            self.beta2,
            self.gamma1,
            self.gamma2,
            self.gamma3,
            self.alpha4,
            self.alpha5,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Coefficients accepted by the nonlocal solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Validated {
    coeffs: ModelCoefficients,
    conservative: bool,
}

impl Validated {
    pub fn coefficients(&self) -> &ModelCoefficients {
        &self.coeffs
    }

    pub fn is_conservative(&self) -> bool {
        self.conservative
    }
}

/// Checks `μ > 0` and the γ-relation required by the reformulation.
pub fn validate(coeffs: &ModelCoefficients) -> Result<Validated, ModelError> {
    if !coeffs.all_finite() {
        return Err(ModelError::InvalidCoefficients("non-finite coefficient".into()));
    }
    if coeffs.mu <= 0.0 {
        return Err(ModelError::InvalidMu(coeffs.mu));
    }
    if !coeffs.is_conservative() {
        return Err(ModelError::GammaRelationViolated {
            gamma1: coeffs.gamma1,
            expected: 2.0 * (coeffs.gamma2 + coeffs.gamma3),
        });
    }
    Ok(Validated {
        coeffs: *coeffs,
        conservative: true,
    })
}
