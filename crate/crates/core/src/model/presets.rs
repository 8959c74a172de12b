use serde::{Deserialize, Serialize};

use super::{ModelCoefficients, ModelError};

/// Amplitude and shallowness of the regime, plus the optional parameters of
/// individual model families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeParameters {
    pub eps: f64,
    pub delta: f64,
    /// Free parameter of the moderate-amplitude family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Dimensionless depth in `[0, 1]` of the moderate-amplitude family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<f64>,
    /// Linear transport coefficient of CH/DP.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// BBM parameter `β <= 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl RegimeParameters {
    pub fn new(eps: f64, delta: f64) -> Self {
        Self {
            eps,
            delta,
            p: None,
            z0: None,
            kappa: None,
            beta: None,
        }
    }

    fn check(&self) -> Result<(), ModelError> {
        if !(self.eps > 0.0 && self.eps.is_finite()) || !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(ModelError::InvalidRegime(format!(
                "eps and delta must be positive, got eps={} delta={}",
                self.eps, self.delta
            )));
        }
        if let Some(z0) = self.z0 {
            if !(0.0..=1.0).contains(&z0) {
                return Err(ModelError::InvalidRegime(format!("z0 must lie in [0, 1], got {z0}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurveyModel {
    Kdv,
    Bbm,
    Ch,
    Dp,
    Se,
    Moderate,
}

/// The large-amplitude equation
///
/// ```text
/// u_t + u_x + (3ε/2) u u_x - (δ²/18)(4 u_xxx + 7 u_xxt)
///     = (εδ²/6)(2 u_x u_xx + u u_xxx) - (ε²δ²/96)(398 u u_x u_xx + 45 u² u_xxx + 154 u_x³)
/// ```
///
/// moved into the family's slots. `γ1` is computed as `2(γ2 + γ3)` so the
/// relation holds exactly.
pub fn preset_large_amplitude(params: &RegimeParameters) -> Result<ModelCoefficients, ModelError> {
    params.check()?;
    let (eps, d2) = (params.eps, params.delta * params.delta);
    let mu = 7.0 * d2 / 18.0;
    if !(mu > 0.0) {
        return Err(ModelError::InvalidRegime(format!(
            "delta = {} gives a degenerate mu = {mu}",
            params.delta
        )));
    }
    let e2d2 = eps * eps * d2;
    let gamma2 = -45.0 * e2d2 / 96.0;
    let gamma3 = -154.0 * e2d2 / 96.0;
    Ok(ModelCoefficients {
        mu,
        alpha1: -1.0,
        alpha2: 2.0 * d2 / 9.0,
        alpha3: -1.5 * eps,
        beta1: eps * d2 / 3.0,
        beta2: eps * d2 / 6.0,
        gamma1: 2.0 * (gamma2 + gamma3),
        gamma2,
        gamma3,
        alpha4: 0.0,
        alpha5: 0.0,
    })
}

/// Coefficients reproducing `a(u) = 1 + u + u²` and
/// `f(u) = Λ^{-2} ∂_x[u + u² + u³ + u_x² + u u_x²]` with `μ = 1`.
///
/// The cubic bracket weight needs `α4 = 2` on top of `γ2 = 1`.
pub fn preset_normalized() -> ModelCoefficients {
    let gamma2 = 1.0;
    let gamma3 = 3.0;
    ModelCoefficients {
        mu: 1.0,
        alpha1: 0.0,
        alpha2: 1.0,
        alpha3: 1.0,
        beta1: 5.0,
        beta2: 1.0,
        gamma1: 2.0 * (gamma2 + gamma3),
        gamma2,
        gamma3,
        alpha4: 2.0,
        alpha5: 0.0,
    }
}

/// Survey models placed into the family's slots.
///
/// KdV comes out with `μ = 0`; it can only be evolved in the local form.
/// CH and DP use their fixed-coefficient forms and ignore `eps`/`delta`.
pub fn preset_survey(model: SurveyModel, params: &RegimeParameters) -> Result<ModelCoefficients, ModelError> {
    let zero = ModelCoefficients::zero();
    match model {
        SurveyModel::Ch | SurveyModel::Dp => {
            let kappa = params
                .kappa
                .ok_or_else(|| ModelError::InvalidRegime("CH/DP presets need kappa".into()))?;
            if !kappa.is_finite() {
                return Err(ModelError::InvalidRegime(format!("kappa must be finite, got {kappa}")));
            }
            let (alpha3, beta1) = if model == SurveyModel::Ch { (-3.0, 2.0) } else { (-4.0, 3.0) };
            Ok(ModelCoefficients {
                mu: 1.0,
                alpha1: -kappa,
                alpha3,
                beta1,
                beta2: 1.0,
                ..zero
            })
        }
        SurveyModel::Kdv => {
            params.check()?;
            let (eps, d2) = (params.eps, params.delta * params.delta);
            Ok(ModelCoefficients {
                mu: 0.0,
                alpha1: -1.0,
                alpha2: -d2 / 6.0,
                alpha3: -2.0 * eps / 3.0,
                ..zero
            })
        }
        SurveyModel::Bbm => {
            params.check()?;
            let beta = params
                .beta
                .ok_or_else(|| ModelError::InvalidRegime("BBM preset needs beta".into()))?;
            let (eps, d2) = (params.eps, params.delta * params.delta);
            let mu = -d2 * beta;
            if !(mu > 0.0) {
                return Err(ModelError::InvalidMu(mu));
            }
            let alpha = 1.0 / 6.0 + beta;
            Ok(ModelCoefficients {
                mu,
                alpha1: -1.0,
                alpha2: -d2 * alpha,
                alpha3: -2.0 * eps / 3.0,
                ..zero
            })
        }
        SurveyModel::Moderate => {
            params.check()?;
            let p = params
                .p
                .ok_or_else(|| ModelError::InvalidRegime("moderate family needs p".into()))?;
            let z0 = params
                .z0
                .ok_or_else(|| ModelError::InvalidRegime("moderate family needs z0".into()))?;
            let lambda = 0.5 * (z0 * z0 - 1.0 / 3.0);
            let alpha = p + lambda;
            let beta = p - 1.0 / 6.0 + lambda;
            let gamma = -1.5 * p - 1.0 / 6.0 - 1.5 * lambda;
            let zeta = -4.5 * p - 23.0 / 24.0 - 1.5 * lambda;
            let (eps, d2) = (params.eps, params.delta * params.delta);
            let mu = -d2 * beta;
            if !(mu > 0.0) {
                return Err(ModelError::InvalidMu(mu));
            }
            Ok(ModelCoefficients {
                mu,
                alpha1: -1.0,
                alpha2: -d2 * alpha,
                alpha3: -1.5 * eps,
                beta1: eps * d2 * zeta,
                beta2: eps * d2 * gamma,
                ..zero
            })
        }
        SurveyModel::Se => {
            params.check()?;
            let (eps, d2) = (params.eps, params.delta * params.delta);
            Ok(ModelCoefficients {
                mu: d2 / 12.0,
                alpha1: -1.0,
                alpha2: -d2 / 12.0,
                alpha3: -1.5 * eps,
                beta1: -7.0 * eps * d2 / 12.0,
                beta2: -7.0 * eps * d2 / 24.0,
                alpha4: 3.0 * eps * eps / 8.0,
                alpha5: -3.0 * eps.powi(3) / 16.0,
                ..zero
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    #[test]
    fn large_amplitude_unit_parameters() {
        let c = preset_large_amplitude(&RegimeParameters::new(1.0, 1.0)).unwrap();
        assert_eq!(c.mu, 7.0 / 18.0);
        assert_eq!(c.alpha1, -1.0);
        assert_eq!(c.alpha2, 2.0 / 9.0);
        assert_eq!(c.alpha3, -1.5);
        assert_eq!(c.beta1, 1.0 / 3.0);
        assert_eq!(c.beta2, 1.0 / 6.0);
        assert!((c.gamma1 + 398.0 / 96.0).abs() < 1e-15);
        assert_eq!(c.gamma2, -45.0 / 96.0);
        assert_eq!(c.gamma3, -154.0 / 96.0);
        assert!(validate(&c).unwrap().is_conservative());
    }

    #[test]
    fn degenerate_delta_rejected() {
        assert!(matches!(
            preset_large_amplitude(&RegimeParameters::new(1.0, 0.0)),
            Err(ModelError::InvalidRegime(_))
        ));
        assert!(matches!(
            preset_large_amplitude(&RegimeParameters::new(1.0, 1e-170)),
            Err(ModelError::InvalidRegime(_))
        ));
        assert!(preset_large_amplitude(&RegimeParameters::new(-1.0, 0.1)).is_err());
    }

    #[test]
    fn camassa_holm_and_degasperis_procesi() {
        let mut p = RegimeParameters::new(1.0, 1.0);
        p.kappa = Some(1.0);
        let ch = preset_survey(SurveyModel::Ch, &p).unwrap();
        assert_eq!(
            (ch.mu, ch.alpha1, ch.alpha3, ch.beta1, ch.beta2),
            (1.0, -1.0, -3.0, 2.0, 1.0)
        );
        assert_eq!((ch.alpha2, ch.gamma1, ch.gamma2, ch.gamma3), (0.0, 0.0, 0.0, 0.0));
        assert!(ch.is_conservative());
        let dp = preset_survey(SurveyModel::Dp, &p).unwrap();
        assert_eq!(
            (dp.mu, dp.alpha1, dp.alpha3, dp.beta1, dp.beta2),
            (1.0, -1.0, -4.0,3.0, 1.0)
        );
        p.kappa = None;
        assert!(preset_survey(SurveyModel::Ch, &p).is_err());
    }

    #[test]
    fn moderate_family_at_zero_p_lambda() {
        let mut p = RegimeParameters::new(0.1, 0.3);
        p.p = Some(0.0);
        p.z0 = Some((1.0f64 / 3.0).sqrt());
        let c = preset_survey(SurveyModel::Moderate, &p).unwrap();
        let d2 = 0.09;
        assert!((c.mu - d2 / 6.0).abs() < 1e-15);
        assert!(c.alpha2.abs() < 1e-15);
        assert!((c.beta2 - 0.1 * d2 * (-1.0 / 6.0)).abs() < 1e-15);
        assert!((c.beta1 - 0.1 * d2 * (-23.0 / 24.0)).abs() < 1e-15);
        assert!(c.is_conservative());
        p.p = Some(1.0);
        assert!(matches!(preset_survey(SurveyModel::Moderate, &p), Err(ModelError::InvalidMu(_))));
    }

    #[test]
    fn kdv_has_zero_mu_and_bbm_needs_negative_beta() {
        let mut p = RegimeParameters::new(0.1, 0.2);
        let k = preset_survey(SurveyModel::Kdv, &p).unwrap();
        assert_eq!(k.mu, 0.0);
        assert!(validate(&k).is_err());
        p.beta = Some(0.0);
        assert!(matches!(preset_survey(SurveyModel::Bbm, &p), Err(ModelError::InvalidMu(_))));
        p.beta = Some(-0.5);
        let b = preset_survey(SurveyModel::Bbm, &p).unwrap();
        assert!((b.mu - 0.02).abs() < 1e-15);
        assert!((b.alpha2 - 0.04 * (0.5 - 1.0 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn normalized_preset_is_conservative() {
        let c = preset_normalized();
        assert!(validate(&c).unwrap().is_conservative());
    }
}
