//! Coefficient bookkeeping for the quasilinear family, model presets, and the
//! nonlocal reformulation `u_t = -a(u) u_x + f(u)`.

mod coefficients;
mod operators;
mod presets;

pub use coefficients::{validate, ModelCoefficients, Validated, GAMMA_RELATION_TOL};
pub use operators::{flux, semilinear_term, tendency, tendency_direct, transport_field, Formulation, Model};
pub use presets::{preset_large_amplitude, preset_normalized, preset_survey, RegimeParameters, SurveyModel};

use crate::spectral::SpectralError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("mu must be positive, got {0}")]
    InvalidMu(f64),
    #[error("gamma1 = {gamma1} violates gamma1 = 2(gamma2 + gamma3) = {expected}")]
    GammaRelationViolated { gamma1: f64, expected: f64 },
    #[error("invalid regime parameters: {0}")]
    InvalidRegime(String),
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
