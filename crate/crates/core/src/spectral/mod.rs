//! Periodic fields on the unit circle and the Fourier-multiplier calculus.
//!
//! A [`SpectralField`] stores the discrete Fourier coefficients of a real
//! function sampled at `x_j = j / N`. Mode `n` carries the angular frequency
//! `2πn`, so `∂_x e^{2πinx} = 2πin e^{2πinx}`.

mod field;
mod grid;
mod mollifier;
pub(crate) mod multiplier;
mod norms;
mod product;
mod random;
pub(crate) mod transform;

pub use field::SpectralField;
pub use grid::Grid;
pub use mollifier::{mollify, Mollifier};
pub use multiplier::{apply_multiplier, derivative, lambda_pow, MultiplierSymbol};
pub use norms::{sobolev_norm, spectral_tail, sup_norm, sup_norm_dx, SUP_REFINEMENT};
pub use product::{dealiased_product, dealiased_product_all, dealiased_triple};
pub use random::random_trig_polynomial;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("symbol `{0}` does not preserve real fields")]
    NonRealSymbol(String),
    #[error("mu must be positive, got {0}")]
    InvalidMu(f64),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid mollifier kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
