//! Pseudospectral solver and operator probes for the periodic Cauchy problem of
//! a large-amplitude shallow water equation and the quasilinear family
//!
//! ```text
//! u_t - μ u_xxt = α1 u_x + α2 u_xxx + α3 u u_x + β1 u_x u_xx + β2 u u_xxx
//!               + γ1 u u_x u_xx + γ2 u² u_xxx + γ3 u_x³
//! ```
//!
//! on the unit circle, evolved in the nonlocal first-order form
//! `u_t + a(u) u_x = f(u)`.

pub mod spectral;

pub use spectral::{Grid, SpectralError, SpectralField};
pub mod model;
pub mod integrate;
pub mod probes;
pub mod cli;
