//! Numerical probes of the semigroup, commutator and product estimates behind
//! the well-posedness theory, plus solver experiments (continuous dependence,
//! dispersion, mollified data, convergence).

mod convergence;
mod dependence;
mod dispersion;
mod estimates;
mod report;
mod semigroup;

pub use convergence::{convergence_study, ConvergenceSpec};
pub use dependence::{continuous_dependence_along, continuous_dependence_experiment, mollified_data_experiment, perturbation_distance};
pub use dispersion::{dispersion_probe, linear_phase_speed};
pub use estimates::{
    commutator_norm, commutator_probe, commutator_probe_on, commutator_ratio, product_probe, product_probe_on,
    product_ratio, DEFAULT_PROBE_GRIDS,
};
pub use report::ProbeReport;
pub use semigroup::{semigroup_probe, semigroup_probe_random, SEMIGROUP_TOL};

use crate::integrate::IntegrationError;
use crate::model::ModelError;
use crate::spectral::SpectralError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbeError {
    #[error("exponents out of range: {0}")]
    InvalidExponents(String),
    #[error("invalid probe input: {0}")]
    InvalidInput(String),
    #[error("probe unresolved: {0}")]
    ProbeUnresolved(String),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

use crate::integrate::{integrate, Controls, RunOutcome, Status};
use crate::model::Model;
use crate::spectral::SpectralField;

/// `t_end / dt` rounded up to a multiple of `multiple`, turned back into a step size.
pub(crate) fn commensurate_dt(t_end: f64, dt_max: f64, multiple: usize) -> f64 {
    let steps = (t_end / dt_max).ceil().max(1.0) as usize;
    let steps = steps.div_ceil(multiple) * multiple;
    t_end / steps as f64
}

/// Fixed-step run that must finish resolved; snapshots at `snapshot_times`.
pub(crate) fn evolve_fixed(
    u0: &SpectralField,
    model: &Model,
    t_end: f64,
    dt: f64,
    snapshot_times: Vec<f64>,
) -> Result<RunOutcome, ProbeError> {
    let controls = Controls::new(t_end).with_fixed_dt(dt).with_snapshots(snapshot_times);
    let out = integrate(u0, model, t_end, &controls)?;
    match out.state.status {
        Status::Completed => Ok(out),
        Status::BlowUpSuspected => {
            let info = out.blowup.expect("blow-up info");
            Err(ProbeError::ProbeUnresolved(format!(
                "{:?} = {} crossed {} at t = {}",
                info.trigger, info.value, info.threshold, info.t
            )))
        }
        other => Err(ProbeError::ProbeUnresolved(format!("run ended with status {other:?} at t = {}", out.state.t))),
    }
}
