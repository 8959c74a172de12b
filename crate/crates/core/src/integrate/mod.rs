//! Method-of-lines evolution with classical RK4, advective step control,
//! exact landing on sample/snapshot times, and blow-up monitoring.

mod diagnostics;
mod integrator;

pub use diagnostics::{check_record, detect_blowup, BlowUpInfo, BlowUpThresholds, Detection, DiagnosticsRecord, Trigger};
pub(crate) use integrator::rk4;
pub use integrator::{integrate, stable_dt, step_rk4, Controls, RunOutcome, SimulationState, Snapshot, Status};

use crate::model::ModelError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrationError {
    #[error("invalid controls: {0}")]
    InvalidControls(String),
    #[error("step limit of {0} reached before t_end")]
    StepLimit(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}
