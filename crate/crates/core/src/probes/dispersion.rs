use std::f64::consts::PI;

use super::{evolve_fixed, ProbeError, ProbeReport};
use crate::model::{preset_large_amplitude, Model, RegimeParameters};
use crate::spectral::{Grid, SpectralField};

const TOL: f64 = 1e-6;
const MAX_AMPLITUDE: f64 = 1e-6;
const TARGET_DT: f64 = 1e-4;

/// `ω(k)/k = (1 + (2δ²/9)k²) / (1 + (7δ²/18)k²)` with `k = 2πn`.
pub fn linear_phase_speed(mode: u32, delta: f64) -> f64 {
    let k = 2.0 * PI * mode as f64;
    let d2 = delta * delta;
    (1.0 + 2.0 * d2 / 9.0 * k * k) / (1.0 + 7.0 * d2 / 18.0 * k * k)
}

/// Evolves `amplitude · cos(2πn x)` under the large-amplitude model and reads the
/// phase speed off the rotation of `û_n` over a short window `T = 0.2/n`.
///
/// The single sample is the relative error against [`linear_phase_speed`].
pub fn dispersion_probe(mode: u32, eps: f64, delta: f64, amplitude: f64) -> Result<ProbeReport, ProbeError> {
    let n = (8 * mode as usize).next_power_of_two().max(32);
    dispersion_probe_on(Grid::new(n)?, mode, eps, delta, amplitude)
}

pub fn dispersion_probe_on(
    grid: Grid,
    mode: u32,
    eps: f64,
    delta: f64,
    amplitude: f64,
) -> Result<ProbeReport, ProbeError> {
    if mode == 0 {
        return Err(ProbeError::InvalidInput("mode must be at least 1".into()));
    }
    if !(amplitude > 0.0 && amplitude <= MAX_AMPLITUDE) {
        return Err(ProbeError::InvalidInput(format!(
            "amplitude must lie in (0, {MAX_AMPLITUDE}], got {amplitude}"
        )));
    }
    if 3 * mode as i64 > grid.n_points() as i64 {
        return Err(ProbeError::ProbeUnresolved(format!(
            "mode {mode} lies in the top third of a {}-point grid",
            grid.n_points()
        )));
    }
    let model = Model::reformulated(preset_large_amplitude(&RegimeParameters::new(eps, delta))?)?;
    let k = 2.0 * PI * mode as f64;
    let window = 0.2 / mode as f64;
    let dt = super::commensurate_dt(window, TARGET_DT, 1);
    let u0 = SpectralField::from_fn(grid, |x| amplitude * (k * x).cos())?;
    let out = evolve_fixed(&u0, &model, window, dt, Vec::new())?;
    let n = mode as i64;
    let rotation = out.state.u.coefficient(n) / u0.coefficient(n);
    let measured = -rotation.arg() / (k * window);
    let expected = linear_phase_speed(mode, delta);
    let rel = (measured - expected).abs() / expected.abs();
    Ok(ProbeReport::new("dispersion", None, vec![rel], rel <= TOL)
        .with_metric("mode", mode as f64)
        .with_metric("measured_speed", measured)
        .with_metric("expected_speed", expected)
        .with_metric("window", window)
        .with_metric("dt", dt))
}
