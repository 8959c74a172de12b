use rayon::prelude::*;

use super::{commensurate_dt, evolve_fixed, ProbeError, ProbeReport};
use crate::integrate::stable_dt;
use crate::model::Model;
use crate::spectral::{mollify, random_trig_polynomial, sobolev_norm, Mollifier, SpectralField};

const SAMPLE_TIMES: usize = 10;
const CFL: f64 = 0.25;

fn sample_times(t_end: f64) -> Vec<f64> {
    (1..=SAMPLE_TIMES).map(|k| t_end * k as f64 / SAMPLE_TIMES as f64).collect()
}

fn check_t_end(t_end: f64) -> Result<(), ProbeError> {
    if t_end > 0.0 && t_end.is_finite() {
        Ok(())
    } else {
        Err(ProbeError::InvalidInput(format!("t_end must be positive, got {t_end}")))
    }
}

/// `max_k ‖u(t_k; u0 + η φ) - u(t_k; u0)‖_s` over ten evenly spaced times, with
/// a fixed step `dt` that must divide `t_end / 10`.
pub fn perturbation_distance(
    u0: &SpectralField,
    phi: &SpectralField,
    eta: f64,
    model: &Model,
    t_end: f64,
    s: f64,
    dt: f64,
) -> Result<f64, ProbeError> {
    check_t_end(t_end)?;
    let base = evolve_fixed(u0, model, t_end, dt, sample_times(t_end))?;
    let pert = evolve_fixed(&u0.axpy(eta, phi), model, t_end, dt, sample_times(t_end))?;
    Ok(max_distance(&base.snapshots, &pert.snapshots, s))
}

fn max_distance(a: &[crate::integrate::Snapshot], b: &[crate::integrate::Snapshot], s: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| sobolev_norm(&(&x.u - &y.u), s))
        .fold(0.0, f64::max)
}

/// Solves from `u0` and `u0 + η_k φ` for each size, `φ` a fixed random
/// direction of unit `H^s` norm, and records `d_k = max_t ‖difference‖_s`.
///
/// Passes when `d_k` strictly decreases and `d_last <= 10 η_last d_1/η_1`.
pub fn continuous_dependence_experiment(
    u0: &SpectralField,
    perturbation_sizes: &[f64],
    t_end: f64,
    s: f64,
    model: &Model,
    seed: u64,
) -> Result<ProbeReport, ProbeError> {
    let grid = u0.grid();
    let max_mode = (grid.n_points() / 8).max(1);
    let phi = random_trig_polynomial(grid, seed, max_mode, s + 2.0)?;
    let mut report = continuous_dependence_along(u0, &phi, perturbation_sizes, t_end, s, model)?;
    report.seed = Some(seed);
    Ok(report)
}

/// [`continuous_dependence_experiment`] along a given direction, rescaled to unit `H^s` norm.
pub fn continuous_dependence_along(
    u0: &SpectralField,
    direction: &SpectralField,
    perturbation_sizes: &[f64],
    t_end: f64,
    s: f64,
    model: &Model,
) -> Result<ProbeReport, ProbeError> {
    check_t_end(t_end)?;
    u0.check_same_grid(direction)?;
    let etas = perturbation_sizes;
    if etas.is_empty()
        || etas.iter().any(|e| !(*e > 0.0 && e.is_finite()))
        || etas.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(ProbeError::InvalidInput(
            "perturbation sizes must be positive and strictly decreasing".into(),
        ));
    }
    let norm = sobolev_norm(direction, s);
    if norm == 0.0 {
        return Err(ProbeError::InvalidInput("perturbation direction is zero".into()));
    }
    let phi = direction.scaled(1.0 / norm);
    let dt_max = stable_dt(model, u0, CFL)?.min(stable_dt(model, &u0.axpy(etas[0], &phi), CFL)?);
    let dt = commensurate_dt(t_end, dt_max, SAMPLE_TIMES);
    let times = sample_times(t_end);
    let base = evolve_fixed(u0, model, t_end, dt, times.clone())?;
    let distances = etas
        .par_iter()
        .map(|&eta| {
            let run = evolve_fixed(&u0.axpy(eta, &phi), model, t_end, dt, times.clone())?;
            Ok(max_distance(&base.snapshots, &run.snapshots, s))
        })
        .collect::<Result<Vec<f64>, ProbeError>>()?;
    let first = distances[0] / etas[0];
    let last = distances[distances.len() - 1] / etas[etas.len() - 1];
    let decreasing = distances.windows(2).all(|w| w[1] < w[0]);
    let pass = decreasing && last <= 10.0 * first;
    let mut report = ProbeReport::new("continuous_dependence", None, distances, pass)
        .with_metric("dt", dt)
        .with_metric("s", s)
        .with_metric("lipschitz_first", first)
        .with_metric("lipschitz_last", last);
    for (k, eta) in etas.iter().enumerate() {
        report = report.with_metric(format!("eta_{k}"), *eta);
    }
    Ok(report)
}

/// Solves from `ρ_n ∗ u0` for each `n` (standard bump kernel) and records the
/// successive terminal differences `‖u_{n_{k+1}}(t_end) - u_{n_k}(t_end)‖_0`.
///
/// Passes when the differences strictly decrease; one or two indices leave
/// nothing to compare and pass.
pub fn mollified_data_experiment(
    u0_rough: &SpectralField,
    n_sequence: &[usize],
    t_end: f64,
    model: &Model,
) -> Result<ProbeReport, ProbeError> {
    check_t_end(t_end)?;
    if n_sequence.is_empty() || n_sequence[0] == 0 || n_sequence.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ProbeError::InvalidInput(
            "mollifier indices must be positive and strictly increasing".into(),
        ));
    }
    let kernel = Mollifier::standard_bump();
    let data = n_sequence
        .iter()
        .map(|&n| mollify(u0_rough, n, &kernel))
        .collect::<Result<Vec<_>, _>>()?;
    let mut dt_max = f64::INFINITY;
    for u in &data {
        dt_max = dt_max.min(stable_dt(model, u, CFL)?);
    }
    let dt = commensurate_dt(t_end, dt_max, 1);
    let finals = data
        .par_iter()
        .map(|u| evolve_fixed(u, model, t_end, dt, Vec::new()).map(|o| o.state.u))
        .collect::<Result<Vec<_>, ProbeError>>()?;
    let diffs: Vec<f64> = finals.windows(2).map(|w| sobolev_norm(&(&w[1] - &w[0]), 0.0)).collect();
    let pass = diffs.windows(2).all(|w| w[1] < w[0]);
    let mut report = ProbeReport::new("mollified_data", None, diffs, pass).with_metric("dt", dt);
    for (k, n) in n_sequence.iter().enumerate() {
        report = report.with_metric(format!("n_{k}"), *n as f64);
    }
    Ok(report)
}
