use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evolve_fixed, ProbeError, ProbeReport};
use crate::model::Model;
use crate::spectral::{sobolev_norm, Grid, SpectralField};

/// Differences below this (relative to `1 + ‖u‖_0`) are treated as roundoff.
const ROUNDOFF_FLOOR: f64 = 1e-12;
const ORDER_RANGE: (f64, f64) = (3.8, 4.2);

/// Resolutions of a self-convergence study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub t_end: f64,
    /// Increasing grid sizes, at least three.
    pub grids: Vec<usize>,
    /// Step sizes with a constant ratio, largest first, at least three; each must divide `t_end`.
    pub dts: Vec<f64>,
}

impl ConvergenceSpec {
    fn check(&self) -> Result<Vec<Grid>, ProbeError> {
        let bad = |m: &str| Err(ProbeError::InvalidInput(m.into()));
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be positive");
        }
        if self.grids.len() < 3 || self.grids.windows(2).any(|w| w[1] <= w[0]) {
            return bad("need at least three increasing grid sizes");
        }
        if self.dts.len() < 3 || self.dts.iter().any(|d| !(*d > 0.0)) || self.dts.windows(2).any(|w| w[1] >= w[0]) {
            return bad("need at least three positive, decreasing step sizes");
        }
        let q = self.dts[0] / self.dts[1];
        if self.dts.windows(2).any(|w| ((w[0] / w[1]) / q - 1.0).abs() > 1e-9) {
            return bad("step sizes must have a constant ratio");
        }
        for dt in &self.dts {
            let steps = self.t_end / dt;
            if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
                return bad("every step size must divide t_end");
            }
        }
        Ok(self
            .grids
            .iter()
            .map(|&n| Grid::new(n))
            .collect::<Result<Vec<_>, _>>()?)
    }
}

/// Temporal order from successive step refinements on the coarsest grid, and the
/// terminal `L²` difference between successive grids at the smallest step.
///
/// Samples are the spatial differences; temporal errors, fitted orders and the
/// headline `temporal_order` (first triple) are metrics. The temporal order is
/// omitted when the errors sit at roundoff, in which case the study passes on
/// that count.
pub fn convergence_study(u0: &SpectralField, model: &Model, spec: &ConvergenceSpec) -> Result<ProbeReport, ProbeError> {
    let grids = spec.check()?;
    let t_end = spec.t_end;
    let coarse = u0.resample(grids[0]);
    let temporal = spec
        .dts
        .par_iter()
        .map(|&dt| evolve_fixed(&coarse, model, t_end, dt, Vec::new()).map(|o| o.state.u))
        .collect::<Result<Vec<_>, ProbeError>>()?;
    let dt_min = *spec.dts.last().expect("three steps");
    let spatial = grids
        .par_iter()
        .map(|&g| evolve_fixed(&u0.resample(g), model, t_end, dt_min, Vec::new()).map(|o| o.state.u))
        .collect::<Result<Vec<_>, ProbeError>>()?;

    let scale = 1.0 + sobolev_norm(&temporal[0], 0.0);
    let floor = ROUNDOFF_FLOOR * scale;
    let errors: Vec<f64> = temporal.windows(2).map(|w| sobolev_norm(&(&w[0] - &w[1]), 0.0)).collect();
    let q = spec.dts[0] / spec.dts[1];
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).ln() / q.ln()).collect();
    let order = (errors[0] > floor && errors[1] > floor).then_some(orders[0]);
    let order_ok = order.is_none_or(|p| (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&p));

    let diffs: Vec<f64> = spatial
        .windows(2)
        .map(|w| {
            let fine = w[1].grid();
            sobolev_norm(&(&w[0].resample(fine) - &w[1]), 0.0)
        })
        .collect();
    let spatial_ok = diffs.windows(2).all(|d| d[1] <= d[0] || d[1] <= floor);

    let mut report = ProbeReport::new("convergence", None, diffs, order_ok && spatial_ok);
    if let Some(p) = order {
        report = report.with_metric("temporal_order", p);
    }
    for (k, e) in errors.iter().enumerate() {
        report = report.with_metric(format!("temporal_error_{k}"), *e);
    }
    for (k, p) in orders.iter().enumerate() {
        if p.is_finite() {
            report = report.with_metric(format!("temporal_order_{k}"), *p);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::preset_normalized;

    #[test]
    fn constant_data_has_zero_error() {
        let u0 = SpectralField::constant(Grid::new(16).unwrap(), 0.7);
        let spec = ConvergenceSpec {
            t_end: 0.1,
            grids: vec![16, 32, 64],
            dts: vec![0.02, 0.01, 0.005],
        };
        let r = convergence_study(&u0, &Model::reformulated(preset_normalized()).unwrap(), &spec).unwrap();
        assert!(r.pass);
        assert!(r.metric("temporal_order").is_none());
        assert!(r.samples.iter().all(|d| *d < 1e-14));
    }

    #[test]
    fn spec_checks() {
        let u0 = SpectralField::constant(Grid::new(16).unwrap(), 0.0);
        let m = Model::reformulated(preset_normalized()).unwrap();
        let bad = [
            ConvergenceSpec { t_end: 0.1, grids: vec![16, 32], dts: vec![0.02, 0.01, 0.005] },
            ConvergenceSpec { t_end: 0.1, grids: vec![16, 32, 64], dts: vec![0.02, 0.01, 0.004] },
            ConvergenceSpec { t_end: 0.1, grids: vec![16, 32, 64], dts: vec![0.03, 0.015, 0.0075] },
        ];
        for spec in &bad {
            assert!(matches!(convergence_study(&u0, &m, spec), Err(ProbeError::InvalidInput(_))));
        }
    }
}
