use serde::{Deserialize, Serialize};

use super::SimulationState;
use crate::spectral::{sobolev_norm, spectral_tail, sup_norm, sup_norm_dx, SpectralField};

/// Monitored quantities at one instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mean: f64,
    pub l2: f64,
    /// `‖u‖_s` at the configured exponent.
    pub hs: f64,
    pub sup_ux: f64,
    pub sup_u: f64,
    /// Largest coefficient magnitude among the top third of modes.
    pub tail: f64,
    /// `mean(t) - mean(0)`.
    pub mean_drift: f64,
}

impl DiagnosticsRecord {
    pub fn measure(t: f64, u: &SpectralField, sobolev_s: f64, initial_mean: f64) -> Self {
        let mean = u.mean();
        Self {
            t,
            mean,
            l2: sobolev_norm(u, 0.0),
            hs: sobolev_norm(u, sobolev_s),
            sup_ux: sup_norm_dx(u),
            sup_u: sup_norm(u),
            tail: spectral_tail(u),
            mean_drift: mean - initial_mean,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.t, self.mean, self.l2, self.hs, self.sup_ux, self.sup_u, self.tail]
            .iter()
            .all(|v| v.is_finite())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlowUpThresholds {
    pub sup_ux_max: f64,
    pub hs_max: f64,
    /// Relative to `‖u‖_0`.
    pub tail_max: f64,
}

impl Default for BlowUpThresholds {
    fn default() -> Self {
        Self {
            sup_ux_max: 1e4,
            hs_max: 1e8,
            tail_max: 1e-2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    SupUx,
    SobolevNorm,
    SpectralTail,
}

/// Which quantity crossed its threshold, and when.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowUpInfo {
    pub trigger: Trigger,
    pub value: f64,
    pub threshold: f64,
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Detection {
    Running,
    BlowUpSuspected(BlowUpInfo),
    NonFinite,
}

/// Threshold check on an already measured record.
pub fn check_record(rec: &DiagnosticsRecord, thresholds: &BlowUpThresholds) -> Option<BlowUpInfo> {
    let hit = |trigger, value: f64, threshold: f64| BlowUpInfo {
        trigger,
        value,
        threshold,
        t: rec.t,
    };
    if rec.sup_ux > thresholds.sup_ux_max {
        return Some(hit(Trigger::SupUx, rec.sup_ux, thresholds.sup_ux_max));
    }
    if rec.hs > thresholds.hs_max {
        return Some(hit(Trigger::SobolevNorm, rec.hs, thresholds.hs_max));
    }
    let tail_limit = thresholds.tail_max * rec.l2;
    if rec.tail > tail_limit {
        return Some(hit(Trigger::SpectralTail, rec.tail, tail_limit));
    }
    None
}

pub fn detect_blowup(state: &SimulationState, thresholds: &BlowUpThresholds, sobolev_s: f64) -> Detection {
    if !state.u.is_finite() {
        return Detection::NonFinite;
    }
    let rec = DiagnosticsRecord::measure(state.t, &state.u, sobolev_s, state.u.mean());
    if !rec.is_finite() {
        return Detection::NonFinite;
    }
    match check_record(&rec, thresholds) {
        Some(info) => Detection::BlowUpSuspected(info),
        None => Detection::Running,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::Status;
    use crate::spectral::Grid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn state(u: SpectralField) -> SimulationState {
        SimulationState {
            t: 0.3,
            u,
            dt: 0.01,
            status: Status::Running,
        }
    }

    #[test]
    fn smooth_small_data_keeps_running() {
        let g = Grid::new(64).unwrap();
        let u = SpectralField::from_fn(g, |x| 0.01 * (2.0 * PI * x).cos()).unwrap();
        assert_eq!(detect_blowup(&state(u), &BlowUpThresholds::default(), 2.0), Detection::Running);
    }

    #[test]
    fn steep_gradient_triggers_sup_ux() {
        let g = Grid::new(64).unwrap();
        let u = SpectralField::from_fn(g, |x| (2.0 * PI * 3.0 * x).sin()).unwrap();
        let th = BlowUpThresholds {
            sup_ux_max: 10.0,
            ..Default::default()
        };
        match detect_blowup(&state(u), &th, 2.0) {
            Detection::BlowUpSuspected(info) => {
                assert_eq!(info.trigger, Trigger::SupUx);
                assert!((info.value - 6.0 * PI).abs() < 1e-6);
                assert_eq!(info.t, 0.3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unresolved_tail_triggers() {
        let g = Grid::new(32).unwrap();
        let u = SpectralField::from_modes(g, &[(1, Complex64::new(0.5, 0.0)), (14, Complex64::new(0.1, 0.0))]).unwrap();
        match detect_blowup(&state(u), &BlowUpThresholds::default(), 0.0) {
            Detection::BlowUpSuspected(info) => assert_eq!(info.trigger, Trigger::SpectralTail),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_finite_is_not_blowup() {
        let g = Grid::new(16).unwrap();
        let mut c = vec![Complex64::new(0.0, 0.0); 16];
        c[0] = Complex64::new(f64::NAN, 0.0);
        let u = SpectralField::from_raw(g, c);
        assert_eq!(detect_blowup(&state(u), &BlowUpThresholds::default(), 2.0), Detection::NonFinite);
    }
}
