use log::warn;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::diagnostics::{check_record, BlowUpInfo, BlowUpThresholds, DiagnosticsRecord};
use super::IntegrationError;
use crate::model::Model;
use crate::spectral::SpectralField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Running,
    Completed,
    BlowUpSuspected,
    NonFinite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationState {
    pub t: f64,
    pub u: SpectralField,
    /// Last step size taken (or proposed, before the first step).
    pub dt: f64,
    pub status: Status,
}

impl SimulationState {
    pub fn new(u: SpectralField) -> Self {
        Self {
            t: 0.0,
            u,
            dt: 0.0,
            status: Status::Running,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: SpectralField,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Controls {
    /// CFL factor for the advective step limit.
    pub cfl: f64,
    /// Spacing of emitted diagnostics; each step is also capped by it.
    pub sample_interval: f64,
    pub thresholds: BlowUpThresholds,
    /// Times in `[0, t_end]` at which the field is stored.
    pub snapshot_times: Vec<f64>,
    /// Exponent of the monitored Sobolev norm.
    pub sobolev_s: f64,
    /// Replaces the adaptive step when set (convergence studies).
    pub fixed_dt: Option<f64>,
    pub max_steps: usize,
}

impl Controls {
    pub fn new(sample_interval: f64) -> Self {
        Self {
            cfl: 0.5,
            sample_interval,
            thresholds: BlowUpThresholds::default(),
            snapshot_times: Vec::new(),
            sobolev_s: 2.0,
            fixed_dt: None,
            max_steps: 50_000_000,
        }
    }

    pub fn with_fixed_dt(mut self, dt: f64) -> Self {
        self.fixed_dt = Some(dt);
        self
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn with_thresholds(mut self, thresholds: BlowUpThresholds) -> Self {
        self.thresholds = thresholds;
        self
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    fn check(&self, t_end: f64) -> Result<(), IntegrationError> {
        let bad = |m: String| Err(IntegrationError::InvalidControls(m));
        if !(t_end > 0.0 && t_end.is_finite()) {
            return bad(format!("t_end must be positive, got {t_end}"));
        }
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return bad(format!("cfl must be positive, got {}", self.cfl));
        }
        if !(self.sample_interval > 0.0 && self.sample_interval.is_finite()) {
            return bad(format!("sample_interval must be positive, got {}", self.sample_interval));
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("fixed_dt must be positive, got {dt}"));
            }
        }
        if !self.sobolev_s.is_finite() {
            return bad("sobolev_s must be finite".into());
        }
        let th = &self.thresholds;
        if !(th.sup_ux_max > 0.0 && th.hs_max > 0.0 && th.tail_max > 0.0) {
            return bad("blow-up thresholds must be positive".into());
        }
        if let Some(bad_t) = self.snapshot_times.iter().find(|t| !(**t >= 0.0 && **t <= t_end)) {
            return bad(format!("snapshot time {bad_t} outside [0, {t_end}]"));
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive".into());
        }
        Ok(())
    }
}

/// What an integration run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub state: SimulationState,
    /// Records at `t = 0`, every sample time, `t_end`, and the detection instant if any.
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<Snapshot>,
    pub blowup: Option<BlowUpInfo>,
    pub steps: usize,
}

/// One classical RK4 step of `u_t = tendency(u)`.
///
/// A non-finite stage leaves `t` and `u` untouched and marks the state `NonFinite`.
pub fn step_rk4(state: &SimulationState, model: &Model, dt: f64) -> Result<SimulationState, IntegrationError> {
    if state.status != Status::Running {
        return Err(IntegrationError::InvalidControls(format!(
            "cannot step a state with status {:?}",
            state.status
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(IntegrationError::InvalidControls(format!("dt must be positive, got {dt}")));
    }
    match rk4(&state.u, dt, |v| model.tendency(v))? {
        Some(next) => Ok(SimulationState {
            t: state.t + dt,
            u: next,
            dt,
            status: Status::Running,
        }),
        None => Ok(SimulationState {
            status: Status::NonFinite,
            ..state.clone()
        }),
    }
}

/// Classical RK4 for `u_t = f(u)`; `None` as soon as a stage is non-finite.
pub(crate) fn rk4<E>(
    u: &SpectralField,
    dt: f64,
    f: impl Fn(&SpectralField) -> Result<SpectralField, E>,
) -> Result<Option<SpectralField>, E> {
    let k1 = f(u)?;
    if !k1.is_finite() {
        return Ok(None);
    }
    let k2 = f(&u.axpy(0.5 * dt, &k1))?;
    if !k2.is_finite() {
        return Ok(None);
    }
    let k3 = f(&u.axpy(0.5 * dt, &k2))?;
    if !k3.is_finite() {
        return Ok(None);
    }
    let k4 = f(&u.axpy(dt, &k3))?;
    let next = u
        .axpy(dt / 6.0, &k1)
        .axpy(dt / 3.0, &k2)
        .axpy(dt / 3.0, &k3)
        .axpy(dt / 6.0, &k4);
    Ok((k4.is_finite() && next.is_finite()).then_some(next))
}

/// `cfl · Δx / max(1, sup|a(u)|)`; for the local (`μ = 0`) form additionally
/// `cfl · (Δx/π)³ / D` with `D` the dispersive strength.
pub fn stable_dt(model: &Model, u: &SpectralField, cfl: f64) -> Result<f64, IntegrationError> {
    let dx = u.grid().dx();
    let speed = model.transport_speed(u)?;
    let mut dt = cfl * dx / speed.max(1.0);
    if model.is_local() {
        let d = model.dispersive_strength(u);
        if d > 0.0 {
            dt = dt.min(cfl * (dx / PI).powi(3) / d);
        }
    }
    Ok(dt)
}

struct Event {
    t: f64,
    sample: bool,
    snapshot: bool,
}

fn schedule(t_end: f64, controls: &Controls) -> Vec<Event> {
    let mut times: Vec<(f64, bool, bool)> = Vec::new();
    let h = controls.sample_interval;
    let mut k = 1u64;
    loop {
        let t = k as f64 * h;
        if t >= t_end * (1.0 - 1e-12) {
            break;
        }
        times.push((t, true, false));
        k += 1;
    }
    times.push((t_end, true, false));
    for &s in &controls.snapshot_times {
        if s > 0.0 {
            times.push((s, false, true));
        }
    }
    times.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut events: Vec<Event> = Vec::new();
    for (t, sample, snapshot) in times {
        match events.last_mut() {
            Some(last) if (t - last.t).abs() <= 1e-12 * t_end => {
                last.sample |= sample;
                last.snapshot |= snapshot;
            }
            _ => events.push(Event { t, sample, snapshot }),
        }
    }
    events
}

/// Evolves `u0` to `t_end`, landing exactly on every sample and snapshot time.
///
/// Diagnostics are checked after every step; on detection the run stops with
/// `BlowUpSuspected` (or `NonFinite`) and the last record carries the trigger time.
pub fn integrate(
    u0: &SpectralField,
    model: &Model,
    t_end: f64,
    controls: &Controls,
) -> Result<RunOutcome, IntegrationError> {
    controls.check(t_end)?;
    if !u0.is_finite() {
        return Err(IntegrationError::InvalidControls("initial field is not finite".into()));
    }
    if model.is_local() && controls.fixed_dt.is_none() {
        warn!("local dispersive form: explicit steps shrink like dx^3, expect a long run");
    }
    let s = controls.sobolev_s;
    let mean0 = u0.mean();
    let mut state = SimulationState::new(u0.clone());
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut steps = 0usize;

    let rec0 = DiagnosticsRecord::measure(0.0, u0, s, mean0);
    records.push(rec0);
    if controls.snapshot_times.contains(&0.0) {
        snapshots.push(Snapshot { t: 0.0, u: u0.clone() });
    }
    if let Some(info) = check_record(&rec0, &controls.thresholds) {
        state.status = Status::BlowUpSuspected;
        return Ok(RunOutcome {
            state,
            records,
            snapshots,
            blowup: Some(info),
            steps,
        });
    }

    for event in schedule(t_end, controls) {
        while state.t < event.t {
            let proposed = match controls.fixed_dt {
                Some(dt) => dt,
                None => stable_dt(model, &state.u, controls.cfl)?,
            }
            .min(controls.sample_interval);
            let remaining = event.t - state.t;
            let landing = state.t + proposed >= event.t - 1e-9 * proposed;
            let dt = if landing {
                remaining
            } else if controls.fixed_dt.is_none() && remaining - proposed < 0.5 * proposed {
                // Two equal steps instead of a full one followed by a sliver.
                0.5 * remaining
            } else {
                proposed
            };
            if steps >= controls.max_steps {
                return Err(IntegrationError::StepLimit(controls.max_steps));
            }
            let next = step_rk4(&state, model, dt)?;
            steps += 1;
            if next.status == Status::NonFinite {
                state.status = Status::NonFinite;
                return Ok(RunOutcome {
                    state,
                    records,
                    snapshots,
                    blowup: None,
                    steps,
                });
            }
            state = next;
            if landing {
                state.t = event.t;
            }
            let rec = DiagnosticsRecord::measure(state.t, &state.u, s, mean0);
            if !rec.is_finite() {
                state.status = Status::NonFinite;
                return Ok(RunOutcome {
                    state,
                    records,
                    snapshots,
                    blowup: None,
                    steps,
                });
            }
            if let Some(info) = check_record(&rec, &controls.thresholds) {
                state.status = Status::BlowUpSuspected;
                records.push(rec);
                return Ok(RunOutcome {
                    state,
                    records,
                    snapshots,
                    blowup: Some(info),
                    steps,
                });
            }
            if landing {
                if event.sample {
                    records.push(rec);
                }
                if event.snapshot {
                    snapshots.push(Snapshot {
                        t: state.t,
                        u: state.u.clone(),
                    });
                }
            }
        }
    }
    state.status = Status::Completed;
    Ok(RunOutcome {
        state,
        records,
        snapshots,
        blowup: None,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{preset_large_amplitude, preset_normalized, ModelCoefficients, RegimeParameters};
    use crate::spectral::{sobolev_norm, Grid};

    fn normalized() -> Model {
        Model::reformulated(preset_normalized()).unwrap()
    }

    fn cosine(n: usize, amp: f64) -> SpectralField {
        SpectralField::from_fn(Grid::new(n).unwrap(), |x| amp * (2.0 * PI * x).cos()).unwrap()
    }

    #[test]
    fn constant_is_fixed_point_of_a_step() {
        let u = SpectralField::constant(Grid::new(32).unwrap(), 0.7);
        let s = SimulationState::new(u.clone());
        let next = step_rk4(&s, &normalized(), 0.1).unwrap();
        assert_eq!(next.t, 0.1);
        assert!(sobolev_norm(&(&next.u - &u), 0.0) < 1e-15);
    }

    #[test]
    fn zero_stays_zero() {
        let s = SimulationState::new(SpectralField::zeros(Grid::new(16).unwrap()));
        let next = step_rk4(&s, &normalized(), 0.05).unwrap();
        assert_eq!(sobolev_norm(&next.u, 0.0), 0.0);
    }

    #[test]
    fn step_preconditions() {
        let mut s = SimulationState::new(SpectralField::zeros(Grid::new(16).unwrap()));
        assert!(step_rk4(&s, &normalized(), 0.0).is_err());
        s.status = Status::Completed;
        assert!(step_rk4(&s, &normalized(), 0.1).is_err());
    }

    #[test]
    fn overflowing_stage_is_non_finite() {
        let u = cosine(32, 1e200);
        let s = SimulationState::new(u.clone());
        let next = step_rk4(&s, &normalized(), 1.0).unwrap();
        assert_eq!(next.status, Status::NonFinite);
        assert_eq!(next.t, 0.0);
        assert_eq!(next.u, u);
    }

    #[test]
    fn invalid_controls() {
        let u = cosine(16, 0.1);
        let m = normalized();
        assert!(integrate(&u, &m, 0.0, &Controls::new(0.1)).is_err());
        assert!(integrate(&u, &m, 1.0, &Controls::new(0.1).with_cfl(0.0)).is_err());
        assert!(integrate(&u, &m, 1.0, &Controls::new(-1.0)).is_err());
        assert!(integrate(&u, &m, 1.0, &Controls::new(0.1).with_snapshots(vec![2.0])).is_err());
    }

    #[test]
    fn lands_on_samples_and_snapshots() {
        let u = cosine(32, 0.01);
        let c = Controls::new(0.25).with_snapshots(vec![0.0, 0.1, 0.6]);
        let out = integrate(&u, &normalized(), 1.0, &c).unwrap();
        assert_eq!(out.state.status, Status::Completed);
        assert_eq!(out.state.t, 1.0);
        let ts: Vec<f64> = out.records.iter().map(|r| r.t).collect();
        assert_eq!(ts, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let ss: Vec<f64> = out.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(ss, vec![0.0, 0.1, 0.6]);
    }

    #[test]
    fn small_cosine_conserves_mean_and_stays_resolved() {
        let u = cosine(64, 0.01);
        let out = integrate(&u, &normalized(), 1.0, &Controls::new(0.1)).unwrap();
        assert_eq!(out.state.status, Status::Completed);
        for r in &out.records {
            assert!(r.mean_drift.abs() <= 1e-12);
            assert!(r.tail <= 1e-8, "tail {}", r.tail);
        }
    }

    #[test]
    fn low_threshold_reports_blowup() {
        let k = preset_large_amplitude(&RegimeParameters::new(0.3, 0.3)).unwrap();
        let u = cosine(32, 0.5);
        let th = BlowUpThresholds {
            sup_ux_max: 1.0,
            ..Default::default()
        };
        let out = integrate(&u, &Model::reformulated(k).unwrap(), 1.0, &Controls::new(0.1).with_thresholds(th)).unwrap();
        assert_eq!(out.state.status, Status::BlowUpSuspected);
        assert_eq!(out.blowup.unwrap().t, 0.0);
    }

    #[test]
    fn local_form_step_scales_like_dx_cubed() {
        let kdv = ModelCoefficients {
            alpha1: -1.0,
            alpha2: -0.01,
            ..ModelCoefficients::zero()
        };
        let m = Model::direct(kdv).unwrap();
        let a = stable_dt(&m, &cosine(64, 0.0), 0.5).unwrap();
        let b = stable_dt(&m, &cosine(128, 0.0), 0.5).unwrap();
        assert!((a / b - 8.0).abs() < 1e-9);
    }
}
