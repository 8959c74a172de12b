use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use super::CliError;
use crate::integrate::{BlowUpThresholds, Controls};
use crate::model::{
    preset_large_amplitude, preset_normalized, preset_survey, Formulation, Model, ModelCoefficients, ModelError,
    RegimeParameters, SurveyModel,
};
use crate::spectral::{random_trig_polynomial, Grid, SpectralField};

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::ConfigInvalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    LargeAmplitude,
    Normalized,
    Kdv,
    Bbm,
    Ch,
    Dp,
    Se,
    Moderate,
    /// Coefficients given verbatim under `coefficients`.
    Raw,
}

/// A preset with its regime parameters, or raw coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub preset: PresetName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<ModelCoefficients>,
}

fn model_error(field: &str, e: ModelError) -> CliError {
    let kind = match &e {
        ModelError::InvalidMu(_) => "InvalidMu",
        ModelError::GammaRelationViolated { .. } => "GammaRelationViolated",
        ModelError::InvalidRegime(_) => "InvalidRegime",
        ModelError::InvalidCoefficients(_) => "InvalidCoefficients",
        ModelError::Spectral(_) => "Spectral",
    };
    invalid(field, format!("{kind}: {e}"))
}

impl ModelSpec {
    fn regime(&self) -> Result<RegimeParameters, CliError> {
        let eps = self.eps.ok_or_else(|| invalid("model.eps", "required by this preset"))?;
        let delta = self.delta.ok_or_else(|| invalid("model.delta", "required by this preset"))?;
        Ok(RegimeParameters {
            p: self.p,
            z0: self.z0,
            kappa: self.kappa,
            beta: self.beta,
            ..RegimeParameters::new(eps, delta)
        })
    }

    pub fn coefficients(&self) -> Result<ModelCoefficients, CliError> {
        if self.preset != PresetName::Raw && self.coefficients.is_some() {
            return Err(invalid("model.coefficients", "only allowed with preset \"raw\""));
        }
        let survey = |m| -> Result<ModelCoefficients, CliError> {
            let params = match m {
                SurveyModel::Ch | SurveyModel::Dp => RegimeParameters {
                    kappa: self.kappa,
                    ..RegimeParameters::new(self.eps.unwrap_or(1.0), self.delta.unwrap_or(1.0))
                },
                _ => self.regime()?,
            };
            preset_survey(m, &params).map_err(|e| model_error("model", e))
        };
        match self.preset {
            PresetName::LargeAmplitude => preset_large_amplitude(&self.regime()?).map_err(|e| model_error("model", e)),
            PresetName::Normalized => Ok(preset_normalized()),
            PresetName::Kdv => survey(SurveyModel::Kdv),
            PresetName::Bbm => survey(SurveyModel::Bbm),
            PresetName::Ch => survey(SurveyModel::Ch),
            PresetName::Dp => survey(SurveyModel::Dp),
            PresetName::Se => survey(SurveyModel::Se),
            PresetName::Moderate => survey(SurveyModel::Moderate),
            PresetName::Raw => self
                .coefficients
                .ok_or_else(|| invalid("model.coefficients", "required with preset \"raw\"")),
        }
    }

    pub fn build(&self, formulation: Formulation) -> Result<Model, CliError> {
        let k = self.coefficients()?;
        let field = if self.preset == PresetName::Raw {
            "model.coefficients"
        } else {
            "model"
        };
        Model::new(k, formulation).map_err(|e| match e {
            ModelError::InvalidMu(mu) if formulation == Formulation::Reformulated && mu == 0.0 => invalid(
                field,
                "InvalidMu: mu = 0 has no nonlocal reformulation; use formulation \"direct\" for the local form".to_string(),
            ),
            other => model_error(field, other),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub n: i64,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn one() -> f64 {
    1.0
}

fn mode_one() -> u32 {
    1
}

/// Initial data, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Constant {
        value: f64,
    },
    /// `offset + amplitude · cos(2π mode x)`.
    Cosine {
        amplitude: f64,
        #[serde(default = "mode_one")]
        mode: u32,
        #[serde(default)]
        offset: f64,
    },
    /// `offset + amplitude · sin(2π mode x)`.
    Sine {
        amplitude: f64,
        #[serde(default = "mode_one")]
        mode: u32,
        #[serde(default)]
        offset: f64,
    },
    /// Coefficients `û_n` for `n >= 0`; negative modes follow by symmetry.
    Modes {
        modes: Vec<ModeEntry>,
    },
    /// Random trigonometric polynomial with `|û_n| <= amplitude (1+|n|)^{-decay}`.
    Random {
        max_mode: usize,
        decay: f64,
        #[serde(default = "one")]
        amplitude: f64,
        /// Defaults to the run seed.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Physical samples, one per grid point: a `u` column (optionally after `x`),
    /// with an optional header line.
    SamplesFile {
        path: PathBuf,
    },
}

impl InitialData {
    /// Makes a relative samples path relative to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        if let InitialData::SamplesFile { path } = self {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }

    pub fn build(&self, grid: Grid, run_seed: u64, field: &str) -> Result<SpectralField, CliError> {
        let wrap = |e: crate::spectral::SpectralError| invalid(field, e.to_string());
        let harmonic = |amplitude: f64, mode: u32, offset: f64, f: fn(f64) -> f64| {
            if mode as i64 > grid.max_mode() {
                return Err(invalid(field, format!("mode {mode} not resolved on {} points", grid.n_points())));
            }
            let k = 2.0 * PI * mode as f64;
            SpectralField::from_fn(grid, |x| offset + amplitude * f(k * x)).map_err(wrap)
        };
        match self {
            InitialData::Constant { value } => Ok(SpectralField::constant(grid, *value)),
            InitialData::Cosine { amplitude, mode, offset } => harmonic(*amplitude, *mode, *offset, f64::cos),
            InitialData::Sine { amplitude, mode, offset } => harmonic(*amplitude, *mode, *offset, f64::sin),
            InitialData::Modes { modes } => {
                let list: Vec<(i64, Complex64)> = modes.iter().map(|m| (m.n, Complex64::new(m.re, m.im))).collect();
                SpectralField::from_modes(grid, &list).map_err(wrap)
            }
            InitialData::Random {
                max_mode,
                decay,
                amplitude,
                seed,
            } => Ok(random_trig_polynomial(grid, seed.unwrap_or(run_seed), *max_mode, *decay)
                .map_err(wrap)?
                .scaled(*amplitude)),
            InitialData::SamplesFile { path } => {
                let samples = read_samples(path).map_err(|m| invalid(&format!("{field}.path"), m))?;
                if samples.len() != grid.n_points() {
                    return Err(invalid(
                        &format!("{field}.path"),
                        format!("{} samples for a {}-point grid", samples.len(), grid.n_points()),
                    ));
                }
                SpectralField::from_physical(&samples, grid).map_err(wrap)
            }
        }
    }
}

fn read_samples(path: &Path) -> Result<Vec<f64>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let last = line.rsplit(',').next().unwrap_or(line).trim();
        match last.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(format!("{}:{}: cannot parse {last:?}", path.display(), i + 1)),
        }
    }
    Ok(out)
}

fn default_cfl() -> f64 {
    0.5
}

fn default_sobolev() -> f64 {
    2.0
}

/// A single simulation, as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    /// Number of grid points.
    pub grid: usize,
    pub initial: InitialData,
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Defaults to `t_end / 100`.
    #[serde(default)]
    pub sample_interval: Option<f64>,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default)]
    pub thresholds: BlowUpThresholds,
    #[serde(default = "default_sobolev")]
    pub sobolev_s: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub formulation: Formulation,
    #[serde(default)]
    pub fixed_dt: Option<f64>,
    /// Also write spectral coefficients next to every snapshot.
    #[serde(default)]
    pub dump_coefficients: bool,
    #[serde(default)]
    pub max_steps: Option<usize>,
}

/// Everything a run needs, built from a checked config.
pub struct PreparedRun {
    pub model: Model,
    pub u0: SpectralField,
    pub controls: Controls,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::ConfigSyntax(e.to_string()))
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval.unwrap_or(self.t_end / 100.0)
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::new(self.grid).map_err(|e| invalid("grid", e.to_string()))
    }

    /// Checks every range and builds the model, the initial field and the controls.
    pub fn prepare(&self) -> Result<PreparedRun, CliError> {
        let grid = self.grid()?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", format!("must be positive, got {}", self.t_end)));
        }
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return Err(invalid("cfl", format!("must be positive, got {}", self.cfl)));
        }
        let h = self.sample_interval();
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid("sample_interval", format!("must be positive, got {h}")));
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !(**t >= 0.0 && **t <= self.t_end)) {
            return Err(invalid("snapshot_times", format!("{t} lies outside [0, t_end]")));
        }
        let th = &self.thresholds;
        for (name, v) in [
            ("thresholds.sup_ux_max", th.sup_ux_max),
            ("thresholds.hs_max", th.hs_max),
            ("thresholds.tail_max", th.tail_max),
        ] {
            if !(v > 0.0) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !self.sobolev_s.is_finite() {
            return Err(invalid("sobolev_s", "must be finite"));
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(invalid("fixed_dt", format!("must be positive, got {dt}")));
            }
        }
        if self.max_steps == Some(0) {
            return Err(invalid("max_steps", "must be positive"));
        }
        let model = self.model.build(self.formulation)?;
        let u0 = self.initial.build(grid, self.seed, "initial")?;
        let mut controls = Controls::new(h).with_cfl(self.cfl).with_thresholds(self.thresholds);
        controls.snapshot_times = self.snapshot_times.clone();
        controls.sobolev_s = self.sobolev_s;
        controls.fixed_dt = self.fixed_dt;
        if let Some(m) = self.max_steps {
            controls.max_steps = m;
        }
        Ok(PreparedRun { model, u0, controls })
    }
}

/// Reads a JSON file, resolving relative data paths against its directory.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = read_text(path)?;
    let mut cfg = RunConfig::from_json(&text)?;
    cfg.initial.resolve_paths(config_dir(path));
    cfg.prepare()?;
    Ok(cfg)
}

pub(crate) fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub(crate) fn config_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "model": {"preset": "large_amplitude", "eps": 0.2, "delta": 0.1},
        "grid": 128,
        "initial": {"kind": "cosine", "amplitude": 0.1},
        "t_end": 1.0
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.cfl, 0.5);
        assert_eq!(cfg.sample_interval(), 0.01);
        assert_eq!(cfg.sobolev_s, 2.0);
        assert_eq!(cfg.thresholds, BlowUpThresholds::default());
        assert_eq!(cfg.formulation, Formulation::Reformulated);
        let run = cfg.prepare().unwrap();
        assert_eq!(run.u0.grid().n_points(), 128);
    }

    #[test]
    fn echo_round_trips() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        let echo = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&echo).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_syntax_errors() {
        let text = MINIMAL.replace("\"t_end\"", "\"t_ned\": 1, \"t_end\"");
        assert!(matches!(RunConfig::from_json(&text), Err(CliError::ConfigSyntax(_))));
        let nested = MINIMAL.replace("\"amplitude\"", "\"amplitud\": 1, \"amplitude\"");
        assert!(matches!(RunConfig::from_json(&nested), Err(CliError::ConfigSyntax(_))));
    }

    #[test]
    fn raw_mu_zero_is_invalid_mu() {
        let text = r#"{
            "model": {"preset": "raw", "coefficients": {"mu": 0, "alpha1": -1, "alpha2": 0, "alpha3": 0,
                      "beta1": 0, "beta2": 0, "gamma1": 0, "gamma2": 0, "gamma3": 0}},
            "grid": 32, "initial": {"kind": "constant", "value": 0.1}, "t_end": 1
        }"#;
        match RunConfig::from_json(text).unwrap().prepare() {
            Err(CliError::ConfigInvalid { field, message }) => {
                assert_eq!(field, "model.coefficients");
                assert!(message.contains("InvalidMu"), "{message}");
            }
            other => panic!("unexpected {:?}", other.err()),
        }
    }

    #[test]
    fn range_errors_name_the_field() {
        let text = MINIMAL.replace("\"t_end\": 1.0", "\"t_end\": -1.0");
        match RunConfig::from_json(&text).unwrap().prepare() {
            Err(CliError::ConfigInvalid { field, .. }) => assert_eq!(field, "t_end"),
            other => panic!("unexpected {:?}", other.err()),
        }
        let text = MINIMAL.replace("128", "100");
        assert!(RunConfig::from_json(&text).unwrap().prepare().is_ok());
        let text = MINIMAL.replace("128", "7");
        match RunConfig::from_json(&text).unwrap().prepare() {
            Err(CliError::ConfigInvalid { field, .. }) => assert_eq!(field, "grid"),
            other => panic!("unexpected {:?}", other.err()),
        }
    }

    #[test]
    fn samples_file_resolves_relative_path() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = String::from("x,u\n");
        for j in 0..16 {
            body.push_str(&format!("{},{}\n", j as f64 / 16.0, 0.25));
        }
        fs::write(dir.path().join("u0.csv"), body).unwrap();
        let cfg = r#"{"model": {"preset": "normalized"}, "grid": 16,
            "initial": {"kind": "samples_file", "path": "u0.csv"}, "t_end": 0.1}"#;
        let path = dir.path().join("run.json");
        fs::write(&path, cfg).unwrap();
        let loaded = load_config(&path).unwrap();
        let run = loaded.prepare().unwrap();
        assert!((run.u0.mean() - 0.25).abs() < 1e-15);
        let bad = cfg.replace("\"grid\": 16", "\"grid\": 32");
        fs::write(&path, bad).unwrap();
        assert!(matches!(load_config(&path), Err(CliError::ConfigInvalid { .. })));
    }
}
