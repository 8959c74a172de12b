use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::args::{Cli, Command, CommonArgs};
use super::config::{config_dir, read_text, InitialData, ModelSpec, RunConfig};
use super::output::{ensure_dir, write_amplitude, write_diagnostics, write_json, write_snapshot};
use super::{exit, CliError};
use crate::integrate::{integrate, BlowUpInfo, Status};
use crate::model::Formulation;
use crate::probes::{
    commutator_probe_on, continuous_dependence_experiment, convergence_study, dispersion_probe,
    mollified_data_experiment, product_probe_on, semigroup_probe_random, ConvergenceSpec, ProbeReport,
    DEFAULT_PROBE_GRIDS,
};
use crate::spectral::Grid;

/// Environment variable naming the directory under which outputs are created
/// when neither `--out` nor `output_dir` is given.
pub const OUTPUT_ROOT_ENV: &str = "LASW_OUTPUT_ROOT";
pub const DEFAULT_OUTPUT_ROOT: &str = "lasw-output";

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

/// Outcome of one `run`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub status: Status,
    pub t_final: f64,
    pub steps: usize,
    pub blowup: Option<BlowUpInfo>,
    /// Largest `|mean(t) - mean(0)|` over the emitted records.
    pub max_mean_drift: f64,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Completed => exit::OK,
            Status::BlowUpSuspected => exit::BLOW_UP,
            Status::Running | Status::NonFinite => exit::ERROR,
        }
    }
}

#[derive(Serialize)]
struct Timing {
    wall_seconds: f64,
}

#[derive(Serialize)]
struct RunRecord<'a> {
    #[serde(flatten)]
    summary: &'a RunSummary,
    config: &'a RunConfig,
    timing: Timing,
}

/// Runs a simulation and writes `diagnostics.csv`, `sup_u.csv`, the snapshots and `run.json`.
pub fn run_command(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary, CliError> {
    let started = Instant::now();
    let run = cfg.prepare()?;
    ensure_dir(out_dir)?;
    let outcome = integrate(&run.u0, &run.model, cfg.t_end, &run.controls).map_err(failed)?;
    write_diagnostics(&out_dir.join("diagnostics.csv"), &outcome.records)?;
    write_amplitude(&out_dir.join("sup_u.csv"), &outcome.records)?;
    for snap in &outcome.snapshots {
        write_snapshot(out_dir, snap, cfg.dump_coefficients)?;
    }
    let summary = RunSummary {
        status: outcome.state.status,
        t_final: outcome.state.t,
        steps: outcome.steps,
        blowup: outcome.blowup,
        max_mean_drift: outcome.records.iter().map(|r| r.mean_drift.abs()).fold(0.0, f64::max),
    };
    let record = RunRecord {
        summary: &summary,
        config: cfg,
        timing: Timing {
            wall_seconds: started.elapsed().as_secs_f64(),
        },
    };
    write_json(&out_dir.join("run.json"), &record)?;
    Ok(summary)
}

fn default_semigroup_grid() -> usize {
    4096
}

fn default_coefficient() -> InitialData {
    InitialData::Sine {
        amplitude: 1.0,
        mode: 1,
        offset: 0.0,
    }
}

fn default_semigroup_samples() -> usize {
    10
}

fn default_semigroup_max_mode() -> usize {
    3
}

fn default_t_end() -> f64 {
    1.0
}

fn default_estimate_samples() -> usize {
    100
}

fn default_grids() -> Vec<usize> {
    DEFAULT_PROBE_GRIDS.to_vec()
}

fn default_modes() -> Vec<u32> {
    vec![1]
}

fn default_amplitude() -> f64 {
    1e-8
}

fn default_s() -> f64 {
    2.0
}

/// One probe, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeSpec {
    /// Frozen-coefficient growth bound for `count` random `w0`.
    Semigroup {
        #[serde(default = "default_semigroup_grid")]
        grid: usize,
        #[serde(default = "default_coefficient")]
        coefficient: InitialData,
        #[serde(default = "default_semigroup_samples")]
        samples: usize,
        #[serde(default = "default_semigroup_max_mode")]
        max_mode: usize,
        #[serde(default = "default_t_end")]
        t_end: f64,
    },
    Commutator {
        t: f64,
        r: f64,
        #[serde(default = "default_estimate_samples")]
        samples: usize,
        #[serde(default = "default_grids")]
        grids: Vec<usize>,
    },
    Product {
        r: f64,
        t: f64,
        #[serde(default = "default_estimate_samples")]
        samples: usize,
        #[serde(default = "default_grids")]
        grids: Vec<usize>,
    },
    Dispersion {
        #[serde(default = "default_modes")]
        modes: Vec<u32>,
        eps: f64,
        delta: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    ContinuousDependence {
        model: ModelSpec,
        #[serde(default)]
        formulation: Formulation,
        grid: usize,
        initial: InitialData,
        sizes: Vec<f64>,
        t_end: f64,
        #[serde(default = "default_s")]
        s: f64,
    },
    MollifiedData {
        model: ModelSpec,
        #[serde(default)]
        formulation: Formulation,
        grid: usize,
        initial: InitialData,
        n_sequence: Vec<usize>,
        t_end: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub probe: ProbeSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn grid_of(n: usize, field: &str) -> Result<Grid, CliError> {
    Grid::new(n).map_err(|e| CliError::ConfigInvalid {
        field: field.into(),
        message: e.to_string(),
    })
}

impl ProbeConfig {
    fn resolve_paths(&mut self, base: &Path) {
        match &mut self.probe {
            ProbeSpec::Semigroup { coefficient, .. } => coefficient.resolve_paths(base),
            ProbeSpec::ContinuousDependence { initial, .. } | ProbeSpec::MollifiedData { initial, .. } => {
                initial.resolve_paths(base)
            }
            _ => {}
        }
    }

    fn override_grid(&mut self, n: usize) {
        match &mut self.probe {
            ProbeSpec::Semigroup { grid, .. }
            | ProbeSpec::ContinuousDependence { grid, .. }
            | ProbeSpec::MollifiedData { grid, .. } => *grid = n,
            _ => log::warn!("--grid has no effect on this probe"),
        }
    }
}

/// Runs a probe and writes `report.json`.
pub fn probe_command(cfg: &ProbeConfig, out_dir: &Path) -> Result<ProbeReport, CliError> {
    let seed = cfg.seed;
    let report = match &cfg.probe {
        ProbeSpec::Semigroup {
            grid,
            coefficient,
            samples,
            max_mode,
            t_end,
        } => {
            let g = grid_of(*grid, "probe.grid")?;
            let a = coefficient.build(g, seed, "probe.coefficient")?;
            semigroup_probe_random(&a, *samples, seed, *max_mode, *t_end).map_err(failed)?
        }
        ProbeSpec::Commutator { t, r, samples, grids } => {
            commutator_probe_on(*t, *r, *samples, seed, grids).map_err(failed)?
        }
        ProbeSpec::Product { r, t, samples, grids } => product_probe_on(*r, *t, *samples, seed, grids).map_err(failed)?,
        ProbeSpec::Dispersion {
            modes,
            eps,
            delta,
            amplitude,
        } => {
            let mut errors = Vec::with_capacity(modes.len());
            let mut parts = Vec::with_capacity(modes.len());
            for &n in modes {
                let r = dispersion_probe(n, *eps, *delta, *amplitude).map_err(failed)?;
                errors.push(r.samples[0]);
                parts.push((n, r));
            }
            let pass = !parts.is_empty() && parts.iter().all(|(_, r)| r.pass);
            let mut report = ProbeReport::new("dispersion", None, errors, pass);
            for (n, r) in parts {
                for key in ["measured_speed", "expected_speed"] {
                    report = report.with_metric(format!("{key}_n{n}"), r.metric(key).unwrap_or(f64::NAN));
                }
            }
            report
        }
        ProbeSpec::ContinuousDependence {
            model,
            formulation,
            grid,
            initial,
            sizes,
            t_end,
            s,
        } => {
            let m = model.build(*formulation)?;
            let u0 = initial.build(grid_of(*grid, "probe.grid")?, seed, "probe.initial")?;
            continuous_dependence_experiment(&u0, sizes, *t_end, *s, &m, seed).map_err(failed)?
        }
        ProbeSpec::MollifiedData {
            model,
            formulation,
            grid,
            initial,
            n_sequence,
            t_end,
        } => {
            let m = model.build(*formulation)?;
            let u0 = initial.build(grid_of(*grid, "probe.grid")?, seed, "probe.initial")?;
            mollified_data_experiment(&u0, n_sequence, *t_end, &m).map_err(failed)?
        }
    };
    ensure_dir(out_dir)?;
    write_json(&out_dir.join("report.json"), &report)?;
    Ok(report)
}

/// A self-convergence study; the initial data are built on the finest grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub formulation: Formulation,
    pub initial: InitialData,
    pub t_end: f64,
    pub grids: Vec<usize>,
    pub dts: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

pub fn converge_command(cfg: &ConvergeConfig, out_dir: &Path) -> Result<ProbeReport, CliError> {
    let m = cfg.model.build(cfg.formulation)?;
    let finest = *cfg.grids.iter().max().ok_or_else(|| CliError::ConfigInvalid {
        field: "grids".into(),
        message: "at least three grids are required".into(),
    })?;
    let u0 = cfg.initial.build(grid_of(finest, "grids")?, cfg.seed, "initial")?;
    let spec = ConvergenceSpec {
        t_end: cfg.t_end,
        grids: cfg.grids.clone(),
        dts: cfg.dts.clone(),
    };
    let report = convergence_study(&u0, &m, &spec).map_err(failed)?;
    ensure_dir(out_dir)?;
    write_json(&out_dir.join("report.json"), &report)?;
    Ok(report)
}

/// A family of runs: `base` with the value at JSON pointer `parameter` replaced by each of `values`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: Value,
    pub parameter: String,
    pub values: Vec<Value>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct SweepEntry {
    index: usize,
    value: Value,
    directory: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<RunSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn set_pointer(doc: &mut Value, pointer: &str, value: Value) -> Result<(), CliError> {
    let bad = || CliError::ConfigInvalid {
        field: "parameter".into(),
        message: format!("{pointer:?} does not address a field of base"),
    };
    if let Some(slot) = doc.pointer_mut(pointer) {
        *slot = value;
        return Ok(());
    }
    let (parent, key) = pointer.rsplit_once('/').ok_or_else(bad)?;
    let key = key.replace("~1", "/").replace("~0", "~");
    match doc.pointer_mut(parent) {
        Some(Value::Object(map)) => {
            map.insert(key, value);
            Ok(())
        }
        _ => Err(bad()),
    }
}

/// Runs every sweep point in parallel; each writes its own `run_NNN` directory.
///
/// The exit code is 1 if any point failed, else 2 if any blew up, else 0.
pub fn sweep_command(cfg: &SweepConfig, base_dir: &Path, out_dir: &Path) -> Result<i32, CliError> {
    let mut points = Vec::with_capacity(cfg.values.len());
    for value in &cfg.values {
        let mut doc = cfg.base.clone();
        set_pointer(&mut doc, &cfg.parameter, value.clone())?;
        let mut run = RunConfig::from_json(&doc.to_string())?;
        run.initial.resolve_paths(base_dir);
        points.push(run);
    }
    ensure_dir(out_dir)?;
    let entries: Vec<SweepEntry> = points
        .par_iter()
        .enumerate()
        .map(|(index, run)| {
            let directory = format!("run_{index:03}");
            let result = run_command(run, &out_dir.join(&directory));
            let (summary, error) = match result {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SweepEntry {
                index,
                value: cfg.values[index].clone(),
                directory,
                summary,
                error,
            }
        })
        .collect();
    let code = if entries.iter().any(|e| e.summary.as_ref().is_none_or(|s| s.exit_code() == exit::ERROR)) {
        exit::ERROR
    } else if entries.iter().any(|e| e.summary.as_ref().is_some_and(|s| s.exit_code() == exit::BLOW_UP)) {
        exit::BLOW_UP
    } else {
        exit::OK
    };
    #[derive(Serialize)]
    struct SweepRecord<'a> {
        parameter: &'a str,
        runs: Vec<SweepEntry>,
    }
    write_json(
        &out_dir.join("sweep.json"),
        &SweepRecord {
            parameter: &cfg.parameter,
            runs: entries,
        },
    )?;
    Ok(code)
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::ConfigSyntax(e.to_string()))
}

/// `--out`, else the config's `output_dir`, else `<root>/<config stem>` with the
/// root from `LASW_OUTPUT_ROOT` or `lasw-output`.
fn output_dir(args: &CommonArgs, configured: Option<&PathBuf>) -> PathBuf {
    if let Some(out) = &args.out {
        return out.clone();
    }
    if let Some(dir) = configured {
        return dir.clone();
    }
    let root = args
        .output_root
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT));
    let stem = args
        .config
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    root.join(stem)
}

fn report_line(args: &CommonArgs, line: String) {
    if !args.quiet {
        println!("{line}");
    }
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Run(args) => {
            let text = read_text(&args.config)?;
            let mut cfg = RunConfig::from_json(&text)?;
            cfg.initial.resolve_paths(config_dir(&args.config));
            if let Some(seed) = args.seed {
                cfg.seed = seed;
            }
            if let Some(n) = args.grid {
                cfg.grid = n;
            }
            let out = output_dir(args, cfg.output_dir.as_ref());
            let summary = run_command(&cfg, &out)?;
            let detail = match &summary.blowup {
                Some(b) => format!(" ({:?} = {:.6e} > {:.6e} at t = {})", b.trigger, b.value, b.threshold, b.t),
                None => String::new(),
            };
            report_line(
                args,
                format!(
                    "{:?} at t = {} after {} steps{detail}; output in {}",
                    summary.status,
                    summary.t_final,
                    summary.steps,
                    out.display()
                ),
            );
            Ok(summary.exit_code())
        }
        Command::Probe(args) => {
            let text = read_text(&args.config)?;
            let mut cfg: ProbeConfig = parse(&text)?;
            cfg.resolve_paths(config_dir(&args.config));
            if let Some(seed) = args.seed {
                cfg.seed = seed;
            }
            if let Some(n) = args.grid {
                cfg.override_grid(n);
            }
            let out = output_dir(args, cfg.output_dir.as_ref());
            let report = probe_command(&cfg, &out)?;
            report_line(
                args,
                format!(
                    "{} probe: {} (max {:.6e}, median {:.6e}); report in {}",
                    report.probe,
                    if report.pass { "pass" } else { "FAIL" },
                    report.max,
                    report.median,
                    out.display()
                ),
            );
            Ok(if report.pass { exit::OK } else { exit::PROBE_FAIL })
        }
        Command::Converge(args) => {
            let text = read_text(&args.config)?;
            let mut cfg: ConvergeConfig = parse(&text)?;
            cfg.initial.resolve_paths(config_dir(&args.config));
            if let Some(seed) = args.seed {
                cfg.seed = seed;
            }
            if args.grid.is_some() {
                log::warn!("--grid has no effect on a convergence study");
            }
            let out = output_dir(args, cfg.output_dir.as_ref());
            let report = converge_command(&cfg, &out)?;
            let order = report
                .metric("temporal_order")
                .map_or("at roundoff".to_string(), |p| format!("{p:.4}"));
            report_line(
                args,
                format!(
                    "convergence: {} (temporal order {order}); report in {}",
                    if report.pass { "pass" } else { "FAIL" },
                    out.display()
                ),
            );
            Ok(if report.pass { exit::OK } else { exit::PROBE_FAIL })
        }
        Command::Sweep(args) => {
            let text = read_text(&args.config)?;
            let mut cfg: SweepConfig = parse(&text)?;
            if let Some(seed) = args.seed {
                set_pointer(&mut cfg.base, "/seed", Value::from(seed))?;
            }
            if let Some(n) = args.grid {
                set_pointer(&mut cfg.base, "/grid", Value::from(n))?;
            }
            let out = output_dir(args, cfg.output_dir.as_ref());
            let code = sweep_command(&cfg, config_dir(&args.config), &out)?;
            report_line(args, format!("sweep of {} runs finished; summary in {}", cfg.values.len(), out.display()));
            Ok(code)
        }
    }
}

/// Runs the parsed command line and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit::ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn pointer_insertion() {
        let mut doc = json!({"model": {"preset": "large_amplitude", "eps": 0.1}});
        set_pointer(&mut doc, "/model/eps", json!(0.5)).unwrap();
        set_pointer(&mut doc, "/model/delta", json!(0.2)).unwrap();
        assert_eq!(doc["model"]["eps"], json!(0.5));
        assert_eq!(doc["model"]["delta"], json!(0.2));
        assert!(set_pointer(&mut doc, "/nope/x", json!(1)).is_err());
    }

    #[test]
    fn probe_spec_parsing() {
        let cfg: ProbeConfig = parse(r#"{"probe": {"kind": "commutator", "t": 1, "r": 2}, "seed": 3}"#).unwrap();
        match cfg.probe {
            ProbeSpec::Commutator { samples, grids, .. } => {
                assert_eq!(samples, 100);
                assert_eq!(grids, vec![128, 256]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse::<ProbeConfig>(r#"{"probe": {"kind": "commutator", "t": 1, "r": 2, "extra": 0}}"#).is_err());
    }

    #[test]
    fn exit_codes() {
        let s = |status| RunSummary {
            status,
            t_final: 0.0,
            steps: 0,
            blowup: None,
            max_mean_drift: 0.0,
        };
        assert_eq!(s(Status::Completed).exit_code(), 0);
        assert_eq!(s(Status::BlowUpSuspected).exit_code(), 2);
        assert_eq!(s(Status::NonFinite).exit_code(), 1);
    }
}
