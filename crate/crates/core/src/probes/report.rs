use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Outcome of one probe: the sampled quantities, their summary, and the verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probe: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub sample_count: usize,
    pub samples: Vec<f64>,
    pub max: f64,
    pub median: f64,
    pub pass: bool,
    /// Probe-specific scalars (ceilings, per-grid maxima, fitted orders, ...).
    #[serde(default)]
    pub metrics: BTreeMap<String, f64>,
}

impl ProbeReport {
    pub fn new(probe: impl Into<String>, seed: Option<u64>, samples: Vec<f64>, pass: bool) -> Self {
        let (max, median) = summarize(&samples);
        Self {
            probe: probe.into(),
            seed,
            sample_count: samples.len(),
            samples,
            max,
            median,
            pass,
            metrics: BTreeMap::new(),
        }
    }

    pub fn with_metric(mut self, key: impl Into<String>, value: f64) -> Self {
        self.metrics.insert(key.into(), value);
        self
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    /// Whether every reported number is finite.
    pub fn is_finite(&self) -> bool {
        self.max.is_finite()
            && self.median.is_finite()
            && self.samples.iter().all(|v| v.is_finite())
            && self.metrics.values().all(|v| v.is_finite())
    }
}

fn summarize(samples: &[f64]) -> (f64, f64) {
    if samples.is_empty() {
        return (0.0, 0.0);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    (sorted[n - 1], median)
}
