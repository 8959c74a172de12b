use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::multiplier::apply_rule;
use super::{SpectralError, SpectralField};

const MASS_TOL: f64 = 1e-10;
const BUMP_NORMALIZATION_TOL: f64 = 1e-12;
const BASE_NODES: usize = 4096;

type Kernel = dyn Fn(f64) -> f64 + Send + Sync;

/// A smooth unit-mass kernel supported in `[0, 1]`.
#[derive(Clone)]
pub struct Mollifier {
    name: String,
    kernel: Arc<Kernel>,
}

impl fmt::Debug for Mollifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mollifier").field("name", &self.name).finish()
    }
}

fn bump(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        (-1.0 / (x * (1.0 - x))).exp()
    }
}

/// Composite Simpson nodes and weights on `[0, 1]`; `count` is even.
fn nodes(count: usize) -> impl Iterator<Item = (f64, f64)> {
    let h = 1.0 / count as f64;
    (0..=count).map(move |j| {
        let w = if j == 0 || j == count {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        (j as f64 * h, w * h / 3.0)
    })
}

impl Mollifier {
    /// `c · exp(-1/(x(1-x)))` on `(0, 1)`, with `c` fixed numerically so the mass is one.
    pub fn standard_bump() -> Self {
        let raw = quadrature_mass(&bump, BASE_NODES);
        let c = 1.0 / raw;
        let m = Self {
            name: "standard_bump".into(),
            kernel: Arc::new(move |x| c * bump(x)),
        };
        debug_assert!((m.mass() - 1.0).abs() <= BUMP_NORMALIZATION_TOL);
        m
    }

    /// A user kernel on `[0, 1]`; it is evaluated only inside `[0, 1]` and must
    /// integrate to one within `1e-10`.
    pub fn from_fn(
        name: impl Into<String>,
        kernel: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, SpectralError> {
        let m = Self {
            name: name.into(),
            kernel: Arc::new(kernel),
        };
        let mass = m.mass();
        if !mass.is_finite() || (mass - 1.0).abs() > MASS_TOL {
            return Err(SpectralError::InvalidKernel(format!(
                "{} integrates to {mass}",
                m.name
            )));
        }
        Ok(m)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        if (0.0..=1.0).contains(&x) {
            (self.kernel)(x)
        } else {
            0.0
        }
    }

    pub fn mass(&self) -> f64 {
        quadrature_mass(&*self.kernel, BASE_NODES)
    }

    /// `ρ̂(ω) = ∫_0^1 ρ(y) e^{-2πiωy} dy` for each `ω`, normalized by the discrete mass
    /// so that `ρ̂(0) = 1` exactly.
    pub fn transform(&self, omegas: &[f64]) -> Vec<Complex64> {
        let w_max = omegas.iter().fold(0.0f64, |a, w| a.max(w.abs()));
        let count = BASE_NODES.max(16 * (w_max.ceil() as usize).div_ceil(2));
        let samples: Vec<(f64, f64)> = nodes(count).map(|(y, w)| (y, w * (self.kernel)(y))).collect();
        let mass: f64 = samples.iter().map(|(_, r)| r).sum();
        omegas
            .iter()
            .map(|&w| {
                if w == 0.0 {
                    return Complex64::new(1.0, 0.0);
                }
                let s: Complex64 = samples
                    .iter()
                    .map(|&(y, r)| Complex64::from_polar(r, -2.0 * PI * w * y))
                    .sum();
                s / mass
            })
            .collect()
    }
}

fn quadrature_mass(kernel: &Kernel, count: usize) -> f64 {
    nodes(count).map(|(y, w)| w * kernel(y)).sum()
}

/// Periodic convolution `ρ_n ∗ field` with `ρ_n(x) = n ρ(n x)`.
///
/// Mode `k` is scaled by `ρ̂(k / n)`.
pub fn mollify(field: &SpectralField, n: usize, kernel: &Mollifier) -> Result<SpectralField, SpectralError> {
    if n == 0 {
        return Err(SpectralError::InvalidParameter("mollifier index n must be >= 1".into()));
    }
    let grid = field.grid();
    let half = grid.nyquist();
    let modes: Vec<i64> = (0..=half).collect();
    let omegas: Vec<f64> = modes.iter().map(|&k| k as f64 / n as f64).collect();
    let sym = kernel.transform(&omegas);
    Ok(apply_rule(field, |k| {
        let s = sym[k.unsigned_abs() as usize];
        if k < 0 {
            s.conj()
        } else {
            s
        }
    }))
}
