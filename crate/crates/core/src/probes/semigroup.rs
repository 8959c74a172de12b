use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ProbeError, ProbeReport};
use crate::integrate::{rk4, BlowUpThresholds};
use crate::spectral::{
    dealiased_product, derivative, random_trig_polynomial, sobolev_norm, spectral_tail, sup_norm, sup_norm_dx,
    Grid, SpectralField,
};

/// Allowed relative excess of `‖w(t)‖_0` over `e^{ωt}‖w0‖_0`.
pub const SEMIGROUP_TOL: f64 = 1e-6;

const SAMPLE_TIMES: usize = 100;
const CFL: f64 = 0.5;

/// Coefficients below this fraction of the largest are dropped from a sparse coefficient.
const SPARSE_CUTOFF: f64 = 1e-15;
const SPARSE_MAX_MODES: usize = 32;

/// `w ↦ P(a w_x)` on the nonnegative half of the spectrum, for a coefficient with
/// few significant modes. `P` truncates to `|n| < N/2`; the Nyquist coefficient
/// of `w` is invariant because the derivative maps it to zero.
struct SparseGenerator {
    /// `(m, â_m)` over the significant modes of `a`.
    modes: Vec<(i64, Complex64)>,
    half: usize,
    /// `iξ_j ŵ_j` for `j` in `-(half-1)..half`, offset by `half - 1`.
    scratch: Vec<Complex64>,
}

impl SparseGenerator {
    fn new(a: &SpectralField) -> Option<Self> {
        let grid = a.grid();
        let largest = a.coefficients().iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let modes: Vec<(i64, Complex64)> = grid
            .modes()
            .map(|n| (n, a.coefficient(n)))
            .filter(|(_, c)| c.norm() > SPARSE_CUTOFF * largest)
            .collect();
        if modes.len() > SPARSE_MAX_MODES || modes.iter().any(|(n, _)| *n == -grid.nyquist()) {
            return None;
        }
        let half = grid.n_points() / 2;
        Some(Self {
            modes,
            half,
            scratch: vec![Complex64::new(0.0, 0.0); 2 * half - 1],
        })
    }

    fn apply(&mut self, h: &[Complex64], out: &mut [Complex64]) {
        let half = self.half as i64;
        let off = half - 1;
        for j in 0..half {
            let d = Complex64::new(0.0, Grid::wavenumber(j)) * h[j as usize];
            self.scratch[(j + off) as usize] = d;
            self.scratch[(off - j) as usize] = d.conj();
        }
        for n in 0..half {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(m, am) in &self.modes {
                let j = n - m;
                if j.abs() < half {
                    acc += am * self.scratch[(j + off) as usize];
                }
            }
            out[n as usize] = acc;
        }
        out[0].im = 0.0;
    }

    /// First `half` coefficients of `w`, i.e. modes `0..N/2`.
    fn split(w: &SpectralField) -> Vec<Complex64> {
        w.coefficients()[..w.grid().n_points() / 2].to_vec()
    }

    fn join(template: &SpectralField, h: &[Complex64]) -> SpectralField {
        let grid = template.grid();
        let n = grid.n_points();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        coeffs[..n / 2].copy_from_slice(h);
        coeffs[n / 2] = template.coefficients()[n / 2];
        for k in 1..n / 2 {
            coeffs[n - k] = h[k].conj();
        }
        SpectralField::from_coefficients(grid, coeffs).expect("Hermitian by construction")
    }

    /// `steps` RK4 steps, written as the quartic Taylor polynomial of `e^{dt L}`
    /// (identical for a linear autonomous system).
    fn advance(&mut self, h: &mut [Complex64], dt: f64, steps: usize) {
        let len = h.len();
        let mut v = vec![vec![Complex64::new(0.0, 0.0); len]; 4];
        let weights = [dt, dt * dt / 2.0, dt.powi(3) / 6.0, dt.powi(4) / 24.0];
        for _ in 0..steps {
            self.apply(h, &mut v[0]);
            for k in 1..4 {
                let (done, rest) = v.split_at_mut(k);
                self.apply(&done[k - 1], &mut rest[0]);
            }
            for (i, hi) in h.iter_mut().enumerate() {
                *hi += v[0][i] * weights[0] + v[1][i] * weights[1] + v[2][i] * weights[2] + v[3][i] * weights[3];
            }
        }
    }
}

/// Evolves `w_t = a(x) w_x` and compares `‖w(t)‖_0` with `e^{ωt}‖w0‖_0`,
/// `ω = ½ sup|a_x|`, at 100 evenly spaced times in `(0, t_end]`.
///
/// Samples are `‖w(t)‖_0 / (e^{ωt}‖w0‖_0)`; the probe passes when none exceeds `1 + 1e-6`.
/// A zero `w0` passes with no samples.
pub fn semigroup_probe(a: &SpectralField, w0: &SpectralField, t_end: f64) -> Result<ProbeReport, ProbeError> {
    a.check_same_grid(w0)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(ProbeError::InvalidInput(format!("t_end must be positive, got {t_end}")));
    }
    if !a.is_finite() || !w0.is_finite() {
        return Err(ProbeError::InvalidInput("coefficient and data must be finite".into()));
    }
    let omega = 0.5 * sup_norm_dx(a);
    let norm0 = sobolev_norm(w0, 0.0);
    if norm0 == 0.0 {
        return Ok(ProbeReport::new("semigroup", None, Vec::new(), true).with_metric("omega", omega));
    }
    let grid = a.grid();
    let dt_max = CFL * grid.dx() / sup_norm(a).max(1.0);
    let per_sample = ((t_end / SAMPLE_TIMES as f64) / dt_max).ceil().max(1.0) as usize;
    let total = per_sample * SAMPLE_TIMES;
    let dt = t_end / total as f64;
    let tail_max = BlowUpThresholds::default().tail_max;
    let non_finite = || ProbeError::ProbeUnresolved("non-finite field in frozen-coefficient evolution".into());

    let rhs = |w: &SpectralField| dealiased_product(a, &derivative(w, 1));
    let mut sparse = SparseGenerator::new(a);
    let mut half = SparseGenerator::split(w0);
    let mut w = w0.clone();
    let mut samples = Vec::with_capacity(SAMPLE_TIMES);
    for k in 1..=SAMPLE_TIMES {
        match sparse.as_mut() {
            Some(gen) => {
                gen.advance(&mut half, dt, per_sample);
                w = SparseGenerator::join(w0, &half);
            }
            None => {
                for _ in 0..per_sample {
                    w = rk4(&w, dt, rhs)?.ok_or_else(non_finite)?;
                }
            }
        }
        if !w.is_finite() {
            return Err(non_finite());
        }
        let t = t_end * k as f64 / SAMPLE_TIMES as f64;
        let norm = sobolev_norm(&w, 0.0);
        if spectral_tail(&w) > tail_max * norm {
            return Err(ProbeError::ProbeUnresolved(format!(
                "spectral tail above {tail_max} of the L2 norm at t = {t}; refine the grid"
            )));
        }
        samples.push(norm / ((omega * t).exp() * norm0));
    }
    let max = samples.iter().cloned().fold(0.0, f64::max);
    Ok(ProbeReport::new("semigroup", None, samples, max <= 1.0 + SEMIGROUP_TOL)
        .with_metric("omega", omega)
        .with_metric("t_end", t_end)
        .with_metric("dt", dt)
        .with_metric("n_points", grid.n_points() as f64))
}

/// [`semigroup_probe`] for `count` random `w0` with modes up to `max_mode` and
/// coefficients decaying like `(1+|n|)^{-1}`.
///
/// Samples are the per-`w0` maximal ratios.
pub fn semigroup_probe_random(
    a: &SpectralField,
    count: usize,
    seed: u64,
    max_mode: usize,
    t_end: f64,
) -> Result<ProbeReport, ProbeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..count).map(|_| rng.gen()).collect();
    let reports = seeds
        .par_iter()
        .map(|&s| {
            let w0 = random_trig_polynomial(a.grid(), s, max_mode, 1.0)?;
            semigroup_probe(a, &w0, t_end)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let samples: Vec<f64> = reports.iter().map(|r| r.max).collect();
    let pass = reports.iter().all(|r| r.pass);
    let omega = 0.5 * sup_norm_dx(a);
    Ok(ProbeReport::new("semigroup", Some(seed), samples, pass)
        .with_metric("omega", omega)
        .with_metric("t_end", t_end)
        .with_metric("n_points", a.grid().n_points() as f64))
}
