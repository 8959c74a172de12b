use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ProbeError, ProbeReport};
use crate::spectral::multiplier::lambda_symbol;
use crate::spectral::{random_trig_polynomial, sobolev_norm, Grid, SpectralError, SpectralField};

/// Grids on which the sampled ratios are compared.
pub const DEFAULT_PROBE_GRIDS: [usize; 2] = [128, 256];

/// Allowed change of the maximal ratio between consecutive grids.
const STABILITY_FACTOR: f64 = 2.0;

/// Nonzero modes of a field on the circle; the Nyquist coefficient is split
/// evenly between `±N/2`.
fn active_modes(f: &SpectralField) -> Vec<(i64, Complex64)> {
    let grid = f.grid();
    let nyq = grid.nyquist();
    let mut out = Vec::new();
    for n in grid.modes() {
        let c = f.coefficient(n);
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        if n == -nyq {
            out.push((-nyq, 0.5 * c));
            out.push((nyq, 0.5 * c));
        } else {
            out.push((n, c));
        }
    }
    out
}

/// `Σ_n w(n) |Σ_m ĝ_m ĥ_{n-m} k(n, m)|²` by direct convolution, so no mode of the
/// product is lost to the grid.
fn weighted_convolution_norm(
    g: &SpectralField,
    h: &SpectralField,
    kernel: impl Fn(i64, i64) -> f64,
    weight: impl Fn(i64) -> f64,
) -> f64 {
    let gm = active_modes(g);
    let hm = active_modes(h);
    let span = g.grid().nyquist().max(h.grid().nyquist());
    let offset = 2 * span;
    let mut acc = vec![Complex64::new(0.0, 0.0); (4 * span + 1) as usize];
    for &(m, gc) in &gm {
        for &(j, hc) in &hm {
            let n = m + j;
            let k = kernel(n, m);
            if k != 0.0 {
                acc[(n + offset) as usize] += gc * hc * k;
            }
        }
    }
    acc.iter()
        .enumerate()
        .map(|(i, c)| weight(i as i64 - offset) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn check_grids(g: &SpectralField, h: &SpectralField) -> Result<(), ProbeError> {
    g.check_same_grid(h).map_err(ProbeError::from)
}

/// `‖[Λ^t, M_g] h‖_0`, computed mode by mode as
/// `Σ_m ĝ_m ĥ_{n-m} (σ_t(n) - σ_t(n-m))`; exactly zero for constant `g` or `t = 0`.
pub fn commutator_norm(g: &SpectralField, h: &SpectralField, t: f64) -> Result<f64, ProbeError> {
    check_grids(g, h)?;
    Ok(weighted_convolution_norm(
        g,
        h,
        |n, m| lambda_symbol(n, t, 1.0) - lambda_symbol(n - m, t, 1.0),
        |_| 1.0,
    ))
}

/// `‖[Λ^t, M_g] h‖_0 / (‖g‖_{r+1} ‖h‖_{t-1})`, zero when the commutator vanishes.
pub fn commutator_ratio(g: &SpectralField, h: &SpectralField, t: f64, r: f64) -> Result<f64, ProbeError> {
    let num = commutator_norm(g, h, t)?;
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok(num / (sobolev_norm(g, r + 1.0) * sobolev_norm(h, t - 1.0)))
}

/// `‖f g‖_t / (‖f‖_r ‖g‖_t)`, zero when `fg = 0`.
pub fn product_ratio(f: &SpectralField, g: &SpectralField, r: f64, t: f64) -> Result<f64, ProbeError> {
    check_grids(f, g)?;
    let num = weighted_convolution_norm(f, g, |_, _| 1.0, |n| {
        let xi = Grid::wavenumber(n);
        (1.0 + xi * xi).powf(t)
    });
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok(num / (sobolev_norm(f, r) * sobolev_norm(g, t)))
}

fn check_commutator_exponents(t: f64, r: f64) -> Result<(), ProbeError> {
    if !(r > 0.5 && r.is_finite()) {
        return Err(ProbeError::InvalidExponents(format!("r must exceed 1/2, got {r}")));
    }
    if !(t > -0.5 && t <= r + 1.0) {
        return Err(ProbeError::InvalidExponents(format!("t must lie in (-1/2, r+1] = (-1/2, {}], got {t}", r + 1.0)));
    }
    Ok(())
}

fn check_product_exponents(r: f64, t: f64) -> Result<(), ProbeError> {
    if !(r > 0.5 && r.is_finite()) {
        return Err(ProbeError::InvalidExponents(format!("r must exceed 1/2, got {r}")));
    }
    if !(t > -r && t <= r) {
        return Err(ProbeError::InvalidExponents(format!("t must lie in (-r, r] = ({}, {r}], got {t}", -r)));
    }
    Ok(())
}

/// Samples a ratio on every grid with per-sample seeds shared across grids, and
/// passes when the maximal ratio changes by less than a factor 2 between
/// consecutive grids.
fn sampled_stability(
    name: &str,
    samples: usize,
    seed: u64,
    grids: &[usize],
    ratio: impl Fn(Grid, u64, u64) -> Result<f64, ProbeError> + Sync,
) -> Result<ProbeReport, ProbeError> {
    if samples == 0 {
        return Err(ProbeError::InvalidInput("at least one sample is required".into()));
    }
    if grids.len() < 2 || grids.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ProbeError::InvalidInput("need at least two increasing grid sizes".into()));
    }
    let grids: Vec<Grid> = grids.iter().map(|&n| Grid::new(n)).collect::<Result<_, SpectralError>>()?;
    if grids[0].n_points() < 8 {
        return Err(ProbeError::InvalidInput("grids must have at least 8 points".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<(u64, u64)> = (0..samples).map(|_| (rng.gen(), rng.gen())).collect();
    let mut per_grid: Vec<Vec<f64>> = Vec::with_capacity(grids.len());
    for &grid in &grids {
        let ratios = seeds
            .par_iter()
            .map(|&(a, b)| ratio(grid, a, b))
            .collect::<Result<Vec<f64>, _>>()?;
        per_grid.push(ratios);
    }
    let maxima: Vec<f64> = per_grid.iter().map(|v| v.iter().cloned().fold(0.0, f64::max)).collect();
    let worst_change = maxima
        .windows(2)
        .map(|w| if w[0] == 0.0 && w[1] == 0.0 { 1.0 } else { (w[1] / w[0]).max(w[0] / w[1]) })
        .fold(1.0, f64::max);
    let finite = per_grid.iter().flatten().all(|v| v.is_finite());
    let pass = finite && worst_change < STABILITY_FACTOR;
    let mut report = ProbeReport::new(name, Some(seed), per_grid.pop().expect("two grids"), pass)
        .with_metric("max_change_factor", worst_change);
    for (grid, m) in grids.iter().zip(&maxima) {
        report = report.with_metric(format!("max_ratio_n{}", grid.n_points()), *m);
    }
    Ok(report)
}

/// Random fields for the probes live on modes `|n| <= N/4 - 1`.
fn probe_max_mode(grid: Grid) -> usize {
    grid.n_points() / 4 - 1
}

/// Samples `‖[Λ^t, M_g] h‖_0 / (‖g‖_{r+1}‖h‖_{t-1})` with `g` decaying like
/// `(1+|n|)^{-(r+2)}` and `h` like `(1+|n|)^{-max(t,0)}`, on the default grids.
pub fn commutator_probe(t: f64, r: f64, samples: usize, seed: u64) -> Result<ProbeReport, ProbeError> {
    commutator_probe_on(t, r, samples, seed, &DEFAULT_PROBE_GRIDS)
}

pub fn commutator_probe_on(
    t: f64,
    r: f64,
    samples: usize,
    seed: u64,
    grids: &[usize],
) -> Result<ProbeReport, ProbeError> {
    check_commutator_exponents(t, r)?;
    let report = sampled_stability("commutator", samples, seed, grids, |grid, sg, sh| {
        let k = probe_max_mode(grid);
        let g = random_trig_polynomial(grid, sg, k, r + 2.0)?;
        let h = random_trig_polynomial(grid, sh, k, t.max(0.0))?;
        commutator_ratio(&g, &h, t, r)
    })?;
    Ok(report.with_metric("t", t).with_metric("r", r))
}

/// Samples `‖fg‖_t / (‖f‖_r‖g‖_t)` with `f` decaying like `(1+|n|)^{-(r+1)}`
/// and `g` like `(1+|n|)^{-max(t+1,0)}`, on the default grids.
pub fn product_probe(r: f64, t: f64, samples: usize, seed: u64) -> Result<ProbeReport, ProbeError> {
    product_probe_on(r, t, samples, seed, &DEFAULT_PROBE_GRIDS)
}

pub fn product_probe_on(r: f64, t: f64, samples: usize, seed: u64, grids: &[usize]) -> Result<ProbeReport, ProbeError> {
    check_product_exponents(r, t)?;
    let report = sampled_stability("product", samples, seed, grids, |grid, sf, sg| {
        let k = probe_max_mode(grid);
        let f = random_trig_polynomial(grid, sf, k, r + 1.0)?;
        let g = random_trig_polynomial(grid, sg, k, (t + 1.0).max(0.0))?;
        product_ratio(&f, &g, r, t)
    })?;
    Ok(report.with_metric("t", t).with_metric("r", r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{dealiased_product, lambda_pow};
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(64).unwrap()
    }

    #[test]
    fn commutator_matches_fft_route() {
        // Oracle: Λ^t(gh) - g Λ^t h with an exact (band-limited) dealiased product.
        let g = random_trig_polynomial(grid(), 1, 15, 3.0).unwrap();
        let h = random_trig_polynomial(grid(), 2, 15, 1.0).unwrap();
        for t in [-0.4, 0.5, 1.0, 2.5] {
            let lhs = lambda_pow(&dealiased_product(&g, &h).unwrap(), t, 1.0).unwrap();
            let rhs = dealiased_product(&g, &lambda_pow(&h, t, 1.0).unwrap()).unwrap();
            let expect = sobolev_norm(&(&lhs - &rhs), 0.0);
            let got = commutator_norm(&g, &h, t).unwrap();
            assert!((got - expect).abs() <= 1e-12 * (1.0 + expect), "t={t}: {got} vs {expect}");
        }
    }

    #[test]
    fn commutator_vanishes_for_constant_g_and_t_zero() {
        let h = random_trig_polynomial(grid(), 4, 15, 0.5).unwrap();
        let c = SpectralField::constant(grid(), -1.3);
        assert_eq!(commutator_norm(&c, &h, 1.7).unwrap(), 0.0);
        assert_eq!(commutator_ratio(&c, &h, 1.7, 2.0).unwrap(), 0.0);
        let g = random_trig_polynomial(grid(), 5, 15, 3.0).unwrap();
        assert_eq!(commutator_norm(&g, &h, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn product_ratio_trivial_cases() {
        let g = random_trig_polynomial(grid(), 6, 15, 2.0).unwrap();
        let one = SpectralField::constant(grid(), 1.0);
        assert!((product_ratio(&one, &g, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(product_ratio(&g, &SpectralField::zeros(grid()), 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn product_matches_physical_product() {
        let f = SpectralField::from_fn(grid(), |x| (2.0 * PI * x).cos()).unwrap();
        let g = SpectralField::from_fn(grid(), |x| (4.0 * PI * x).sin()).unwrap();
        let fg = dealiased_product(&f, &g).unwrap();
        let expect = sobolev_norm(&fg, 1.0) / (sobolev_norm(&f, 1.0) * sobolev_norm(&g, 1.0));
        assert!((product_ratio(&f, &g, 1.0, 1.0).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn exponent_ranges() {
        assert!(matches!(commutator_probe(1.0, 0.5, 1, 0), Err(ProbeError::InvalidExponents(_))));
        assert!(matches!(commutator_probe(-0.5, 2.0, 1, 0), Err(ProbeError::InvalidExponents(_))));
        assert!(matches!(commutator_probe(3.5, 2.0, 1, 0), Err(ProbeError::InvalidExponents(_))));
        assert!(matches!(product_probe(1.0, -1.0, 1, 0), Err(ProbeError::InvalidExponents(_))));
        assert!(matches!(product_probe(1.0, 1.5, 1, 0), Err(ProbeError::InvalidExponents(_))));
    }

    #[test]
    fn probes_are_deterministic() {
        let a = commutator_probe_on(1.0, 2.0, 8, 11, &[32, 64]).unwrap();
        let b = commutator_probe_on(1.0, 2.0, 8, 11, &[32, 64]).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.is_finite());
    }
}
