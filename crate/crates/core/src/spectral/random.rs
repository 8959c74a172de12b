use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use super::{Grid, SpectralError, SpectralField};

/// Random real trigonometric polynomial with `|û_n| <= (1 + |n|)^{-decay_exponent}`.
///
/// Coefficients are drawn mode by mode from a ChaCha stream, so the same seed
/// yields the same function on every grid that resolves `max_mode`.
/// `decay_exponent = f64::INFINITY` selects a single random mode in `1..=min(max_mode, 3)`
/// with amplitude in `[1/2, 1)`.
pub fn random_trig_polynomial(
    grid: Grid,
    seed: u64,
    max_mode: usize,
    decay_exponent: f64,
) -> Result<SpectralField, SpectralError> {
    if max_mode as i64 > grid.max_mode() {
        return Err(SpectralError::GridMismatch(format!(
            "max_mode {max_mode} not below n_points/2 = {}",
            grid.nyquist()
        )));
    }
    if decay_exponent.is_nan() || decay_exponent < 0.0 {
        return Err(SpectralError::InvalidParameter(format!(
            "decay exponent must be non-negative, got {decay_exponent}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if decay_exponent.is_infinite() {
        if max_mode == 0 {
            return Err(SpectralError::InvalidParameter(
                "single-mode field needs max_mode >= 1".into(),
            ));
        }
        let n = rng.gen_range(1..=max_mode.min(3)) as i64;
        let amp = 0.5 + 0.5 * rng.gen::<f64>();
        let phase = 2.0 * PI * rng.gen::<f64>();
        return SpectralField::from_modes(grid, &[(n, Complex64::from_polar(0.5 * amp, phase))]);
    }
    let mut modes = Vec::with_capacity(max_mode + 1);
    for n in 0..=max_mode {
        let r: f64 = rng.gen();
        let phase = 2.0 * PI * rng.gen::<f64>();
        let bound = (1.0 + n as f64).powf(-decay_exponent);
        let c = if n == 0 {
            Complex64::new((2.0 * r - 1.0) * bound, 0.0)
        } else {
            Complex64::from_polar(r * bound, phase)
        };
        modes.push((n as i64, c));
    }
    SpectralField::from_modes(grid, &modes)
}
