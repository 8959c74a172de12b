use num_complex::Complex64;

use super::transform;
use super::{SpectralError, SpectralField};

/// Padded transform length for a `factors`-fold product on `n` points.
///
/// The product of `k` fields with modes `|m| <= n/2` has modes up to `k n/2`;
/// aliases stay off the retained band `|m| < n/2` once `M >= (k+1) n/2`.
/// Never less than `2n`.
fn padded_len(n: usize, factors: usize) -> usize {
    let need = ((factors + 1) * n).div_ceil(2);
    let m = need.max(2 * n);
    m + m % 2
}

/// Exact Fourier truncation of the pointwise product of all `factors`.
pub fn dealiased_product_all(factors: &[&SpectralField]) -> Result<SpectralField, SpectralError> {
    let first = factors
        .first()
        .ok_or_else(|| SpectralError::InvalidParameter("empty product".into()))?;
    for f in &factors[1..] {
        first.check_same_grid(f)?;
    }
    let grid = first.grid();
    if factors.len() == 1 {
        return Ok(first.without_nyquist());
    }
    let n = grid.n_points();
    let m = padded_len(n, factors.len());
    let mut acc: Vec<f64> = transform::refined_samples(first.coefficients(), m);
    for f in &factors[1..] {
        let s = transform::refined_samples(f.coefficients(), m);
        for (a, b) in acc.iter_mut().zip(&s) {
            *a *= b;
        }
    }
    let fine = transform::forward(acc.into_iter().map(|v| Complex64::new(v, 0.0)).collect());
    let mut coeffs = transform::truncate(&fine, n);
    // The padded product of real samples is Hermitian up to roundoff; pin it exactly.
    let half = n / 2;
    coeffs[0].im = 0.0;
    for k in 1..half {
        let avg = 0.5 * (coeffs[k] + coeffs[n - k].conj());
        coeffs[k] = avg;
        coeffs[n - k] = avg.conj();
    }
    Ok(SpectralField::from_raw(grid, coeffs))
}

/// Dealiased `f g`.
pub fn dealiased_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField, SpectralError> {
    dealiased_product_all(&[f, g])
}

/// Dealiased `f g h`, alias-free for cubic terms.
pub fn dealiased_triple(f: &SpectralField, g: &SpectralField, h: &SpectralField) -> Result<SpectralField, SpectralError> {
    dealiased_product_all(&[f, g, h])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn padded_lengths() {
        assert_eq!(padded_len(8, 2), 16);
        assert_eq!(padded_len(8, 3), 16);
        assert_eq!(padded_len(8, 4), 20);
        assert_eq!(padded_len(10, 4), 26);
    }

    #[test]
    fn cosine_squared() {
        let g = Grid::new(8).unwrap();
        let c = SpectralField::from_fn(g, |x| (2.0 * PI * x).cos()).unwrap();
        let p = dealiased_product(&c, &c).unwrap();
        let expect = SpectralField::from_fn(g, |x| 0.5 + 0.5 * (4.0 * PI * x).cos()).unwrap();
        for (a, b) in p.coefficients().iter().zip(expect.coefficients()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn high_mode_square_does_not_alias() {
        // On 8 points cos(6πx)^2 = 1/2 + cos(12πx)/2; the naive product folds
        // mode 6 onto mode -2.
        let g = Grid::new(8).unwrap();
        let c = SpectralField::from_fn(g, |x| (6.0 * PI * x).cos()).unwrap();
        let p = dealiased_product(&c, &c).unwrap();
        assert!((p.coefficient(0).re - 0.5).abs() < 1e-15);
        for n in 1..4 {
            assert!(p.coefficient(n).norm() < 1e-15, "mode {n}: {}", p.coefficient(n));
        }
        let naive: Vec<f64> = c.to_physical().iter().map(|v| v * v).collect();
        let naive = SpectralField::from_physical(&naive, g).unwrap();
        assert!((naive.coefficient(2).re - 0.25).abs() < 1e-14);
    }

    #[test]
    fn product_with_zero() {
        let g = Grid::new(16).unwrap();
        let f = SpectralField::from_fn(g, |x| (2.0 * PI * x).sin().exp()).unwrap();
        let z = SpectralField::zeros(g);
        let p = dealiased_product(&f, &z).unwrap();
        assert!(p.coefficients().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn grid_mismatch() {
        let a = SpectralField::zeros(Grid::new(8).unwrap());
        let b = SpectralField::zeros(Grid::new(16).unwrap());
        assert!(matches!(dealiased_product(&a, &b), Err(SpectralError::GridMismatch(_))));
    }
}
