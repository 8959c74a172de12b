use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use super::transform;
use super::{Grid, SpectralError};

const HERMITIAN_TOL: f64 = 1e-12;

/// A real periodic function on `[0, 1)` stored by its Fourier coefficients.
///
/// Coefficients are kept in FFT order: index `i` holds mode `i` for
/// `i < N/2` and mode `i - N` otherwise. The unpaired mode `-N/2` is real.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    pub fn from_physical(samples: &[f64], grid: Grid) -> Result<Self, SpectralError> {
        if samples.len() != grid.n_points() {
            return Err(SpectralError::GridMismatch(format!(
                "{} samples for a grid of {} points",
                samples.len(),
                grid.n_points()
            )));
        }
        if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
            return Err(SpectralError::InvalidField(format!(
                "sample {j} is not finite"
            )));
        }
        let data = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut coeffs = transform::forward(data);
        enforce_hermitian(&mut coeffs);
        Ok(Self { grid, coeffs })
    }

    /// Samples `f` at the collocation points.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self, SpectralError> {
        let samples: Vec<f64> = grid.points().map(f).collect();
        Self::from_physical(&samples, grid)
    }

    /// Builds a field from coefficients of non-negative modes; negative modes are
    /// filled in by conjugate symmetry. Mode 0 must be real.
    pub fn from_modes(grid: Grid, modes: &[(i64, Complex64)]) -> Result<Self, SpectralError> {
        let mut f = Self::zeros(grid);
        for &(n, c) in modes {
            if n < 0 || n > grid.max_mode() {
                return Err(SpectralError::GridMismatch(format!(
                    "mode {n} outside 0..={}",
                    grid.max_mode()
                )));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(SpectralError::InvalidField(format!(
                    "coefficient of mode {n} is not finite"
                )));
            }
            if n == 0 {
                if c.im != 0.0 {
                    return Err(SpectralError::InvalidField(
                        "mode 0 of a real field must be real".into(),
                    ));
                }
                f.coeffs[0] = c;
            } else {
                let i = n as usize;
                f.coeffs[i] = c;
                f.coeffs[grid.n_points() - i] = c.conj();
            }
        }
        Ok(f)
    }

    /// Wraps a full FFT-ordered coefficient vector after checking it describes a real field.
    pub fn from_coefficients(grid: Grid, mut coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.n_points() {
            return Err(SpectralError::GridMismatch(format!(
                "{} coefficients for a grid of {} points",
                coeffs.len(),
                grid.n_points()
            )));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(SpectralError::InvalidField("non-finite coefficient".into()));
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tol = HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE);
        let n = coeffs.len();
        let half = n / 2;
        if coeffs[0].im.abs() > tol || coeffs[half].im.abs() > tol {
            return Err(SpectralError::InvalidField(
                "mode 0 and the Nyquist mode must be real".into(),
            ));
        }
        for k in 1..half {
            if (coeffs[n - k] - coeffs[k].conj()).norm() > tol {
                return Err(SpectralError::InvalidField(format!(
                    "coefficients of modes ±{k} are not conjugate"
                )));
            }
        }
        enforce_hermitian(&mut coeffs);
        Ok(Self { grid, coeffs })
    }

    /// Internal constructor for coefficient vectors that are Hermitian by construction.
    pub(crate) fn from_raw(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.n_points());
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// FFT-ordered coefficients.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of mode `n`, `-N/2 <= n < N/2`.
    ///
    /// Panics for modes outside the grid.
    pub fn coefficient(&self, n: i64) -> Complex64 {
        let i = self
            .grid
            .index_of_mode(n)
            .unwrap_or_else(|| panic!("mode {n} not representable on {} points", self.grid.n_points()));
        self.coeffs[i]
    }

    pub fn to_physical(&self) -> Vec<f64> {
        transform::inverse(self.coeffs.clone())
            .into_iter()
            .map(|c| c.re)
            .collect()
    }

    /// Spatial mean, i.e. the mode-0 coefficient.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &SpectralField) -> Self {
        self.assert_same_grid(other);
        Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x + y * a)
                .collect(),
        }
    }

    /// The same function represented on another grid: spectral truncation when
    /// coarsening, zero padding when refining.
    pub fn resample(&self, grid: Grid) -> SpectralField {
        let n = self.grid.n_points();
        let m = grid.n_points();
        let coeffs = match m.cmp(&n) {
            std::cmp::Ordering::Equal => self.coeffs.clone(),
            std::cmp::Ordering::Greater => transform::embed(&self.coeffs, m),
            std::cmp::Ordering::Less => transform::truncate(&self.coeffs, m),
        };
        SpectralField { grid, coeffs }
    }

    /// Copy with the unpaired Nyquist coefficient set to zero.
    pub fn without_nyquist(&self) -> SpectralField {
        let mut out = self.clone();
        let half = self.grid.n_points() / 2;
        out.coeffs[half] = Complex64::new(0.0, 0.0);
        out
    }

    pub(crate) fn assert_same_grid(&self, other: &SpectralField) {
        assert_eq!(
            self.grid, other.grid,
            "fields live on different grids ({} vs {} points)",
            self.grid.n_points(),
            other.grid.n_points()
        );
    }

    pub(crate) fn check_same_grid(&self, other: &SpectralField) -> Result<(), SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch(format!(
                "{} vs {} points",
                self.grid.n_points(),
                other.grid.n_points()
            )));
        }
        Ok(())
    }
}

fn enforce_hermitian(coeffs: &mut [Complex64]) {
    let n = coeffs.len();
    let half = n / 2;
    coeffs[0].im = 0.0;
    coeffs[half].im = 0.0;
    for k in 1..half {
        let avg = 0.5 * (coeffs[k] + coeffs[n - k].conj());
        coeffs[k] = avg;
        coeffs[n - k] = avg.conj();
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, a: f64) -> SpectralField {
        self.scaled(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    #[test]
    fn constant_samples_give_mode_zero() {
        let f = SpectralField::from_physical(&[2.5; 16], grid(16)).unwrap();
        assert!((f.coefficient(0).re - 2.5).abs() < 1e-15);
        for n in 1..8 {
            assert!(f.coefficient(n).norm() < 1e-15);
            assert!(f.coefficient(-n).norm() < 1e-15);
        }
    }

    #[test]
    fn cosine_has_half_coefficients() {
        let f = SpectralField::from_fn(grid(32), |x| (2.0 * PI * x).cos()).unwrap();
        assert!((f.coefficient(1) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((f.coefficient(-1) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        for n in 2..16 {
            assert!(f.coefficient(n).norm() < 1e-15);
        }
    }

    #[test]
    fn non_finite_samples_rejected() {
        let mut s = vec![0.0; 8];
        s[3] = f64::NAN;
        assert!(matches!(
            SpectralField::from_physical(&s, grid(8)),
            Err(SpectralError::InvalidField(_))
        ));
        assert!(matches!(
            SpectralField::from_physical(&[0.0; 6], grid(8)),
            Err(SpectralError::GridMismatch(_))
        ));
    }

    #[test]
    fn from_modes_fills_conjugates() {
        let f = SpectralField::from_modes(grid(8), &[(2, Complex64::new(1.0, 2.0))]).unwrap();
        assert_eq!(f.coefficient(-2), Complex64::new(1.0, -2.0));
        assert!(SpectralField::from_modes(grid(8), &[(4, Complex64::new(1.0, 0.0))]).is_err());
        assert!(SpectralField::from_modes(grid(8), &[(0, Complex64::new(1.0, 1.0))]).is_err());
    }

    #[test]
    fn from_coefficients_rejects_non_hermitian() {
        let mut c = vec![Complex64::new(0.0, 0.0); 8];
        c[1] = Complex64::new(1.0, 0.0);
        c[7] = Complex64::new(0.0, 1.0);
        assert!(SpectralField::from_coefficients(grid(8), c).is_err());
    }

    #[test]
    fn resample_preserves_low_modes() {
        let f = SpectralField::from_fn(grid(16), |x| (2.0 * PI * x).sin() + 0.3).unwrap();
        let up = f.resample(grid(64));
        let down = up.resample(grid(16));
        for n in -7..8 {
            assert!((down.coefficient(n) - f.coefficient(n)).norm() < 1e-15);
        }
    }
}
