use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

use super::{Grid, SpectralError, SpectralField};

type SymbolRule = dyn Fn(i64) -> Complex64 + Send + Sync;

/// A Fourier multiplier `σ(n)` acting diagonally on the coefficients.
#[derive(Clone)]
pub struct MultiplierSymbol {
    name: String,
    rule: Arc<SymbolRule>,
}

impl fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSymbol").field("name", &self.name).finish()
    }
}

impl MultiplierSymbol {
    pub fn new(name: impl Into<String>, rule: impl Fn(i64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            rule: Arc::new(rule),
        }
    }

    pub fn identity() -> Self {
        Self::new("identity", |_| Complex64::new(1.0, 0.0))
    }

    /// `(iξ_n)^order`.
    pub fn derivative(order: u32) -> Self {
        Self::new(format!("d^{order}/dx^{order}"), move |n| derivative_symbol(n, order))
    }

    /// `(1 + μξ_n²)^{s/2}`.
    pub fn lambda_pow(s: f64, mu: f64) -> Result<Self, SpectralError> {
        check_mu(mu)?;
        Ok(Self::new(format!("Lambda_mu^{s} (mu={mu})"), move |n| {
            Complex64::new(lambda_symbol(n, s, mu), 0.0)
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, n: i64) -> Complex64 {
        (self.rule)(n)
    }

    fn check_real(&self, grid: Grid) -> Result<(), SpectralError> {
        let values: Vec<(i64, Complex64)> = (0..=grid.nyquist()).map(|n| (n, self.eval(n))).collect();
        let scale = values.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        for &(n, v) in &values {
            let mirror = self.eval(-n);
            let finite = v.re.is_finite() && v.im.is_finite() && mirror.re.is_finite() && mirror.im.is_finite();
            if !finite {
                return Err(SpectralError::NonRealSymbol(format!("{} (non-finite at mode {n})", self.name)));
            }
            if n < grid.nyquist() && (mirror - v.conj()).norm() > tol {
                return Err(SpectralError::NonRealSymbol(self.name.clone()));
            }
        }
        Ok(())
    }
}

pub(crate) fn derivative_symbol(n: i64, order: u32) -> Complex64 {
    let xi = Grid::wavenumber(n).powi(order as i32);
    match order % 4 {
        0 => Complex64::new(xi, 0.0),
        1 => Complex64::new(0.0, xi),
        2 => Complex64::new(-xi, 0.0),
        _ => Complex64::new(0.0, -xi),
    }
}

pub(crate) fn lambda_symbol(n: i64, s: f64, mu: f64) -> f64 {
    let xi = Grid::wavenumber(n);
    (1.0 + mu * xi * xi).powf(0.5 * s)
}

fn check_mu(mu: f64) -> Result<(), SpectralError> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(SpectralError::InvalidMu(mu))
    }
}

/// Multiplies coefficient `n` by `rule(n)`; the Nyquist slot uses the real part
/// of the symmetric average so the output stays real.
pub(crate) fn apply_rule(field: &SpectralField, rule: impl Fn(i64) -> Complex64) -> SpectralField {
    let grid = field.grid();
    let half = grid.n_points() / 2;
    let coeffs = field
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i == half {
                let nyq = grid.nyquist();
                let s = 0.5 * (rule(-nyq) + rule(nyq));
                c * s.re
            } else {
                c * rule(grid.mode_of_index(i))
            }
        })
        .collect();
    SpectralField::from_raw(grid, coeffs)
}

/// Applies a real-field-preserving multiplier.
pub fn apply_multiplier(field: &SpectralField, symbol: &MultiplierSymbol) -> Result<SpectralField, SpectralError> {
    symbol.check_real(field.grid())?;
    Ok(apply_rule(field, |n| symbol.eval(n)))
}

/// `∂_x^order field`.
pub fn derivative(field: &SpectralField, order: u32) -> SpectralField {
    apply_rule(field, |n| derivative_symbol(n, order))
}

/// `Λ_μ^s field` with `Λ_μ = (1 - μ∂_x²)^{1/2}`.
pub fn lambda_pow(field: &SpectralField, s: f64, mu: f64) -> Result<SpectralField, SpectralError> {
    check_mu(mu)?;
    if s == 0.0 {
        return Ok(field.clone());
    }
    Ok(apply_rule(field, |n| Complex64::new(lambda_symbol(n, s, mu), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(32).unwrap()
    }

    fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        a.coefficients()
            .iter()
            .zip(b.coefficients())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_symbol_is_identity() {
        let f = SpectralField::from_fn(grid(), |x| (2.0 * PI * x).sin() + x * (1.0 - x)).unwrap();
        let g = apply_multiplier(&f, &MultiplierSymbol::identity()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn derivative_of_sine() {
        let f = SpectralField::from_fn(grid(), |x| (2.0 * PI * x).sin()).unwrap();
        let d = apply_multiplier(&f, &MultiplierSymbol::derivative(1)).unwrap();
        let expect = SpectralField::from_fn(grid(), |x| 2.0 * PI * (2.0 * PI * x).cos()).unwrap();
        assert!(max_diff(&d, &expect) < 1e-13);
        assert!(max_diff(&derivative(&f, 1), &expect) < 1e-13);
    }

    #[test]
    fn lambda_inverse_square_on_cosine() {
        let f = SpectralField::from_fn(grid(), |x| (2.0 * PI * x).cos()).unwrap();
        let g = lambda_pow(&f, -2.0, 1.0).unwrap();
        let k = 1.0 / (1.0 + 4.0 * PI * PI);
        assert!(max_diff(&g, &f.scaled(k)) < 1e-16);
    }

    #[test]
    fn derivative_annihilates_constants() {
        let f = SpectralField::constant(grid(), 3.0);
        for order in 1..5 {
            assert!(derivative(&f, order).coefficients().iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn lambda_zero_is_identity_and_mu_checked() {
        let f = SpectralField::from_fn(grid(), |x| (4.0 * PI * x).cos()).unwrap();
        assert_eq!(lambda_pow(&f, 0.0, 0.3).unwrap(), f);
        assert_eq!(lambda_pow(&f, 1.0, 0.0), Err(SpectralError::InvalidMu(0.0)));
        assert!(MultiplierSymbol::lambda_pow(1.0, -1.0).is_err());
    }

    #[test]
    fn non_real_symbol_rejected() {
        let f = SpectralField::constant(grid(), 1.0);
        let bad = MultiplierSymbol::new("shift-i", |_| Complex64::new(0.0, 1.0));
        assert!(matches!(apply_multiplier(&f, &bad), Err(SpectralError::NonRealSymbol(_))));
        let odd = MultiplierSymbol::new("odd-real", |n| Complex64::new(n as f64, 0.0));
        assert!(apply_multiplier(&f, &odd).is_err());
    }

    #[test]
    fn odd_derivative_zeroes_nyquist() {
        let g = Grid::new(8).unwrap();
        let f = SpectralField::from_fn(g, |x| (8.0 * PI * x).cos()).unwrap();
        assert!((f.coefficient(-4).re - 1.0).abs() < 1e-14);
        assert_eq!(derivative(&f, 1).coefficient(-4).norm(), 0.0);
        let d2 = derivative(&f, 2);
        assert!((d2.coefficient(-4).re + (8.0 * PI).powi(2)).abs() < 1e-9);
    }
}
