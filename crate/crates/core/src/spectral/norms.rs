use super::multiplier::derivative;
use super::transform;
use super::{Grid, SpectralField};

/// Refinement factor of the physical grid on which sup norms are evaluated.
pub const SUP_REFINEMENT: usize = 4;

/// `‖u‖_s = (Σ_n (1 + ξ_n²)^s |û_n|²)^{1/2}`.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    let grid = field.grid();
    field
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let xi = Grid::wavenumber(grid.mode_of_index(i));
            let w = if s == 0.0 { 1.0 } else { (1.0 + xi * xi).powf(s) };
            w * c.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

/// `max |u|` over a grid refined by [`SUP_REFINEMENT`].
pub fn sup_norm(field: &SpectralField) -> f64 {
    let m = field.grid().n_points() * SUP_REFINEMENT;
    transform::refined_samples(field.coefficients(), m)
        .into_iter()
        .fold(0.0, |acc, v| acc.max(v.abs()))
}

/// `max |u_x|` over a grid refined by [`SUP_REFINEMENT`].
pub fn sup_norm_dx(field: &SpectralField) -> f64 {
    sup_norm(&derivative(field, 1))
}

/// Largest coefficient magnitude among the top third of modes, `|n| > N/3`.
pub fn spectral_tail(field: &SpectralField) -> f64 {
    let grid = field.grid();
    let cutoff = grid.n_points() as f64 / 3.0;
    field
        .coefficients()
        .iter()
        .enumerate()
        .filter(|(i, _)| grid.mode_of_index(*i).unsigned_abs() as f64 > cutoff)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(64).unwrap()
    }

    #[test]
    fn constant_norm_independent_of_s() {
        let f = SpectralField::constant(grid(), -1.5);
        for s in [-1.0, 0.0, 0.7, 2.0, 5.0] {
            assert!((sobolev_norm(&f, s) - 1.5).abs() < 1e-15);
        }
    }

    #[test]
    fn sine_sobolev_norms() {
        let f = SpectralField::from_fn(grid(), |x| (2.0 * PI * x).sin()).unwrap();
        assert!((sobolev_norm(&f, 0.0) - 0.5f64.sqrt()).abs() < 1e-15);
        for s in [0.5, 1.0, 2.0, 3.5] {
            let expect = (1.0 + 4.0 * PI * PI).powf(s / 2.0) / 2.0f64.sqrt();
            assert!((sobolev_norm(&f, s) / expect - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sup_norms_of_sine() {
        let f = SpectralField::from_fn(grid(), |x| (2.0 * PI * x).sin()).unwrap();
        assert!((sup_norm(&f) - 1.0).abs() < 1e-6);
        assert!((sup_norm_dx(&f) - 2.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn l2_matches_quadrature() {
        let f = SpectralField::from_fn(grid(), |x| (2.0 * PI * x).sin().exp() - 0.2).unwrap();
        let q: f64 = f.to_physical().iter().map(|v| v * v).sum::<f64>() / 64.0;
        assert!((sobolev_norm(&f, 0.0) / q.sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_sees_only_high_modes() {
        let g = grid();
        let low = SpectralField::from_fn(g, |x| (2.0 * PI * 5.0 * x).cos()).unwrap();
        assert!(spectral_tail(&low) < 1e-15);
        let high = SpectralField::from_fn(g, |x| 0.1 * (2.0 * PI * 25.0 * x).cos()).unwrap();
        assert!((spectral_tail(&high) - 0.05).abs() < 1e-15);
    }
}
