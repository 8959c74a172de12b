use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::SpectralError;

/// Equispaced collocation grid on `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Grid {
    n_points: usize,
}

impl Grid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(n_points: usize) -> Result<Self, SpectralError> {
        if n_points < Self::MIN_POINTS || n_points % 2 != 0 {
            return Err(SpectralError::InvalidGrid(format!(
                "n_points must be even and at least {}, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { n_points })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n_points as f64
    }

    /// Collocation points `x_j = j / N`.
    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let n = self.n_points as f64;
        (0..self.n_points).map(move |j| j as f64 / n)
    }

    /// The unpaired mode `-N/2`.
    pub fn nyquist(&self) -> i64 {
        (self.n_points / 2) as i64
    }

    /// Largest `|n|` with both `n` and `-n` representable.
    pub fn max_mode(&self) -> i64 {
        self.nyquist() - 1
    }

    /// Mode number stored at FFT-ordered index `i`.
    pub fn mode_of_index(&self, i: usize) -> i64 {
        let n = self.n_points;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// FFT-ordered index of mode `n`, if `-N/2 <= n < N/2`.
    pub fn index_of_mode(&self, n: i64) -> Option<usize> {
        let half = self.nyquist();
        if n >= half || n < -half {
            None
        } else if n >= 0 {
            Some(n as usize)
        } else {
            Some((self.n_points as i64 + n) as usize)
        }
    }

    /// Modes in FFT order.
    pub fn modes(&self) -> impl ExactSizeIterator<Item = i64> + '_ {
        (0..self.n_points).map(move |i| self.mode_of_index(i))
    }

    pub fn wavenumber(n: i64) -> f64 {
        2.0 * PI * n as f64
    }

    /// The grid refined by an integer factor.
    pub fn refined(&self, factor: usize) -> Grid {
        Grid {
            n_points: self.n_points * factor.max(1),
        }
    }
}

impl TryFrom<usize> for Grid {
    type Error = SpectralError;

    fn try_from(n: usize) -> Result<Self, Self::Error> {
        Grid::new(n)
    }
}

impl From<Grid> for usize {
    fn from(g: Grid) -> usize {
        g.n_points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_odd() {
        assert!(Grid::new(6).is_err());
        assert!(Grid::new(9).is_err());
        assert!(Grid::new(10).is_ok());
    }

    #[test]
    fn mode_index_roundtrip() {
        let g = Grid::new(16).unwrap();
        for (i, n) in g.modes().enumerate() {
            assert_eq!(g.index_of_mode(n), Some(i));
        }
        assert_eq!(g.mode_of_index(8), -8);
        assert_eq!(g.index_of_mode(8), None);
        assert_eq!(g.index_of_mode(-9), None);
    }

    #[test]
    fn points_are_equispaced() {
        let g = Grid::new(8).unwrap();
        let p: Vec<f64> = g.points().collect();
        assert_eq!(p[0], 0.0);
        assert_eq!(p[4], 0.5);
        assert_eq!(p.len(), 8);
    }
}
