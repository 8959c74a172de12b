//! FFT plumbing shared by the spectral operations.
//!
//! Plans are cached per thread by the rustfft planner.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Coefficients `c_n = (1/N) Σ_j u_j e^{-2πinj/N}` in FFT order.
pub(crate) fn forward(mut data: Vec<Complex64>) -> Vec<Complex64> {
    let n = data.len();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    fft.process(&mut data);
    let scale = 1.0 / n as f64;
    for c in data.iter_mut() {
        *c *= scale;
    }
    data
}

/// Samples `u_j = Σ_n c_n e^{2πinj/N}`.
pub(crate) fn inverse(mut data: Vec<Complex64>) -> Vec<Complex64> {
    let n = data.len();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    fft.process(&mut data);
    data
}

/// Zero-pads FFT-ordered coefficients of length `n` to length `m >= n`.
///
/// The unpaired Nyquist coefficient is split evenly between `±n/2` so the
/// padded spectrum is Hermitian and represents the same real interpolant.
pub(crate) fn embed(coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = coeffs.len();
    debug_assert!(m >= n && n % 2 == 0);
    let half = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    out[..half].copy_from_slice(&coeffs[..half]);
    for k in 1..half {
        out[m - k] = coeffs[n - k];
    }
    let nyq = coeffs[half];
    if m == n {
        out[half] = nyq;
    } else {
        out[half] = 0.5 * nyq;
        out[m - half] = 0.5 * nyq;
    }
    out
}

/// Keeps modes `|k| < n/2` of a length-`m` FFT-ordered spectrum; the Nyquist slot is zeroed.
pub(crate) fn truncate(fine: &[Complex64], n: usize) -> Vec<Complex64> {
    let m = fine.len();
    debug_assert!(m >= n && n % 2 == 0);
    let half = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    out[..half].copy_from_slice(&fine[..half]);
    for k in 1..half {
        out[n - k] = fine[m - k];
    }
    out
}

/// Physical samples of the trigonometric interpolant on a grid refined to `m` points.
pub(crate) fn refined_samples(coeffs: &[Complex64], m: usize) -> Vec<f64> {
    inverse(embed(coeffs, m)).into_iter().map(|c| c.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_inverse_identity() {
        let data: Vec<Complex64> = (0..16)
            .map(|j| Complex64::new((j as f64 * 0.37).sin(), 0.0))
            .collect();
        let back = inverse(forward(data.clone()));
        for (a, b) in data.iter().zip(&back) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn embed_then_truncate_drops_only_nyquist() {
        let c: Vec<Complex64> = (0..8).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let t = truncate(&embed(&c, 16), 8);
        for k in 0..8 {
            let expect = if k == 4 { 0.0 } else { k as f64 };
            assert_eq!(t[k].re, expect);
        }
    }
}
