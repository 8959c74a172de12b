use lasw::spectral::{
    dealiased_product, dealiased_triple, derivative, lambda_pow, random_trig_polynomial, sobolev_norm,
};
use lasw::{Grid, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;

fn field(n: usize, seed: u64, max_mode: usize) -> SpectralField {
    random_trig_polynomial(Grid::new(n).unwrap(), seed, max_mode, 1.0).unwrap()
}

fn max_coeff_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coefficients()
        .iter()
        .zip(b.coefficients())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn scale(f: &SpectralField) -> f64 {
    f.coefficients().iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0)
}

/// Exact convolution of the coefficient sequences, truncated to `|k| < N/2`.
fn convolution_oracle(f: &SpectralField, g: &SpectralField) -> Vec<Complex64> {
    let grid = f.grid();
    let nyq = grid.nyquist();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    for k in -(nyq - 1)..nyq {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in -(nyq - 1)..nyq {
            let j = k - m;
            if j.abs() < nyq {
                acc += f.coefficient(m) * g.coefficient(j);
            }
        }
        out[grid.index_of_mode(k).unwrap()] = acc;
    }
    out
}

fn is_hermitian(f: &SpectralField, tol: f64) -> bool {
    let grid = f.grid();
    f.coefficient(0).im.abs() <= tol
        && (1..grid.nyquist()).all(|n| (f.coefficient(-n) - f.coefficient(n).conj()).norm() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn physical_round_trip(seed in any::<u64>(), log_n in 3u32..8) {
        let n = 1usize << log_n;
        let f = field(n, seed, n / 2 - 1);
        let back = SpectralField::from_physical(&f.to_physical(), f.grid()).unwrap();
        prop_assert!(max_coeff_diff(&f, &back) <= 1e-14 * scale(&f));
    }

    #[test]
    fn derivative_and_lambda_are_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in -3.0f64..3.0, s in -2.0f64..3.0) {
        let f = field(64, s1, 20);
        let g = field(64, s2, 20);
        let combo = f.axpy(a, &g);
        let d = derivative(&combo, 2);
        let d_expect = derivative(&f, 2).axpy(a, &derivative(&g, 2));
        prop_assert!(max_coeff_diff(&d, &d_expect) <= 1e-11 * scale(&d_expect));
        let l = lambda_pow(&combo, s, 0.7).unwrap();
        let l_expect = lambda_pow(&f, s, 0.7).unwrap().axpy(a, &lambda_pow(&g, s, 0.7).unwrap());
        prop_assert!(max_coeff_diff(&l, &l_expect) <= 1e-12 * scale(&l_expect));
    }

    #[test]
    fn lambda_powers_invert(seed in any::<u64>(), s in -4.0f64..4.0, mu in 0.01f64..2.0) {
        let f = field(128, seed, 40);
        let back = lambda_pow(&lambda_pow(&f, s, mu).unwrap(), -s, mu).unwrap();
        prop_assert!(max_coeff_diff(&f, &back) <= 1e-12 * scale(&f));
    }

    #[test]
    fn sobolev_norm_is_lambda_weighted_l2(seed in any::<u64>(), s in -2.0f64..3.0) {
        let f = field(64, seed, 31);
        let via_lambda = sobolev_norm(&lambda_pow(&f, s, 1.0).unwrap(), 0.0);
        prop_assert!((sobolev_norm(&f, s) - via_lambda).abs() <= 1e-12 * via_lambda.max(1.0));
    }

    #[test]
    fn product_matches_direct_convolution(s1 in any::<u64>(), s2 in any::<u64>(), log_n in 3u32..7) {
        let n = 1usize << log_n;
        let f = field(n, s1, n / 2 - 1);
        let g = field(n, s2, n / 2 - 1);
        let p = dealiased_product(&f, &g).unwrap();
        let oracle = convolution_oracle(&f, &g);
        let err = p.coefficients().iter().zip(&oracle).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-13 * scale(&f) * scale(&g), "err {err}");
    }

    #[test]
    fn products_stay_real_and_commute(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let f = field(64, s1, 31);
        let g = field(64, s2, 31);
        let h = field(64, s3, 31);
        let fg = dealiased_product(&f, &g).unwrap();
        let gf = dealiased_product(&g, &f).unwrap();
        prop_assert!(max_coeff_diff(&fg, &gf) <= 1e-14 * scale(&fg));
        let t = dealiased_triple(&f, &g, &h).unwrap();
        prop_assert!(is_hermitian(&fg, 1e-14 * scale(&fg)));
        prop_assert!(is_hermitian(&t, 1e-14 * scale(&t)));
        prop_assert_eq!(t.coefficient(-32).norm(), 0.0);
    }

    #[test]
    fn resampling_up_and_down_is_identity(seed in any::<u64>()) {
        let f = field(32, seed, 15);
        let g = Grid::new(128).unwrap();
        let back = f.resample(g).resample(f.grid());
        prop_assert!(max_coeff_diff(&f, &back) <= 1e-15 * scale(&f));
    }
}

#[test]
fn triple_product_of_low_modes_is_exact() {
    // cos³(2πx) = (3cos(2πx) + cos(6πx))/4 on a grid resolving mode 3.
    let g = Grid::new(16).unwrap();
    let c = SpectralField::from_fn(g, |x| (2.0 * std::f64::consts::PI * x).cos()).unwrap();
    let t = dealiased_triple(&c, &c, &c).unwrap();
    assert!((t.coefficient(1).re - 0.375).abs() < 1e-15);
    assert!((t.coefficient(3).re - 0.125).abs() < 1e-15);
    assert!(t.coefficient(2).norm() < 1e-15);
}
