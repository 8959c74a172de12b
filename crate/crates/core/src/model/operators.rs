use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{validate, ModelCoefficients, ModelError};
use crate::spectral::multiplier::apply_rule;
use crate::spectral::{
    dealiased_product, dealiased_product_all, dealiased_triple, derivative, sup_norm, Grid, SpectralField,
};

/// `(1 + μξ²)^{-1} ∂_x`, or its `μ = 0` local limit `∂_x`.
fn smoothed_derivative(field: &SpectralField, mu: f64) -> SpectralField {
    apply_rule(field, |n| {
        let xi = Grid::wavenumber(n);
        Complex64::new(0.0, xi / (1.0 + mu * xi * xi))
    })
}

fn inverse_helmholtz(field: &SpectralField, mu: f64) -> SpectralField {
    apply_rule(field, |n| {
        let xi = Grid::wavenumber(n);
        Complex64::new(1.0 / (1.0 + mu * xi * xi), 0.0)
    })
}

/// Weights of the bracket `c1 u + c2 u² + c3 u³ + c4 u_x² + c5 u u_x² + c6 u⁴`
/// whose smoothed derivative is the semilinear part.
struct Bracket {
    c: [f64; 6],
}

impl Bracket {
    fn new(k: &ModelCoefficients) -> Self {
        let mu = k.mu;
        Self {
            c: [
                k.alpha1 + k.alpha2 / mu,
                0.5 * k.alpha3 + k.beta2 / (2.0 * mu),
                k.gamma2 / (3.0 * mu) + k.alpha4 / 3.0,
                0.5 * (k.beta1 - 3.0 * k.beta2),
                k.gamma3 - 2.0 * k.gamma2,
                0.25 * k.alpha5,
            ],
        }
    }

    fn evaluate(&self, u: &SpectralField) -> Result<SpectralField, ModelError> {
        let ux = derivative(u, 1);
        let [c1, c2, c3, c4, c5, c6] = self.c;
        let mut out = u.without_nyquist().scaled(c1);
        if c2 != 0.0 {
            out = out.axpy(c2, &dealiased_product(u, u)?);
        }
        if c3 != 0.0 {
            out = out.axpy(c3, &dealiased_triple(u, u, u)?);
        }
        if c4 != 0.0 {
            out = out.axpy(c4, &dealiased_product(&ux, &ux)?);
        }
        if c5 != 0.0 {
            out = out.axpy(c5, &dealiased_triple(u, &ux, &ux)?);
        }
        if c6 != 0.0 {
            out = out.axpy(c6, &dealiased_product_all(&[u, u, u, u])?);
        }
        Ok(out)
    }
}

/// `a(u) = μ^{-1}(α2 + β2 u + γ2 u²)`.
pub fn transport_field(u: &SpectralField, coeffs: &ModelCoefficients) -> Result<SpectralField, ModelError> {
    let k = validate(coeffs)?.coefficients().to_owned();
    transport_unchecked(u, &k)
}

fn transport_unchecked(u: &SpectralField, k: &ModelCoefficients) -> Result<SpectralField, ModelError> {
    let grid = u.grid();
    let mut a = SpectralField::constant(grid, k.alpha2 / k.mu).axpy(k.beta2 / k.mu, &u.without_nyquist());
    if k.gamma2 != 0.0 {
        a = a.axpy(k.gamma2 / k.mu, &dealiased_product(u, u)?);
    }
    Ok(a)
}

/// `a(u) u_x`, with every product taken as one dealiased product of the original factors.
fn transport_term(u: &SpectralField, k: &ModelCoefficients) -> Result<SpectralField, ModelError> {
    let ux = derivative(u, 1);
    let mut out = ux.scaled(k.alpha2 / k.mu);
    if k.beta2 != 0.0 {
        out = out.axpy(k.beta2 / k.mu, &dealiased_product(u, &ux)?);
    }
    if k.gamma2 != 0.0 {
        out = out.axpy(k.gamma2 / k.mu, &dealiased_triple(u, u, &ux)?);
    }
    Ok(out)
}

/// `f(u) = Λ_μ^{-2} ∂_x [bracket]`.
pub fn semilinear_term(u: &SpectralField, coeffs: &ModelCoefficients) -> Result<SpectralField, ModelError> {
    let k = validate(coeffs)?.coefficients().to_owned();
    let b = Bracket::new(&k).evaluate(u)?;
    Ok(smoothed_derivative(&b, k.mu))
}

/// `u_t = -a(u) u_x + f(u)`.
pub fn tendency(u: &SpectralField, coeffs: &ModelCoefficients) -> Result<SpectralField, ModelError> {
    let k = validate(coeffs)?.coefficients().to_owned();
    tendency_unchecked(u, &k)
}

fn tendency_unchecked(u: &SpectralField, k: &ModelCoefficients) -> Result<SpectralField, ModelError> {
    let b = Bracket::new(k).evaluate(u)?;
    let f = smoothed_derivative(&b, k.mu);
    Ok(f.axpy(-1.0, &transport_term(u, k)?))
}

/// `u_t = Λ_μ^{-2}[right-hand side]` evaluated term by term without the reformulation.
///
/// Valid for any `μ >= 0` and any γ; at `μ = 0` the inverse Helmholtz operator
/// is the identity and this is the local form used for KdV.
pub fn tendency_direct(u: &SpectralField, coeffs: &ModelCoefficients) -> Result<SpectralField, ModelError> {
    if !coeffs.all_finite() {
        return Err(ModelError::InvalidCoefficients("non-finite coefficient".into()));
    }
    if coeffs.mu < 0.0 {
        return Err(ModelError::InvalidMu(coeffs.mu));
    }
    let k = coeffs;
    let ux = derivative(u, 1);
    let uxx = derivative(u, 2);
    let uxxx = derivative(u, 3);
    let mut rhs = ux.scaled(k.alpha1).axpy(k.alpha2, &uxxx);
    let terms: [(f64, Vec<&SpectralField>); 8] = [
        (k.alpha3, vec![u, &ux]),
        (k.beta1, vec![&ux, &uxx]),
        (k.beta2, vec![u, &uxxx]),
        (k.gamma1, vec![u, &ux, &uxx]),
        (k.gamma2, vec![u, u, &uxxx]),
        (k.gamma3, vec![&ux, &ux, &ux]),
        (k.alpha4, vec![u, u, &ux]),
        (k.alpha5, vec![u, u, u, &ux]),
    ];
    for (w, factors) in terms.iter() {
        if *w != 0.0 {
            rhs = rhs.axpy(*w, &dealiased_product_all(factors)?);
        }
    }
    Ok(inverse_helmholtz(&rhs, k.mu))
}

/// `Φ(u)` with `u_t + Φ(u)_x = 0`:
/// `Φ = μ^{-1}(α2 u + β2 u²/2 + γ2 u³/3) - Λ_μ^{-2}[bracket]`.
pub fn flux(u: &SpectralField, coeffs: &ModelCoefficients) -> Result<SpectralField, ModelError> {
    let k = validate(coeffs)?.coefficients().to_owned();
    let mut p = u.without_nyquist().scaled(k.alpha2 / k.mu);
    if k.beta2 != 0.0 {
        p = p.axpy(0.5 * k.beta2 / k.mu, &dealiased_product(u, u)?);
    }
    if k.gamma2 != 0.0 {
        p = p.axpy(k.gamma2 / (3.0 * k.mu), &dealiased_triple(u, u, u)?);
    }
    let b = Bracket::new(&k).evaluate(u)?;
    Ok(p.axpy(-1.0, &inverse_helmholtz(&b, k.mu)))
}

/// Which right-hand side the time integrator evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// `-a(u) u_x + f(u)`; needs `μ > 0` and the γ-relation.
    #[default]
    Reformulated,
    /// `Λ_μ^{-2}[rhs]`; needs `μ >= 0`.
    Direct,
}

/// Coefficients paired with the formulation used to evolve them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Model {
    coeffs: ModelCoefficients,
    formulation: Formulation,
}

impl Model {
    pub fn new(coeffs: ModelCoefficients, formulation: Formulation) -> Result<Self, ModelError> {
        match formulation {
            Formulation::Reformulated => {
                validate(&coeffs)?;
            }
            Formulation::Direct => {
                if !coeffs.all_finite() {
                    return Err(ModelError::InvalidCoefficients("non-finite coefficient".into()));
                }
                if coeffs.mu < 0.0 {
                    return Err(ModelError::InvalidMu(coeffs.mu));
                }
            }
        }
        Ok(Self { coeffs, formulation })
    }

    pub fn reformulated(coeffs: ModelCoefficients) -> Result<Self, ModelError> {
        Self::new(coeffs, Formulation::Reformulated)
    }

    pub fn direct(coeffs: ModelCoefficients) -> Result<Self, ModelError> {
        Self::new(coeffs, Formulation::Direct)
    }

    pub fn coefficients(&self) -> &ModelCoefficients {
        &self.coeffs
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    /// `μ = 0`: local dispersive form, stiff under explicit stepping.
    pub fn is_local(&self) -> bool {
        self.coeffs.mu == 0.0
    }

    pub fn tendency(&self, u: &SpectralField) -> Result<SpectralField, ModelError> {
        match self.formulation {
            Formulation::Reformulated => tendency_unchecked(u, &self.coeffs),
            Formulation::Direct => tendency_direct(u, &self.coeffs),
        }
    }

    /// `sup |a(u)|`, the characteristic speed of the quasilinear part.
    /// For the local form the advective speed `|α1| + |α3| sup|u| + ...` is used.
    pub fn transport_speed(&self, u: &SpectralField) -> Result<f64, ModelError> {
        let k = &self.coeffs;
        if self.is_local() {
            let m = sup_norm(u);
            return Ok(k.alpha1.abs() + k.alpha3.abs() * m + k.alpha4.abs() * m * m + k.alpha5.abs() * m.powi(3));
        }
        Ok(sup_norm(&transport_unchecked(u, k)?))
    }

    /// Coefficient of the third-order dispersive terms at the current amplitude,
    /// `|α2| + |β2| sup|u| + |γ2| sup|u|²`; only relevant for `μ = 0`.
    pub fn dispersive_strength(&self, u: &SpectralField) -> f64 {
        let k = &self.coeffs;
        let m = sup_norm(u);
        k.alpha2.abs() + k.beta2.abs() * m + k.gamma2.abs() * m * m
    }
}
