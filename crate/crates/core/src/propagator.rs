//! Closed-form solution of the viscous degenerate Cauchy–Riemann equation
//! `∂_t v + it∂_x v − ε∂_x² v = 0` and the times derived from it.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::field::ModeSpectrum;

/// Exponent normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Modes `e^{2πikx}` on the unit torus: rate `2πkt − 4π²εk²`.
    Torus,
    /// Rates without the `2π` factors: `kt − εk²`, used for the `t_f` overlays.
    Figure1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcParams {
    pub eps: f64,
    pub k0: u32,
    pub convention: Convention,
}

impl CcParams {
    pub fn torus(eps: f64, k0: u32) -> Self {
        Self::new(eps, k0, Convention::Torus)
    }

    pub fn new(eps: f64, k0: u32, convention: Convention) -> Self {
        assert!(eps > 0.0, "viscosity must be positive");
        assert!(k0 >= 1, "smallest mode must be at least 1");
        Self { eps, k0, convention }
    }
}

/// `∫_{t₁}^{t₂} rate_k(τ) dτ` for physical frequency `k`.
pub fn cc_exponent(k: i64, params: &CcParams, t1: f64, t2: f64) -> f64 {
    let k = k as f64;
    let dt = t2 - t1;
    let sum = t2 + t1;
    match params.convention {
        Convention::Torus => PI * k * dt * sum - 4.0 * PI * PI * params.eps * k * k * dt,
        Convention::Figure1 => 0.5 * k * dt * sum - params.eps * k * k * dt,
    }
}

/// Two-time propagator: the value at `t₂` of the mode that equals `a` at `t₁`.
pub fn cc_mode_between(a: Complex64, k: i64, params: &CcParams, t1: f64, t2: f64) -> Complex64 {
    a * cc_exponent(k, params, t1, t2).exp()
}

/// `a_k · exp(πkt² − 4π²εk²t)` in the torus convention.
pub fn cc_mode(a: Complex64, k: i64, params: &CcParams, t: f64) -> Complex64 {
    cc_mode_between(a, k, params, 0.0, t)
}

/// Applies the propagator from `t₁` to `t₂` to every coefficient; the physical
/// frequency of slot `k` is `k·k₀` of the spectrum.
pub fn cc_evolve_between(
    spectrum: &ModeSpectrum,
    params: &CcParams,
    t1: f64,
    t2: f64,
) -> ModeSpectrum {
    let k0 = i64::from(spectrum.base_frequency());
    let mut out = spectrum.clone();
    for ((k, c), slot) in spectrum.iter().zip(out.coefficients_mut()) {
        *slot = cc_mode_between(c, k * k0, params, t1, t2);
    }
    out
}

pub fn cc_evolve(spectrum: &ModeSpectrum, params: &CcParams, t: f64) -> ModeSpectrum {
    cc_evolve_between(spectrum, params, 0.0, t)
}

/// Real part of the symbol `−(2πξ)(t − 2πεξ)`.
pub fn symbol_re(eps: f64, t: f64, xi: f64) -> f64 {
    -(2.0 * PI * xi) * (t - 2.0 * PI * eps * xi)
}

/// Datum scaling for the transition and amplification times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatumScale {
    /// `a(x) = sin(2πk₀x)`.
    Unscaled,
    /// `a(k₀x/ε)`: frequencies `k₀/ε`, so `ε·k₀` becomes `k₀`.
    Oscillating,
}

/// First time the symbol real part turns negative: `2πεk₀` (or `2πk₀`).
pub fn transition_time(params: &CcParams, scale: DatumScale) -> f64 {
    match scale {
        DatumScale::Unscaled => 2.0 * PI * params.eps * f64::from(params.k0),
        DatumScale::Oscillating => 2.0 * PI * f64::from(params.k0),
    }
}

/// First time a mode regains its initial modulus: `4πεk₀` (or `4πk₀`).
pub fn amplification_time(params: &CcParams, scale: DatumScale) -> f64 {
    2.0 * transition_time(params, scale)
}

/// `max_x Im v(t,x)` for the solution issued from `sin(N·2πx)`:
/// `½(e^{g₊} − e^{g₋})` with the growth exponents of modes `±N`.
pub fn linearized_max_im(n: u32, params: &CcParams, t: f64) -> f64 {
    let n = i64::from(n);
    let grow = cc_exponent(n, params, 0.0, t);
    let decay = cc_exponent(-n, params, 0.0, t);
    0.5 * (grow.exp() - decay.exp())
}

/// Non-degenerate Cauchy–Riemann `∂_t w + i∂_x w = 0` on the torus: `a·e^{2πkt}`.
pub fn cauchy_riemann_mode(a: Complex64, k: i64, t: f64) -> Complex64 {
    a * (2.0 * PI * k as f64 * t).exp()
}
