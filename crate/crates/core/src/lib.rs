//! Numerical core for the complex-forced viscous Burgers equation
//! `∂_t u + u∂_x u − ε∂_x² u = i` on the unit torus.
//!
//! - [`field`]: periodic grid fields, spectra, transforms and Sobolev norms.
//! - [`lax_friedrichs`]: the explicit scheme with its CFL monitor.
//! - [`propagator`]: closed-form viscous degenerate Cauchy–Riemann evolution.
//! - [`rescaled`]: Fourier–Galerkin solver for the rescaled equation.
//! - [`checks`]: pass/fail verdicts for the estimates and inequalities.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod checks;
pub mod field;
pub mod fit;
pub mod lax_friedrichs;
pub mod propagator;
pub mod quadrature;
pub mod rescaled;

pub use num_complex::Complex64;

pub use field::{dft, idft, linf_max_im, sobolev_norm, ComplexField, FieldError, ModeSpectrum};
pub use lax_friedrichs::{cfl_ok, effective_viscosity, lf_step, run, RunTrace, SchemeConfig, SchemeError, Termination};
pub use propagator::{
    amplification_time, cc_evolve, cc_mode, linearized_max_im, symbol_re, transition_time, CcParams,
    Convention, DatumScale,
};
pub use rescaled::{
    lambda_k, nonlinear_rhs, run_rescaled, step, RescaledParams, RescaledState, SpectralError, Trajectory,
};
