//! Explicit Lax–Friedrichs scheme for `∂_t u + ∂_x(u²/2) = i` on the periodic grid.
//!
//! The averaging step carries a numerical viscosity `h²/(2σ)`, which makes the
//! scheme a second-order consistent discretization of the viscous equation
//! `∂_t u + u∂_x u − ε∂_x² u = i` with `ε = h²/(2σ)`.

use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::field::ComplexField;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("grid size {0} is below the minimum of 2")]
    GridTooSmall(usize),
    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),
    #[error("record stride must be positive")]
    ZeroRecordStride,
    #[error("datum has {datum} samples but the scheme grid has {grid}")]
    GridMismatch { datum: usize, grid: usize },
    #[error("datum already violates the CFL condition (max {max_magnitude})")]
    InitialCflViolation { max_magnitude: f64 },
    #[error("non-finite value in the state at step {step} (t = {time})")]
    NonFinite { step: u64, time: f64 },
}

/// Lax–Friedrichs run contract. `h = 1/J`; the CFL ratio `σ/h` and the
/// effective viscosity are derived from `grid` and `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub grid: usize,
    pub sigma: f64,
    pub cfl_cap: f64,
    pub t_max: f64,
    pub record_every: usize,
    /// The constant forcing `i`; disabled only in tests of the homogeneous scheme.
    pub forcing: bool,
}

impl SchemeConfig {
    pub const DEFAULT_CFL_CAP: f64 = 0.4;
    pub const DEFAULT_RECORD_EVERY: usize = 20;

    pub fn new(grid: usize, sigma: f64) -> Result<Self, SchemeError> {
        let cfg = Self {
            grid,
            sigma,
            cfl_cap: Self::DEFAULT_CFL_CAP,
            t_max: 1.0,
            record_every: Self::DEFAULT_RECORD_EVERY,
            forcing: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `σ = ratio · h`.
    pub fn with_cfl_ratio(grid: usize, ratio: f64) -> Result<Self, SchemeError> {
        Self::new(grid, ratio / grid as f64)
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_record_every(mut self, record_every: usize) -> Self {
        self.record_every = record_every;
        self
    }

    pub fn without_forcing(mut self) -> Self {
        self.forcing = false;
        self
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        if self.grid < 2 {
            return Err(SchemeError::GridTooSmall(self.grid));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(SchemeError::InvalidTimeStep(self.sigma));
        }
        if self.record_every == 0 {
            return Err(SchemeError::ZeroRecordStride);
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.grid as f64
    }

    /// `σ/h = σ·J`.
    pub fn cfl_ratio(&self) -> f64 {
        self.sigma * self.grid as f64
    }

    /// Magnitude at which the CFL monitor trips: `cap / ratio` (4 for 0.4 / 0.1).
    pub fn blowup_threshold(&self) -> f64 {
        self.cfl_cap / self.cfl_ratio()
    }

    pub fn effective_viscosity(&self) -> f64 {
        effective_viscosity(self)
    }
}

/// `ε = h²/(2σ)`.
pub fn effective_viscosity(cfg: &SchemeConfig) -> f64 {
    let h = cfg.spacing();
    h * h / (2.0 * cfg.sigma)
}

/// `max(max_j |Re u_j|, max_j Im u_j)`, the quantity monitored by the CFL test.
pub fn cfl_magnitude(u: &ComplexField) -> f64 {
    u.samples()
        .iter()
        .fold(0.0f64, |m, z| m.max(z.re.abs()).max(z.im))
}

/// `σ/h < cap / max(max|Re u|, max Im u)`; a zero maximum passes unconditionally.
pub fn cfl_ok(u: &ComplexField, cfg: &SchemeConfig) -> bool {
    let m = cfl_magnitude(u);
    m <= 0.0 || cfg.cfl_ratio() < cfg.cfl_cap / m
}

fn step_into(src: &[Complex64], dst: &mut [Complex64], cfg: &SchemeConfig) {
    let n = src.len();
    // σ/(2h) applied to F(u) = u²/2.
    let c = cfg.cfl_ratio() * 0.25;
    let forcing = if cfg.forcing {
        Complex64::new(0.0, cfg.sigma)
    } else {
        Complex64::new(0.0, 0.0)
    };
    for j in 0..n {
        let right = src[if j + 1 == n { 0 } else { j + 1 }];
        let left = src[if j == 0 { n - 1 } else { j - 1 }];
        dst[j] = (right + left) * 0.5 - (right * right - left * left) * c + forcing;
    }
}

/// One step `u_j ← ½(u_{j+1}+u_{j-1}) − (σ/2h)(F(u_{j+1}) − F(u_{j-1})) + iσ`.
///
/// The CFL guard is the caller's responsibility.
pub fn lf_step(u: &ComplexField, cfg: &SchemeConfig) -> ComplexField {
    let mut out = u.clone();
    step_into(u.samples(), out.samples_mut(), cfg);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    HorizonReached,
    CflBreak,
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    pub times: Vec<f64>,
    pub max_im: Vec<f64>,
    /// `max_j Im(u_j − it)`.
    pub max_im_shifted: Vec<f64>,
    pub max_re: Vec<f64>,
    /// Last time at which the CFL condition held, when the run ended on a CFL break.
    pub t_f: Option<f64>,
    pub termination: Termination,
    pub steps: u64,
    pub final_field: ComplexField,
}

impl RunTrace {
    fn record(&mut self, t: f64, u: &ComplexField) {
        let max_im = u.samples().iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.im));
        self.times.push(t);
        self.max_im.push(max_im);
        self.max_im_shifted.push(max_im - t);
        self.max_re.push(u.max_abs_re());
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Steps from `datum` until `t_max` or the first CFL failure, recording the
/// monitored maxima every `record_every` steps.
pub fn run(datum: &ComplexField, cfg: &SchemeConfig) -> Result<RunTrace, SchemeError> {
    cfg.validate()?;
    if datum.grid_size() != cfg.grid {
        return Err(SchemeError::GridMismatch {
            datum: datum.grid_size(),
            grid: cfg.grid,
        });
    }
    let max_steps = steps_to_reach(cfg.t_max, cfg.sigma);
    let mut current = datum.clone();
    let mut scratch = datum.clone();
    let mut trace = RunTrace {
        times: Vec::new(),
        max_im: Vec::new(),
        max_im_shifted: Vec::new(),
        max_re: Vec::new(),
        t_f: None,
        termination: Termination::HorizonReached,
        steps: 0,
        final_field: datum.clone(),
    };
    let stride = cfg.record_every as u64;
    let mut n: u64 = 0;
    loop {
        let t = n as f64 * cfg.sigma;
        if current.samples().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(SchemeError::NonFinite { step: n, time: t });
        }
        if !cfl_ok(&current, cfg) {
            if n == 0 {
                return Err(SchemeError::InitialCflViolation {
                    max_magnitude: cfl_magnitude(&current),
                });
            }
            trace.t_f = Some((n - 1) as f64 * cfg.sigma);
            trace.termination = Termination::CflBreak;
            break;
        }
        if n.is_multiple_of(stride) || n == max_steps {
            trace.record(t, &current);
        }
        if n == max_steps {
            break;
        }
        step_into(current.samples(), scratch.samples_mut(), cfg);
        core::mem::swap(&mut current, &mut scratch);
        n += 1;
    }
    trace.steps = n;
    trace.final_field = current;
    Ok(trace)
}

fn steps_to_reach(t_max: f64, sigma: f64) -> u64 {
    if t_max <= 0.0 {
        return 0;
    }
    let n = t_max / sigma;
    let rounded = libm::round(n);
    if (n - rounded).abs() < 1e-9 * n.max(1.0) {
        rounded as u64
    } else {
        libm::ceil(n) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn effective_viscosity_values() {
        let cfg = SchemeConfig::new(2000, 5e-5).unwrap();
        assert!((effective_viscosity(&cfg) - 2.5e-3).abs() < 1e-15);
        for grid in [600, 1000, 2000] {
            let cfg = SchemeConfig::with_cfl_ratio(grid, 0.1).unwrap();
            let expected = 5.0 / grid as f64;
            assert!((cfg.effective_viscosity() - expected).abs() < 1e-14 * expected);
        }
        let cfg = SchemeConfig::new(2, 1.0).unwrap();
        assert_eq!(effective_viscosity(&cfg), 0.125);
    }

    #[test]
    fn cfl_guard() {
        let cfg = SchemeConfig::with_cfl_ratio(10, 0.1).unwrap();
        let f = |z: Complex64| ComplexField::constant(10, z).unwrap();
        assert!(cfl_ok(&f(Complex64::new(1.0, 1.0)), &cfg));
        assert!(!cfl_ok(&f(Complex64::new(0.0, 4.0)), &cfg));
        assert!(cfl_ok(&f(Complex64::new(0.0, 0.0)), &cfg));
        assert!(!cfl_ok(&f(Complex64::new(-4.5, -10.0)), &cfg));
        assert!(cfl_ok(&f(Complex64::new(0.0, -10.0)), &cfg));
    }

    #[test]
    fn constant_datum_gains_i_sigma() {
        let cfg = SchemeConfig::with_cfl_ratio(16, 0.1).unwrap();
        let u = ComplexField::constant(16, Complex64::new(0.7, 0.0)).unwrap();
        let v = lf_step(&u, &cfg);
        for z in v.samples() {
            assert!((z - Complex64::new(0.7, cfg.sigma)).norm() < 1e-15);
        }
    }

    #[test]
    fn homogeneous_scheme_keeps_real_data_real() {
        let cfg = SchemeConfig::with_cfl_ratio(64, 0.1).unwrap().without_forcing();
        let mut u = ComplexField::sine_sum(64, &[(1, 1.0), (3, 0.5)]).unwrap();
        for _ in 0..200 {
            u = lf_step(&u, &cfg);
            assert!(u.samples().iter().all(|z| z.im == 0.0));
        }
    }

    #[test]
    fn zero_datum_breaks_when_imaginary_part_reaches_four() {
        let cfg = SchemeConfig::with_cfl_ratio(8, 0.1).unwrap().with_t_max(5.0);
        let u = ComplexField::constant(8, Complex64::new(0.0, 0.0)).unwrap();
        let trace = run(&u, &cfg).unwrap();
        assert_eq!(trace.termination, Termination::CflBreak);
        let t_f = trace.t_f.unwrap();
        assert!((4.0 - cfg.sigma - 1e-9..4.0).contains(&t_f), "t_f = {t_f}");
        for (t, m) in trace.times.iter().zip(&trace.max_im) {
            assert!((m - t).abs() < 1e-9);
        }

        let short = cfg.clone().with_t_max(1.0);
        let trace = run(&u, &short).unwrap();
        assert_eq!(trace.termination, Termination::HorizonReached);
        assert!(trace.t_f.is_none());
        assert!((trace.times.last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn run_rejects_bad_inputs() {
        let cfg = SchemeConfig::with_cfl_ratio(8, 0.1).unwrap();
        let u = ComplexField::constant(4, Complex64::new(0.0, 0.0)).unwrap();
        assert!(matches!(run(&u, &cfg), Err(SchemeError::GridMismatch { .. })));
        let hot = ComplexField::constant(8, Complex64::new(5.0, 0.0)).unwrap();
        assert!(matches!(
            run(&hot, &cfg),
            Err(SchemeError::InitialCflViolation { .. })
        ));
        let nan = ComplexField::constant(8, Complex64::new(f64::NAN, 0.0)).unwrap();
        assert!(matches!(run(&nan, &cfg), Err(SchemeError::NonFinite { step: 0, .. })));
        assert!(SchemeConfig::new(8, 0.0).is_err());
        assert!(SchemeConfig::new(1, 0.1).is_err());
    }

    #[test]
    fn records_every_stride() {
        let cfg = SchemeConfig::with_cfl_ratio(32, 0.1)
            .unwrap()
            .with_t_max(0.25)
            .with_record_every(20);
        let u = ComplexField::from_fn(32, |x| Complex64::new(0.3 * (2.0 * PI * x).cos(), 0.0)).unwrap();
        let trace = run(&u, &cfg).unwrap();
        assert_eq!(trace.steps, 80);
        assert_eq!(trace.len(), 5);
        assert!((trace.times[1] - 20.0 * cfg.sigma).abs() < 1e-15);
    }
}
