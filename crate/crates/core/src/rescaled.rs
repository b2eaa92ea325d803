//! Galerkin-truncated Fourier solver for the rescaled equation
//!
//! ```text
//! ∂_t v + (iεt + ā + ε^α v) ∂_x v − ∂_x² v = 0,   v̄ ≡ 0,
//! ```
//!
//! in the harmonics `e^{2πik·k₀x}`, `|k| ≤ K`. The linear part of mode `k`
//! integrates exactly to `e^{λ_k(t)}` with
//! `λ_k(t) = −2iπk₀kāt + πk₀k(εt² − 4πk₀kt)`.
//!
//! `Re λ₁` reaches `−4π³k₀³/ε`, far outside the range of `f64`, so states are
//! stored as `v_k = e^{s(t)} y_k` with the common log-scale `s(t) = Re λ₁(t)`.
//! The scaled modes obey `y_k' = μ_k' y_k + e^{s} N_k(y)` with
//! `μ_k = λ_k − Re λ₁`, and stay `O(1)` up to and past the amplification time.
//! Time stepping is the integrating-factor (Lawson) fourth-order Runge–Kutta
//! scheme built on the two-time factors `e^{μ_k(t₂) − μ_k(t₁)}`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use thiserror::Error;

use crate::field::{sobolev_norm, ModeSpectrum};

/// Largest exponent accepted before `exp` overflows `f64`.
const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("datum has nonzero mean {0}")]
    NonZeroMean(f64),
    #[error("datum truncation {datum} exceeds solver truncation {solver}")]
    DatumTooWide { datum: usize, solver: usize },
    #[error("datum base frequency {datum} differs from k0 = {solver}")]
    BaseFrequencyMismatch { datum: u32, solver: u32 },
    #[error("propagator exponent {exponent:.1} overflows at t = {time}")]
    Overflow { time: f64, exponent: f64 },
    #[error("non-finite mode at t = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RescaledParams {
    pub k0: u32,
    pub eps: f64,
    /// Amplitude exponent: the nonlinearity carries `ε^α`.
    pub alpha: f64,
    /// Mean `ā` of the datum.
    pub abar: f64,
    /// Truncation order `K`.
    pub truncation: usize,
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    /// Test hook: `false` drops the convective term.
    pub nonlinear: bool,
}

impl RescaledParams {
    pub fn new(k0: u32, eps: f64, alpha: f64, truncation: usize) -> Self {
        Self {
            k0,
            eps,
            alpha,
            abar: 0.0,
            truncation,
            dt: 1e-2,
            t_end: 1.0,
            record_every: 1,
            nonlinear: true,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_record_every(mut self, record_every: usize) -> Self {
        self.record_every = record_every;
        self
    }

    pub fn with_abar(mut self, abar: f64) -> Self {
        self.abar = abar;
        self
    }

    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        let bad = |name, reason| Err(SpectralError::InvalidParameter { name, reason });
        if self.k0 < 1 {
            return bad("k0", "must be at least 1");
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return bad("eps", "must be positive");
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad("alpha", "must be nonnegative");
        }
        if !self.abar.is_finite() {
            return bad("abar", "must be finite");
        }
        if self.truncation < 4 {
            return bad("K", "must be at least 4");
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt", "must be positive");
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad("t_end", "must be nonnegative");
        }
        if self.record_every == 0 {
            return bad("record_every", "must be positive");
        }
        Ok(())
    }

    /// `ε^α`.
    pub fn amplitude(&self) -> f64 {
        self.eps.powf(self.alpha)
    }

    /// Fast time `4πk₀/ε` at which `Re λ₁` returns to zero.
    pub fn amplification_time(&self) -> f64 {
        4.0 * PI * f64::from(self.k0) / self.eps
    }

    /// Fast time `2πk₀/ε` at which `Re λ₁` is minimal.
    pub fn transition_time(&self) -> f64 {
        2.0 * PI * f64::from(self.k0) / self.eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorExponent {
    pub lambda: Complex64,
    /// `λ_k − Re λ₁`.
    pub mu: Complex64,
}

/// `λ_k(t) = −2iπk₀kāt + πk₀k(εt² − 4πk₀kt)`.
pub fn lambda_k(k: i64, t: f64, params: &RescaledParams) -> Complex64 {
    let k0 = f64::from(params.k0);
    let k = k as f64;
    Complex64::new(
        PI * k0 * k * (params.eps * t * t - 4.0 * PI * k0 * k * t),
        -2.0 * PI * k0 * k * params.abar * t,
    )
}

/// `Re λ₁(t) = πk₀(εt² − 4πk₀t)`.
pub fn re_lambda_1(t: f64, params: &RescaledParams) -> f64 {
    let k0 = f64::from(params.k0);
    PI * k0 * (params.eps * t * t - 4.0 * PI * k0 * t)
}

/// `μ_k(t) = −2iπk₀kāt + πk₀(k−1)εt² − 4(πk₀)²(k²−1)t`.
pub fn mu_k(k: i64, t: f64, params: &RescaledParams) -> Complex64 {
    mu_increment(k, 0.0, t, params)
}

pub fn propagator_exponent(k: i64, t: f64, params: &RescaledParams) -> PropagatorExponent {
    PropagatorExponent {
        lambda: lambda_k(k, t, params),
        mu: mu_k(k, t, params),
    }
}

/// `μ_k(t₂) − μ_k(t₁)`, factored to avoid cancellation.
fn mu_increment(k: i64, t1: f64, t2: f64, params: &RescaledParams) -> Complex64 {
    let k0 = f64::from(params.k0);
    let k = k as f64;
    let dt = t2 - t1;
    let re = PI * k0 * (k - 1.0) * params.eps * dt * (t2 + t1)
        - 4.0 * PI * PI * k0 * k0 * (k * k - 1.0) * dt;
    Complex64::new(re, -2.0 * PI * k0 * k * params.abar * dt)
}

/// `out_k = coef · k · Σ_{k₁+k₂=k} v_{k₁} v_{k₂}` over the truncated band.
fn convolve_into(v: &[Complex64], coef: Complex64, out: &mut [Complex64]) {
    let kmax = (v.len() / 2) as i64;
    for (slot, k) in out.iter_mut().zip(-kmax..=kmax) {
        if k == 0 {
            *slot = Complex64::new(0.0, 0.0);
            continue;
        }
        let lo = (-kmax).max(k - kmax);
        let hi = kmax.min(k + kmax);
        let mut acc = Complex64::new(0.0, 0.0);
        for k1 in lo..=hi {
            acc += v[(k1 + kmax) as usize] * v[(k - k1 + kmax) as usize];
        }
        *slot = acc * coef * k as f64;
    }
}

/// Fourier coefficients of `−ε^α ∂_x(v²/2)` truncated to `|k| ≤ K`:
/// `N_k = −ε^α · iπk₀k · Σ_{k₁+k₂=k} v_{k₁} v_{k₂}`, with `N_0 = 0`.
pub fn nonlinear_rhs(modes: &ModeSpectrum, params: &RescaledParams) -> ModeSpectrum {
    let mut out = ModeSpectrum::zeros(modes.truncation(), modes.base_frequency());
    convolve_into(
        modes.coefficients(),
        nonlinear_coefficient(params),
        out.coefficients_mut(),
    );
    out
}

fn nonlinear_coefficient(params: &RescaledParams) -> Complex64 {
    Complex64::new(0.0, -params.amplitude() * PI * f64::from(params.k0))
}

/// Solver state at fast time `t`: `v_k = e^{log_scale} · y_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledState {
    t: f64,
    log_scale: f64,
    scaled: ModeSpectrum,
}

impl RescaledState {
    /// Initial state `v(0) = a(k₀·) − ā` from the datum's harmonic coefficients.
    pub fn from_datum(datum: &ModeSpectrum, params: &RescaledParams) -> Result<Self, SpectralError> {
        params.validate()?;
        if datum.base_frequency() != params.k0 {
            return Err(SpectralError::BaseFrequencyMismatch {
                datum: datum.base_frequency(),
                solver: params.k0,
            });
        }
        if datum.truncation() > params.truncation {
            return Err(SpectralError::DatumTooWide {
                datum: datum.truncation(),
                solver: params.truncation,
            });
        }
        let mean = datum.mean().norm();
        if mean > 1e-12 {
            return Err(SpectralError::NonZeroMean(mean));
        }
        let mut scaled = ModeSpectrum::from_fn(params.truncation, params.k0, |k| datum.get(k));
        scaled.set(0, Complex64::new(0.0, 0.0));
        Ok(Self {
            t: 0.0,
            log_scale: 0.0,
            scaled,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// Modes divided by `e^{log_scale}`.
    pub fn scaled_modes(&self) -> &ModeSpectrum {
        &self.scaled
    }

    pub fn truncation(&self) -> usize {
        self.scaled.truncation()
    }

    /// `v_k`; underflows to zero deep inside the decay window.
    pub fn mode(&self, k: i64) -> Complex64 {
        self.scaled.get(k) * self.log_scale.exp()
    }

    pub fn log_abs_mode(&self, k: i64) -> f64 {
        self.log_scale + self.scaled.get(k).norm().ln()
    }

    /// The unscaled spectrum `v_k`.
    pub fn spectrum(&self) -> ModeSpectrum {
        self.scaled.clone().scaled(self.log_scale.exp())
    }

    /// `ln |w|_{L²}` with `w` the modes `k ∉ {0, 1}`.
    pub fn log_l2_w(&self) -> f64 {
        let w = ModeSpectrum::from_fn(self.scaled.truncation(), self.scaled.base_frequency(), |k| {
            if k == 0 || k == 1 {
                Complex64::new(0.0, 0.0)
            } else {
                self.scaled.get(k)
            }
        });
        self.log_scale + log_norm(&w, 0)
    }

    /// `ln |v|_{H^s}`.
    pub fn log_sobolev_norm(&self, s: u32) -> f64 {
        self.log_scale + log_norm(&self.scaled, s)
    }
}

/// `ln |c|_{H^s}`, dividing by the largest modulus first so that finite
/// coefficients beyond `1e154` do not overflow the squares.
fn log_norm(spectrum: &ModeSpectrum, s: u32) -> f64 {
    let peak = spectrum.coefficients().iter().fold(0.0f64, |m, c| m.max(c.norm()));
    if peak == 0.0 || !peak.is_finite() {
        return peak.ln();
    }
    peak.ln() + sobolev_norm(&spectrum.clone().scaled(peak.recip()), s).ln()
}

struct Workspace {
    e_first: Vec<Complex64>,
    e_second: Vec<Complex64>,
    e_full: Vec<Complex64>,
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    stage: Vec<Complex64>,
}

impl Workspace {
    fn new(len: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); len];
        Self {
            e_first: z.clone(),
            e_second: z.clone(),
            e_full: z.clone(),
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            stage: z,
        }
    }
}

fn fill_factors(
    out: &mut [Complex64],
    t1: f64,
    t2: f64,
    params: &RescaledParams,
) -> Result<(), SpectralError> {
    let kmax = (out.len() / 2) as i64;
    for (slot, k) in out.iter_mut().zip(-kmax..=kmax) {
        if k == 0 {
            *slot = Complex64::new(0.0, 0.0);
            continue;
        }
        let e = mu_increment(k, t1, t2, params);
        if e.re > MAX_EXPONENT {
            return Err(SpectralError::Overflow {
                time: t2,
                exponent: e.re,
            });
        }
        *slot = e.exp();
    }
    Ok(())
}

/// `e^{s(t)} N(y)`; zero once the scale factor underflows.
fn forcing(
    t: f64,
    y: &[Complex64],
    params: &RescaledParams,
    out: &mut [Complex64],
) -> Result<(), SpectralError> {
    let s = re_lambda_1(t, params);
    if s > MAX_EXPONENT {
        return Err(SpectralError::Overflow { time: t, exponent: s });
    }
    let factor = s.exp();
    if !params.nonlinear || factor == 0.0 {
        out.fill(Complex64::new(0.0, 0.0));
        return Ok(());
    }
    convolve_into(y, nonlinear_coefficient(params) * factor, out);
    Ok(())
}

fn advance(
    state: &mut RescaledState,
    params: &RescaledParams,
    h: f64,
    ws: &mut Workspace,
) -> Result<(), SpectralError> {
    let t0 = state.t;
    let tm = t0 + 0.5 * h;
    let t1 = t0 + h;
    fill_factors(&mut ws.e_first, t0, tm, params)?;
    fill_factors(&mut ws.e_second, tm, t1, params)?;
    fill_factors(&mut ws.e_full, t0, t1, params)?;
    let y = state.scaled.coefficients_mut();

    forcing(t0, y, params, &mut ws.k1)?;
    for i in 0..y.len() {
        ws.stage[i] = ws.e_first[i] * (y[i] + ws.k1[i] * (0.5 * h));
    }
    forcing(tm, &ws.stage, params, &mut ws.k2)?;
    for i in 0..y.len() {
        ws.stage[i] = ws.e_first[i] * y[i] + ws.k2[i] * (0.5 * h);
    }
    forcing(tm, &ws.stage, params, &mut ws.k3)?;
    for i in 0..y.len() {
        ws.stage[i] = ws.e_full[i] * y[i] + ws.e_second[i] * ws.k3[i] * h;
    }
    forcing(t1, &ws.stage, params, &mut ws.k4)?;
    for i in 0..y.len() {
        ws.stage[i] = ws.e_full[i] * (y[i] + ws.k1[i] * (h / 6.0))
            + ws.e_second[i] * (ws.k2[i] + ws.k3[i]) * (h / 3.0)
            + ws.k4[i] * (h / 6.0);
    }
    // The state is left untouched on failure.
    if ws.stage.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(SpectralError::NonFinite(t1));
    }
    y.copy_from_slice(&ws.stage);
    state.t = t1;
    state.log_scale = re_lambda_1(t1, params);
    Ok(())
}

/// Advances by `h` with the integrating-factor RK4 step.
pub fn step_by(
    state: &RescaledState,
    params: &RescaledParams,
    h: f64,
) -> Result<RescaledState, SpectralError> {
    let mut next = state.clone();
    let mut ws = Workspace::new(next.scaled.coefficients().len());
    advance(&mut next, params, h, &mut ws)?;
    Ok(next)
}

/// Advances by `params.dt`.
pub fn step(state: &RescaledState, params: &RescaledParams) -> Result<RescaledState, SpectralError> {
    step_by(state, params, params.dt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaledRecord {
    pub t: f64,
    pub log_abs_v1: f64,
    pub log_l2_w: f64,
    pub re_lambda1: f64,
}

impl RescaledRecord {
    fn of(state: &RescaledState) -> Self {
        Self {
            t: state.t,
            log_abs_v1: state.log_abs_mode(1),
            log_l2_w: state.log_l2_w(),
            re_lambda1: state.log_scale,
        }
    }

    pub fn abs_v1(&self) -> f64 {
        self.log_abs_v1.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RescaledTermination {
    Completed,
    /// A propagator exponent left the range of `f64`.
    Overflow { time: f64 },
    /// The truncated system produced a non-finite mode: the solution blew up.
    /// The trajectory ends at the last finite state.
    BlowUp { time: f64 },
}

impl RescaledTermination {
    /// Time at which the run stopped early, if it did.
    pub fn early_stop(&self) -> Option<f64> {
        match *self {
            Self::Completed => None,
            Self::Overflow { time } | Self::BlowUp { time } => Some(time),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: RescaledParams,
    pub initial: RescaledState,
    /// States sampled every `record_every` steps, plus the last state.
    pub states: Vec<RescaledState>,
    pub records: Vec<RescaledRecord>,
    pub termination: RescaledTermination,
}

impl Trajectory {
    pub fn last(&self) -> &RescaledState {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    /// Appends a continuation started from this trajectory's last state.
    pub fn append(&mut self, continuation: Trajectory) {
        let skip = usize::from(continuation.states.first().map(|s| s.t) == Some(self.last().t));
        self.states.extend(continuation.states.into_iter().skip(skip));
        self.records.extend(continuation.records.into_iter().skip(skip));
        self.params.t_end = continuation.params.t_end;
        self.termination = continuation.termination;
    }
}

pub fn run_rescaled(
    datum: &ModeSpectrum,
    params: &RescaledParams,
) -> Result<Trajectory, SpectralError> {
    evolve(RescaledState::from_datum(datum, params)?, params)
}

/// Integrates from `initial.t()` to `params.t_end`; the last step is shortened
/// to land on `t_end` exactly. Overflow and blow-up end the run early.
pub fn evolve(initial: RescaledState, params: &RescaledParams) -> Result<Trajectory, SpectralError> {
    params.validate()?;
    if initial.truncation() != params.truncation {
        return Err(SpectralError::DatumTooWide {
            datum: initial.truncation(),
            solver: params.truncation,
        });
    }
    let t_start = initial.t;
    let mut traj = Trajectory {
        params: params.clone(),
        initial: initial.clone(),
        states: vec![initial.clone()],
        records: vec![RescaledRecord::of(&initial)],
        termination: RescaledTermination::Completed,
    };
    let mut state = initial;
    let mut ws = Workspace::new(state.scaled.coefficients().len());
    let span = params.t_end - t_start;
    let mut n: u64 = 0;
    while state.t < params.t_end {
        let target = t_start + (n + 1) as f64 * params.dt;
        let last = target >= params.t_end - 1e-9 * params.dt.max(span.abs());
        let h = if last { params.t_end - state.t } else { target - state.t };
        match advance(&mut state, params, h, &mut ws) {
            Ok(()) => {}
            Err(SpectralError::Overflow { time, .. }) => {
                traj.termination = RescaledTermination::Overflow { time };
                break;
            }
            Err(SpectralError::NonFinite(time)) => {
                traj.termination = RescaledTermination::BlowUp { time };
                break;
            }
            Err(e) => return Err(e),
        }
        if last {
            state.t = params.t_end;
            state.log_scale = re_lambda_1(params.t_end, params);
        }
        n += 1;
        if last || n.is_multiple_of(params.record_every as u64) {
            traj.records.push(RescaledRecord::of(&state));
            traj.states.push(state.clone());
        }
        if last {
            break;
        }
    }
    if traj.termination != RescaledTermination::Completed
        && traj.states.last().map(|s| s.t) != Some(state.t)
    {
        traj.records.push(RescaledRecord::of(&state));
        traj.states.push(state);
    }
    Ok(traj)
}
