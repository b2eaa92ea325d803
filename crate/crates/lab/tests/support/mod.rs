//! Independent oracles shared by the integration tests. The oracles never
//! call the solvers under test; [`lf_distance`] pairs the scheme with one.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use cburgers_core::Complex64;
use cburgers_core::{lf_step, ComplexField, SchemeConfig};
use rustfft::{Fft, FftPlanner};

/// Solves `v' = r(t)·v`, `v(0) = 1` by step-doubling RK4 with local relative
/// tolerance `tol`, returning `v` at each of the increasing `checkpoints`.
pub fn adaptive_rk4(rate: impl Fn(f64) -> f64, checkpoints: &[f64], tol: f64) -> Vec<f64> {
    let rk4 = |t: f64, v: f64, h: f64| {
        let k1 = rate(t) * v;
        let k2 = rate(t + h / 2.0) * (v + h / 2.0 * k1);
        let k3 = rate(t + h / 2.0) * (v + h / 2.0 * k2);
        let k4 = rate(t + h) * (v + h * k3);
        v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };
    let mut out = Vec::with_capacity(checkpoints.len());
    let (mut t, mut v, mut h) = (0.0f64, 1.0f64, 1e-3f64);
    for &target in checkpoints {
        while t < target {
            let step = h.min(target - t);
            let full = rk4(t, v, step);
            let half = rk4(t + step / 2.0, rk4(t, v, step / 2.0), step / 2.0);
            let err = (full - half).abs() / half.abs().max(f64::MIN_POSITIVE);
            if err <= tol {
                t += step;
                // Richardson extrapolation of the two estimates.
                v = half + (half - full) / 15.0;
                if step == h {
                    h *= (0.9 * (tol / err.max(1e-300)).powf(0.2)).min(2.0);
                }
            } else {
                h = step * (0.9 * (tol / err).powf(0.2)).max(0.1);
            }
        }
        out.push(v);
    }
    out
}

/// Pseudo-spectral reference for `u_t + u u_x − ε u_xx = i` on the unit torus:
/// `m` collocation points, 2/3 dealiasing, integrating-factor RK4.
pub struct SpectralReference {
    m: usize,
    eps: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Coefficients `û_k` (unnormalized synthesis convention: `u = Σ û_k e^{2πikx}`).
    pub coeffs: Vec<Complex64>,
    pub t: f64,
}

impl SpectralReference {
    pub fn new(m: usize, eps: f64, datum: impl Fn(f64) -> Complex64) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let mut buf: Vec<Complex64> = (0..m).map(|j| datum(j as f64 / m as f64)).collect();
        forward.process(&mut buf);
        let coeffs = buf.into_iter().map(|c| c / m as f64).collect();
        let mut s = Self {
            m,
            eps,
            forward,
            inverse,
            coeffs,
            t: 0.0,
        };
        s.dealias_in_place();
        s
    }

    fn wavenumber(&self, idx: usize) -> f64 {
        let m = self.m as i64;
        let k = idx as i64;
        (if k <= m / 2 { k } else { k - m }) as f64
    }

    fn dealias_in_place(&mut self) {
        let cut = self.m as f64 / 3.0;
        for idx in 0..self.m {
            if self.wavenumber(idx).abs() > cut {
                self.coeffs[idx] = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// `−(u u_x)^ + i δ_{k0}`, dealiased.
    fn rhs(&self, c: &[Complex64]) -> Vec<Complex64> {
        let m = self.m;
        let mut u = c.to_vec();
        let mut ux: Vec<Complex64> = c
            .iter()
            .enumerate()
            .map(|(idx, &z)| z * Complex64::new(0.0, 2.0 * PI * self.wavenumber(idx)))
            .collect();
        self.inverse.process(&mut u);
        self.inverse.process(&mut ux);
        let mut prod: Vec<Complex64> = u.iter().zip(&ux).map(|(a, b)| a * b).collect();
        self.forward.process(&mut prod);
        let cut = m as f64 / 3.0;
        let mut out: Vec<Complex64> = prod
            .into_iter()
            .enumerate()
            .map(|(idx, z)| {
                if self.wavenumber(idx).abs() > cut {
                    Complex64::new(0.0, 0.0)
                } else {
                    -z / m as f64
                }
            })
            .collect();
        out[0] += Complex64::new(0.0, 1.0);
        out
    }

    /// Advances by `dt` with one integrating-factor RK4 step.
    pub fn step(&mut self, dt: f64) {
        let decay: Vec<f64> = (0..self.m)
            .map(|idx| {
                let k = 2.0 * PI * self.wavenumber(idx);
                -self.eps * k * k
            })
            .collect();
        let e_half: Vec<f64> = decay.iter().map(|d| (d * dt / 2.0).exp()).collect();
        let e_full: Vec<f64> = decay.iter().map(|d| (d * dt).exp()).collect();
        let c = self.coeffs.clone();
        let combine = |base: &[Complex64], scale: &[f64], k: &[Complex64], w: f64| -> Vec<Complex64> {
            base.iter().zip(scale).zip(k).map(|((b, s), k)| (b + k * w) * s).collect()
        };
        let k1 = self.rhs(&c);
        let a = combine(&c, &e_half, &k1, dt / 2.0);
        let k2 = self.rhs(&a);
        let b: Vec<Complex64> = c.iter().zip(&e_half).zip(&k2).map(|((c, s), k)| c * s + k * (dt / 2.0)).collect();
        let k3 = self.rhs(&b);
        let d: Vec<Complex64> = c.iter().zip(&e_full).zip(k3.iter().zip(&e_half)).map(|((c, s), (k, h))| c * s + k * h * dt).collect();
        let k4 = self.rhs(&d);
        self.coeffs = (0..self.m)
            .map(|i| {
                c[i] * e_full[i]
                    + (k1[i] * e_full[i] + (k2[i] + k3[i]) * 2.0 * e_half[i] + k4[i]) * (dt / 6.0)
            })
            .collect();
        self.t += dt;
    }

    /// Steps to `t_end` with steps no larger than `dt_max`.
    pub fn advance_to(&mut self, t_end: f64, dt_max: f64) {
        let span = t_end - self.t;
        if span <= 0.0 {
            return;
        }
        let n = (span / dt_max).ceil() as usize;
        let dt = span / n as f64;
        for _ in 0..n {
            self.step(dt);
        }
        self.t = t_end;
    }

    /// Trigonometric interpolant at `x`.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(idx, &c)| c * Complex64::from_polar(1.0, 2.0 * PI * self.wavenumber(idx) * x))
            .sum()
    }
}

/// Max-norm distance at `t_end`, rounded to whole steps, between the scheme
/// and the viscous reference with `ε = h²/(2σ)`, both from `sin(2πx)`.
pub fn lf_distance(grid: usize, sigma: f64, t_end: f64) -> f64 {
    let cfg = SchemeConfig::new(grid, sigma).unwrap();
    let datum = |x: f64| Complex64::new((2.0 * PI * x).sin(), 0.0);
    let mut u = ComplexField::from_fn(grid, datum).unwrap();
    let steps = (t_end / sigma).round() as usize;
    for _ in 0..steps {
        u = lf_step(&u, &cfg);
    }
    let t = steps as f64 * sigma;
    let mut reference = SpectralReference::new(256, cfg.effective_viscosity(), datum);
    reference.advance_to(t, 2e-5);
    u.samples()
        .iter()
        .enumerate()
        .map(|(j, z)| (z - reference.eval(j as f64 / grid as f64)).norm())
        .fold(0.0, f64::max)
}

