//! Periodic-grid complex fields on the unit torus and their Fourier spectra.
//!
//! Convention: synthesis uses `e^{+2πikx}`, analysis carries the `1/J` factor,
//! so the zeroth coefficient is the mean `∫₀¹ f dx`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("grid size {0} is below the minimum of 2")]
    GridTooSmall(usize),
    #[error("truncation order {truncation} (base frequency {base_frequency}) does not fit a grid of {grid} points")]
    TruncationTooLarge {
        truncation: usize,
        base_frequency: u32,
        grid: usize,
    },
    #[error("coefficient vector has even length {0}; expected 2K+1 entries")]
    EvenCoefficientCount(usize),
    #[error("base frequency must be at least 1")]
    ZeroBaseFrequency,
}

/// Samples `u(x_j)` at `x_j = j/J`, `j = 0..J`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    samples: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(samples: Vec<Complex64>) -> Result<Self, FieldError> {
        if samples.len() < 2 {
            return Err(FieldError::GridTooSmall(samples.len()));
        }
        Ok(Self { samples })
    }

    /// Samples `f` at the grid points `j/J`.
    pub fn from_fn(grid: usize, mut f: impl FnMut(f64) -> Complex64) -> Result<Self, FieldError> {
        if grid < 2 {
            return Err(FieldError::GridTooSmall(grid));
        }
        let samples = (0..grid).map(|j| f(j as f64 / grid as f64)).collect();
        Ok(Self { samples })
    }

    pub fn constant(grid: usize, value: Complex64) -> Result<Self, FieldError> {
        Self::new(vec![value; grid])
    }

    /// Real datum `Σ a_j sin(N_j·2πx)`.
    pub fn sine_sum(grid: usize, modes: &[(u32, f64)]) -> Result<Self, FieldError> {
        Self::from_fn(grid, |x| {
            let value: f64 = modes
                .iter()
                .map(|&(n, a)| a * (2.0 * PI * f64::from(n) * x).sin())
                .sum();
            Complex64::new(value, 0.0)
        })
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.samples.len() as f64
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Periodic shift: the result at `j` is the input at `j - cells`.
    pub fn shifted(&self, cells: usize) -> Self {
        let mut samples = self.samples.clone();
        samples.rotate_right(cells % self.samples.len());
        Self { samples }
    }

    pub fn max_abs_re(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, z| m.max(z.re.abs()))
    }
}

/// Fourier coefficients `c_k`, `k ∈ [-K, K]`, attached to the physical
/// frequency `k·k₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    coeffs: Vec<Complex64>,
    truncation: usize,
    base_frequency: u32,
}

impl ModeSpectrum {
    pub fn zeros(truncation: usize, base_frequency: u32) -> Self {
        assert!(base_frequency >= 1, "base frequency must be at least 1");
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * truncation + 1],
            truncation,
            base_frequency,
        }
    }

    pub fn from_fn(
        truncation: usize,
        base_frequency: u32,
        mut f: impl FnMut(i64) -> Complex64,
    ) -> Self {
        let mut s = Self::zeros(truncation, base_frequency);
        let kmax = truncation as i64;
        for (slot, k) in s.coeffs.iter_mut().zip(-kmax..=kmax) {
            *slot = f(k);
        }
        s
    }

    /// Coefficients ordered from `-K` to `K`.
    pub fn from_coefficients(
        base_frequency: u32,
        coeffs: Vec<Complex64>,
    ) -> Result<Self, FieldError> {
        if base_frequency == 0 {
            return Err(FieldError::ZeroBaseFrequency);
        }
        if coeffs.len().is_multiple_of(2) {
            return Err(FieldError::EvenCoefficientCount(coeffs.len()));
        }
        Ok(Self {
            truncation: coeffs.len() / 2,
            coeffs,
            base_frequency,
        })
    }

    /// Spectrum of `Σ a_j sin(N_j·2π·k₀x)`: `c_{±N} = ±a/(2i)`.
    pub fn sine_sum(truncation: usize, base_frequency: u32, modes: &[(u32, f64)]) -> Self {
        let mut s = Self::zeros(truncation, base_frequency);
        for &(n, a) in modes {
            let n = i64::from(n);
            let half = Complex64::new(0.0, -a / 2.0);
            s.add(n, half);
            s.add(-n, -half);
        }
        s
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn base_frequency(&self) -> u32 {
        self.base_frequency
    }

    pub fn with_base_frequency(mut self, base_frequency: u32) -> Self {
        assert!(base_frequency >= 1, "base frequency must be at least 1");
        self.base_frequency = base_frequency;
        self
    }

    fn index(&self, k: i64) -> Option<usize> {
        let kmax = self.truncation as i64;
        (-kmax..=kmax).contains(&k).then(|| (k + kmax) as usize)
    }

    /// `c_k`, zero outside the truncation band.
    pub fn get(&self, k: i64) -> Complex64 {
        self.index(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Panics if `k` is outside `[-K, K]`.
    pub fn set(&mut self, k: i64, value: Complex64) {
        let i = self.index(k).expect("mode outside truncation band");
        self.coeffs[i] = value;
    }

    fn add(&mut self, k: i64, value: Complex64) {
        let i = self.index(k).expect("mode outside truncation band");
        self.coeffs[i] += value;
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let kmax = self.truncation as i64;
        (-kmax..=kmax).zip(self.coeffs.iter().copied())
    }

    pub fn mean(&self) -> Complex64 {
        self.get(0)
    }

    pub fn without_mean(mut self) -> Self {
        self.set(0, Complex64::new(0.0, 0.0));
        self
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for c in &mut self.coeffs {
            *c *= factor;
        }
        self
    }

    /// Spectrum of `∂_x f`.
    pub fn derivative(&self) -> Self {
        let k0 = f64::from(self.base_frequency);
        let mut out = self.clone();
        for ((k, c), slot) in self.iter().zip(out.coeffs.iter_mut()) {
            *slot = c * Complex64::new(0.0, 2.0 * PI * k as f64 * k0);
        }
        out
    }

    /// Spectrum of `Re f`: `(c_k + conj c_{-k}) / 2`.
    pub fn real_part(&self) -> Self {
        let mut out = self.clone();
        for ((k, c), slot) in self.iter().zip(out.coeffs.iter_mut()) {
            *slot = (c + self.get(-k).conj()) * 0.5;
        }
        out
    }

    /// Spectrum of `Im f`: `(c_k - conj c_{-k}) / 2i`.
    pub fn imag_part(&self) -> Self {
        let mut out = self.clone();
        for ((k, c), slot) in self.iter().zip(out.coeffs.iter_mut()) {
            *slot = (c - self.get(-k).conj()) * Complex64::new(0.0, -0.5);
        }
        out
    }

    /// Largest `|c_{-k} - conj c_k|`; zero exactly for real fields.
    pub fn reality_defect(&self) -> f64 {
        self.iter()
            .map(|(k, c)| (self.get(-k) - c.conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `Σ_k |c_k|`, an upper bound for the sup norm of the represented field.
    pub fn coefficient_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Smallest `|k| > 0` with a nonzero coefficient.
    pub fn lowest_populated_mode(&self) -> Option<u64> {
        self.iter()
            .filter(|&(k, c)| k != 0 && c != Complex64::new(0.0, 0.0))
            .map(|(k, _)| k.unsigned_abs())
            .min()
    }
}

fn roots_of_unity(grid: usize, sign: f64) -> Vec<Complex64> {
    (0..grid)
        .map(|m| {
            let theta = sign * 2.0 * PI * m as f64 / grid as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

fn check_fit(truncation: usize, base_frequency: u32, grid: usize) -> Result<(), FieldError> {
    if grid < 2 {
        return Err(FieldError::GridTooSmall(grid));
    }
    if 2 * truncation * base_frequency as usize + 1 > grid {
        return Err(FieldError::TruncationTooLarge {
            truncation,
            base_frequency,
            grid,
        });
    }
    Ok(())
}

/// `c_k = (1/J) Σ_j e^{-2πikj/J} u_j` for `|k| ≤ K`, by direct summation.
pub fn dft(field: &ComplexField, truncation: usize) -> Result<ModeSpectrum, FieldError> {
    let grid = field.grid_size();
    check_fit(truncation, 1, grid)?;
    let roots = roots_of_unity(grid, -1.0);
    let inv = 1.0 / grid as f64;
    Ok(ModeSpectrum::from_fn(truncation, 1, |k| {
        let step = k.rem_euclid(grid as i64) as usize;
        let mut idx = 0usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for &u in field.samples() {
            acc += roots[idx] * u;
            idx += step;
            if idx >= grid {
                idx -= grid;
            }
        }
        acc * inv
    }))
}

/// `u_j = Σ_k c_k e^{2πi(k·k₀)j/J}`.
pub fn idft(spectrum: &ModeSpectrum, grid: usize) -> Result<ComplexField, FieldError> {
    check_fit(spectrum.truncation(), spectrum.base_frequency(), grid)?;
    let roots = roots_of_unity(grid, 1.0);
    let k0 = i64::from(spectrum.base_frequency());
    let mut samples = vec![Complex64::new(0.0, 0.0); grid];
    for (k, c) in spectrum.iter() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let step = (k * k0).rem_euclid(grid as i64) as usize;
        let mut idx = 0usize;
        for slot in samples.iter_mut() {
            *slot += c * roots[idx];
            idx += step;
            if idx >= grid {
                idx -= grid;
            }
        }
    }
    ComplexField::new(samples)
}

/// Euclidean `H^s` norm: `(Σ_k Σ_{α≤s} (2πk·k₀)^{2α} |c_k|²)^{1/2}`.
pub fn sobolev_norm(spectrum: &ModeSpectrum, s: u32) -> f64 {
    let k0 = f64::from(spectrum.base_frequency());
    spectrum
        .iter()
        .map(|(k, c)| {
            let w = (2.0 * PI * k as f64 * k0).powi(2);
            let mut weight = 1.0;
            let mut term = 1.0;
            for _ in 0..s {
                term *= w;
                weight += term;
            }
            weight * c.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

pub fn l2_norm(spectrum: &ModeSpectrum) -> f64 {
    sobolev_norm(spectrum, 0)
}

/// `max_j Im u_j`.
pub fn linf_max_im(field: &ComplexField) -> f64 {
    field
        .samples()
        .iter()
        .map(|z| z.im)
        .fold(f64::NEG_INFINITY, f64::max)
}
