//! Sweeps of Lax–Friedrichs runs reproducing the blow-up-time figures.
//!
//! Every case is one single-threaded run; cases of a sweep run concurrently
//! and are reported in their construction order, so reports are deterministic.

use std::f64::consts::PI;

use cburgers_core::fit::linear_fit;
use cburgers_core::propagator::linearized_max_im;
use cburgers_core::{run, CcParams, ComplexField, Convention, RunTrace, SchemeConfig};
use rayon::prelude::*;

use crate::config::{Figure, Preset};
use crate::error::LabError;
use crate::report::KeyValues;
use crate::series::Table;
use crate::svg::{Plot, Series, Style};

/// Datum `Σ a_j sin(N_j·2πx)` and the scheme parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub label: String,
    pub modes: Vec<(u32, f64)>,
    pub grid: usize,
    pub sigma: f64,
    pub t_max: f64,
    pub record_every: usize,
}

/// Predicted times for the smallest populated mode `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Predictions {
    /// `2πεN`.
    pub transition: f64,
    /// `4πεN`.
    pub t_cc_4pi: f64,
    /// `8πεN`.
    pub t_cc_8pi: f64,
}

impl Predictions {
    pub fn new(eps: f64, n: u32) -> Self {
        let n = f64::from(n);
        Self {
            transition: 2.0 * PI * eps * n,
            t_cc_4pi: 4.0 * PI * eps * n,
            t_cc_8pi: 8.0 * PI * eps * n,
        }
    }
}

/// `ε = h²/(2σ)`.
pub fn effective_eps(grid: usize, sigma: f64) -> f64 {
    let h = 1.0 / grid as f64;
    h * h / (2.0 * sigma)
}

/// Twice the larger predictor, `16πεN`.
pub fn safety_horizon(grid: usize, sigma: f64, n: u32) -> f64 {
    2.0 * Predictions::new(effective_eps(grid, sigma), n).t_cc_8pi
}

impl CaseSpec {
    /// Single sine mode with the safety horizon and the recording stride 20.
    pub fn single(label: impl Into<String>, n: u32, grid: usize, sigma: f64) -> Self {
        Self::with_modes(label, vec![(n, 1.0)], grid, sigma)
    }

    pub fn with_modes(label: impl Into<String>, modes: Vec<(u32, f64)>, grid: usize, sigma: f64) -> Self {
        let mut spec = Self {
            label: label.into(),
            modes,
            grid,
            sigma,
            t_max: 0.0,
            record_every: SchemeConfig::DEFAULT_RECORD_EVERY,
        };
        spec.t_max = spec.smallest_mode().map_or(5.0, |n| safety_horizon(grid, sigma, n));
        spec
    }

    /// Smallest `N_j > 0` with `a_j ≠ 0`.
    pub fn smallest_mode(&self) -> Option<u32> {
        self.modes.iter().filter(|&&(n, a)| n > 0 && a != 0.0).map(|&(n, _)| n).min()
    }

    pub fn eps(&self) -> f64 {
        effective_eps(self.grid, self.sigma)
    }

    pub fn predictions(&self) -> Option<Predictions> {
        self.smallest_mode().map(|n| Predictions::new(self.eps(), n))
    }

    pub fn scheme(&self) -> Result<SchemeConfig, LabError> {
        Ok(SchemeConfig::new(self.grid, self.sigma)?
            .with_t_max(self.t_max)
            .with_record_every(self.record_every))
    }

    pub fn datum(&self) -> Result<ComplexField, LabError> {
        ComplexField::sine_sum(self.grid, &self.modes).map_err(|e| LabError::Case {
            case: self.label.clone(),
            reason: e.to_string(),
        })
    }

    pub fn run(&self) -> Result<CaseResult, LabError> {
        let trace = run(&self.datum()?, &self.scheme()?)?;
        log::debug!("case {}: t_f = {:?}, {} steps", self.label, trace.t_f, trace.steps);
        Ok(CaseResult {
            spec: self.clone(),
            trace,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub spec: CaseSpec,
    pub trace: RunTrace,
}

impl CaseResult {
    /// Present iff the run ended on a CFL break.
    pub fn t_f(&self) -> Option<f64> {
        self.trace.t_f
    }

    /// `t + a·max Im` of the linearized solution, for single-mode data.
    pub fn linearized(&self, convention: Convention, t: f64) -> Option<f64> {
        let [(n, a)] = self.spec.modes[..] else {
            return None;
        };
        let p = CcParams::new(self.spec.eps(), 1, convention);
        Some(t + a * linearized_max_im(n, &p, t))
    }

    /// Largest `|num − lin|/lin` over recorded `t > 0` while `max Im u ≤ cap`,
    /// against the torus-convention envelope.
    pub fn linearized_gap(&self, cap: f64) -> Option<f64> {
        let mut worst: Option<f64> = None;
        for (&t, &m) in self.trace.times.iter().zip(&self.trace.max_im) {
            if m > cap {
                break;
            }
            if t == 0.0 {
                continue;
            }
            let lin = self.linearized(Convention::Torus, t)?;
            let gap = (m - lin).abs() / lin.abs();
            worst = Some(worst.map_or(gap, |w| w.max(gap)));
        }
        worst
    }

    /// First recorded time at which `max Im u − t` reaches `level`.
    pub fn departure_time(&self, level: f64) -> Option<f64> {
        self.trace
            .times
            .iter()
            .zip(&self.trace.max_im_shifted)
            .find(|&(_, &d)| d >= level)
            .map(|(&t, _)| t)
    }

    pub fn series(&self) -> Table {
        let single = self.spec.modes.len() == 1;
        let mut columns = vec!["t", "max_im", "max_im_minus_t", "max_abs_re"];
        if single {
            columns.extend(["t_plus_lin_torus", "t_plus_lin_fig1"]);
        }
        let mut table = Table::new(columns);
        for i in 0..self.trace.len() {
            let t = self.trace.times[i];
            let mut row = vec![t, self.trace.max_im[i], self.trace.max_im_shifted[i], self.trace.max_re[i]];
            if single {
                row.push(self.linearized(Convention::Torus, t).expect("single mode"));
                row.push(self.linearized(Convention::Figure1, t).expect("single mode"));
            }
            table.push(row);
        }
        table
    }
}

/// Command-line refinements of a figure preset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Setup {
    pub preset: Preset,
    pub grids: Option<Vec<usize>>,
    pub sigma: Option<f64>,
    pub ratio: Option<f64>,
    pub n: Option<Vec<u32>>,
    pub t_max: Option<f64>,
    pub record_every: Option<usize>,
}

impl Setup {
    pub fn preset(preset: Preset) -> Self {
        Self {
            preset,
            ..Self::default()
        }
    }
}

/// Time-step rule of a preset.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Step {
    Sigma(f64),
    Ratio(f64),
}

const FULL_SIGMA: f64 = 5e-5;
const CI_RATIO: f64 = 0.1;
const FIG5_CASES: usize = 8;

fn preset_grids(figure: Figure, preset: Preset) -> Vec<usize> {
    match (figure, preset) {
        (Figure::Fig6, Preset::Full) => (600..=2000).rev().step_by(200).collect(),
        (Figure::Fig6, Preset::Ci) => (300..=1000).rev().step_by(100).collect(),
        (_, Preset::Full) => vec![2000],
        (_, Preset::Ci) => vec![1024],
    }
}

fn preset_step(figure: Figure, preset: Preset) -> Step {
    match (figure, preset) {
        (Figure::Fig6, _) | (_, Preset::Ci) => Step::Ratio(CI_RATIO),
        (_, Preset::Full) => Step::Sigma(FULL_SIGMA),
    }
}

fn preset_modes(figure: Figure) -> Vec<u32> {
    match figure {
        Figure::Fig1 => vec![8, 16, 24],
        Figure::Fig4 => (2..=16).step_by(2).collect(),
        Figure::Fig5 => vec![4],
        Figure::Fig6 => vec![10],
    }
}

/// Data of the itemized multi-mode cases, numbered from 1.
pub fn fig5_modes(case: usize) -> Vec<(u32, f64)> {
    match case {
        1 => vec![(4, 1.0)],
        2..=5 => vec![(4, 1.0), (4 + 2 * (case as u32 - 1), 1.0)],
        6 => vec![(4, 1.0), (6, 1.0), (8, 1.0)],
        7 => vec![(4, 1.0), (6, 2.0), (8, 1.0)],
        8 => vec![(4, 1.0), (6, 2.0), (8, -1.0)],
        _ => panic!("fig5 has cases 1 to {FIG5_CASES}"),
    }
}

/// The case list of a figure under `setup`.
pub fn cases(figure: Figure, setup: &Setup) -> Vec<CaseSpec> {
    let grids = setup.grids.clone().unwrap_or_else(|| preset_grids(figure, setup.preset));
    let step = match (setup.sigma, setup.ratio) {
        (Some(s), _) => Step::Sigma(s),
        (None, Some(r)) => Step::Ratio(r),
        (None, None) => preset_step(figure, setup.preset),
    };
    let sigma_for = |grid: usize| match step {
        Step::Sigma(s) => s,
        Step::Ratio(r) => r / grid as f64,
    };
    let modes = setup.n.clone().unwrap_or_else(|| preset_modes(figure));
    let mut specs = Vec::new();
    match figure {
        Figure::Fig1 | Figure::Fig4 => {
            for &grid in &grids {
                for &n in &modes {
                    let label = if grids.len() == 1 { format!("N{n}") } else { format!("J{grid}_N{n}") };
                    specs.push(CaseSpec::single(label, n, grid, sigma_for(grid)));
                }
            }
        }
        Figure::Fig5 => {
            for &grid in &grids {
                for case in 1..=FIG5_CASES {
                    let label = if grids.len() == 1 { format!("case{case}") } else { format!("J{grid}_case{case}") };
                    specs.push(CaseSpec::with_modes(label, fig5_modes(case), grid, sigma_for(grid)));
                }
            }
        }
        Figure::Fig6 => {
            for &n in &modes {
                for &grid in &grids {
                    let label = if modes.len() == 1 { format!("J{grid}") } else { format!("J{grid}_N{n}") };
                    specs.push(CaseSpec::single(label, n, grid, sigma_for(grid)));
                }
            }
        }
    }
    for spec in &mut specs {
        if let Some(t) = setup.t_max {
            spec.t_max = t;
        }
        if let Some(r) = setup.record_every {
            spec.record_every = r;
        }
    }
    specs
}

/// Runs the cases concurrently; results keep the input order.
pub fn run_cases(specs: &[CaseSpec]) -> Result<Vec<CaseResult>, LabError> {
    specs.par_iter().map(CaseSpec::run).collect()
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub figure: Figure,
    pub preset: Preset,
    pub cases: Vec<CaseResult>,
}

pub fn run_figure(figure: Figure, setup: &Setup) -> Result<ExperimentReport, LabError> {
    let specs = cases(figure, setup);
    log::info!("{}: {} cases", figure.name(), specs.len());
    Ok(ExperimentReport {
        figure,
        preset: setup.preset,
        cases: run_cases(&specs)?,
    })
}

pub fn fig1(setup: &Setup) -> Result<ExperimentReport, LabError> {
    run_figure(Figure::Fig1, setup)
}

pub fn fig4(setup: &Setup) -> Result<ExperimentReport, LabError> {
    run_figure(Figure::Fig4, setup)
}

pub fn fig5(setup: &Setup) -> Result<ExperimentReport, LabError> {
    run_figure(Figure::Fig5, setup)
}

pub fn fig6(setup: &Setup) -> Result<ExperimentReport, LabError> {
    run_figure(Figure::Fig6, setup)
}

/// Level of `max Im u − t` marking the visible departure from the forcing ramp.
pub const DEPARTURE_LEVEL: f64 = 0.5;
/// Range of `max Im u` over which the linearized gap is measured.
pub const GAP_CAP: f64 = 0.5;

const NAN: f64 = f64::NAN;

impl ExperimentReport {
    pub fn t_f(&self) -> Vec<Option<f64>> {
        self.cases.iter().map(CaseResult::t_f).collect()
    }

    fn abscissa(&self, case: &CaseResult, index: usize) -> f64 {
        match self.figure {
            Figure::Fig5 => (index % FIG5_CASES + 1) as f64,
            Figure::Fig6 => case.spec.eps(),
            _ => f64::from(case.spec.smallest_mode().unwrap_or(0)),
        }
    }

    /// One row per case in a fixed column order.
    pub fn summary(&self) -> Table {
        let head: &[&str] = match self.figure {
            Figure::Fig1 => &["N", "J", "eps"],
            Figure::Fig4 => &["N", "J", "eps"],
            Figure::Fig5 => &["case", "J", "eps"],
            Figure::Fig6 => &["N", "J", "eps"],
        };
        let mut columns: Vec<&str> = head.to_vec();
        columns.extend(["t_f", "t_cc_4pi", "t_cc_8pi", "t_transition"]);
        if self.figure == Figure::Fig1 {
            columns.extend(["departure_time", "linearized_gap"]);
        }
        let mut table = Table::new(columns);
        for (i, case) in self.cases.iter().enumerate() {
            let key = match self.figure {
                Figure::Fig5 => self.abscissa(case, i),
                _ => f64::from(case.spec.smallest_mode().unwrap_or(0)),
            };
            let p = case.spec.predictions();
            let mut row = vec![
                key,
                case.spec.grid as f64,
                case.spec.eps(),
                case.t_f().unwrap_or(NAN),
                p.map_or(NAN, |p| p.t_cc_4pi),
                p.map_or(NAN, |p| p.t_cc_8pi),
                p.map_or(NAN, |p| p.transition),
            ];
            if self.figure == Figure::Fig1 {
                row.push(case.departure_time(DEPARTURE_LEVEL).unwrap_or(NAN));
                row.push(case.linearized_gap(GAP_CAP).unwrap_or(NAN));
            }
            table.push(row);
        }
        table
    }

    /// Fit of `t_f` against the figure's abscissa over cases with a break.
    fn fit_over(&self, keep: impl Fn(&CaseResult) -> bool) -> Option<cburgers_core::fit::LinearFit> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .cases
            .iter()
            .enumerate()
            .filter(|(_, c)| keep(c))
            .filter_map(|(i, c)| c.t_f().map(|t| (self.abscissa(c, i), t)))
            .unzip();
        linear_fit(&x, &y)
    }

    /// Derived quantities: fits, spreads, gaps and trend flags.
    pub fn metrics(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.push("figure", self.figure.name()).push("preset", self.preset.name()).push("cases", self.cases.len());
        let tf: Vec<Option<f64>> = self.t_f();
        let all_broke = tf.iter().all(Option::is_some);
        kv.push("all_cases_broke", all_broke);
        match self.figure {
            Figure::Fig1 => {
                for c in &self.cases {
                    kv.push_opt(format!("{}.departure_time", c.spec.label), c.departure_time(DEPARTURE_LEVEL));
                    kv.push_opt(format!("{}.linearized_gap", c.spec.label), c.linearized_gap(GAP_CAP));
                }
            }
            Figure::Fig4 => {
                let increasing = tf.windows(2).all(|w| matches!(w, [Some(a), Some(b)] if b > a));
                let above = self.cases.iter().all(|c| match (c.t_f(), c.spec.predictions()) {
                    (Some(t), Some(p)) => t >= p.transition,
                    _ => false,
                });
                kv.push("t_f_increasing", increasing).push("t_f_above_transition", above);
                if let Some(fit) = self.fit_over(|c| c.spec.smallest_mode().is_some_and(|n| n >= 6)) {
                    kv.push_f64("fit_n_ge_6.slope", fit.slope)
                        .push_f64("fit_n_ge_6.intercept", fit.intercept)
                        .push_f64("fit_n_ge_6.r_squared", fit.r_squared);
                }
            }
            Figure::Fig5 => {
                let values: Vec<f64> = tf.iter().flatten().copied().collect();
                if !values.is_empty() {
                    let mean = values.iter().sum::<f64>() / values.len() as f64;
                    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
                    kv.push_f64("t_f_mean", mean).push_f64("t_f_spread", (hi - lo) / mean);
                }
                let shared = self.cases.iter().filter_map(|c| c.spec.smallest_mode()).all(|n| n == 4);
                kv.push("shared_smallest_mode", shared);
            }
            Figure::Fig6 => {
                if let Some(fit) = self.fit_over(|_| true) {
                    kv.push_f64("fit_eps.slope", fit.slope)
                        .push_f64("fit_eps.intercept", fit.intercept)
                        .push_f64("fit_eps.r_squared", fit.r_squared);
                }
            }
        }
        kv
    }

    pub fn plot(&self) -> Plot {
        let mut series = Vec::new();
        match self.figure {
            Figure::Fig1 => {
                for (i, c) in self.cases.iter().enumerate() {
                    let num = c.trace.times.iter().copied().zip(c.trace.max_im.iter().copied()).collect();
                    series.push(Series::new(format!("{} numerical", c.spec.label), num, Style::THICK, i));
                    let lin = c
                        .trace
                        .times
                        .iter()
                        .filter_map(|&t| c.linearized(Convention::Torus, t).map(|v| (t, v)))
                        .collect();
                    series.push(Series::new(format!("{} linearized", c.spec.label), lin, Style::THIN, i));
                }
                return Plot {
                    title: "max Im u: numerical (thick) and t + linearized (thin)".into(),
                    x_label: "t".into(),
                    y_label: "max Im u".into(),
                    series,
                    y_range: Some((0.0, 4.5)),
                };
            }
            _ => {
                let crosses: Vec<(f64, f64)> = self
                    .cases
                    .iter()
                    .enumerate()
                    .filter_map(|(i, c)| c.t_f().map(|t| (self.abscissa(c, i), t)))
                    .collect();
                let line = |pick: fn(&Predictions) -> f64| -> Vec<(f64, f64)> {
                    let mut pts: Vec<(f64, f64)> = self
                        .cases
                        .iter()
                        .enumerate()
                        .filter_map(|(i, c)| c.spec.predictions().map(|p| (self.abscissa(c, i), pick(&p))))
                        .collect();
                    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                    pts.dedup_by(|a, b| a.0 == b.0);
                    pts
                };
                series.push(Series::new("t_cc = 4πεN", line(|p| p.t_cc_4pi), Style::THIN, 1));
                series.push(Series::new("8πεN", line(|p| p.t_cc_8pi), Style::DASHED, 2));
                series.push(Series::new("t_f", crosses, Style::CROSSES, 0));
            }
        }
        let x_label = match self.figure {
            Figure::Fig5 => "case",
            Figure::Fig6 => "ε",
            _ => "N",
        };
        Plot {
            title: format!("{}: final computing time and linear prediction", self.figure.name()),
            x_label: x_label.into(),
            y_label: "t".into(),
            series,
            y_range: None,
        }
    }
}
