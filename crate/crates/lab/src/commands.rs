//! Execution of validated configurations. Every command writes into one run
//! directory and finishes with `manifest.txt`, which names every file written.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use cburgers_core::checks::{
    check_energy_decay, check_errfn, check_gaussian_tail, check_pw, check_theorem1, check_theorem2, fit_theorem1,
    CheckReport, Theorem1Calibration,
};
use cburgers_core::propagator::linearized_max_im;
use cburgers_core::rescaled::{evolve, RescaledTermination};
use cburgers_core::{run_rescaled, CcParams, Complex64, Convention, ModeSpectrum, RescaledParams, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{CheckKind, Command, Config, Figure};
use crate::error::LabError;
use crate::experiments::{self, CaseSpec, Setup};
use crate::report::{check_report, KeyValues};
use crate::series::Table;
use crate::svg::{Plot, Series, Style};

/// Root of the default run directories, relative to the working directory.
pub const DEFAULT_ROOT: &str = "cburgers-runs";

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub dir: PathBuf,
    /// Paths relative to `dir`, in write order; the manifest comes last.
    pub files: Vec<String>,
    /// `Some` for checks.
    pub passed: Option<bool>,
    pub summary: KeyValues,
}

struct RunDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl RunDir {
    fn create(dir: PathBuf) -> Result<Self, LabError> {
        fs::create_dir_all(&dir).map_err(LabError::io(&dir))?;
        Ok(Self { dir, files: Vec::new() })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    fn table(&mut self, name: &str, table: &Table) -> Result<(), LabError> {
        let path = self.path(name);
        table.write(&path)
    }

    fn values(&mut self, name: &str, kv: &KeyValues) -> Result<(), LabError> {
        let path = self.path(name);
        kv.write(&path)
    }

    fn plot(&mut self, name: &str, plot: &Plot) -> Result<(), LabError> {
        let path = self.path(name);
        plot.write(&path)
    }

    fn finish(mut self, passed: Option<bool>, summary: KeyValues) -> Result<Outcome, LabError> {
        self.values("summary.txt", &summary)?;
        let manifest = self.dir.join("manifest.txt");
        self.files.push("manifest.txt".into());
        let text: String = self.files.iter().map(|f| format!("{f}\n")).collect();
        fs::write(&manifest, text).map_err(LabError::io(&manifest))?;
        Ok(Outcome {
            dir: self.dir,
            files: self.files,
            passed,
            summary,
        })
    }
}

/// Directory name of a command: `check theorem1` becomes `check-theorem1`.
pub fn default_dir(command: &Command) -> PathBuf {
    Path::new(DEFAULT_ROOT).join(command.name().replace(' ', "-"))
}

/// Runs `config`, writing under its `out` key or [`default_dir`].
pub fn execute(config: &Config) -> Result<Outcome, LabError> {
    let dir = config.out().unwrap_or_else(|| default_dir(&config.command));
    let mut run = RunDir::create(dir)?;
    let mut echo = KeyValues::new();
    echo.push("command", config.command.name());
    for (k, v) in config.iter() {
        echo.push(k, v);
    }
    run.values("config.txt", &echo)?;
    let (passed, summary) = match config.command {
        Command::Simulate => (None, simulate(config, &mut run)?),
        Command::Cc => (None, cc(config, &mut run)?),
        Command::Spectral => (None, spectral(config, &mut run)?),
        Command::Figure(f) => (None, figure(f, config, &mut run)?),
        Command::Check(c) => {
            let (passed, kv) = check(c, config, &mut run)?;
            (Some(passed), kv)
        }
    };
    run.finish(passed, summary)
}

fn uint_or(config: &Config, key: &str, default: u64) -> u64 {
    config.uint(key).unwrap_or(default)
}

fn u32_or(config: &Config, key: &str, default: u32) -> Result<u32, LabError> {
    let v = uint_or(config, key, u64::from(default));
    u32::try_from(v).map_err(|_| {
        LabError::Config(crate::config::ConfigError::Invalid {
            key: key.into(),
            reason: "too large".into(),
        })
    })
}

fn sigma_for(config: &Config, grid: usize) -> f64 {
    config
        .float("sigma")
        .unwrap_or_else(|| config.float("ratio").unwrap_or(0.1) / grid as f64)
}

fn simulate(config: &Config, run: &mut RunDir) -> Result<KeyValues, LabError> {
    let grid = uint_or(config, "J", 1024) as usize;
    let sigma = sigma_for(config, grid);
    let modes = match config.modes() {
        Some(m) => m,
        None => vec![(u32_or(config, "N", 16)?, 1.0)],
    };
    let mut spec = CaseSpec::with_modes("simulate", modes, grid, sigma);
    if let Some(t) = config.float("t_max") {
        spec.t_max = t;
    }
    if let Some(r) = config.uint("record_every") {
        spec.record_every = r as usize;
    }
    let result = spec.run()?;
    run.table("trace.csv", &result.series())?;
    let mut field = Table::new(["x", "re_u", "im_u"]);
    let h = 1.0 / grid as f64;
    for (j, z) in result.trace.final_field.samples().iter().enumerate() {
        field.push(vec![j as f64 * h, z.re, z.im]);
    }
    run.table("final_field.csv", &field)?;
    let points: Vec<(f64, f64)> = result.trace.times.iter().copied().zip(result.trace.max_im.iter().copied()).collect();
    run.plot(
        "max_im.svg",
        &Plot {
            title: format!("J = {grid}, σ = {sigma:e}"),
            x_label: "t".into(),
            y_label: "max Im u".into(),
            series: vec![Series::new("max Im u", points, Style::THICK, 0)],
            y_range: None,
        },
    )?;
    let mut kv = KeyValues::new();
    kv.push("J", grid)
        .push_f64("sigma", sigma)
        .push_f64("eps", spec.eps())
        .push_f64("t_max", spec.t_max)
        .push("termination", format!("{:?}", result.trace.termination))
        .push_opt("t_f", result.t_f())
        .push("steps", result.trace.steps);
    if let Some(p) = spec.predictions() {
        kv.push_f64("t_transition", p.transition)
            .push_f64("t_cc_4pi", p.t_cc_4pi)
            .push_f64("t_cc_8pi", p.t_cc_8pi);
    }
    Ok(kv)
}

fn cc(config: &Config, run: &mut RunDir) -> Result<KeyValues, LabError> {
    let n = u32_or(config, "N", 16)?;
    let k0 = u32_or(config, "k0", 1)?;
    let eps = config.float("eps").unwrap_or(2.5e-3);
    let t_max = config.float("t_max").unwrap_or(1.0);
    let dt = config.float("dt").unwrap_or(1e-3);
    let torus = CcParams::new(eps, k0, Convention::Torus);
    let fig1 = CcParams::new(eps, k0, Convention::Figure1);
    let mode = n * k0;
    let steps = (t_max / dt).round().max(1.0) as usize;
    let mut table = Table::new(["t", "max_im_torus", "max_im_fig1", "t_plus_torus", "t_plus_fig1"]);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for i in 0..=steps {
        let t = t_max * i as f64 / steps as f64;
        let mt = linearized_max_im(mode, &torus, t);
        let mf = linearized_max_im(mode, &fig1, t);
        table.push(vec![t, mt, mf, t + mt, t + mf]);
        a.push((t, t + mt));
        b.push((t, t + mf));
    }
    run.table("envelope.csv", &table)?;
    run.plot(
        "envelope.svg",
        &Plot {
            title: format!("t + linearized max Im, N = {mode}, ε = {eps:e}"),
            x_label: "t".into(),
            y_label: "max Im".into(),
            series: vec![
                Series::new("torus", a, Style::THICK, 0),
                Series::new("figure-1 normalization", b, Style::DASHED, 1),
            ],
            y_range: Some((0.0, 4.5)),
        },
    )?;
    let m = f64::from(mode);
    let mut kv = KeyValues::new();
    kv.push("N", mode)
        .push_f64("eps", eps)
        .push_f64("torus.t_transition", 2.0 * PI * eps * m)
        .push_f64("torus.t_amplification", 4.0 * PI * eps * m)
        .push_f64("fig1.t_transition", eps * m)
        .push_f64("fig1.t_amplification", 2.0 * eps * m)
        .push_f64("t_cc_4pi", 4.0 * PI * eps * m)
        .push_f64("t_cc_8pi", 8.0 * PI * eps * m);
    Ok(kv)
}

/// Parameters shared by the spectral command and the rescaled checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSetup {
    pub k0: u32,
    pub eps: f64,
    pub alpha: f64,
    pub abar: f64,
    pub truncation: usize,
    pub dt: f64,
    pub record_every: usize,
    /// Datum `amplitude · sin(2πk₀x)`.
    pub amplitude: f64,
}

impl SpectralSetup {
    pub fn params(&self, t_end: f64) -> RescaledParams {
        RescaledParams::new(self.k0, self.eps, self.alpha, self.truncation)
            .with_abar(self.abar)
            .with_dt(self.dt)
            .with_t_end(t_end)
            .with_record_every(self.record_every)
    }

    pub fn datum(&self) -> ModeSpectrum {
        ModeSpectrum::sine_sum(self.truncation, self.k0, &[(1, self.amplitude)])
    }

    fn from_config(config: &Config, defaults: SpectralSetup) -> Result<Self, LabError> {
        Ok(Self {
            k0: u32_or(config, "k0", defaults.k0)?,
            eps: config.float("eps").unwrap_or(defaults.eps),
            alpha: config.float("alpha").unwrap_or(defaults.alpha),
            abar: config.float("abar").unwrap_or(defaults.abar),
            truncation: uint_or(config, "K", defaults.truncation as u64) as usize,
            dt: config.float("dt").unwrap_or(defaults.dt),
            record_every: uint_or(config, "record_every", defaults.record_every as u64) as usize,
            amplitude: config.float("amplitude").unwrap_or(defaults.amplitude),
        })
    }
}

const SPECTRAL_DEFAULTS: SpectralSetup = SpectralSetup {
    k0: 1,
    eps: 1e-2,
    alpha: 0.4,
    abar: 0.0,
    truncation: 16,
    dt: 1e-2,
    record_every: 100,
    amplitude: 1.0,
};

fn records_table(traj: &Trajectory) -> Table {
    let mut t = Table::new(["t", "log_abs_v1", "log_l2_w", "re_lambda1"]);
    for r in &traj.records {
        t.push(vec![r.t, r.log_abs_v1, r.log_l2_w, r.re_lambda1]);
    }
    t
}

fn termination_values(kv: &mut KeyValues, prefix: &str, termination: RescaledTermination) {
    let word = match termination {
        RescaledTermination::Completed => "completed",
        RescaledTermination::Overflow { .. } => "overflow",
        RescaledTermination::BlowUp { .. } => "blow_up",
    };
    kv.push(format!("{prefix}termination"), word)
        .push_opt(format!("{prefix}stopped_at"), termination.early_stop());
}

fn spectral(config: &Config, run: &mut RunDir) -> Result<KeyValues, LabError> {
    let setup = SpectralSetup::from_config(config, SPECTRAL_DEFAULTS)?;
    let probe = setup.params(0.0);
    let t_end = config.float("t_end").unwrap_or(probe.amplification_time() + 1.0);
    let params = setup.params(t_end);
    let traj = run_rescaled(&setup.datum(), &params)?;
    run.table("records.csv", &records_table(&traj))?;
    let last = traj.last();
    let mut modes = Table::new(["k", "log_abs_v"]);
    for k in -(setup.truncation as i64)..=(setup.truncation as i64) {
        modes.push(vec![k as f64, last.log_abs_mode(k)]);
    }
    run.table("final_modes.csv", &modes)?;
    let v1: Vec<(f64, f64)> = traj.records.iter().map(|r| (r.t, r.log_abs_v1)).collect();
    let bound: Vec<(f64, f64)> = traj
        .records
        .iter()
        .map(|r| (r.t, 0.5f64.ln() + r.re_lambda1 + traj.records[0].log_abs_v1))
        .collect();
    run.plot(
        "v1.svg",
        &Plot {
            title: format!("ln |v₁|, ε = {:e}, α = {}", setup.eps, setup.alpha),
            x_label: "t".into(),
            y_label: "ln |v₁|".into(),
            series: vec![
                Series::new("ln |v₁|", v1, Style::THICK, 0),
                Series::new("ln(½e^{Re λ₁}|v₁(0)|)", bound, Style::DASHED, 1),
            ],
            y_range: None,
        },
    )?;
    let mut kv = KeyValues::new();
    kv.push_f64("eps", setup.eps)
        .push_f64("alpha", setup.alpha)
        .push("K", setup.truncation)
        .push_f64("t_end", last.t())
        .push_f64("t_transition", params.transition_time())
        .push_f64("t_amplification", params.amplification_time());
    termination_values(&mut kv, "", traj.termination);
    kv.push_f64("final.log_abs_v1", last.log_abs_mode(1)).push_f64("final.log_l2_w", last.log_l2_w());
    Ok(kv)
}

fn figure(figure: Figure, config: &Config, run: &mut RunDir) -> Result<KeyValues, LabError> {
    let setup = Setup {
        preset: config.preset(),
        grids: config.uints("J").map(|v| v.into_iter().map(|j| j as usize).collect()),
        sigma: config.float("sigma"),
        ratio: config.float("ratio"),
        n: config
            .uints("N")
            .map(|v| v.into_iter().map(|n| u32::try_from(n).unwrap_or(u32::MAX)).collect()),
        t_max: config.float("t_max"),
        record_every: config.uint("record_every").map(|r| r as usize),
    };
    let report = experiments::run_figure(figure, &setup)?;
    run.table("summary.csv", &report.summary())?;
    let mut files = KeyValues::new();
    for case in &report.cases {
        let name = format!("series_{}.csv", case.spec.label);
        run.table(&name, &case.series())?;
        files.push(format!("{}.series", case.spec.label), name);
    }
    run.plot(&format!("{}.svg", figure.name()), &report.plot())?;
    let mut kv = report.metrics();
    kv.extend("", &files);
    Ok(kv)
}

/// Outcome of one check command before it is written out.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub passed: bool,
    pub reports: Vec<CheckReport>,
    pub values: KeyValues,
}

impl Verdict {
    fn new(reports: Vec<CheckReport>, values: KeyValues, extra_ok: bool) -> Self {
        Self {
            passed: extra_ok && reports.iter().all(|r| r.passed),
            reports,
            values,
        }
    }
}

fn check(kind: CheckKind, config: &Config, run: &mut RunDir) -> Result<(bool, KeyValues), LabError> {
    let k0 = u32_or(config, "k0", 1)?;
    let verdict = match kind {
        CheckKind::Pw => {
            let modes = config.modes().unwrap_or_else(|| vec![(1, 1.0), (3, -0.5)]);
            let widest = modes.iter().map(|&(n, _)| n as u64).max().unwrap_or(1);
            let truncation = uint_or(config, "K", widest.max(16)) as usize;
            pw_verdict(&ModeSpectrum::sine_sum(truncation, k0, &modes), PW_RANDOM_CASES)
        }
        CheckKind::Errfn => errfn_verdict(config.float("eps").unwrap_or(1e-2), k0)?,
        CheckKind::Theorem1 => {
            let setup = SpectralSetup::from_config(config, THEOREM1_DEFAULTS)?;
            let eps = config.floats("eps").unwrap_or_else(|| THEOREM1_EPS.to_vec());
            theorem1_verdict(&setup, &eps, uint_or(config, "s", 2) as u32)?
        }
        CheckKind::Theorem2 => {
            let setup = SpectralSetup::from_config(config, THEOREM2_DEFAULTS)?;
            let eps = config.floats("eps").unwrap_or_else(|| THEOREM2_EPS.to_vec());
            theorem2_verdict(&setup, &eps, config.float("t_end"))?
        }
        CheckKind::Energy => {
            let setup = SpectralSetup::from_config(config, THEOREM1_DEFAULTS)?;
            energy_verdict(&setup, uint_or(config, "s", 2) as u32, config.float("t_end").unwrap_or(50.0))?
        }
    };
    for (i, r) in verdict.reports.iter().enumerate() {
        run.values(&format!("report_{i}_{}.txt", r.name), &check_report(r))?;
    }
    let mut kv = KeyValues::new();
    kv.push("check", kind.name()).push("passed", verdict.passed);
    for r in &verdict.reports {
        kv.push(format!("{}.passed", r.name), r.passed).push_f64(format!("{}.margin", r.name), r.margin);
    }
    kv.extend("", &verdict.values);
    Ok((verdict.passed, kv))
}

/// Random spectra drawn per Poincaré–Wirtinger run; the seed is fixed.
pub const PW_RANDOM_CASES: usize = 100;
const PW_SEED: u64 = 0x5eed;

/// The given spectrum plus `random` zero-mean complex spectra.
pub fn pw_verdict(spectrum: &ModeSpectrum, random: usize) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(PW_SEED);
    let reports = vec![check_pw(spectrum)];
    let mut worst = 0.0f64;
    let mut all = true;
    for _ in 0..random {
        let truncation = rng.gen_range(1..=24);
        let k0 = rng.gen_range(1..=4);
        let s = ModeSpectrum::from_fn(truncation, k0, |k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            }
        });
        let r = check_pw(&s);
        worst = worst.max(r.margin);
        all &= r.passed;
    }
    let mut kv = KeyValues::new();
    kv.push("random.cases", random).push("random.passed", all).push_f64("random.worst_margin", worst);
    Verdict::new(reports, kv, all)
}

/// Twenty equispaced points of `[0, 0.95·2πk₀/ε]`.
pub fn errfn_grid(eps: f64, k0: u32) -> Vec<f64> {
    let top = 0.95 * 2.0 * PI * f64::from(k0) / eps;
    (0..20).map(|j| top * j as f64 / 19.0).collect()
}

pub fn errfn_verdict(eps: f64, k0: u32) -> Result<Verdict, LabError> {
    let errfn = check_errfn(eps, k0, &errfn_grid(eps, k0))?;
    let tail = check_gaussian_tail(&[0.5, 1.0, 2.0])?;
    Ok(Verdict::new(vec![errfn, tail], KeyValues::new(), true))
}

const THEOREM1_DEFAULTS: SpectralSetup = SpectralSetup {
    k0: 1,
    eps: 1e-2,
    alpha: 0.0,
    abar: 0.0,
    truncation: 16,
    dt: 1e-3,
    record_every: 20,
    amplitude: 0.05,
};
const THEOREM1_EPS: [f64; 2] = [2e-2, 1e-2];
/// Fraction of the transition time `2πk₀/ε` covered by the linear-growth runs.
pub const THEOREM1_WINDOW: f64 = 0.9;

/// Calibrates on the smallest `ε` and checks every `ε` against it.
pub fn theorem1_verdict(setup: &SpectralSetup, eps: &[f64], s: u32) -> Result<Verdict, LabError> {
    let mut trajectories = Vec::with_capacity(eps.len());
    for &e in eps {
        let setup = SpectralSetup { eps: e, alpha: 0.0, ..setup.clone() };
        let t_end = THEOREM1_WINDOW * 2.0 * PI * f64::from(setup.k0) / e;
        trajectories.push(run_rescaled(&setup.datum(), &setup.params(t_end))?);
    }
    let finest = eps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("at least one eps");
    let calibration = Theorem1Calibration::from(fit_theorem1(&trajectories[finest], s)?);
    let mut kv = KeyValues::new();
    kv.push_f64("calibration.c_im", calibration.c_im)
        .push_f64("calibration.c_re", calibration.c_re)
        .push_f64("calibration.eps", eps[finest]);
    let mut reports = Vec::new();
    let mut complete = true;
    for traj in &trajectories {
        complete &= traj.termination == RescaledTermination::Completed;
        reports.push(check_theorem1(traj, s, &calibration)?);
    }
    kv.push("all_runs_completed", complete);
    Ok(Verdict::new(reports, kv, complete))
}

const THEOREM2_DEFAULTS: SpectralSetup = SpectralSetup {
    k0: 1,
    eps: 1e-2,
    alpha: 0.4,
    abar: 0.0,
    truncation: 16,
    dt: 1e-2,
    record_every: 10,
    amplitude: 1.0,
};
const THEOREM2_EPS: [f64; 2] = [1e-2, 5e-3];
/// Accepted range of `|v₁(4πk₀/ε)| / |v₁(0)|`.
pub const RECOVERY_RANGE: (f64, f64) = (0.5, 2.0);

/// Runs to the amplification time, then on to `t_end` (default one unit
/// past it), and checks the lower bound at every record.
pub fn theorem2_verdict(setup: &SpectralSetup, eps: &[f64], t_end: Option<f64>) -> Result<Verdict, LabError> {
    let mut reports = Vec::new();
    let mut kv = KeyValues::new();
    let mut extra_ok = true;
    for &e in eps {
        let setup = SpectralSetup { eps: e, ..setup.clone() };
        let t_amp = setup.params(0.0).amplification_time();
        let end = t_end.unwrap_or(t_amp + 1.0);
        let datum = setup.datum();
        let mut traj = run_rescaled(&datum, &setup.params(end.min(t_amp)))?;
        let at_amp = (traj.termination == RescaledTermination::Completed && end >= t_amp)
            .then(|| traj.last().mode(1).norm() / datum.get(1).norm());
        if end > t_amp && traj.termination == RescaledTermination::Completed {
            let continuation = evolve(traj.last().clone(), &setup.params(end))?;
            traj.append(continuation);
        }
        let completed = traj.termination == RescaledTermination::Completed;
        let in_range = at_amp.is_none_or(|r| (RECOVERY_RANGE.0..=RECOVERY_RANGE.1).contains(&r));
        extra_ok &= completed && in_range;
        let key = format!("eps_{e:e}");
        kv.push_opt(format!("{key}.recovery_ratio"), at_amp).push(format!("{key}.records"), traj.records.len());
        termination_values(&mut kv, &format!("{key}."), traj.termination);
        reports.push(check_theorem2(&traj)?);
    }
    Ok(Verdict::new(reports, kv, extra_ok))
}

pub fn energy_verdict(setup: &SpectralSetup, s: u32, t_end: f64) -> Result<Verdict, LabError> {
    let setup = SpectralSetup { alpha: 0.0, ..setup.clone() };
    let traj = run_rescaled(&setup.datum(), &setup.params(t_end))?;
    let report = check_energy_decay(&traj, s);
    let mut kv = KeyValues::new();
    termination_values(&mut kv, "", traj.termination);
    kv.push_opt("checked_times", report.note_value("checked_times"));
    Ok(Verdict::new(vec![report], kv, traj.termination == RescaledTermination::Completed))
}
