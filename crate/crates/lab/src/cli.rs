//! Argument parsing and exit codes: 0 success, 1 runtime or check failure,
//! 2 usage error. Logs and summaries go to standard error; data only to files.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{execute, Outcome};
use crate::config::{parse_config, schema_text, Command};
use crate::error::LabError;

#[derive(Debug, Parser)]
#[command(name = "cburgers", version, about = "Complex-forced viscous Burgers laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// One Lax–Friedrichs run.
    Simulate(Params),
    /// Closed-form envelope tables in both exponent normalizations.
    Cc(Params),
    /// One run of the rescaled Fourier solver.
    Spectral(Params),
    /// Pass/fail verdict for an estimate or inequality.
    Check {
        which: CheckArg,
        #[command(flatten)]
        params: Params,
    },
    /// Blow-up-time sweep behind one figure.
    Figure {
        which: FigureArg,
        #[command(flatten)]
        params: Params,
    },
    /// Everything from a configuration file; flags override it.
    Run(Params),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckArg {
    Pw,
    Theorem1,
    Theorem2,
    Errfn,
    Energy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig1,
    Fig4,
    Fig5,
    Fig6,
}

/// Raw overrides; values are type-checked by the configuration parser.
#[derive(Debug, Args, Default)]
struct Params {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run directory.
    #[arg(long)]
    out: Option<String>,
    /// full | ci.
    #[arg(long)]
    preset: Option<String>,
    /// Grid size(s), comma separated.
    #[arg(short = 'J', long = "grid")]
    grid: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    /// sigma/h, used when --sigma is absent.
    #[arg(long)]
    ratio: Option<String>,
    /// Sine mode number(s), comma separated.
    #[arg(short = 'N')]
    n: Option<String>,
    /// Datum as N:a pairs, e.g. 4:1,6:2.
    #[arg(long)]
    modes: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    abar: Option<String>,
    #[arg(long)]
    k0: Option<String>,
    /// Truncation order.
    #[arg(short = 'K')]
    truncation: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    t_max: Option<String>,
    #[arg(long)]
    t_end: Option<String>,
    /// Sobolev index.
    #[arg(long = "s")]
    s: Option<String>,
    #[arg(long)]
    record_every: Option<String>,
    #[arg(long)]
    amplitude: Option<String>,
}

impl Params {
    fn overrides(&self) -> Vec<(String, String)> {
        let pairs = [
            ("out", &self.out),
            ("preset", &self.preset),
            ("J", &self.grid),
            ("sigma", &self.sigma),
            ("ratio", &self.ratio),
            ("N", &self.n),
            ("modes", &self.modes),
            ("eps", &self.eps),
            ("alpha", &self.alpha),
            ("abar", &self.abar),
            ("k0", &self.k0),
            ("K", &self.truncation),
            ("dt", &self.dt),
            ("t_max", &self.t_max),
            ("t_end", &self.t_end),
            ("s", &self.s),
            ("record_every", &self.record_every),
            ("amplitude", &self.amplitude),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn selector(cmd: &Cmd) -> Vec<(String, String)> {
    let pair = |k: &str, v: &str| (k.to_string(), v.to_string());
    match cmd {
        Cmd::Simulate(_) => vec![pair("command", "simulate")],
        Cmd::Cc(_) => vec![pair("command", "cc")],
        Cmd::Spectral(_) => vec![pair("command", "spectral")],
        Cmd::Check { which, .. } => vec![
            pair("command", "check"),
            pair("check", which.to_possible_value().expect("no skipped variants").get_name()),
        ],
        Cmd::Figure { which, .. } => vec![
            pair("command", "figure"),
            pair("figure", which.to_possible_value().expect("no skipped variants").get_name()),
        ],
        Cmd::Run(_) => Vec::new(),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            if !usage {
                return EXIT_OK;
            }
            eprintln!("\n{}", schema_text(None));
            return EXIT_USAGE;
        }
    };
    let params = match &cli.command {
        Cmd::Simulate(p) | Cmd::Cc(p) | Cmd::Spectral(p) | Cmd::Run(p) => p,
        Cmd::Check { params, .. } | Cmd::Figure { params, .. } => params,
    };
    let text = match &params.config {
        Some(path) => match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_USAGE;
            }
        },
        None if matches!(cli.command, Cmd::Run(_)) => {
            eprintln!("error: `run` needs --config\n\n{}", schema_text(None));
            return EXIT_USAGE;
        }
        None => String::new(),
    };
    let mut overrides = selector(&cli.command);
    overrides.extend(params.overrides());
    let config = match parse_config(&text, &overrides) {
        Ok(c) => c,
        Err(e) => {
            let command = guess_command(&cli.command);
            eprintln!("error: {e}\n\n{}", schema_text(command.as_ref()));
            return EXIT_USAGE;
        }
    };
    match execute(&config) {
        Ok(outcome) => report(&outcome),
        Err(e) => failure(&e, &config.command),
    }
}

fn guess_command(cmd: &Cmd) -> Option<Command> {
    use crate::config::{CheckKind, Figure};
    Some(match cmd {
        Cmd::Simulate(_) => Command::Simulate,
        Cmd::Cc(_) => Command::Cc,
        Cmd::Spectral(_) => Command::Spectral,
        Cmd::Check { which, .. } => Command::Check(match which {
            CheckArg::Pw => CheckKind::Pw,
            CheckArg::Theorem1 => CheckKind::Theorem1,
            CheckArg::Theorem2 => CheckKind::Theorem2,
            CheckArg::Errfn => CheckKind::Errfn,
            CheckArg::Energy => CheckKind::Energy,
        }),
        Cmd::Figure { which, .. } => Command::Figure(match which {
            FigureArg::Fig1 => Figure::Fig1,
            FigureArg::Fig4 => Figure::Fig4,
            FigureArg::Fig5 => Figure::Fig5,
            FigureArg::Fig6 => Figure::Fig6,
        }),
        Cmd::Run(_) => return None,
    })
}

fn report(outcome: &Outcome) -> i32 {
    eprint!("{}", outcome.summary.render());
    log::info!("wrote {} files to {}", outcome.files.len(), outcome.dir.display());
    match outcome.passed {
        Some(false) => {
            log::error!("check failed");
            EXIT_FAILURE
        }
        _ => EXIT_OK,
    }
}

fn failure(e: &LabError, command: &Command) -> i32 {
    eprintln!("error: {e}");
    if e.is_usage() {
        eprintln!("\n{}", schema_text(Some(command)));
        EXIT_USAGE
    } else {
        EXIT_FAILURE
    }
}
