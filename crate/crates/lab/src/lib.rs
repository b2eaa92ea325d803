//! Experiments, file formats and the `cburgers` command-line front end built
//! on `cburgers-core`.
//!
//! - [`experiments`]: the blow-up-time sweeps behind the figures.
//! - [`commands`]: execution of a validated [`config::Config`] into a run directory.
//! - [`series`], [`report`], [`svg`]: CSV tables, key-value reports and plots.
//! - [`cli`]: argument parsing and exit codes.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod series;
pub mod svg;

pub use commands::{execute, Outcome, Verdict};
pub use config::{parse_config, CheckKind, Command, Config, ConfigError, Figure, Preset};
pub use error::LabError;
pub use experiments::{run_figure, CaseResult, CaseSpec, ExperimentReport, Setup};
