//! Flat `key = value` run configuration, merged with command-line overrides
//! and type-checked against the selected command before anything runs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("key `{key}` given twice")]
    Duplicate { key: String },
    #[error("key `{key}`: cannot parse `{value}` as {expected}")]
    Malformed {
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("missing required key `{key}`")]
    Missing { key: String },
    #[error("key `{key}` is not accepted by `{command}`")]
    NotAccepted { key: String, command: String },
    #[error("key `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Figure {
    Fig1,
    Fig4,
    Fig5,
    Fig6,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig1, Figure::Fig4, Figure::Fig5, Figure::Fig6];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    Pw,
    Theorem1,
    Theorem2,
    Errfn,
    Energy,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] = [
        CheckKind::Pw,
        CheckKind::Theorem1,
        CheckKind::Theorem2,
        CheckKind::Errfn,
        CheckKind::Energy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Pw => "pw",
            CheckKind::Theorem1 => "theorem1",
            CheckKind::Theorem2 => "theorem2",
            CheckKind::Errfn => "errfn",
            CheckKind::Energy => "energy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preset {
    /// J = 2000, σ = 5e-5 (σ = h/10 for fig6).
    Full,
    /// J = 1024 and σ = h/10 (fig6 sweeps J from 1000 to 300).
    #[default]
    Ci,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Full => "full",
            Preset::Ci => "ci",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Cc,
    Spectral,
    Check(CheckKind),
    Figure(Figure),
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Simulate => "simulate".into(),
            Command::Cc => "cc".into(),
            Command::Spectral => "spectral".into(),
            Command::Check(c) => format!("check {}", c.name()),
            Command::Figure(f) => format!("figure {}", f.name()),
        }
    }

    /// Parameter keys the command reads.
    pub fn accepted_keys(&self) -> &'static [&'static str] {
        match self {
            Command::Simulate => &["J", "sigma", "ratio", "N", "modes", "t_max", "record_every"],
            Command::Cc => &["N", "eps", "k0", "t_max", "dt"],
            Command::Spectral => &["k0", "eps", "alpha", "abar", "K", "dt", "t_end", "record_every", "amplitude"],
            Command::Check(CheckKind::Pw) => &["modes", "k0", "K"],
            Command::Check(CheckKind::Theorem1) => &["eps", "k0", "K", "dt", "s", "amplitude", "record_every"],
            Command::Check(CheckKind::Theorem2) => {
                &["eps", "k0", "alpha", "K", "dt", "t_end", "amplitude", "record_every"]
            }
            Command::Check(CheckKind::Errfn) => &["eps", "k0"],
            Command::Check(CheckKind::Energy) => &["eps", "k0", "K", "dt", "s", "t_end", "amplitude", "record_every"],
            Command::Figure(_) => &["preset", "J", "sigma", "ratio", "N", "t_max", "record_every"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Float,
    FloatList,
    UInt,
    UIntList,
    Modes,
    Path,
    Word(&'static [&'static str]),
}

impl Kind {
    fn expected(self) -> &'static str {
        match self {
            Kind::Float => "a number",
            Kind::FloatList => "a comma-separated list of numbers",
            Kind::UInt => "a nonnegative integer",
            Kind::UIntList => "a comma-separated list of nonnegative integers",
            Kind::Modes => "a list of `N:amplitude` pairs",
            Kind::Path => "a path",
            Kind::Word(_) => "one of the listed words",
        }
    }
}

const COMMANDS: &[&str] = &["simulate", "cc", "spectral", "check", "figure"];
const FIGURES: &[&str] = &["fig1", "fig4", "fig5", "fig6"];
const CHECKS: &[&str] = &["pw", "theorem1", "theorem2", "errfn", "energy"];
const PRESETS: &[&str] = &["full", "ci"];

/// Every key the format knows, with its value type and a one-line meaning.
pub const SCHEMA: &[(&str, &str)] = &[
    ("command", "simulate | cc | spectral | check | figure"),
    ("figure", "fig1 | fig4 | fig5 | fig6"),
    ("check", "pw | theorem1 | theorem2 | errfn | energy"),
    ("preset", "full | ci"),
    ("out", "run directory"),
    ("J", "grid size(s)"),
    ("sigma", "time step"),
    ("ratio", "sigma/h, used when sigma is absent"),
    ("N", "sine mode number(s)"),
    ("modes", "datum as N:a pairs, e.g. 4:1,6:2"),
    ("eps", "viscosity value(s)"),
    ("alpha", "amplitude exponent"),
    ("abar", "datum mean"),
    ("k0", "base mode"),
    ("K", "truncation order"),
    ("dt", "time step (spectral) or table step (cc)"),
    ("t_max", "horizon of the scheme or table"),
    ("t_end", "fast-time horizon"),
    ("s", "Sobolev index"),
    ("record_every", "record stride"),
    ("amplitude", "sine datum amplitude"),
];

fn kind_of(key: &str) -> Option<Kind> {
    Some(match key {
        "command" => Kind::Word(COMMANDS),
        "figure" => Kind::Word(FIGURES),
        "check" => Kind::Word(CHECKS),
        "preset" => Kind::Word(PRESETS),
        "out" => Kind::Path,
        "J" | "N" => Kind::UIntList,
        "k0" | "K" | "s" | "record_every" => Kind::UInt,
        "eps" => Kind::FloatList,
        "sigma" | "ratio" | "alpha" | "abar" | "dt" | "t_max" | "t_end" | "amplitude" => Kind::Float,
        "modes" => Kind::Modes,
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Floats(Vec<f64>),
    UInt(u64),
    UInts(Vec<u64>),
    Modes(Vec<(u32, f64)>),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, v: &[T]) -> fmt::Result {
            let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
            f.write_str(&parts.join(","))
        }
        match self {
            Value::Float(x) => write!(f, "{x}"),
            Value::Floats(v) => list(f, v),
            Value::UInt(n) => write!(f, "{n}"),
            Value::UInts(v) => list(f, v),
            Value::Modes(v) => {
                let parts: Vec<String> = v.iter().map(|(n, a)| format!("{n}:{a}")).collect();
                f.write_str(&parts.join(","))
            }
            Value::Text(s) => f.write_str(s),
        }
    }
}

fn parse_value(key: &str, raw: &str) -> Result<Value, ConfigError> {
    let kind = kind_of(key).ok_or_else(|| ConfigError::UnknownKey { key: key.into() })?;
    let malformed = || ConfigError::Malformed {
        key: key.into(),
        value: raw.into(),
        expected: kind.expected(),
    };
    let float = |s: &str| s.trim().parse::<f64>().ok().filter(|x| x.is_finite());
    let uint = |s: &str| s.trim().parse::<u64>().ok();
    let items = || raw.split(',').map(str::trim).filter(|s| !s.is_empty());
    Ok(match kind {
        Kind::Float => Value::Float(float(raw).ok_or_else(malformed)?),
        Kind::UInt => Value::UInt(uint(raw).ok_or_else(malformed)?),
        Kind::FloatList => {
            let v = items().map(float).collect::<Option<Vec<_>>>().ok_or_else(malformed)?;
            if v.is_empty() {
                return Err(malformed());
            }
            Value::Floats(v)
        }
        Kind::UIntList => {
            let v = items().map(uint).collect::<Option<Vec<_>>>().ok_or_else(malformed)?;
            if v.is_empty() {
                return Err(malformed());
            }
            Value::UInts(v)
        }
        Kind::Modes => {
            let pair = |s: &str| {
                let (n, a) = s.split_once(':')?;
                Some((n.trim().parse::<u32>().ok()?, float(a)?))
            };
            let v = items().map(pair).collect::<Option<Vec<_>>>().ok_or_else(malformed)?;
            if v.is_empty() {
                return Err(malformed());
            }
            Value::Modes(v)
        }
        Kind::Path => {
            if raw.trim().is_empty() {
                return Err(malformed());
            }
            Value::Text(raw.trim().into())
        }
        Kind::Word(words) => {
            let w = raw.trim();
            if !words.contains(&w) {
                return Err(ConfigError::Invalid {
                    key: key.into(),
                    reason: format!("`{w}` is not one of {}", words.join(", ")),
                });
            }
            Value::Text(w.into())
        }
    })
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub command: Command,
    values: BTreeMap<String, Value>,
}

/// Splits `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: line.into(),
        })?;
        let key = k.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: line.into(),
            });
        }
        if pairs.iter().any(|(existing, _)| *existing == key) {
            return Err(ConfigError::Duplicate { key });
        }
        pairs.push((key, v.trim().to_string()));
    }
    Ok(pairs)
}

/// Parses `text` and applies `overrides`; overrides win over file values.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<Config, ConfigError> {
    let mut merged: BTreeMap<String, Value> = BTreeMap::new();
    for (k, v) in parse_pairs(text)? {
        merged.insert(k.clone(), parse_value(&k, &v)?);
    }
    for (k, v) in overrides {
        merged.insert(k.clone(), parse_value(k, v)?);
    }
    let text_of = |m: &BTreeMap<String, Value>, key: &str| match m.get(key) {
        Some(Value::Text(s)) => Some(s.clone()),
        _ => None,
    };
    let figure = text_of(&merged, "figure");
    let check = text_of(&merged, "check");
    let command_word = match text_of(&merged, "command") {
        Some(c) => c,
        None => match (&figure, &check) {
            (Some(_), None) => "figure".into(),
            (None, Some(_)) => "check".into(),
            _ => return Err(ConfigError::Missing { key: "command".into() }),
        },
    };
    let command = match command_word.as_str() {
        "simulate" => Command::Simulate,
        "cc" => Command::Cc,
        "spectral" => Command::Spectral,
        "check" => {
            let c = check.ok_or_else(|| ConfigError::Missing { key: "check".into() })?;
            Command::Check(
                CheckKind::ALL
                    .into_iter()
                    .find(|k| k.name() == c)
                    .expect("validated against the word list"),
            )
        }
        "figure" => {
            let f = figure.ok_or_else(|| ConfigError::Missing { key: "figure".into() })?;
            Command::Figure(
                Figure::ALL
                    .into_iter()
                    .find(|k| k.name() == f)
                    .expect("validated against the word list"),
            )
        }
        _ => unreachable!("validated against the word list"),
    };
    let selector_ok = |key: &str| match key {
        "command" | "out" => true,
        "figure" => matches!(command, Command::Figure(_)),
        "check" => matches!(command, Command::Check(_)),
        _ => false,
    };
    for key in merged.keys() {
        if !selector_ok(key) && !command.accepted_keys().contains(&key.as_str()) {
            return Err(ConfigError::NotAccepted {
                key: key.clone(),
                command: command.name(),
            });
        }
    }
    let config = Config { command, values: merged };
    config.validate()?;
    Ok(config)
}

impl Config {
    fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, reason: &str| ConfigError::Invalid {
            key: key.into(),
            reason: reason.into(),
        };
        for key in ["sigma", "ratio", "dt", "t_max", "t_end"] {
            if let Some(x) = self.float(key) {
                if x <= 0.0 {
                    return Err(invalid(key, "must be positive"));
                }
            }
        }
        if let Some(v) = self.floats("eps") {
            if v.iter().any(|&e| e <= 0.0) {
                return Err(invalid("eps", "must be positive"));
            }
        }
        if self.float("alpha").is_some_and(|a| a < 0.0) {
            return Err(invalid("alpha", "must be nonnegative"));
        }
        for key in ["k0", "record_every"] {
            if self.uint(key) == Some(0) {
                return Err(invalid(key, "must be at least 1"));
            }
        }
        if self.uints("J").is_some_and(|v| v.iter().any(|&j| j < 3)) {
            return Err(invalid("J", "grid must have at least 3 points"));
        }
        if self.uints("N").is_some_and(|v| v.contains(&0)) {
            return Err(invalid("N", "mode numbers must be positive"));
        }
        let single = ["J", "N", "eps"];
        let one = |key: &str| match self.values.get(key) {
            Some(Value::Floats(v)) => v.len() == 1,
            Some(Value::UInts(v)) => v.len() == 1,
            _ => true,
        };
        let lists_allowed: &[&str] = match self.command {
            Command::Figure(Figure::Fig6) => &["J"],
            Command::Figure(_) => &["N"],
            Command::Check(CheckKind::Theorem1) | Command::Check(CheckKind::Theorem2) => &["eps"],
            _ => &[],
        };
        for key in single {
            if !lists_allowed.contains(&key) && !one(key) {
                return Err(invalid(key, &format!("`{}` takes a single value", self.command.name())));
            }
        }
        if let Command::Figure(f) = self.command {
            if f == Figure::Fig5 && self.values.contains_key("N") {
                return Err(invalid("N", "the fig5 cases fix their own modes"));
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    /// Keys and values in lexical order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn float(&self, key: &str) -> Option<f64> {
        match self.values.get(key) {
            Some(Value::Float(x)) => Some(*x),
            Some(Value::Floats(v)) => v.first().copied(),
            _ => None,
        }
    }

    pub fn floats(&self, key: &str) -> Option<Vec<f64>> {
        match self.values.get(key) {
            Some(Value::Floats(v)) => Some(v.clone()),
            Some(Value::Float(x)) => Some(vec![*x]),
            _ => None,
        }
    }

    pub fn uint(&self, key: &str) -> Option<u64> {
        match self.values.get(key) {
            Some(Value::UInt(n)) => Some(*n),
            Some(Value::UInts(v)) => v.first().copied(),
            _ => None,
        }
    }

    pub fn uints(&self, key: &str) -> Option<Vec<u64>> {
        match self.values.get(key) {
            Some(Value::UInts(v)) => Some(v.clone()),
            Some(Value::UInt(n)) => Some(vec![*n]),
            _ => None,
        }
    }

    pub fn modes(&self) -> Option<Vec<(u32, f64)>> {
        match self.values.get("modes") {
            Some(Value::Modes(v)) => Some(v.clone()),
            _ => None,
        }
    }

    pub fn preset(&self) -> Preset {
        match self.values.get("preset") {
            Some(Value::Text(s)) if s == "full" => Preset::Full,
            _ => Preset::Ci,
        }
    }

    pub fn out(&self) -> Option<PathBuf> {
        match self.values.get("out") {
            Some(Value::Text(s)) => Some(PathBuf::from(s)),
            _ => None,
        }
    }
}

/// Human-readable schema for usage errors.
pub fn schema_text(command: Option<&Command>) -> String {
    let mut out = String::from("configuration keys (key = value, one per line):\n");
    for (key, meaning) in SCHEMA {
        let shown = match command {
            Some(c) => matches!(*key, "command" | "out" | "figure" | "check") || c.accepted_keys().contains(key),
            None => true,
        };
        if shown {
            out.push_str(&format!("  {key:<13} {meaning}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none() -> Vec<(String, String)> {
        Vec::new()
    }

    #[test]
    fn figure_selector_alone() {
        let c = parse_config("figure=fig4\npreset=ci", &none()).unwrap();
        assert_eq!(c.command, Command::Figure(Figure::Fig4));
        assert_eq!(c.preset(), Preset::Ci);
    }

    #[test]
    fn malformed_number_names_the_key() {
        let err = parse_config("figure = fig4\nsigma=abc", &none()).unwrap_err();
        assert!(matches!(&err, ConfigError::Malformed { key, .. } if key == "sigma"));
        assert!(err.to_string().contains("sigma"));
    }

    #[test]
    fn overrides_alone_and_overrides_win() {
        let o = vec![("command".to_string(), "check".to_string()), ("check".into(), "errfn".into()), ("eps".into(), "1e-2".into())];
        let c = parse_config("", &o).unwrap();
        assert_eq!(c.command, Command::Check(CheckKind::Errfn));
        let c = parse_config("check = errfn\neps = 5e-3", &o[2..]).unwrap();
        assert_eq!(c.float("eps"), Some(1e-2));
    }

    #[test]
    fn unknown_missing_and_foreign_keys() {
        let e = parse_config("figure=fig1\nspeed=3", &none()).unwrap_err();
        assert_eq!(e, ConfigError::UnknownKey { key: "speed".into() });
        let e = parse_config("J = 100", &none()).unwrap_err();
        assert_eq!(e, ConfigError::Missing { key: "command".into() });
        let e = parse_config("command = figure", &none()).unwrap_err();
        assert_eq!(e, ConfigError::Missing { key: "figure".into() });
        let e = parse_config("figure = fig4\nalpha = 0.4", &none()).unwrap_err();
        assert!(matches!(e, ConfigError::NotAccepted { key, .. } if key == "alpha"));
        let e = parse_config("check = errfn\neps = 1e-2, 5e-3", &none()).unwrap_err();
        assert!(matches!(e, ConfigError::Invalid { key, .. } if key == "eps"));
    }

    #[test]
    fn lists_modes_and_comments() {
        let c = parse_config("# sweep\nfigure = fig4\nN = 2, 4,6 # even\n", &none()).unwrap();
        assert_eq!(c.uints("N"), Some(vec![2, 4, 6]));
        let c = parse_config("command = simulate\nmodes = 4:1, 6:-2.5", &none()).unwrap();
        assert_eq!(c.modes(), Some(vec![(4, 1.0), (6, -2.5)]));
        assert!(parse_config("command = simulate\nmodes = 4", &none()).is_err());
        assert!(matches!(parse_config("figure", &none()), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(parse_config("figure=fig4\nfigure=fig1", &none()), Err(ConfigError::Duplicate { .. })));
    }
}
