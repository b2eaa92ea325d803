//! Line-oriented `key = value` documents used for reports and manifests.

use std::fmt::Display;
use std::fs;
use std::path::Path;

use cburgers_core::checks::CheckReport;

use crate::error::LabError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
}

impl KeyValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        let key = key.into();
        debug_assert!(!key.contains('=') && !key.contains('\n'));
        self.entries.push((key, value.to_string().replace('\n', " ")));
        self
    }

    /// Shortest representation that parses back to the same `f64`.
    pub fn push_f64(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.push(key, value)
    }

    pub fn push_opt(&mut self, key: impl Into<String>, value: Option<f64>) -> &mut Self {
        match value {
            Some(v) => self.push_f64(key, v),
            None => self.push(key, "none"),
        }
    }

    pub fn extend(&mut self, prefix: &str, other: &KeyValues) -> &mut Self {
        for (k, v) in &other.entries {
            self.entries.push((format!("{prefix}{k}"), v.clone()));
        }
        self
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn parse(text: &str) -> Option<Self> {
        let mut out = Self::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line.split_once(" = ")?;
            out.entries.push((k.to_string(), v.to_string()));
        }
        Some(out)
    }

    pub fn write(&self, path: &Path) -> Result<(), LabError> {
        fs::write(path, self.render()).map_err(LabError::io(path))
    }
}

/// Flattens a check verdict; offenders are listed worst first.
pub fn check_report(report: &CheckReport) -> KeyValues {
    let mut kv = KeyValues::new();
    kv.push("check", &report.name)
        .push("passed", report.passed)
        .push_f64("margin", report.margin);
    for (key, value) in &report.notes {
        kv.push_f64(format!("note.{key}"), *value);
    }
    for (i, o) in report.details.iter().enumerate() {
        kv.push(format!("offender.{i}"), format!("t={} value={} bound={}", o.t, o.value, o.bound));
    }
    kv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_and_parses() {
        let mut kv = KeyValues::new();
        kv.push("figure", "fig4").push_f64("eps", 0.1 + 0.2).push_opt("t_f", None);
        let text = kv.render();
        assert_eq!(text, "figure = fig4\neps = 0.30000000000000004\nt_f = none\n");
        let back = KeyValues::parse(&text).unwrap();
        assert_eq!(back, kv);
        assert_eq!(back.get_f64("eps"), Some(0.1 + 0.2));
    }
}
