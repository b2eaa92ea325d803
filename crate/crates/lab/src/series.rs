//! Comma-separated series files: one header row, fixed column order, every
//! value written with 17 significant digits so that reading back is bit-exact.

use std::fs;
use std::path::Path;

use crate::error::LabError;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// `d.dddddddddddddddde±x`; `NaN` and `inf` are spelled as Rust parses them.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Panics when the row width differs from the header.
    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io_error = "writing to memory cannot fail";
        w.write_record(&self.columns).expect(io_error);
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| format_value(x))).expect(io_error);
        }
        String::from_utf8(w.into_inner().expect(io_error)).expect("CSV output is ASCII")
    }

    pub fn write(&self, path: &Path) -> Result<(), LabError> {
        fs::write(path, self.to_csv()).map_err(LabError::io(path))
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self, LabError> {
        let csv_error = |source| LabError::Csv {
            path: origin.to_path_buf(),
            source,
        };
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns: Vec<String> = r.headers().map_err(csv_error)?.iter().map(String::from).collect();
        let mut table = Self::new(columns);
        for (i, record) in r.records().enumerate() {
            let record = record.map_err(csv_error)?;
            let row = record
                .iter()
                .map(|field| {
                    field.parse::<f64>().map_err(|e| LabError::Format {
                        path: origin.to_path_buf(),
                        line: i + 2,
                        reason: format!("`{field}`: {e}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn read(path: &Path) -> Result<Self, LabError> {
        let text = fs::read_to_string(path).map_err(LabError::io(path))?;
        Self::parse(&text, path)
    }
}
