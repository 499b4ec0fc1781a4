//! Minimal numeric CSV tables.
//!
//! Output is comma-separated with a header row, LF line endings and no
//! trailing comma. Integral values below 2⁵³ print without a fraction;
//! everything else uses the shortest decimal that parses back to the same
//! `f64`.

use std::fmt::Write as _;
use std::io;

use super::ExperimentError;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// Shortest round-trip decimal form of `x`.
pub fn format_number(x: f64) -> String {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.007_199_254_740_992e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:?}")
    }
}

impl CsvTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<(), ExperimentError> {
        if row.len() != self.columns.len() {
            return Err(ExperimentError::Csv(format!(
                "row has {} values, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, x) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", format_number(*x));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_to<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv_string().as_bytes())
    }

    /// Parses text produced by [`CsvTable::to_csv_string`].
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| ExperimentError::Csv("empty input".into()))?;
        let mut table = Self::new(header.split(','));
        for (i, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|e| ExperimentError::Csv(format!("line {}: {f:?}: {e}", i + 2)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            table.push_row(row)?;
        }
        Ok(table)
    }
}
