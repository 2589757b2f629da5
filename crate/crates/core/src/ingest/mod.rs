//! Ingestion of the delimited input files.
//!
//! All files are comma-separated UTF-8 with a mandatory header row. Column
//! order is insignificant, unknown columns are rejected, and parsing is
//! all-or-nothing: the first violation aborts the file with its path and
//! 1-based line number. The region registry loads first; every other file
//! validates its region references against it.

mod emissions;
mod production;
mod profiles;
mod regions;
mod reported;

pub use emissions::{parse_emissions, EmissionDataset, EmissionRow};
pub use production::{parse_production, ProductionDataset, ProductionRow, ProductionSource};
pub use profiles::{
    parse_profiles, profiles_to_csv_string, AggregationGroup, Allocation, CompanyCategory,
    CompanyProfile,
};
pub use regions::parse_regions;
pub use reported::{parse_reported, ReportedMetrics, ReportedMetricsFile};

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// One parsed data row with enough context to blame a line.
pub(crate) struct Row<'a> {
    file: &'a str,
    line: u64,
    record: csv::StringRecord,
    columns: &'a BTreeMap<String, usize>,
}

impl<'a> Row<'a> {
    pub fn line(&self) -> u64 {
        self.line
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        Error::parse(self.file, self.line, message)
    }

    /// Raw trimmed field; empty when the column holds no value or an
    /// optional column is not present in the file at all.
    pub fn get(&self, column: &str) -> &str {
        match self.columns.get(column) {
            Some(&idx) => self.record.get(idx).unwrap_or("").trim(),
            None => "",
        }
    }

    pub fn non_empty(&self, column: &str) -> Result<&str> {
        let value = self.get(column);
        if value.is_empty() {
            return Err(self.error(format!("missing value for column '{column}'")));
        }
        Ok(value)
    }

    pub fn f64(&self, column: &str) -> Result<f64> {
        let raw = self.non_empty(column)?;
        let value: f64 = raw
            .parse()
            .map_err(|_| self.error(format!("malformed number '{raw}' in column '{column}'")))?;
        if !value.is_finite() {
            return Err(self.error(format!("non-finite number '{raw}' in column '{column}'")));
        }
        Ok(value)
    }

    pub fn f64_non_negative(&self, column: &str) -> Result<f64> {
        let value = self.f64(column)?;
        if value < 0.0 {
            return Err(self.error(format!("negative value {value} in column '{column}'")));
        }
        Ok(value)
    }

    pub fn optional_f64(&self, column: &str) -> Result<Option<f64>> {
        if self.get(column).is_empty() {
            return Ok(None);
        }
        self.f64(column).map(Some)
    }

    pub fn year(&self, column: &str) -> Result<u16> {
        let raw = self.non_empty(column)?;
        let year: u16 = raw
            .parse()
            .map_err(|_| self.error(format!("malformed year '{raw}' in column '{column}'")))?;
        if !(1900..=2100).contains(&year) {
            return Err(self.error(format!("year {year} out of range 1900..=2100")));
        }
        Ok(year)
    }

    pub fn optional_bool(&self, column: &str) -> Result<Option<bool>> {
        match self.get(column) {
            "" => Ok(None),
            "true" => Ok(Some(true)),
            "false" => Ok(Some(false)),
            other => Err(self.error(format!(
                "expected 'true' or 'false' in column '{column}', got '{other}'"
            ))),
        }
    }
}

/// Read a delimited file, validate its header against the schema, and feed
/// each row to `visit`. `required` columns must be present; anything not in
/// `required` or `optional` is rejected.
pub(crate) fn read_table(
    path: &Path,
    required: &[&str],
    optional: &[&str],
    mut visit: impl FnMut(&Row<'_>) -> Result<()>,
) -> Result<()> {
    let file = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => {
                let io = std::io::Error::other(e.to_string());
                Error::io(&file, io)
            }
            _ => Error::parse(&file, 1, e.to_string()),
        })?;

    let headers = reader
        .headers()
        .map_err(|e| Error::parse(&file, 1, e.to_string()))?
        .clone();

    let mut columns: BTreeMap<String, usize> = BTreeMap::new();
    for (idx, name) in headers.iter().enumerate() {
        let name = name.trim();
        if columns.insert(name.to_string(), idx).is_some() {
            return Err(Error::parse(&file, 1, format!("duplicate column '{name}'")));
        }
        if !required.contains(&name) && !optional.contains(&name) {
            return Err(Error::parse(&file, 1, format!("unknown column '{name}'")));
        }
    }
    for name in required {
        if !columns.contains_key(*name) {
            return Err(Error::parse(&file, 1, format!("missing column '{name}'")));
        }
    }

    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::parse(&file, line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row = Row {
            file: &file,
            line,
            record,
            columns: &columns,
        };
        visit(&row)?;
    }
    Ok(())
}

/// Shortest round-trip formatting for artifact and serialization output.
pub(crate) fn fmt_f64(value: f64) -> String {
    format!("{value}")
}
