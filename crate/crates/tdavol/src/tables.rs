//! CSV and JSON emission, and re-reading the pipeline's own tables.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so
//! re-reading a table reproduces the in-memory values exactly.

use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;
use tdavol_core::ReturnSeries;

use crate::error::{PipelineError, Result};

pub fn num(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        String::new()
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(PipelineError::csv(path))?;
    w.write_record(header).map_err(PipelineError::csv(path))?;
    for row in rows {
        w.write_record(&row).map_err(PipelineError::csv(path))?;
    }
    w.flush().map_err(PipelineError::io(path))
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| PipelineError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(PipelineError::io(path))
}

/// Dates plus one vector per requested column; empty cells are `None`.
pub type Columns = (Vec<NaiveDate>, Vec<Vec<Option<f64>>>);

/// Rows of a pipeline CSV as `(date, named column values)`.
pub fn read_columns(path: &Path, columns: &[&str]) -> Result<Columns> {
    let mut reader = csv::Reader::from_path(path).map_err(PipelineError::csv(path))?;
    let headers = reader.headers().map_err(PipelineError::csv(path))?.clone();
    let index = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| PipelineError::MissingColumn {
                path: path.to_path_buf(),
                column: name.to_string(),
            })
    };
    let date_col = index(headers.get(0).unwrap_or("date"))?;
    let cols = columns.iter().map(|c| index(c)).collect::<Result<Vec<_>>>()?;
    let mut dates = Vec::new();
    let mut values = vec![Vec::new(); cols.len()];
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(PipelineError::csv(path))?;
        let parse_err = |message: String| PipelineError::Parse {
            path: path.to_path_buf(),
            line: line + 2,
            message,
        };
        let raw = record.get(date_col).unwrap_or("");
        dates.push(raw.parse().map_err(|_| parse_err(format!("bad date {raw:?}")))?);
        for (slot, &c) in values.iter_mut().zip(&cols) {
            let cell = record.get(c).unwrap_or("");
            slot.push(if cell.is_empty() {
                None
            } else {
                Some(
                    cell.parse()
                        .map_err(|_| parse_err(format!("bad number {cell:?}")))?,
                )
            });
        }
    }
    Ok((dates, values))
}

/// One fully populated column of a pipeline CSV as a dated series.
pub fn read_series(path: &Path, column: &str) -> Result<ReturnSeries> {
    let (dates, mut cols) = read_columns(path, &[column])?;
    let values = cols
        .pop()
        .unwrap_or_default()
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| PipelineError::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                message: format!("missing {column}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReturnSeries::new(column, dates, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let values = [0.1 + 0.2, -1.0 / 3.0, 1e-300, 12345.678901234567];
        let start = NaiveDate::from_ymd_opt(2021, 3, 1).unwrap();
        let dates: Vec<NaiveDate> = (0..4).map(|i| start + chrono::Duration::days(i)).collect();
        write_csv(
            &path,
            &["date", "x", "gap"],
            dates
                .iter()
                .zip(values)
                .map(|(d, v)| vec![d.to_string(), num(v), String::new()]),
        )
        .unwrap();
        let s = read_series(&path, "x").unwrap();
        assert_eq!(s.values(), &values);
        assert_eq!(s.dates(), dates.as_slice());
        let (_, gaps) = read_columns(&path, &["gap"]).unwrap();
        assert!(gaps[0].iter().all(Option::is_none));
        assert!(read_series(&path, "gap").is_err());
    }
}
