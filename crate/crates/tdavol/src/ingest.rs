//! Readers for the price CSV and the sentiment JSON feed.

use std::collections::HashSet;
use std::path::Path;

use chrono::{DateTime, NaiveDate};
use serde::Deserialize;
use tdavol_core::timeseries::{Regime, SentimentSeries};
use tdavol_core::ReturnSeries;

use crate::error::{PipelineError, Result};

/// Daily prices with the count of rows dropped during cleaning.
#[derive(Debug, Clone)]
pub struct Prices {
    pub series: ReturnSeries,
    pub dropped_rows: usize,
}

/// Reads `Date` and `column` from a CSV with a header row. Rows whose date or
/// price is missing or unparsable are dropped and counted; the result is
/// sorted by date. Duplicate dates are an error.
pub fn read_prices(path: &Path, column: &str) -> Result<Prices> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(PipelineError::csv(path))?;
    let headers = reader.headers().map_err(PipelineError::csv(path))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| PipelineError::MissingColumn {
                path: path.to_path_buf(),
                column: name.to_string(),
            })
    };
    let (date_col, price_col) = (find("Date")?, find(column)?);

    let mut rows: Vec<(NaiveDate, f64)> = Vec::new();
    let mut dropped = 0;
    for record in reader.records() {
        let record = record.map_err(PipelineError::csv(path))?;
        let date = record.get(date_col).and_then(|s| s.parse::<NaiveDate>().ok());
        let price = record
            .get(price_col)
            .and_then(|s| s.parse::<f64>().ok())
            .filter(|p| p.is_finite());
        match (date, price) {
            (Some(d), Some(p)) => rows.push((d, p)),
            _ => dropped += 1,
        }
    }
    if dropped > 0 {
        log::info!(
            "{}: dropped {dropped} rows with missing or unparsable values",
            path.display()
        );
    }
    if rows.is_empty() {
        return Err(PipelineError::NoObservations {
            path: path.to_path_buf(),
        });
    }
    rows.sort_by_key(|r| r.0);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(PipelineError::DuplicateDate {
            path: path.to_path_buf(),
            date: w[0].0.to_string(),
        });
    }
    let (dates, values) = rows.into_iter().unzip();
    Ok(Prices {
        series: ReturnSeries::new("price", dates, values)?,
        dropped_rows: dropped,
    })
}

#[derive(Deserialize)]
struct FeedDocument {
    data: Vec<FeedRecord>,
}

#[derive(Deserialize)]
struct FeedRecord {
    value: String,
    #[serde(default)]
    value_classification: Option<String>,
    timestamp: String,
}

fn feed_error(path: &Path, line: usize, message: String) -> PipelineError {
    PipelineError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    }
}

/// Reads a Fear & Greed style feed: `{"data": [{"value", "value_classification", "timestamp"}]}`.
/// Timestamps are Unix seconds and are dated by their UTC day. When a day
/// appears twice the first record wins.
pub fn read_sentiment(path: &Path) -> Result<SentimentSeries> {
    let text = std::fs::read_to_string(path).map_err(PipelineError::io(path))?;
    let doc: FeedDocument = serde_json::from_str(&text).map_err(|source| PipelineError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if doc.data.is_empty() {
        return Err(PipelineError::NoObservations {
            path: path.to_path_buf(),
        });
    }
    let mut rows = Vec::with_capacity(doc.data.len());
    let mut seen = HashSet::new();
    for (i, rec) in doc.data.iter().enumerate() {
        let secs: i64 = rec
            .timestamp
            .trim()
            .parse()
            .map_err(|_| feed_error(path, i + 1, format!("bad timestamp {:?}", rec.timestamp)))?;
        let date = DateTime::from_timestamp(secs, 0)
            .ok_or_else(|| feed_error(path, i + 1, format!("timestamp {secs} out of range")))?
            .date_naive();
        let value: i64 = rec
            .value
            .trim()
            .parse()
            .map_err(|_| feed_error(path, i + 1, format!("bad value {:?}", rec.value)))?;
        let label = rec
            .value_classification
            .as_deref()
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.parse::<Regime>())
            .transpose()?;
        if !seen.insert(date) {
            log::warn!(
                "{}: duplicate sentiment day {date}; keeping the first record",
                path.display()
            );
            continue;
        }
        rows.push((date, value, label));
    }
    rows.sort_by_key(|r| r.0);
    let mut dates = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for (d, v, l) in rows {
        dates.push(d);
        values.push(v);
        labels.push(l);
    }
    Ok(SentimentSeries::new(dates, values, labels)?)
}
