//! CSV ingestion and the zero-lower-bound censoring conventions.

use std::cmp::Ordering;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Series;

const MISSING: [&str; 6] = ["", "na", "nan", "null", ".", "-"];

/// Observations as read, before censoring. Values may be negative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RawSeries {
    pub timestamps: Vec<String>,
    pub values: Vec<f64>,
}

impl RawSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Columns to read. A label not present in the header is taken as a
/// zero-based column index when it parses as one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub date: String,
    pub value: String,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self { date: "date".into(), value: "value".into() }
    }
}

fn is_missing(field: &str) -> bool {
    MISSING.contains(&field.to_ascii_lowercase().as_str())
}

fn resolve(header: &csv::StringRecord, label: &str) -> Result<usize> {
    if let Some(i) = header.iter().position(|h| h.trim() == label) {
        return Ok(i);
    }
    match label.parse::<usize>() {
        Ok(i) if i < header.len() => Ok(i),
        _ => Err(Error::MissingColumn(label.to_string())),
    }
}

pub fn read_csv(path: impl AsRef<Path>, columns: &ColumnSpec) -> Result<RawSeries> {
    read_csv_from(File::open(path)?, columns)
}

pub fn read_csv_from<R: Read>(reader: R, columns: &ColumnSpec) -> Result<RawSeries> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    let (di, vi) = (resolve(&header, &columns.date)?, resolve(&header, &columns.value)?);
    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    let mut lines = Vec::new();
    let mut missing = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let (Some(date), Some(raw)) = (record.get(di), record.get(vi)) else {
            return Err(Error::Parse { line, message: "row has too few fields".into() });
        };
        if is_missing(raw) || is_missing(date) {
            missing.push(line);
            continue;
        }
        let v: f64 = raw
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("value {raw:?} is not a number") })?;
        if !v.is_finite() {
            return Err(Error::Parse { line, message: format!("value {raw:?} is not finite") });
        }
        timestamps.push(date.to_string());
        values.push(v);
        lines.push(line);
    }
    if !missing.is_empty() {
        return Err(Error::MissingValues { rows: missing });
    }
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    check_order(&timestamps, &lines)?;
    Ok(RawSeries { timestamps, values })
}

/// Labels compare numerically when every one parses as a number, and as
/// strings otherwise (which orders ISO dates correctly).
fn check_order(timestamps: &[String], lines: &[u64]) -> Result<()> {
    let numeric: Option<Vec<f64>> = timestamps.iter().map(|t| t.parse::<f64>().ok()).collect();
    for i in 1..timestamps.len() {
        let ord = match &numeric {
            Some(v) => v[i - 1].partial_cmp(&v[i]).unwrap_or(Ordering::Equal),
            None => timestamps[i - 1].cmp(&timestamps[i]),
        };
        if ord != Ordering::Less {
            return Err(Error::NonMonotone {
                row: lines[i],
                prev: timestamps[i - 1].clone(),
                next: timestamps[i].clone(),
            });
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensorMode {
    /// `v ≤ c ↦ 0`, otherwise unchanged.
    #[default]
    Clip,
    /// `v ↦ max(v − c, 0)`.
    Shift,
}

impl FromStr for CensorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "clip" => Ok(CensorMode::Clip),
            "shift" => Ok(CensorMode::Shift),
            other => Err(Error::InvalidSpec(format!("unknown censor mode '{other}' (expected clip or shift)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CensorRule {
    pub threshold: f64,
    pub mode: CensorMode,
}

impl CensorRule {
    pub fn new(threshold: f64, mode: CensorMode) -> Result<Self> {
        if !(threshold >= 0.0 && threshold.is_finite()) {
            return Err(Error::InvalidSpec(format!("censoring threshold must be finite and >= 0, got {threshold}")));
        }
        Ok(Self { threshold, mode })
    }

    pub fn apply(&self, v: f64) -> f64 {
        match self.mode {
            CensorMode::Clip if v <= self.threshold => 0.0,
            CensorMode::Clip => v,
            CensorMode::Shift => (v - self.threshold).max(0.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Censored {
    pub series: Series,
    pub zeros: usize,
}

/// Censors every value at the rule's threshold. All values become
/// observations; the series carries no presample block.
pub fn apply_censoring(raw: &RawSeries, rule: &CensorRule) -> Result<Censored> {
    let values: Vec<f64> = raw.values.iter().map(|v| rule.apply(*v)).collect();
    let zeros = values.iter().filter(|v| **v == 0.0).count();
    Ok(Censored { series: Series::from_observations(values)?, zeros })
}
