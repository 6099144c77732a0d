//! Daily price/volume CSV ingestion.
//!
//! Accepts header-bearing CSV in the common daily-quote layout (`Date`,
//! `Adj Close` or `Close`, `Volume`). Rows with unusable fields are dropped
//! and tallied instead of failing the file; structural problems (missing
//! columns, duplicate dates, too little data) are hard errors. Rows may
//! arrive in any order; output is sorted by date.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use thiserror::Error;

/// Cleaned daily series for one instrument. Timestamps are strictly
/// increasing and aligned with `closes` and `volumes`, which hold only
/// positive finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceVolumeSeries {
    pub instrument_id: String,
    pub timestamps: Vec<NaiveDate>,
    pub closes: Vec<f64>,
    pub volumes: Vec<f64>,
}

impl PriceVolumeSeries {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }
}

/// Tally of one parse. `rows_read` counts every data record in the file,
/// so `rows_read - rows_dropped` rows made it into the series.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_dropped: usize,
    pub drop_reasons: BTreeMap<String, usize>,
}

/// Column selectors. `close: None` selects `Adj Close` when present and
/// falls back to `Close`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSchema {
    pub date: String,
    pub close: Option<String>,
    pub volume: String,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        Self {
            date: "Date".to_string(),
            close: None,
            volume: "Volume".to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("column '{0}' not found in header")]
    MalformedHeader(String),
    #[error("{0} usable rows; need at least 2")]
    EmptySeries(usize),
    #[error("more than one row dated {0}")]
    DuplicateDate(NaiveDate),
}

enum FieldVal {
    Ok(f64),
    Missing,
    Bad,
    Nonpositive,
}

fn parse_positive(field: Option<&str>) -> FieldVal {
    let s = match field {
        Some(s) if !s.is_empty() => s,
        _ => return FieldVal::Missing,
    };
    match s.parse::<f64>() {
        Ok(v) if !v.is_finite() => FieldVal::Bad,
        Ok(v) if v <= 0.0 => FieldVal::Nonpositive,
        Ok(v) => FieldVal::Ok(v),
        Err(_) => FieldVal::Bad,
    }
}

fn drop_row(report: &mut IngestReport, why: &str) {
    report.rows_dropped += 1;
    *report.drop_reasons.entry(why.to_string()).or_insert(0) += 1;
}

/// Parses CSV text into a cleaned series plus a drop tally.
pub fn parse_csv(
    text: &str,
    schema: &ColumnSchema,
    instrument_id: &str,
) -> Result<(PriceVolumeSeries, IngestReport), IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let headers = rdr
        .headers()
        .map_err(|_| IngestError::MalformedHeader(schema.date.clone()))?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let date_idx =
        find(&schema.date).ok_or_else(|| IngestError::MalformedHeader(schema.date.clone()))?;
    let close_idx = match &schema.close {
        Some(name) => find(name).ok_or_else(|| IngestError::MalformedHeader(name.clone()))?,
        None => find("Adj Close")
            .or_else(|| find("Close"))
            .ok_or_else(|| IngestError::MalformedHeader("Adj Close".to_string()))?,
    };
    let volume_idx =
        find(&schema.volume).ok_or_else(|| IngestError::MalformedHeader(schema.volume.clone()))?;

    let mut report = IngestReport::default();
    let mut rows: Vec<(NaiveDate, f64, f64)> = Vec::new();
    for rec in rdr.records() {
        report.rows_read += 1;
        let rec = match rec {
            Ok(r) => r,
            Err(_) => {
                drop_row(&mut report, "malformed_row");
                continue;
            }
        };
        let date = match rec.get(date_idx).map(|s| NaiveDate::parse_from_str(s, "%Y-%m-%d")) {
            Some(Ok(d)) => d,
            _ => {
                drop_row(&mut report, "bad_date");
                continue;
            }
        };
        let close = match parse_positive(rec.get(close_idx)) {
            FieldVal::Ok(v) => v,
            FieldVal::Missing => {
                drop_row(&mut report, "missing_close");
                continue;
            }
            FieldVal::Bad => {
                drop_row(&mut report, "bad_close");
                continue;
            }
            FieldVal::Nonpositive => {
                drop_row(&mut report, "nonpositive_close");
                continue;
            }
        };
        let volume = match parse_positive(rec.get(volume_idx)) {
            FieldVal::Ok(v) => v,
            FieldVal::Missing => {
                drop_row(&mut report, "missing_volume");
                continue;
            }
            FieldVal::Bad => {
                drop_row(&mut report, "bad_volume");
                continue;
            }
            FieldVal::Nonpositive => {
                drop_row(&mut report, "nonpositive_volume");
                continue;
            }
        };
        rows.push((date, close, volume));
    }

    rows.sort_by_key(|r| r.0);
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(IngestError::DuplicateDate(pair[0].0));
        }
    }
    if rows.len() < 2 {
        return Err(IngestError::EmptySeries(rows.len()));
    }

    let mut series = PriceVolumeSeries {
        instrument_id: instrument_id.to_string(),
        timestamps: Vec::with_capacity(rows.len()),
        closes: Vec::with_capacity(rows.len()),
        volumes: Vec::with_capacity(rows.len()),
    };
    for (d, c, v) in rows {
        series.timestamps.push(d);
        series.closes.push(c);
        series.volumes.push(v);
    }
    Ok((series, report))
}

/// Serializes a cleaned series back to `Date,Close,Volume` CSV. Float
/// formatting uses the shortest representation that round-trips, so
/// `parse_csv(to_csv(s))` reproduces `s` exactly.
pub fn to_csv(series: &PriceVolumeSeries) -> String {
    let mut out = String::with_capacity(32 * series.len() + 24);
    out.push_str("Date,Close,Volume\n");
    for i in 0..series.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            series.timestamps[i].format("%Y-%m-%d"),
            series.closes[i],
            series.volumes[i]
        ));
    }
    out
}
