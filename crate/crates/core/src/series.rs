//! Log-change and normalized-volatility transforms.

use serde::Serialize;
use thiserror::Error;

use crate::ingest::PriceVolumeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeKind {
    Price,
    Volume,
}

/// Log changes of one column of a daily series; one value per consecutive
/// pair of days, so it is one shorter than its source.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeSeries {
    pub values: Vec<f64>,
    pub kind: ChangeKind,
    pub source_id: String,
}

/// Absolute changes divided by their own standard deviation, so that
/// thresholds are expressed in units of sigma.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilitySeries {
    pub values: Vec<f64>,
    /// The divisor that was applied.
    pub sigma: f64,
}

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("absolute changes have zero spread; cannot normalize")]
    DegenerateSeries,
}

/// v[t] = ln(x[t+1] / x[t]) for the chosen column.
pub fn log_changes(series: &PriceVolumeSeries, kind: ChangeKind) -> ChangeSeries {
    let col = match kind {
        ChangeKind::Price => &series.closes,
        ChangeKind::Volume => &series.volumes,
    };
    let values = col.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    ChangeSeries {
        values,
        kind,
        source_id: series.instrument_id.clone(),
    }
}

/// Normalizes absolute changes by their population standard deviation
/// (sigma^2 = <|v|^2> - <|v|>^2 over the whole series, divisor N).
pub fn normalize_volatility(changes: &ChangeSeries) -> Result<VolatilitySeries, SeriesError> {
    normalize_abs(&changes.values)
}

/// Same transform for a bare slice of changes.
pub fn normalize_abs(changes: &[f64]) -> Result<VolatilitySeries, SeriesError> {
    let abs: Vec<f64> = changes.iter().map(|v| v.abs()).collect();
    let n = abs.len();
    if n == 0 {
        return Err(SeriesError::DegenerateSeries);
    }
    let lo = abs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = abs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // constant |v| means sigma is exactly zero however it is rounded
    if !(lo < hi) {
        return Err(SeriesError::DegenerateSeries);
    }
    let mean = abs.iter().sum::<f64>() / n as f64;
    let var = abs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let sigma = var.sqrt();
    if !(sigma > 0.0) {
        return Err(SeriesError::DegenerateSeries);
    }
    Ok(VolatilitySeries {
        values: abs.iter().map(|v| v / sigma).collect(),
        sigma,
    })
}
