//! Power-law tail exponents for normalized volatility series.
//!
//! Three estimators that should roughly agree on heavy-tailed data:
//! a direct fit to the log-binned density (`pdf_tail_fit`), Hill's
//! order-statistics estimator (`hill_estimator`), and the scaling of mean
//! return intervals between threshold exceedances against the threshold
//! (`return_intervals` / `mean_tau_curve` / `alpha_from_tau`). For a
//! density decaying like x^-(1+alpha), the mean interval grows like
//! q^alpha, the binned density fits a slope of -(1+alpha), and Hill
//! estimates alpha directly.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::linfit;
use crate::series::VolatilitySeries;

pub const DEFAULT_MIN_INTERVALS: usize = 50;
pub const DEFAULT_BINS_PER_DECADE: usize = 20;
pub const DEFAULT_HILL_FRACTION: f64 = 0.10;

/// Gaps between consecutive exceedances of one threshold in one series.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnIntervalSet {
    pub threshold_q: f64,
    pub intervals: Vec<u64>,
    pub n_exceedances: usize,
}

/// Mean return interval per threshold, pooled across series.
#[derive(Debug, Clone, PartialEq)]
pub struct TauCurve {
    pub thresholds: Vec<f64>,
    pub mean_tau: Vec<f64>,
    /// Pooled interval count behind each mean.
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    PdfFit,
    Hill,
    TauQ,
}

/// What the estimate was computed from, for reporting alongside alpha.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailConfig {
    Hill { tail_count: usize, sample_size: usize },
    TauQ { thresholds: Vec<f64>, fit_range: (f64, f64) },
    PdfFit { bins_per_decade: usize, tail_range: (f64, f64), occupied_bins: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub alpha: f64,
    pub stderr: f64,
    pub method: TailMethod,
    pub config: TailConfig,
}

/// Histogram on logarithmically spaced bins. `density` is per unit of x
/// (count / bin width / total), so it integrates to the covered fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct TailHistogram {
    pub edges: Vec<f64>,
    /// Geometric bin centers.
    pub centers: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    /// All values the caller supplied, in and out of range.
    pub total: usize,
}

#[derive(Debug, Error)]
pub enum TailsError {
    #[error("negative or non-finite value in input")]
    NonpositiveValue,
    #[error("tail of {0} values is too small; need at least 2")]
    TailTooSmall(usize),
    #[error("tail of {tail_count} exceeds one tenth of the {sample_size}-point sample (max {max_allowed})")]
    TailTooLarge { tail_count: usize, sample_size: usize, max_allowed: usize },
    #[error("tail values are all equal; exponent undefined")]
    DegenerateTail,
    #[error("no threshold kept at least {min_count} pooled intervals")]
    InsufficientExceedances { min_count: usize },
    #[error("{have} points in fit range; need at least {need}")]
    InsufficientPoints { have: usize, need: usize },
    #[error("only {occupied} occupied bins; need at least {need}")]
    SparseTail { occupied: usize, need: usize },
    #[error("tail range must satisfy 0 < lo < hi with at least one bin")]
    BadRange,
}

/// Gaps between consecutive exceedances V > q, in samples. The stretches
/// before the first exceedance and after the last are open-ended and are
/// not counted as intervals.
pub fn return_intervals(vol: &VolatilitySeries, q: f64) -> ReturnIntervalSet {
    assert!(q > 0.0 && q.is_finite(), "threshold must be positive");
    let mut intervals = Vec::new();
    let mut n_exceedances = 0usize;
    let mut prev: Option<usize> = None;
    for (i, &v) in vol.values.iter().enumerate() {
        if v > q {
            n_exceedances += 1;
            if let Some(p) = prev {
                intervals.push((i - p) as u64);
            }
            prev = Some(i);
        }
    }
    ReturnIntervalSet { threshold_q: q, intervals, n_exceedances }
}

/// Pools interval sets by threshold and keeps the thresholds backed by at
/// least `min_count` intervals (and never fewer than one). Errors only
/// when nothing survives.
pub fn mean_tau_curve(
    sets: &[ReturnIntervalSet],
    min_count: usize,
) -> Result<TauCurve, TailsError> {
    // key by bit pattern: thresholds are positive, so bit order = numeric order
    let mut pooled: BTreeMap<u64, (f64, u64, usize)> = BTreeMap::new();
    for s in sets {
        let e = pooled.entry(s.threshold_q.to_bits()).or_insert((s.threshold_q, 0, 0));
        e.1 += s.intervals.iter().sum::<u64>();
        e.2 += s.intervals.len();
    }
    let mut curve = TauCurve {
        thresholds: Vec::new(),
        mean_tau: Vec::new(),
        counts: Vec::new(),
    };
    for (q, sum, count) in pooled.into_values() {
        if count >= min_count.max(1) {
            curve.thresholds.push(q);
            curve.mean_tau.push(sum as f64 / count as f64);
            curve.counts.push(count);
        }
    }
    if curve.thresholds.is_empty() {
        return Err(TailsError::InsufficientExceedances { min_count });
    }
    Ok(curve)
}

/// Tail exponent from the scaling of mean intervals: slope of ln(mean tau)
/// against ln(q) over thresholds inside `fit_range`.
pub fn alpha_from_tau(curve: &TauCurve, fit_range: (f64, f64)) -> Result<TailEstimate, TailsError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut used = Vec::new();
    for i in 0..curve.thresholds.len() {
        let q = curve.thresholds[i];
        if q >= fit_range.0 && q <= fit_range.1 {
            xs.push(q.ln());
            ys.push(curve.mean_tau[i].ln());
            used.push(q);
        }
    }
    if xs.len() < 4 {
        return Err(TailsError::InsufficientPoints { have: xs.len(), need: 4 });
    }
    let fit = linfit::fit_line(&xs, &ys).ok_or(TailsError::DegenerateTail)?;
    Ok(TailEstimate {
        alpha: fit.slope,
        stderr: fit.slope_stderr,
        method: TailMethod::TauQ,
        config: TailConfig::TauQ { thresholds: used, fit_range },
    })
}

/// Hill's estimator on the `tail_count` largest values:
/// alpha = (k-1) / sum_{i<k} ln(x_(i) / x_(k)), stderr = alpha/sqrt(k-1).
/// The tail may not exceed one tenth of the sample, where the estimator's
/// bias from the non-asymptotic bulk sets in.
pub fn hill_estimator(values: &[f64], tail_count: usize) -> Result<TailEstimate, TailsError> {
    let sample_size = values.len();
    if tail_count < 2 {
        return Err(TailsError::TailTooSmall(tail_count));
    }
    let max_allowed = (sample_size as f64 * 0.10).ceil() as usize;
    if tail_count > max_allowed {
        return Err(TailsError::TailTooLarge { tail_count, sample_size, max_allowed });
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(TailsError::NonpositiveValue);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let tail = &sorted[..tail_count];
    let x_min = tail[tail_count - 1];
    if x_min <= 0.0 {
        return Err(TailsError::NonpositiveValue);
    }
    let log_sum: f64 = tail[..tail_count - 1].iter().map(|x| (x / x_min).ln()).sum();
    if log_sum <= 0.0 {
        return Err(TailsError::DegenerateTail);
    }
    let k = (tail_count - 1) as f64;
    let alpha = k / log_sum;
    Ok(TailEstimate {
        alpha,
        stderr: alpha / k.sqrt(),
        method: TailMethod::Hill,
        config: TailConfig::Hill { tail_count, sample_size },
    })
}

/// Histogram of `values` on log-spaced bins covering `range`. Values
/// outside the range are ignored but still count toward `total`, so the
/// reported density is an absolute density, comparable across ranges.
pub fn log_binned_histogram(
    values: &[f64],
    bins_per_decade: usize,
    range: (f64, f64),
) -> Result<TailHistogram, TailsError> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo) || !hi.is_finite() || bins_per_decade == 0 {
        return Err(TailsError::BadRange);
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(TailsError::NonpositiveValue);
    }
    let n_bins = ((hi / lo).log10() * bins_per_decade as f64).ceil().max(1.0) as usize;
    let edges: Vec<f64> = (0..=n_bins)
        .map(|j| lo * (hi / lo).powf(j as f64 / n_bins as f64))
        .collect();
    let mut counts = vec![0u64; n_bins];
    let log_span = (hi / lo).ln();
    for &v in values {
        if v < lo || v > hi {
            continue;
        }
        // bin by log position; the clamp absorbs edge rounding
        let idx = (((v / lo).ln() / log_span) * n_bins as f64).floor() as isize;
        counts[idx.clamp(0, n_bins as isize - 1) as usize] += 1;
    }
    let total = values.len();
    let centers: Vec<f64> = (0..n_bins).map(|j| (edges[j] * edges[j + 1]).sqrt()).collect();
    let density: Vec<f64> = (0..n_bins)
        .map(|j| counts[j] as f64 / (edges[j + 1] - edges[j]) / total.max(1) as f64)
        .collect();
    Ok(TailHistogram { edges, centers, counts, density, total })
}

/// Tail exponent from the log-binned density: a power-law tail p(x) ~
/// x^-(1+alpha) fits a log-log slope of -(1+alpha), so alpha = -(1+slope).
/// Requires at least five occupied bins inside `tail_range`.
pub fn pdf_tail_fit(
    values: &[f64],
    bins_per_decade: usize,
    tail_range: (f64, f64),
) -> Result<(TailEstimate, TailHistogram), TailsError> {
    let hist = log_binned_histogram(values, bins_per_decade, tail_range)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in 0..hist.counts.len() {
        if hist.counts[j] > 0 {
            xs.push(hist.centers[j].ln());
            ys.push(hist.density[j].ln());
        }
    }
    if xs.len() < 5 {
        return Err(TailsError::SparseTail { occupied: xs.len(), need: 5 });
    }
    let fit = linfit::fit_line(&xs, &ys).ok_or(TailsError::DegenerateTail)?;
    let estimate = TailEstimate {
        alpha: -(1.0 + fit.slope),
        stderr: fit.slope_stderr,
        method: TailMethod::PdfFit,
        config: TailConfig::PdfFit {
            bins_per_decade,
            tail_range,
            occupied_bins: xs.len(),
        },
    };
    Ok((estimate, hist))
}

/// Concatenates normalized series for pooled tail estimation. Each series
/// is already in units of its own sigma, which is what makes pooling
/// meaningful.
pub fn pool_normalized(series: &[VolatilitySeries]) -> Vec<f64> {
    series.iter().flat_map(|s| s.values.iter().copied()).collect()
}

/// Inclusive arithmetic threshold ladder, empty on a bad specification.
pub fn q_grid(q_min: f64, q_max: f64, q_step: f64) -> Vec<f64> {
    if !(q_step > 0.0) || !(q_min > 0.0) || q_max < q_min {
        return Vec::new();
    }
    let count = ((q_max - q_min) / q_step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| q_min + i as f64 * q_step).collect()
}

/// Thresholds 2, 2.5, ..., 8 in units of sigma.
pub fn default_q_grid() -> Vec<f64> {
    q_grid(2.0, 8.0, 0.5)
}
