//! Lagged cross-correlation with i.i.d.-noise significance bands.
//!
//! `rho` at lag n is the Pearson correlation of `a[t+n]` with `b[t]` over
//! all overlapping positions, with means and variances recomputed inside
//! each window. A positive lag therefore asks whether `b` leads `a`.
//! The band is the two-sided normal half-width z / sqrt(N) that an
//! uncorrelated pair of length-N series would stay inside at the stored
//! confidence level.

use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

pub const DEFAULT_CONFIDENCE_LEVEL: f64 = 0.95;

/// Correlation estimates on the symmetric lag range [-max_lag, max_lag]
/// (nonnegative lags only for autocorrelation).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationFunction {
    pub lags: Vec<i64>,
    pub rho: Vec<f64>,
    /// Overlap length at each lag: N - |lag|.
    pub n_obs: Vec<usize>,
    pub band: f64,
    pub level: f64,
}

#[derive(Debug, Error)]
pub enum CorrError {
    #[error("series of {len} points is too short; need at least {needed}")]
    SeriesTooShort { len: usize, needed: usize },
    #[error("length mismatch: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("window at lag {lag} has zero variance")]
    ZeroVariance { lag: i64 },
    #[error("confidence level {0} outside (0, 1)")]
    InvalidLevel(f64),
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for i in 0..x.len() {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    // sqrt(sxx*syy) rather than sqrt(sxx)*sqrt(syy): when x and y are the
    // same slice all three sums are identical and the quotient is exactly 1
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Half-width of the two-sided i.i.d. confidence band for a length-n series.
pub fn confidence_band(n_obs: usize, level: f64) -> Result<f64, CorrError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(CorrError::InvalidLevel(level));
    }
    if n_obs < 2 {
        return Err(CorrError::SeriesTooShort { len: n_obs, needed: 2 });
    }
    let z = Normal::new(0.0, 1.0).unwrap().inverse_cdf(0.5 * (1.0 + level));
    Ok(z / (n_obs as f64).sqrt())
}

fn window<'a>(a: &'a [f64], b: &'a [f64], lag: i64) -> (&'a [f64], &'a [f64]) {
    let n = a.len();
    let k = lag.unsigned_abs() as usize;
    if lag >= 0 {
        (&a[k..], &b[..n - k])
    } else {
        (&a[..n - k], &b[k..])
    }
}

/// Cross-correlation of equal-length series on lags -max_lag..=max_lag.
pub fn cross_correlation(
    a: &[f64],
    b: &[f64],
    max_lag: usize,
) -> Result<CorrelationFunction, CorrError> {
    if a.len() != b.len() {
        return Err(CorrError::LengthMismatch { a: a.len(), b: b.len() });
    }
    let n = a.len();
    // every window must keep at least two points
    if n < max_lag + 2 {
        return Err(CorrError::SeriesTooShort { len: n, needed: max_lag + 2 });
    }
    let band = confidence_band(n, DEFAULT_CONFIDENCE_LEVEL)?;
    let l = max_lag as i64;
    let mut cf = CorrelationFunction {
        lags: Vec::with_capacity(2 * max_lag + 1),
        rho: Vec::with_capacity(2 * max_lag + 1),
        n_obs: Vec::with_capacity(2 * max_lag + 1),
        band,
        level: DEFAULT_CONFIDENCE_LEVEL,
    };
    for lag in -l..=l {
        let (x, y) = window(a, b, lag);
        let r = pearson(x, y).ok_or(CorrError::ZeroVariance { lag })?;
        cf.lags.push(lag);
        cf.rho.push(r);
        cf.n_obs.push(x.len());
    }
    Ok(cf)
}

/// Autocorrelation on lags 0..=max_lag.
pub fn auto_correlation(a: &[f64], max_lag: usize) -> Result<CorrelationFunction, CorrError> {
    let n = a.len();
    if n < max_lag + 2 {
        return Err(CorrError::SeriesTooShort { len: n, needed: max_lag + 2 });
    }
    let band = confidence_band(n, DEFAULT_CONFIDENCE_LEVEL)?;
    let mut cf = CorrelationFunction {
        lags: Vec::with_capacity(max_lag + 1),
        rho: Vec::with_capacity(max_lag + 1),
        n_obs: Vec::with_capacity(max_lag + 1),
        band,
        level: DEFAULT_CONFIDENCE_LEVEL,
    };
    for lag in 0..=max_lag as i64 {
        let (x, y) = window(a, a, lag);
        let r = pearson(x, y).ok_or(CorrError::ZeroVariance { lag })?;
        cf.lags.push(lag);
        cf.rho.push(r);
        cf.n_obs.push(x.len());
    }
    Ok(cf)
}

/// Number of strictly positive lags whose |rho| exceeds the band.
pub fn significant_lag_count(cf: &CorrelationFunction) -> usize {
    cf.lags
        .iter()
        .zip(&cf.rho)
        .filter(|(lag, rho)| **lag > 0 && rho.abs() > cf.band)
        .count()
}
