//! Detrended fluctuation and detrended cross-correlation analysis.
//!
//! Both methods integrate their input into a profile Y[k] = sum of the
//! first k+1 values, slide a box of n+1 points across every overlapping
//! start position, remove each series' own least-squares line inside the
//! box, and average the residual covariance over the N-n boxes:
//!
//!   f2(n, i) = 1/(n-1) * sum over the box of r[k] * r'[k]
//!   F2(n)    = mean over i of f2(n, i)
//!
//! The curve stores the signed root sign(F2)*sqrt(|F2|); with a single
//! series the covariance is a variance and the root is the usual
//! fluctuation function. `dfa_curve(x, ..)` is literally
//! `dcca_curve(x, x, ..)` relabeled, so the two agree bit for bit.
//!
//! Each window size costs O(N) via closed-form box sums updated as the box
//! slides, rather than refitting a line per box.

use serde::Serialize;
use thiserror::Error;

use crate::linfit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingKind {
    Dfa,
    Dcca,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCurve {
    pub kind: ScalingKind,
    /// Strictly increasing window sizes n.
    pub window_sizes: Vec<usize>,
    /// Signed root of the mean box covariance at each window size.
    pub fluctuation: Vec<f64>,
    /// Number of overlapping boxes contributing at each window size, N - n.
    pub n_points_used: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    /// Slope of log |fluctuation| against log window size.
    pub exponent: f64,
    pub stderr: f64,
    /// Inclusive window-size range the fit used.
    pub fit_range: (usize, usize),
    pub r_squared: f64,
}

#[derive(Debug, Error)]
pub enum ScalingError {
    #[error("length mismatch: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("window size {n} is below the minimum of 4")]
    WindowTooSmall { n: usize },
    #[error("window size {n} exceeds a quarter of the series length (max {max})")]
    WindowTooLarge { n: usize, max: usize },
    #[error("window grid is empty")]
    EmptyGrid,
    #[error("{have} points in fit range; need at least {need}")]
    InsufficientPoints { have: usize, need: usize },
    #[error("fluctuation changes sign inside the fit range; no exponent")]
    SignCrossing,
}

/// Running sum: out[k] = x[0] + ... + x[k].
pub fn integrate_profile(x: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    x.iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

/// Profile with the straight line through its endpoints subtracted.
/// In-box linear detrending is exactly invariant under this shift; doing it
/// keeps box sums near the fluctuation scale instead of letting a nonzero
/// input mean grow them like N, which would cost precision in the residual
/// cancellation below.
fn chord_centered_profile(x: &[f64]) -> Vec<f64> {
    let mut y = integrate_profile(x);
    let len = y.len();
    if len < 2 {
        for v in y.iter_mut() {
            *v = 0.0;
        }
        return y;
    }
    let y0 = y[0];
    let slope = (y[len - 1] - y0) / (len - 1) as f64;
    for (k, v) in y.iter_mut().enumerate() {
        *v -= y0 + slope * k as f64;
    }
    y
}

/// Mean over all boxes of the detrended covariance at window size n.
/// `py` and `pz` are centered profiles of equal length > n.
///
/// Inside a box starting at i, with local coordinate t = 0..=n and
/// m = n + 1 points, the residual covariance has the closed form
///
///   sum r*r' = (D - A*A'/m) - Cty*Cty'/Stt
///
/// where A = sum Y, D = sum Y*Y', W = sum t*Y, Cty = W - (n/2)*A and
/// Stt = m(m^2-1)/12. All four box sums admit O(1) sliding updates.
fn mean_box_covariance(py: &[f64], pz: &[f64], n: usize) -> f64 {
    let len = py.len();
    let m = n + 1;
    let boxes = len - n;
    let mf = m as f64;
    let tbar = n as f64 / 2.0;
    let stt = mf * (mf * mf - 1.0) / 12.0;
    let denom = (n - 1) as f64;

    let (mut a, mut az) = (0.0, 0.0);
    let (mut w, mut wz) = (0.0, 0.0);
    let mut d = 0.0;
    for k in 0..m {
        let t = k as f64;
        a += py[k];
        az += pz[k];
        w += t * py[k];
        wz += t * pz[k];
        d += py[k] * pz[k];
    }

    let mut acc = 0.0;
    for i in 0..boxes {
        let cty = w - tbar * a;
        let ctz = wz - tbar * az;
        let f2 = ((d - a * az / mf) - cty * ctz / stt) / denom;
        acc += f2;
        if i + 1 < boxes {
            let (head, headz) = (py[i], pz[i]);
            let (tail, tailz) = (py[i + m], pz[i + m]);
            // shifting the box left end from i to i+1 re-indexes t -> t-1,
            // so the t-weighted sums must be updated with the old plain sums
            w += head - a + n as f64 * tail;
            wz += headz - az + n as f64 * tailz;
            a += tail - head;
            az += tailz - headz;
            d += tail * tailz - head * headz;
        }
    }
    acc / boxes as f64
}

fn check_window(n: usize, len: usize) -> Result<(), ScalingError> {
    if n < 4 {
        return Err(ScalingError::WindowTooSmall { n });
    }
    if 4 * n > len {
        return Err(ScalingError::WindowTooLarge { n, max: len / 4 });
    }
    Ok(())
}

/// Mean detrended covariance of two series at a single window size.
pub fn detrended_covariance(x: &[f64], y: &[f64], n: usize) -> Result<f64, ScalingError> {
    if x.len() != y.len() {
        return Err(ScalingError::LengthMismatch { a: x.len(), b: y.len() });
    }
    check_window(n, x.len())?;
    let py = chord_centered_profile(x);
    let pz = chord_centered_profile(y);
    Ok(mean_box_covariance(&py, &pz, n))
}

fn signed_root(f2: f64) -> f64 {
    if f2 == 0.0 {
        0.0
    } else {
        f2.signum() * f2.abs().sqrt()
    }
}

/// Detrended cross-correlation curve over a grid of window sizes.
/// The grid is sorted and deduplicated; every size must satisfy
/// 4 <= n <= len/4.
pub fn dcca_curve(x: &[f64], y: &[f64], grid: &[usize]) -> Result<ScalingCurve, ScalingError> {
    if x.len() != y.len() {
        return Err(ScalingError::LengthMismatch { a: x.len(), b: y.len() });
    }
    let mut windows = grid.to_vec();
    windows.sort_unstable();
    windows.dedup();
    if windows.is_empty() {
        return Err(ScalingError::EmptyGrid);
    }
    for &n in &windows {
        check_window(n, x.len())?;
    }
    let py = chord_centered_profile(x);
    let pz = chord_centered_profile(y);
    let mut fluctuation = Vec::with_capacity(windows.len());
    let mut n_points_used = Vec::with_capacity(windows.len());
    for &n in &windows {
        fluctuation.push(signed_root(mean_box_covariance(&py, &pz, n)));
        n_points_used.push(x.len() - n);
    }
    Ok(ScalingCurve {
        kind: ScalingKind::Dcca,
        window_sizes: windows,
        fluctuation,
        n_points_used,
    })
}

/// Detrended fluctuation curve of a single series: the cross-correlation
/// of the series with itself, relabeled.
pub fn dfa_curve(x: &[f64], grid: &[usize]) -> Result<ScalingCurve, ScalingError> {
    let mut curve = dcca_curve(x, x, grid)?;
    curve.kind = ScalingKind::Dfa;
    Ok(curve)
}

pub const DEFAULT_GRID_POINTS: usize = 20;

/// About twenty log-spaced window sizes covering [8, len/4]. Empty when the
/// series is too short to hold even the smallest window.
pub fn default_window_grid(len: usize) -> Vec<usize> {
    let hi = len / 4;
    if hi < 8 {
        return Vec::new();
    }
    let llo = (8.0_f64).ln();
    let lhi = (hi as f64).ln();
    let steps = (DEFAULT_GRID_POINTS - 1) as f64;
    let mut grid: Vec<usize> = (0..DEFAULT_GRID_POINTS)
        .map(|i| (llo + (lhi - llo) * i as f64 / steps).exp().round() as usize)
        .collect();
    grid.dedup();
    grid
}

/// Log-log slope of a scaling curve, restricted to window sizes inside
/// `fit_range` (the whole grid when None). All fluctuation values in range
/// must share one sign; a mixed-sign or zero-crossing curve has no
/// power-law exponent and is reported as such.
pub fn fit_exponent(
    curve: &ScalingCurve,
    fit_range: Option<(usize, usize)>,
) -> Result<ExponentFit, ScalingError> {
    let (lo, hi) = fit_range.unwrap_or((
        curve.window_sizes.first().copied().unwrap_or(0),
        curve.window_sizes.last().copied().unwrap_or(0),
    ));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut pos = 0usize;
    let mut neg = 0usize;
    for (i, &n) in curve.window_sizes.iter().enumerate() {
        if n < lo || n > hi {
            continue;
        }
        let f = curve.fluctuation[i];
        if f > 0.0 {
            pos += 1;
        } else if f < 0.0 {
            neg += 1;
        }
        xs.push((n as f64).ln());
        ys.push(f.abs().ln());
    }
    if pos > 0 && neg > 0 {
        return Err(ScalingError::SignCrossing);
    }
    if pos + neg < xs.len() {
        // an exact zero in range also breaks the log-log fit
        return Err(ScalingError::SignCrossing);
    }
    if xs.len() < 4 {
        return Err(ScalingError::InsufficientPoints { have: xs.len(), need: 4 });
    }
    let fit = linfit::fit_line(&xs, &ys)
        .ok_or(ScalingError::InsufficientPoints { have: xs.len(), need: 4 })?;
    Ok(ExponentFit {
        exponent: fit.slope,
        stderr: fit.slope_stderr,
        fit_range: (lo, hi),
        r_squared: fit.r_squared,
    })
}
