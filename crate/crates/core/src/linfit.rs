//! Least-squares line fit shared by the exponent estimators.

#[derive(Debug, Clone, Copy)]
pub(crate) struct LineFit {
    pub slope: f64,
    #[allow(dead_code)]
    pub intercept: f64,
    /// Standard error of the slope, residual-based with n-2 degrees of freedom.
    pub slope_stderr: f64,
    pub r_squared: f64,
}

/// Fits y = slope*x + intercept. Returns None for fewer than 3 points,
/// mismatched lengths, or all-equal abscissae.
pub(crate) fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 3 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let dx = xs[i] - mx;
        let dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    // explicit residual pass: the closed form syy - slope*sxy cancels
    // catastrophically on near-exact fits
    let ssr: f64 = (0..n)
        .map(|i| {
            let r = ys[i] - intercept - slope * xs[i];
            r * r
        })
        .sum();
    let slope_stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    let r_squared = if syy <= 0.0 {
        1.0
    } else {
        (1.0 - ssr / syy).clamp(0.0, 1.0)
    };
    Some(LineFit {
        slope,
        intercept,
        slope_stderr,
        r_squared,
    })
}
