//! Shared numeric helpers for the integration tests.

/// Integral of `pdf` over [a, infinity). Substituting x = a/u maps the
/// domain to (0, 1], where the integrand pdf(a/u) * a/u^2 vanishes at u=0
/// for any density falling faster than 1/x; composite Simpson does the
/// rest. Panel count must be even.
pub fn simpson_tail(pdf: impl Fn(f64) -> f64, a: f64, panels: usize) -> f64 {
    assert!(a > 0.0 && panels >= 2 && panels % 2 == 0);
    let h = 1.0 / panels as f64;
    let g = |u: f64| -> f64 {
        let x = a / u;
        pdf(x) * a / (u * u)
    };
    let mut acc = g(1.0); // the u=0 endpoint contributes exactly 0
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(k as f64 * h);
    }
    acc * h / 3.0
}

/// Density of |T| where T is Student's t with three degrees of freedom:
/// f(x) = 2 * c / (1 + x^2/3)^2, c = 2 / (pi * sqrt(3)).
pub fn abs_student_t3_pdf(x: f64) -> f64 {
    let c = 2.0 / (std::f64::consts::PI * 3.0_f64.sqrt());
    let b = 1.0 + x * x / 3.0;
    2.0 * c / (b * b)
}

#[allow(dead_code)]
/// Exceedance probability of a unit-scale Pareto with tail exponent alpha.
pub fn pareto_ccdf(x: f64, alpha: f64) -> f64 {
    if x <= 1.0 {
        1.0
    } else {
        x.powf(-alpha)
    }
}
