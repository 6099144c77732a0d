//! Coupled pair of GARCH(1,1) streams. Each stream's conditional variance
//! feeds on the other stream's last squared innovation as well as its own:
//!
//!   eps[t]        = sigma[t] * eta[t]
//!   eps~[t]       = sigma~[t] * eta~[t]
//!   sigma2[t+1]   = omega  + alpha  * eps[t]^2  + beta  * sigma2[t]  + gamma~ * eps~[t]^2
//!   sigma2~[t+1]  = omega~ + alpha~ * eps~[t]^2 + beta~ * sigma2~[t] + gamma  * eps[t]^2
//!
//! with eta, eta~ independent standard normals. The cross terms make the
//! two volatility paths co-move, which shows up as long-range
//! cross-correlation between |eps| and |eps~|.
//!
//! Simulation is fully reproducible: one u64 seed determines the path, on
//! every platform, via a ChaCha stream cipher generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchXParams {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Weight of the other stream's squared innovation in this variance.
    pub gamma_tilde: f64,
    pub omega_tilde: f64,
    pub alpha_tilde: f64,
    pub beta_tilde: f64,
    /// Weight of this stream's squared innovation in the other variance.
    pub gamma: f64,
}

impl GarchXParams {
    /// Both streams share one set of coefficients; `gamma_cross` is the
    /// mutual coupling weight.
    pub fn symmetric(omega: f64, alpha: f64, beta: f64, gamma_cross: f64) -> Self {
        Self {
            omega,
            alpha,
            beta,
            gamma_tilde: gamma_cross,
            omega_tilde: omega,
            alpha_tilde: alpha,
            beta_tilde: beta,
            gamma: gamma_cross,
        }
    }

    fn as_array(&self) -> [f64; 8] {
        [
            self.omega,
            self.alpha,
            self.beta,
            self.gamma_tilde,
            self.omega_tilde,
            self.alpha_tilde,
            self.beta_tilde,
            self.gamma,
        ]
    }

    fn validate(&self) -> Result<(), GarchError> {
        if self.as_array().iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(GarchError::InvalidParams(
                "coefficients must be finite and nonnegative".into(),
            ));
        }
        if self.omega <= 0.0 || self.omega_tilde <= 0.0 {
            return Err(GarchError::InvalidParams("omega terms must be positive".into()));
        }
        Ok(())
    }
}

/// One simulated pair. `sigma2` holds the conditional variance in force
/// at each kept step, aligned with `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedPair {
    pub eps: Vec<f64>,
    pub eps_tilde: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub sigma2_tilde: Vec<f64>,
    pub seed: u64,
    pub burn_in: usize,
    /// False when the squared-innovation recursion is not mean-stationary;
    /// the simulation still runs, the moments just drift.
    pub stationary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityReport {
    pub stationary: bool,
    /// 1 minus the spectral radius of the mean recursion; negative when
    /// nonstationary.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCheck {
    pub target_var: f64,
    pub target_var_tilde: f64,
    pub sample_var: f64,
    pub sample_var_tilde: f64,
    pub rel_dev: f64,
    pub rel_dev_tilde: f64,
}

#[derive(Debug, Error)]
pub enum GarchError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no positive stationary solution for these parameters")]
    NoPositiveSolution,
}

pub const DEFAULT_BURN_IN: usize = 1000;

/// Mean recursion matrix of (E eps^2, E eps~^2).
fn mean_matrix(p: &GarchXParams) -> [[f64; 2]; 2] {
    [
        [p.alpha + p.beta, p.gamma_tilde],
        [p.gamma, p.alpha_tilde + p.beta_tilde],
    ]
}

/// Mean-stationarity of the squared-innovation recursion: the spectral
/// radius of the 2x2 mean matrix must be below 1. For nonnegative
/// coefficients the radius is the larger real eigenvalue.
pub fn check_stationarity(p: &GarchXParams) -> StationarityReport {
    let m = mean_matrix(p);
    let tr = m[0][0] + m[1][1];
    let diff = m[0][0] - m[1][1];
    // discriminant of the characteristic polynomial; nonnegative here
    // because the off-diagonal product gamma*gamma~ is nonnegative
    let disc = diff * diff + 4.0 * m[0][1] * m[1][0];
    let radius = 0.5 * (tr + disc.max(0.0).sqrt());
    StationarityReport {
        stationary: radius < 1.0,
        margin: 1.0 - radius,
    }
}

/// Stationary values of (E eps^2, E eps~^2), solving the coupled linear
/// fixed-point equations. Errors when the system has no positive solution,
/// which for nonnegative coefficients coincides with nonstationarity.
pub fn stationary_variance(p: &GarchXParams) -> Result<(f64, f64), GarchError> {
    p.validate()?;
    let d1 = 1.0 - p.alpha - p.beta;
    let d2 = 1.0 - p.alpha_tilde - p.beta_tilde;
    let det = d1 * d2 - p.gamma * p.gamma_tilde;
    if d1 <= 0.0 || d2 <= 0.0 || det <= 0.0 {
        return Err(GarchError::NoPositiveSolution);
    }
    let v = (p.omega * d2 + p.gamma_tilde * p.omega_tilde) / det;
    let v_tilde = (p.omega_tilde * d1 + p.gamma * p.omega) / det;
    if !(v > 0.0 && v_tilde > 0.0) || !v.is_finite() || !v_tilde.is_finite() {
        return Err(GarchError::NoPositiveSolution);
    }
    Ok((v, v_tilde))
}

/// Simulates `length` kept steps after `burn_in` discarded ones. Variances
/// start at their stationary values; for nonstationary parameters they
/// start at the decoupled fallback omega / (1 - min(alpha+beta, 0.99)).
pub fn simulate(
    p: &GarchXParams,
    length: usize,
    seed: u64,
    burn_in: usize,
) -> Result<SimulatedPair, GarchError> {
    p.validate()?;
    if length == 0 {
        return Err(GarchError::InvalidParams("length must be positive".into()));
    }
    let report = check_stationarity(p);
    let (mut v, mut vt) = match stationary_variance(p) {
        Ok(pair) => pair,
        Err(_) => (
            p.omega / (1.0 - (p.alpha + p.beta).min(0.99)),
            p.omega_tilde / (1.0 - (p.alpha_tilde + p.beta_tilde).min(0.99)),
        ),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SimulatedPair {
        eps: Vec::with_capacity(length),
        eps_tilde: Vec::with_capacity(length),
        sigma2: Vec::with_capacity(length),
        sigma2_tilde: Vec::with_capacity(length),
        seed,
        burn_in,
        stationary: report.stationary,
    };
    for t in 0..burn_in + length {
        // draw order is part of the reproducibility contract: eta first
        let eta: f64 = StandardNormal.sample(&mut rng);
        let eta_tilde: f64 = StandardNormal.sample(&mut rng);
        let e = v.sqrt() * eta;
        let e_tilde = vt.sqrt() * eta_tilde;
        if t >= burn_in {
            out.eps.push(e);
            out.eps_tilde.push(e_tilde);
            out.sigma2.push(v);
            out.sigma2_tilde.push(vt);
        }
        let next_v = p.omega + p.alpha * e * e + p.beta * v + p.gamma_tilde * e_tilde * e_tilde;
        vt = p.omega_tilde + p.alpha_tilde * e_tilde * e_tilde + p.beta_tilde * vt + p.gamma * e * e;
        v = next_v;
    }
    Ok(out)
}

/// Compares the sample second moment of each innovation stream against its
/// stationary target. The innovations are zero-mean by construction, so
/// the second moment is the variance.
pub fn empirical_moment_check(
    sim: &SimulatedPair,
    p: &GarchXParams,
) -> Result<MomentCheck, GarchError> {
    let (target_var, target_var_tilde) = stationary_variance(p)?;
    let mean_sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
    let sample_var = mean_sq(&sim.eps);
    let sample_var_tilde = mean_sq(&sim.eps_tilde);
    Ok(MomentCheck {
        target_var,
        target_var_tilde,
        sample_var,
        sample_var_tilde,
        rel_dev: (sample_var - target_var).abs() / target_var,
        rel_dev_tilde: (sample_var_tilde - target_var_tilde).abs() / target_var_tilde,
    })
}
