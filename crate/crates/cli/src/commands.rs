//! One builder per analysis. Each returns a `Document`; the thin wrappers
//! in `main` handle flag resolution and emission, and `report` reuses the
//! builders directly.

use std::path::Path;

use serde_json::{json, Value};
use volcorr::scaling::{self, ScalingError, ScalingKind};
use volcorr::series::VolatilitySeries;
use volcorr::tails::{self, TailEstimate};
use volcorr::{corr, garchx};

use crate::error::CliError;
use crate::load::LoadedChanges;
use crate::output::{Cell, Document};

pub fn path_str(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

pub fn parse_windows(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::input("BadValue", format!("bad window size '{part}'")))
        })
        .collect()
}

pub fn parse_usize_range(s: &str) -> Result<(usize, usize), CliError> {
    let err = || CliError::input("BadValue", format!("expected LO:HI, got '{s}'"));
    let (lo, hi) = s.split_once(':').ok_or_else(err)?;
    let lo = lo.trim().parse::<usize>().map_err(|_| err())?;
    let hi = hi.trim().parse::<usize>().map_err(|_| err())?;
    if lo > hi {
        return Err(err());
    }
    Ok((lo, hi))
}

pub fn parse_f64_range(s: &str) -> Result<(f64, f64), CliError> {
    let err = || CliError::input("BadValue", format!("expected LO:HI, got '{s}'"));
    let (lo, hi) = s.split_once(':').ok_or_else(err)?;
    let lo = lo.trim().parse::<f64>().map_err(|_| err())?;
    let hi = hi.trim().parse::<f64>().map_err(|_| err())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(err());
    }
    Ok((lo, hi))
}

pub fn parse_params(s: &str) -> Result<garchx::GarchXParams, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 8 {
        return Err(CliError::input(
            "BadValue",
            format!(
                "--params needs 8 comma-separated numbers \
                 (omega,alpha,beta,gamma_tilde,omega_tilde,alpha_tilde,beta_tilde,gamma), got {}",
                parts.len()
            ),
        ));
    }
    let mut v = [0.0_f64; 8];
    for (i, part) in parts.iter().enumerate() {
        v[i] = part
            .parse()
            .map_err(|_| CliError::input("BadValue", format!("bad parameter '{part}'")))?;
    }
    Ok(garchx::GarchXParams {
        omega: v[0],
        alpha: v[1],
        beta: v[2],
        gamma_tilde: v[3],
        omega_tilde: v[4],
        alpha_tilde: v[5],
        beta_tilde: v[6],
        gamma: v[7],
    })
}

fn fit_json(fit: &scaling::ExponentFit) -> Value {
    json!({
        "exponent": fit.exponent,
        "stderr": fit.stderr,
        "fit_range": [fit.fit_range.0, fit.fit_range.1],
        "r_squared": fit.r_squared,
    })
}

fn estimate_json(est: &TailEstimate) -> Value {
    serde_json::to_value(est).unwrap_or(Value::Null)
}

pub fn series_meta(loaded: &LoadedChanges) -> Value {
    json!({
        "source": loaded.source,
        "label": loaded.label,
        "n": loaded.values.len(),
    })
}

// --- returns ---------------------------------------------------------

pub fn build_returns_doc(loaded: &LoadedChanges, config: Value) -> Document {
    let mut meta = vec![("series", series_meta(loaded))];
    if let Some(ing) = &loaded.ingest {
        meta.push(("ingest", ing.clone()));
    }
    let rows = loaded
        .values
        .iter()
        .enumerate()
        .map(|(t, v)| vec![Cell::UInt(t as u64), Cell::Float(*v)])
        .collect();
    Document {
        command: "returns",
        config,
        meta,
        headers: vec!["t", "change"],
        rows,
    }
}

// --- ccf -------------------------------------------------------------

pub fn default_max_lag(n: usize) -> usize {
    (n / 10).min(200)
}

pub fn build_ccf_doc(
    a: &[f64],
    b: &[f64],
    max_lag: usize,
    config: Value,
    mut extra_meta: Vec<(&'static str, Value)>,
) -> Result<Document, CliError> {
    let raw = corr::cross_correlation(a, b, max_lag)?;
    let abs_a: Vec<f64> = a.iter().map(|v| v.abs()).collect();
    let abs_b: Vec<f64> = b.iter().map(|v| v.abs()).collect();
    let abs = corr::cross_correlation(&abs_a, &abs_b, max_lag)?;
    let mut meta = vec![(
        "correlation",
        json!({
            "n": a.len(),
            "band": raw.band,
            "level": raw.level,
            "significant_positive_lags": {
                "raw": corr::significant_lag_count(&raw),
                "abs": corr::significant_lag_count(&abs),
            },
        }),
    )];
    meta.append(&mut extra_meta);
    let rows = (0..raw.lags.len())
        .map(|i| {
            vec![
                Cell::Int(raw.lags[i]),
                Cell::Float(raw.rho[i]),
                Cell::Float(abs.rho[i]),
                Cell::UInt(raw.n_obs[i] as u64),
            ]
        })
        .collect();
    Ok(Document {
        command: "ccf",
        config,
        meta,
        headers: vec!["lag", "rho", "rho_abs", "n_obs"],
        rows,
    })
}

// --- dfa / dcca ------------------------------------------------------

/// Builds the scaling curve document for one or two series of absolute
/// changes. With `tolerate_fit_failure`, a sign-crossing or too-narrow fit
/// is reported inside the document (fit: null plus fit_error) instead of
/// failing; curve-level errors always fail.
pub fn build_scaling_doc(
    kind: ScalingKind,
    x: &[f64],
    y: Option<&[f64]>,
    windows: Option<Vec<usize>>,
    fit_range: Option<(usize, usize)>,
    config_fields: Value,
    extra_meta: Vec<(&'static str, Value)>,
    tolerate_fit_failure: bool,
) -> Result<(Document, Option<String>), CliError> {
    let grid = match windows {
        Some(w) => w,
        None => scaling::default_window_grid(x.len()),
    };
    let curve = match y {
        None => scaling::dfa_curve(x, &grid)?,
        Some(y) => scaling::dcca_curve(x, y, &grid)?,
    };
    let fit = scaling::fit_exponent(&curve, fit_range);
    let (fit_meta, fit_error) = match fit {
        Ok(f) => (fit_json(&f), None),
        Err(e @ (ScalingError::SignCrossing | ScalingError::InsufficientPoints { .. }))
            if tolerate_fit_failure =>
        {
            (Value::Null, Some(e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };

    // materialize the resolved invocation: actual grid and fit bounds
    let mut config = config_fields;
    let used_range = fit_range.unwrap_or((
        curve.window_sizes.first().copied().unwrap_or(0),
        curve.window_sizes.last().copied().unwrap_or(0),
    ));
    if let Value::Object(map) = &mut config {
        map.insert("windows".into(), json!(curve.window_sizes));
        map.insert("fit_range".into(), json!([used_range.0, used_range.1]));
    }

    let command = match kind {
        ScalingKind::Dfa => "dfa",
        ScalingKind::Dcca => "dcca",
    };
    let mut meta = vec![("fit", fit_meta)];
    if let Some(msg) = &fit_error {
        meta.push(("fit_error", json!(msg)));
    }
    meta.extend(extra_meta);
    let rows = (0..curve.window_sizes.len())
        .map(|i| {
            vec![
                Cell::UInt(curve.window_sizes[i] as u64),
                Cell::Float(curve.fluctuation[i]),
                Cell::UInt(curve.n_points_used[i] as u64),
            ]
        })
        .collect();
    Ok((
        Document {
            command,
            config,
            meta,
            headers: vec!["n", "fluctuation", "n_points_used"],
            rows,
        },
        fit_error,
    ))
}

// --- pooled tails ----------------------------------------------------

pub struct PooledInput {
    pub series: Vec<VolatilitySeries>,
    pub per_input: Vec<Value>,
}

impl PooledInput {
    pub fn pooled_values(&self) -> Vec<f64> {
        tails::pool_normalized(&self.series)
    }

    pub fn inputs_meta(&self) -> Value {
        Value::Array(self.per_input.clone())
    }
}

pub fn build_hill_doc(
    pooled: &PooledInput,
    tail_frac: f64,
    config_fields: Value,
) -> Result<Document, CliError> {
    if !(tail_frac > 0.0) || !tail_frac.is_finite() {
        return Err(CliError::input("BadValue", format!("bad tail fraction {tail_frac}")));
    }
    let values = pooled.pooled_values();
    let tail_count = (tail_frac * values.len() as f64).floor() as usize;
    let est = tails::hill_estimator(&values, tail_count)?;
    let mut config = config_fields;
    if let Value::Object(map) = &mut config {
        map.insert("tail_count".into(), json!(tail_count));
    }
    let (count, size) = match est.config {
        tails::TailConfig::Hill { tail_count, sample_size } => (tail_count, sample_size),
        _ => (tail_count, values.len()),
    };
    let rows = vec![vec![
        Cell::Float(est.alpha),
        Cell::Float(est.stderr),
        Cell::UInt(count as u64),
        Cell::UInt(size as u64),
    ]];
    Ok(Document {
        command: "hill",
        config,
        meta: vec![("estimate", estimate_json(&est)), ("inputs", pooled.inputs_meta())],
        headers: vec!["alpha", "stderr", "tail_count", "sample_size"],
        rows,
    })
}

pub fn build_tauq_doc(
    pooled: &PooledInput,
    grid: &[f64],
    min_count: usize,
    fit_range: (f64, f64),
    config_fields: Value,
) -> Result<Document, CliError> {
    let mut sets = Vec::new();
    for s in &pooled.series {
        for &q in grid {
            sets.push(tails::return_intervals(s, q));
        }
    }
    let curve = tails::mean_tau_curve(&sets, min_count)?;
    let est = tails::alpha_from_tau(&curve, fit_range)?;
    let rows = (0..curve.thresholds.len())
        .map(|i| {
            vec![
                Cell::Float(curve.thresholds[i]),
                Cell::Float(curve.mean_tau[i]),
                Cell::UInt(curve.counts[i] as u64),
            ]
        })
        .collect();
    Ok(Document {
        command: "tauq",
        config: config_fields,
        meta: vec![("estimate", estimate_json(&est)), ("inputs", pooled.inputs_meta())],
        headers: vec!["q", "mean_tau", "count"],
        rows,
    })
}

/// Upper end for the default density fit range: the value 0.01% of the
/// pooled sample sits above, which keeps the last bins populated.
pub fn tail_quantile(values: &[f64], upper_frac: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let idx = ((sorted.len() as f64) * upper_frac) as usize;
    sorted[idx.min(sorted.len() - 1)]
}

pub fn build_pdf_doc(
    pooled: &PooledInput,
    bins_per_decade: usize,
    tail_range: Option<(f64, f64)>,
    config_fields: Value,
) -> Result<Document, CliError> {
    let values = pooled.pooled_values();
    let range = match tail_range {
        Some(r) => r,
        None => (2.0, tail_quantile(&values, 1e-4)),
    };
    let (est, hist) = tails::pdf_tail_fit(&values, bins_per_decade, range)?;
    let mut config = config_fields;
    if let Value::Object(map) = &mut config {
        map.insert("tail_range".into(), json!([range.0, range.1]));
    }
    let rows = (0..hist.counts.len())
        .map(|j| {
            vec![
                Cell::Float(hist.centers[j]),
                Cell::Float(hist.edges[j]),
                Cell::Float(hist.edges[j + 1]),
                Cell::UInt(hist.counts[j]),
                Cell::Float(hist.density[j]),
            ]
        })
        .collect();
    Ok(Document {
        command: "pdf",
        config,
        meta: vec![
            ("estimate", estimate_json(&est)),
            ("histogram", json!({"total": hist.total})),
            ("inputs", pooled.inputs_meta()),
        ],
        headers: vec!["center", "edge_lo", "edge_hi", "count", "density"],
        rows,
    })
}

// --- simulate --------------------------------------------------------


pub fn build_simulate_doc(
    params: &garchx::GarchXParams,
    length: usize,
    seed: u64,
    burn_in: usize,
    config_fields: Value,
) -> Result<Document, CliError> {
    let sim = garchx::simulate(params, length, seed, burn_in)?;
    let stat = garchx::check_stationarity(params);
    let sv = garchx::stationary_variance(params).ok();
    let rows = (0..sim.eps.len())
        .map(|t| vec![Cell::Float(sim.eps[t]), Cell::Float(sim.eps_tilde[t])])
        .collect();
    Ok(Document {
        command: "simulate",
        config: config_fields,
        meta: vec![
            (
                "stationarity",
                json!({"stationary": stat.stationary, "margin": stat.margin}),
            ),
            (
                "stationary_variance",
                match sv {
                    Some((v, vt)) => json!([v, vt]),
                    None => Value::Null,
                },
            ),
        ],
        headers: vec!["eps", "eps_tilde"],
        rows,
    })
}
