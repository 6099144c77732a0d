//! The composite `report` command: every analysis over a set of inputs,
//! one artifact file per analysis, and a manifest written last.
//!
//! All inputs are loaded and validated before the first byte is written,
//! so an unreadable or unrecognized file never leaves a half-finished
//! report behind. After that point an individual analysis may still fail
//! on its data (too short, sign crossing, ...); those failures are
//! recorded in the manifest instead of aborting the run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use volcorr::ingest::{self, ColumnSchema};
use volcorr::scaling::ScalingKind;
use volcorr::series::{self, ChangeKind, VolatilitySeries};
use volcorr::tails;

use crate::commands::{self, path_str, PooledInput};
use crate::error::{Category, CliError};
use crate::load::{self, file_stem};
use crate::output::{self, Document, Format, TOOL_STAMP};

pub struct ReportConfig {
    pub inputs: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub format: Format,
    pub schema: ColumnSchema,
    /// Echo of the resolved invocation for the manifest.
    pub config_echo: Value,
}

/// One validated input file holding a pair of change series.
struct PairData {
    path: PathBuf,
    /// File stem, made unique across the run.
    stem: String,
    layout: &'static str,
    label_a: String,
    label_b: String,
    a: Vec<f64>,
    b: Vec<f64>,
    ingest: Option<Value>,
}

fn peek_headers(text: &str, path: &Path) -> Result<Vec<String>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| CliError::input("MalformedHeader", format!("{}: {e}", path.display())))?;
    Ok(headers.iter().map(|s| s.to_string()).collect())
}

/// Classifies one file by its header row and loads both change series.
fn load_pair(path: &Path, schema: &ColumnSchema) -> Result<PairData, CliError> {
    let text = load::read_text(path)?;
    let headers = peek_headers(&text, path)?;
    let has = |name: &str| headers.iter().any(|h| h == name);
    let close_ok = match &schema.close {
        Some(c) => has(c),
        None => has("Adj Close") || has("Close"),
    };
    if has(&schema.date) && has(&schema.volume) && close_ok {
        let stem = file_stem(path);
        let (pv, report) = ingest::parse_csv(&text, schema, &stem)?;
        let a = series::log_changes(&pv, ChangeKind::Price).values;
        let b = series::log_changes(&pv, ChangeKind::Volume).values;
        Ok(PairData {
            path: path.to_path_buf(),
            stem,
            layout: "daily",
            label_a: "price".into(),
            label_b: "volume".into(),
            a,
            b,
            ingest: Some(load::ingest_report_json(&report)),
        })
    } else if has("eps") && has("eps_tilde") {
        let a = load::read_numeric_column(&text, "eps", path)?;
        let b = load::read_numeric_column(&text, "eps_tilde", path)?;
        Ok(PairData {
            path: path.to_path_buf(),
            stem: file_stem(path),
            layout: "pair",
            label_a: "eps".into(),
            label_b: "eps_tilde".into(),
            a,
            b,
            ingest: None,
        })
    } else {
        Err(CliError::input(
            "UnrecognizedLayout",
            format!(
                "{}: headers match neither a daily series ({}/close/{}) nor a simulated pair (eps/eps_tilde)",
                path.display(),
                schema.date,
                schema.volume
            ),
        ))
    }
}

fn dedup_stems(pairs: &mut [PairData]) {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for p in pairs.iter_mut() {
        let n = seen.entry(p.stem.clone()).or_insert(0);
        *n += 1;
        if *n > 1 {
            p.stem = format!("{}_{}", p.stem, n);
        }
    }
}

/// Renders and writes one artifact, or records why it could not be built.
/// Method-level failures become manifest entries; our own render or write
/// failures abort the whole report.
fn push_artifact(
    out_dir: &Path,
    format: Format,
    artifacts: &mut Vec<Value>,
    analysis: &'static str,
    source: &str,
    name: String,
    built: Result<(Document, Option<String>), CliError>,
) -> Result<(), CliError> {
    match built {
        Ok((doc, degraded)) => {
            let text = doc.render(format)?;
            output::write_file_atomic(&out_dir.join(&name), &text)?;
            let status = if degraded.is_some() { "partial" } else { "ok" };
            artifacts.push(json!({
                "analysis": analysis,
                "source": source,
                "file": name,
                "status": status,
                "detail": degraded,
            }));
            Ok(())
        }
        Err(e) if e.category == Category::Internal => Err(e),
        Err(e) => {
            artifacts.push(json!({
                "analysis": analysis,
                "source": source,
                "file": Value::Null,
                "status": "error",
                "detail": e.detail(),
            }));
            Ok(())
        }
    }
}

#[derive(Default)]
struct PoolAcc {
    series: Vec<VolatilitySeries>,
    per_input: Vec<Value>,
    failures: Vec<String>,
}

pub fn run(cfg: ReportConfig) -> Result<(), CliError> {
    let files = load::expand_inputs(&cfg.inputs)?;
    let mut pairs = Vec::with_capacity(files.len());
    for f in &files {
        pairs.push(load_pair(f, &cfg.schema)?);
    }
    dedup_stems(&mut pairs);

    fs::create_dir_all(&cfg.out_dir).map_err(|e| {
        CliError::internal("Io", format!("cannot create {}: {e}", cfg.out_dir.display()))
    })?;

    let ext = cfg.format.extension();
    let mut artifacts: Vec<Value> = Vec::new();

    // per-input artifacts: cross-correlation, two fluctuation curves, one
    // cross-fluctuation curve
    for p in &pairs {
        let max_lag = commands::default_max_lag(p.a.len());
        let ccf_doc = commands::build_ccf_doc(
            &p.a,
            &p.b,
            max_lag,
            json!({
                "input": path_str(&p.path),
                "column": p.label_a,
                "column_b": p.label_b,
                "max_lag": max_lag,
            }),
            vec![("series", json!({"source": p.stem, "n": p.a.len()}))],
        )
        .map(|d| (d, None));
        push_artifact(
            &cfg.out_dir,
            cfg.format,
            &mut artifacts,
            "ccf",
            &p.stem,
            format!("{}_ccf.{ext}", p.stem),
            ccf_doc,
        )?;

        let abs_a: Vec<f64> = p.a.iter().map(|v| v.abs()).collect();
        let abs_b: Vec<f64> = p.b.iter().map(|v| v.abs()).collect();

        for (label, abs) in [(&p.label_a, &abs_a), (&p.label_b, &abs_b)] {
            let doc = commands::build_scaling_doc(
                ScalingKind::Dfa,
                abs,
                None,
                None,
                None,
                json!({"input": path_str(&p.path), "column": label}),
                vec![("series", json!({"source": p.stem, "n": abs.len()}))],
                true,
            );
            push_artifact(
                &cfg.out_dir,
                cfg.format,
                &mut artifacts,
                "dfa",
                &p.stem,
                format!("{}_dfa_{}.{ext}", p.stem, label),
                doc,
            )?;
        }

        let dcca_doc = commands::build_scaling_doc(
            ScalingKind::Dcca,
            &abs_a,
            Some(&abs_b),
            None,
            None,
            json!({
                "input": path_str(&p.path),
                "column": p.label_a,
                "column_b": p.label_b,
            }),
            vec![("series", json!({"source": p.stem, "n": p.a.len()}))],
            true,
        );
        push_artifact(
            &cfg.out_dir,
            cfg.format,
            &mut artifacts,
            "dcca",
            &p.stem,
            format!("{}_dcca.{ext}", p.stem),
            dcca_doc,
        )?;
    }

    // pooled tail estimates, one set per column label
    let mut by_label: BTreeMap<String, PoolAcc> = BTreeMap::new();
    for p in &pairs {
        for (label, vals) in [(&p.label_a, &p.a), (&p.label_b, &p.b)] {
            let acc = by_label.entry(label.clone()).or_default();
            match series::normalize_abs(vals) {
                Ok(vs) => {
                    acc.per_input.push(json!({
                        "source": p.stem,
                        "n": vs.values.len(),
                        "sigma": vs.sigma,
                    }));
                    acc.series.push(vs);
                }
                Err(e) => acc.failures.push(format!("{}: {e}", p.stem)),
            }
        }
    }

    for (label, acc) in &by_label {
        let pooled = PooledInput {
            series: acc.series.clone(),
            per_input: acc.per_input.clone(),
        };
        let pool_cfg = |analysis: &str| {
            json!({
                "column": label,
                "analysis": analysis,
                "inputs": pairs.iter().map(|p| path_str(&p.path)).collect::<Vec<_>>(),
            })
        };
        let failed: Option<CliError> = if acc.failures.is_empty() {
            None
        } else {
            Some(CliError::method(
                "DegenerateSeries",
                format!("cannot normalize: {}", acc.failures.join("; ")),
            ))
        };

        let hill_doc = match &failed {
            Some(e) => Err(CliError::method(e.kind, e.message.clone())),
            None => commands::build_hill_doc(&pooled, tails::DEFAULT_HILL_FRACTION, pool_cfg("hill"))
                .map(|d| (d, None)),
        };
        push_artifact(
            &cfg.out_dir,
            cfg.format,
            &mut artifacts,
            "hill",
            label,
            format!("pooled_hill_{label}.{ext}"),
            hill_doc,
        )?;

        let grid = tails::default_q_grid();
        let fit_range = (grid[0], grid[grid.len() - 1]);
        let tauq_doc = match &failed {
            Some(e) => Err(CliError::method(e.kind, e.message.clone())),
            None => commands::build_tauq_doc(
                &pooled,
                &grid,
                tails::DEFAULT_MIN_INTERVALS,
                fit_range,
                pool_cfg("tauq"),
            )
            .map(|d| (d, None)),
        };
        push_artifact(
            &cfg.out_dir,
            cfg.format,
            &mut artifacts,
            "tauq",
            label,
            format!("pooled_tauq_{label}.{ext}"),
            tauq_doc,
        )?;

        let pdf_doc = match &failed {
            Some(e) => Err(CliError::method(e.kind, e.message.clone())),
            None => {
                commands::build_pdf_doc(&pooled, tails::DEFAULT_BINS_PER_DECADE, None, pool_cfg("pdf"))
                    .map(|d| (d, None))
            }
        };
        push_artifact(
            &cfg.out_dir,
            cfg.format,
            &mut artifacts,
            "pdf",
            label,
            format!("pooled_pdf_{label}.{ext}"),
            pdf_doc,
        )?;
    }

    // manifest last: its presence marks a completed run
    let inputs_meta: Vec<Value> = pairs
        .iter()
        .map(|p| {
            json!({
                "path": path_str(&p.path),
                "stem": p.stem,
                "layout": p.layout,
                "n_changes": p.a.len(),
                "ingest": p.ingest,
            })
        })
        .collect();
    let manifest = json!({
        "meta": {
            "tool": TOOL_STAMP,
            "command": "report",
            "config": cfg.config_echo,
        },
        "inputs": inputs_meta,
        "artifacts": artifacts,
    });
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::internal("Serialize", e.to_string()))?;
    text.push('\n');
    output::write_file_atomic(&cfg.out_dir.join("manifest.json"), &text)?;
    Ok(())
}
