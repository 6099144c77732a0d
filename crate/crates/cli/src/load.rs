//! Input loading: daily price/volume files through the ingest pipeline,
//! and generic numeric columns (for example simulator output) taken as a
//! ready-made change series.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use volcorr::ingest::{self, ColumnSchema};
use volcorr::series::{self, ChangeKind};

use crate::error::CliError;

/// How `--column` is interpreted: the keywords `price` and `volume` route
/// through daily-CSV ingestion and log changes; any other name picks a raw
/// numeric column whose values are used as changes directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSpec {
    Price,
    Volume,
    Named(String),
}

impl ColumnSpec {
    pub fn parse(s: &str) -> ColumnSpec {
        match s {
            "price" => ColumnSpec::Price,
            "volume" => ColumnSpec::Volume,
            other => ColumnSpec::Named(other.to_string()),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            ColumnSpec::Price => "price",
            ColumnSpec::Volume => "volume",
            ColumnSpec::Named(name) => name,
        }
    }
}

/// One loaded change series plus reporting context.
pub struct LoadedChanges {
    pub values: Vec<f64>,
    /// Column label the values came from.
    pub label: String,
    /// File stem, used as the series identifier.
    pub source: String,
    /// Ingest tally as JSON, when the daily pipeline was used.
    pub ingest: Option<serde_json::Value>,
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::input("Io", format!("cannot read {}: {e}", path.display())))
}

pub fn ingest_report_json(report: &ingest::IngestReport) -> serde_json::Value {
    json!({
        "rows_read": report.rows_read,
        "rows_dropped": report.rows_dropped,
        "drop_reasons": report.drop_reasons,
    })
}

/// Loads one change series from `path` according to the column selector.
pub fn load_changes(
    path: &Path,
    spec: &ColumnSpec,
    schema: &ColumnSchema,
) -> Result<LoadedChanges, CliError> {
    let text = read_text(path)?;
    let source = file_stem(path);
    match spec {
        ColumnSpec::Price | ColumnSpec::Volume => {
            let (series_pv, report) = ingest::parse_csv(&text, schema, &source)?;
            let kind = if *spec == ColumnSpec::Price { ChangeKind::Price } else { ChangeKind::Volume };
            let changes = series::log_changes(&series_pv, kind);
            Ok(LoadedChanges {
                values: changes.values,
                label: spec.label().to_string(),
                source,
                ingest: Some(ingest_report_json(&report)),
            })
        }
        ColumnSpec::Named(name) => {
            let values = read_numeric_column(&text, name, path)?;
            Ok(LoadedChanges { values, label: name.clone(), source, ingest: None })
        }
    }
}

/// Reads one numeric column, strictly: any unparsable or non-finite field
/// fails the load rather than being dropped.
pub fn read_numeric_column(text: &str, column: &str, path: &Path) -> Result<Vec<f64>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| CliError::input("MalformedHeader", format!("{}: {e}", path.display())))?
        .clone();
    let idx = headers.iter().position(|h| h == column).ok_or_else(|| {
        CliError::input(
            "MalformedHeader",
            format!("column '{column}' not found in {}", path.display()),
        )
    })?;
    let mut values = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| {
            CliError::input("BadValue", format!("{} row {}: {e}", path.display(), row + 1))
        })?;
        let field = rec.get(idx).unwrap_or("");
        let v: f64 = field.parse().map_err(|_| {
            CliError::input(
                "BadValue",
                format!("{} row {}: '{field}' is not a number", path.display(), row + 1),
            )
        })?;
        if !v.is_finite() {
            return Err(CliError::input(
                "BadValue",
                format!("{} row {}: non-finite value", path.display(), row + 1),
            ));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::input(
            "EmptySeries",
            format!("column '{column}' in {} has no rows", path.display()),
        ));
    }
    Ok(values)
}

/// Expands a mix of files and directories into a flat, deterministic list:
/// directories contribute their *.csv files in name order.
pub fn expand_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        let meta = fs::metadata(p)
            .map_err(|e| CliError::input("Io", format!("cannot read {}: {e}", p.display())))?;
        if meta.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| CliError::input("Io", format!("cannot read {}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|path| {
                    path.is_file()
                        && path
                            .extension()
                            .map(|x| x.eq_ignore_ascii_case("csv"))
                            .unwrap_or(false)
                })
                .collect();
            entries.sort();
            out.extend(entries);
        } else {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        return Err(CliError::input("NoInputs", "no input files found"));
    }
    Ok(out)
}
