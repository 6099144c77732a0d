//! Output rendering and atomic writing.
//!
//! Every command produces one `Document`: a fully-resolved config echo,
//! ordered extra metadata, and one table. The JSON and CSV renderings are
//! both deterministic: floats use the shortest representation that
//! round-trips, JSON object keys are sorted, and nothing time- or
//! environment-dependent is ever included.

use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Value};

use crate::error::CliError;

pub const TOOL_STAMP: &str = concat!("volcorr ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }

    pub fn extension(self) -> &'static str {
        self.name()
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::UInt(v) => json!(v),
            Cell::Float(v) => match serde_json::Number::from_f64(*v) {
                Some(n) => Value::Number(n),
                None => Value::String(format!("{v}")),
            },
        }
    }

    fn to_csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            // shortest round-trip representation
            Cell::Float(v) => format!("{v}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Document {
    pub command: &'static str,
    /// Fully-resolved invocation: every default materialized.
    pub config: Value,
    /// Extra metadata in a fixed order (order shows in CSV; JSON sorts keys).
    pub meta: Vec<(&'static str, Value)>,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => Ok(self.render_csv()),
        }
    }

    fn render_json(&self) -> Result<String, CliError> {
        let mut meta = serde_json::Map::new();
        meta.insert("tool".into(), json!(TOOL_STAMP));
        meta.insert("command".into(), json!(self.command));
        meta.insert("config".into(), self.config.clone());
        for (k, v) in &self.meta {
            meta.insert((*k).into(), v.clone());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        let doc = json!({
            "meta": Value::Object(meta),
            "table": { "headers": self.headers, "rows": rows },
        });
        let mut text = serde_json::to_string_pretty(&doc)
            .map_err(|e| CliError::internal("Serialize", e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {TOOL_STAMP}\n"));
        out.push_str(&format!("# command: {}\n", self.command));
        out.push_str(&format!("# config: {}\n", compact(&self.config)));
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {}\n", compact(v)));
        }
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::to_csv_field).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).unwrap_or_else(|_| "null".to_string())
}

/// Writes to stdout, or atomically to a file: the content lands in a
/// temporary file in the destination directory and is renamed into place,
/// so a crash never leaves a half-written output.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        None => {
            let mut out = io::stdout().lock();
            match out.write_all(content.as_bytes()).and_then(|()| out.flush()) {
                Ok(()) => Ok(()),
                // the reader closed the pipe; it has all it wants
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => std::process::exit(0),
                Err(e) => Err(CliError::internal("Io", format!("cannot write to stdout: {e}"))),
            }
        }
        Some(p) => write_file_atomic(p, content),
    }
}

pub fn write_file_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::internal("Io", format!("cannot create temp file in {}: {e}", dir.display())))?;
    tmp.write_all(content.as_bytes())
        .map_err(|e| CliError::internal("Io", format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::internal("Io", format!("cannot move output into {}: {e}", path.display())))?;
    Ok(())
}
