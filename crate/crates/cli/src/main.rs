//! Command-line front end: flag parsing, dispatch, and the exit-code
//! contract (0 ok, 2 input, 3 method, 4 internal; clap itself exits 2 on
//! usage errors).

mod commands;
mod error;
mod load;
mod output;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use volcorr::ingest::ColumnSchema;
use volcorr::scaling::ScalingKind;
use volcorr::{series, tails};

use commands as cmd;
use error::CliError;
use load::ColumnSpec;
use output::{Document, Format};

/// Heavy-tail and cross-correlation analysis of daily price/volume series
#[derive(Parser)]
#[command(name = "volcorr", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Log changes of one column of a daily series
    Returns(ReturnsArgs),
    /// Lagged cross-correlation of two change series, raw and absolute
    Ccf(CcfArgs),
    /// Detrended fluctuation analysis of absolute changes
    Dfa(DfaArgs),
    /// Detrended cross-correlation analysis of two absolute change series
    Dcca(DccaArgs),
    /// Tail exponent of pooled normalized volatility, order-statistics method
    Hill(HillArgs),
    /// Mean return interval versus threshold, with the implied tail exponent
    Tauq(TauqArgs),
    /// Log-binned density of pooled volatility, with a power-law tail fit
    Pdf(PdfArgs),
    /// Simulate a coupled pair of volatility-feedback processes
    Simulate(SimulateArgs),
    /// Run every analysis over a set of inputs into an output directory
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct SchemaArgs {
    /// Date column in daily CSV inputs
    #[arg(long, default_value = "Date", value_name = "NAME")]
    date_col: String,
    /// Close column (default: "Adj Close" when present, else "Close")
    #[arg(long, value_name = "NAME")]
    close_col: Option<String>,
    /// Volume column in daily CSV inputs
    #[arg(long, default_value = "Volume", value_name = "NAME")]
    volume_col: String,
}

impl SchemaArgs {
    fn to_schema(&self) -> ColumnSchema {
        ColumnSchema {
            date: self.date_col.clone(),
            close: self.close_col.clone(),
            volume: self.volume_col.clone(),
        }
    }

    fn echo(&self) -> Value {
        let close = self
            .close_col
            .clone()
            .unwrap_or_else(|| "Adj Close|Close".to_string());
        json!({
            "date_col": self.date_col,
            "close_col": close,
            "volume_col": self.volume_col,
        })
    }
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Write output to this file instead of stdout (the write is atomic)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl OutArgs {
    fn echo(&self) -> Value {
        json!({
            "format": self.format.name(),
            "out": self.out.as_ref().map(|p| cmd::path_str(p)),
        })
    }

    fn emit(&self, doc: &Document) -> Result<(), CliError> {
        let text = doc.render(self.format)?;
        output::write_output(self.out.as_deref(), &text)
    }
}

#[derive(Args)]
struct ReturnsArgs {
    /// Input CSV file
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// "price", "volume", or a literal numeric column name
    #[arg(long, default_value = "price", value_name = "COL")]
    column: String,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CcfArgs {
    /// Input CSV file for the first series
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Input for the second series (default: same file as --input)
    #[arg(long, value_name = "FILE")]
    input_b: Option<PathBuf>,
    /// First column: "price", "volume", or a literal column name
    #[arg(long, default_value = "price", value_name = "COL")]
    column: String,
    /// Second column
    #[arg(long, default_value = "volume", value_name = "COL")]
    column_b: String,
    /// Largest lag to evaluate (default: min(200, n/10))
    #[arg(long, value_name = "N")]
    max_lag: Option<usize>,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct DfaArgs {
    /// Input CSV file
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// "price", "volume", or a literal numeric column name
    #[arg(long, default_value = "price", value_name = "COL")]
    column: String,
    /// Comma-separated window sizes (default: 20 log-spaced up to n/4)
    #[arg(long, value_name = "N1,N2,...")]
    windows: Option<String>,
    /// Window-size range LO:HI used for the exponent fit (default: all)
    #[arg(long, value_name = "LO:HI")]
    fit_range: Option<String>,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct DccaArgs {
    /// Input CSV file for the first series
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Input for the second series (default: same file as --input)
    #[arg(long, value_name = "FILE")]
    input_b: Option<PathBuf>,
    /// First column: "price", "volume", or a literal column name
    #[arg(long, default_value = "price", value_name = "COL")]
    column: String,
    /// Second column
    #[arg(long, default_value = "volume", value_name = "COL")]
    column_b: String,
    /// Comma-separated window sizes (default: 20 log-spaced up to n/4)
    #[arg(long, value_name = "N1,N2,...")]
    windows: Option<String>,
    /// Window-size range LO:HI used for the exponent fit (default: all)
    #[arg(long, value_name = "LO:HI")]
    fit_range: Option<String>,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct HillArgs {
    /// Input file or directory; repeatable, results are pooled
    #[arg(long, required = true, value_name = "PATH")]
    input: Vec<PathBuf>,
    /// "price", "volume", or a literal numeric column name
    #[arg(long, default_value = "price", value_name = "COL")]
    column: String,
    /// Fraction of the pooled sample treated as the tail
    #[arg(long, default_value_t = tails::DEFAULT_HILL_FRACTION, value_name = "F")]
    tail_frac: f64,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct TauqArgs {
    /// Input file or directory; repeatable, results are pooled
    #[arg(long, required = true, value_name = "PATH")]
    input: Vec<PathBuf>,
    /// "price", "volume", or a literal numeric column name
    #[arg(long, default_value = "price", value_name = "COL")]
    column: String,
    /// Smallest threshold, in units of sigma
    #[arg(long, default_value_t = 2.0, value_name = "Q")]
    q_min: f64,
    /// Largest threshold, in units of sigma
    #[arg(long, default_value_t = 8.0, value_name = "Q")]
    q_max: f64,
    /// Threshold spacing
    #[arg(long, default_value_t = 0.5, value_name = "DQ")]
    q_step: f64,
    /// Keep a threshold only if it pools at least this many intervals
    #[arg(long, default_value_t = tails::DEFAULT_MIN_INTERVALS, value_name = "N")]
    min_count: usize,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct PdfArgs {
    /// Input file or directory; repeatable, results are pooled
    #[arg(long, required = true, value_name = "PATH")]
    input: Vec<PathBuf>,
    /// "price", "volume", or a literal numeric column name
    #[arg(long, default_value = "price", value_name = "COL")]
    column: String,
    /// Logarithmic bin resolution
    #[arg(long, default_value_t = tails::DEFAULT_BINS_PER_DECADE, value_name = "N")]
    bins_per_decade: usize,
    /// Fit range LO:HI in units of sigma (default: 2 up to the 99.99th percentile)
    #[arg(long, value_name = "LO:HI")]
    tail_range: Option<String>,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// omega,alpha,beta,gamma_tilde,omega_tilde,alpha_tilde,beta_tilde,gamma
    #[arg(
        long,
        default_value = "0.01,0.14,0.65,0.2,0.01,0.14,0.65,0.2",
        value_name = "P1,...,P8"
    )]
    params: String,
    /// Number of observations to keep
    #[arg(long, default_value_t = 10000, value_name = "N")]
    length: usize,
    /// Random seed; equal seeds give byte-identical output
    #[arg(long, default_value_t = 42, value_name = "SEED")]
    seed: u64,
    /// Observations discarded before recording starts
    #[arg(long, default_value_t = volcorr::garchx::DEFAULT_BURN_IN, value_name = "N")]
    burn_in: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ReportArgs {
    /// Input file or directory; repeatable
    #[arg(long, required = true, value_name = "PATH")]
    input: Vec<PathBuf>,
    /// Output directory (created if missing); the manifest is written last
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Format for artifact tables
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    schema: SchemaArgs,
}

/// Merges two JSON objects; later keys win.
fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        for (k, v) in e {
            b.insert(k, v);
        }
    }
    base
}

/// Loads every input, normalizes each change series by its own sigma, and
/// pools them for the tail estimators.
fn pooled_input(
    inputs: &[PathBuf],
    column: &str,
    schema: &ColumnSchema,
) -> Result<(cmd::PooledInput, Vec<String>), CliError> {
    let files = load::expand_inputs(inputs)?;
    let spec = ColumnSpec::parse(column);
    let mut pooled = cmd::PooledInput { series: Vec::new(), per_input: Vec::new() };
    let mut paths = Vec::new();
    for f in &files {
        let lc = load::load_changes(f, &spec, schema)?;
        let vs = series::normalize_abs(&lc.values)?;
        pooled.per_input.push(json!({
            "source": lc.source,
            "input": cmd::path_str(f),
            "n": vs.values.len(),
            "sigma": vs.sigma,
        }));
        pooled.series.push(vs);
        paths.push(cmd::path_str(f));
    }
    Ok((pooled, paths))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Returns(a) => {
            let spec = ColumnSpec::parse(&a.column);
            let loaded = load::load_changes(&a.input, &spec, &a.schema.to_schema())?;
            let config = merge(
                json!({"input": cmd::path_str(&a.input), "column": a.column}),
                merge(a.schema.echo(), a.out.echo()),
            );
            let doc = cmd::build_returns_doc(&loaded, config);
            a.out.emit(&doc)
        }
        Cmd::Ccf(a) => {
            let schema = a.schema.to_schema();
            let la = load::load_changes(&a.input, &ColumnSpec::parse(&a.column), &schema)?;
            let b_path = a.input_b.clone().unwrap_or_else(|| a.input.clone());
            let lb = load::load_changes(&b_path, &ColumnSpec::parse(&a.column_b), &schema)?;
            let max_lag = a.max_lag.unwrap_or_else(|| cmd::default_max_lag(la.values.len()));
            let config = merge(
                json!({
                    "input": cmd::path_str(&a.input),
                    "input_b": cmd::path_str(&b_path),
                    "column": a.column,
                    "column_b": a.column_b,
                    "max_lag": max_lag,
                }),
                merge(a.schema.echo(), a.out.echo()),
            );
            let mut extra = vec![("series", cmd::series_meta(&la)), ("series_b", cmd::series_meta(&lb))];
            if let Some(i) = &la.ingest {
                extra.push(("ingest", i.clone()));
            }
            if let Some(i) = &lb.ingest {
                extra.push(("ingest_b", i.clone()));
            }
            let doc = cmd::build_ccf_doc(&la.values, &lb.values, max_lag, config, extra)?;
            a.out.emit(&doc)
        }
        Cmd::Dfa(a) => {
            let loaded =
                load::load_changes(&a.input, &ColumnSpec::parse(&a.column), &a.schema.to_schema())?;
            let abs: Vec<f64> = loaded.values.iter().map(|v| v.abs()).collect();
            let windows = a.windows.as_deref().map(cmd::parse_windows).transpose()?;
            let fit_range = a.fit_range.as_deref().map(cmd::parse_usize_range).transpose()?;
            let config = merge(
                json!({"input": cmd::path_str(&a.input), "column": a.column}),
                merge(a.schema.echo(), a.out.echo()),
            );
            let mut extra = vec![("series", cmd::series_meta(&loaded))];
            if let Some(i) = &loaded.ingest {
                extra.push(("ingest", i.clone()));
            }
            let (doc, _) = cmd::build_scaling_doc(
                ScalingKind::Dfa,
                &abs,
                None,
                windows,
                fit_range,
                config,
                extra,
                false,
            )?;
            a.out.emit(&doc)
        }
        Cmd::Dcca(a) => {
            let schema = a.schema.to_schema();
            let la = load::load_changes(&a.input, &ColumnSpec::parse(&a.column), &schema)?;
            let b_path = a.input_b.clone().unwrap_or_else(|| a.input.clone());
            let lb = load::load_changes(&b_path, &ColumnSpec::parse(&a.column_b), &schema)?;
            let abs_a: Vec<f64> = la.values.iter().map(|v| v.abs()).collect();
            let abs_b: Vec<f64> = lb.values.iter().map(|v| v.abs()).collect();
            let windows = a.windows.as_deref().map(cmd::parse_windows).transpose()?;
            let fit_range = a.fit_range.as_deref().map(cmd::parse_usize_range).transpose()?;
            let config = merge(
                json!({
                    "input": cmd::path_str(&a.input),
                    "input_b": cmd::path_str(&b_path),
                    "column": a.column,
                    "column_b": a.column_b,
                }),
                merge(a.schema.echo(), a.out.echo()),
            );
            let mut extra = vec![("series", cmd::series_meta(&la)), ("series_b", cmd::series_meta(&lb))];
            if let Some(i) = &la.ingest {
                extra.push(("ingest", i.clone()));
            }
            if let Some(i) = &lb.ingest {
                extra.push(("ingest_b", i.clone()));
            }
            let (doc, _) = cmd::build_scaling_doc(
                ScalingKind::Dcca,
                &abs_a,
                Some(&abs_b),
                windows,
                fit_range,
                config,
                extra,
                false,
            )?;
            a.out.emit(&doc)
        }
        Cmd::Hill(a) => {
            let (pooled, paths) = pooled_input(&a.input, &a.column, &a.schema.to_schema())?;
            let config = merge(
                json!({"inputs": paths, "column": a.column, "tail_frac": a.tail_frac}),
                merge(a.schema.echo(), a.out.echo()),
            );
            let doc = cmd::build_hill_doc(&pooled, a.tail_frac, config)?;
            a.out.emit(&doc)
        }
        Cmd::Tauq(a) => {
            let (pooled, paths) = pooled_input(&a.input, &a.column, &a.schema.to_schema())?;
            let grid = tails::q_grid(a.q_min, a.q_max, a.q_step);
            if grid.is_empty() {
                return Err(CliError::input(
                    "BadValue",
                    format!(
                        "empty threshold grid from q_min={} q_max={} q_step={}",
                        a.q_min, a.q_max, a.q_step
                    ),
                ));
            }
            let config = merge(
                json!({
                    "inputs": paths,
                    "column": a.column,
                    "q_min": a.q_min,
                    "q_max": a.q_max,
                    "q_step": a.q_step,
                    "min_count": a.min_count,
                }),
                merge(a.schema.echo(), a.out.echo()),
            );
            let doc = cmd::build_tauq_doc(&pooled, &grid, a.min_count, (a.q_min, a.q_max), config)?;
            a.out.emit(&doc)
        }
        Cmd::Pdf(a) => {
            let (pooled, paths) = pooled_input(&a.input, &a.column, &a.schema.to_schema())?;
            let range = a.tail_range.as_deref().map(cmd::parse_f64_range).transpose()?;
            let config = merge(
                json!({
                    "inputs": paths,
                    "column": a.column,
                    "bins_per_decade": a.bins_per_decade,
                }),
                merge(a.schema.echo(), a.out.echo()),
            );
            let doc = cmd::build_pdf_doc(&pooled, a.bins_per_decade, range, config)?;
            a.out.emit(&doc)
        }
        Cmd::Simulate(a) => {
            let params = cmd::parse_params(&a.params)?;
            let config = merge(
                json!({
                    "params": serde_json::to_value(params).unwrap_or(Value::Null),
                    "length": a.length,
                    "seed": a.seed,
                    "burn_in": a.burn_in,
                }),
                a.out.echo(),
            );
            let doc = cmd::build_simulate_doc(&params, a.length, a.seed, a.burn_in, config)?;
            a.out.emit(&doc)
        }
        Cmd::Report(a) => {
            let config = merge(
                json!({
                    "inputs": a.input.iter().map(|p| cmd::path_str(p)).collect::<Vec<_>>(),
                    "out": cmd::path_str(&a.out),
                    "format": a.format.name(),
                }),
                a.schema.echo(),
            );
            report::run(report::ReportConfig {
                inputs: a.input,
                out_dir: a.out,
                format: a.format,
                schema: a.schema.to_schema(),
                config_echo: config,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.category.exit_code() as u8)
        }
    }
}
