use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use irrev::divergence::DEFAULT_SMOOTHING;
use irrev::ingest::{ingest, parse_csv_path, IngestReport, Period};
use irrev::series::{LogReturnSeries, MINUTE};
use irrev::window::{index_correlation, run_windows, WindowConfig, WindowResult};
use irrev::Error;
use serde::Serialize;

use crate::manifest::RunManifest;
use crate::output::{csv_writer, finish_csv, opt, prepare_dir, write_json};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    /// CryptoDataDownload-style OHLCV minute candles.
    Ohlcv,
    /// One minute log return per row, in a `value` column.
    Returns,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Ohlcv)]
    pub input_format: InputFormat,
    #[arg(long, default_value_t = irrev::window::DEFAULT_WINDOW_MINUTES)]
    pub window_minutes: usize,
    #[arg(long, default_value_t = irrev::window::DEFAULT_STEP_MINUTES)]
    pub step_minutes: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 100)]
    pub surrogates: usize,
    #[arg(long, default_value_t = irrev::efficiency::DEFAULT_BLOCK_LENGTH)]
    pub block_l: usize,
    #[arg(long, default_value_t = DEFAULT_SMOOTHING)]
    pub smoothing: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct Counts {
    windows: usize,
    i_t_defined: usize,
    i_star_defined: usize,
    i_t_significant: usize,
    i_star_significant: usize,
}

#[derive(Serialize)]
struct Summary<'a> {
    manifest_sha256: &'a str,
    manifest: &'a RunManifest,
    config: &'a WindowConfig,
    ingest: &'a IngestReport,
    counts: Counts,
    pearson_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pearson_note: Option<String>,
}

/// Reads a single-column return series: the `value` column if present,
/// otherwise the first one.
fn read_returns(path: &Path) -> Result<(LogReturnSeries, IngestReport), CliError> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| CliError::from(Error::from(e)).with_path(path))?;
    let col = reader
        .headers()?
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case("value"))
        .unwrap_or(0);
    let mut values = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let field = row.get(col).unwrap_or("").trim();
        let v: f64 = field.parse().map_err(|_| {
            CliError::from(Error::InvalidInput(format!(
                "line {}: {field:?} is not a number",
                i + 2
            )))
            .with_path(path)
        })?;
        values.push(v);
    }
    let n = values.len();
    let series = LogReturnSeries::observed(values, 0, MINUTE)
        .map_err(|e| CliError::from(e).with_path(path))?;
    let report = IngestReport {
        rows_read: n,
        gaps_found: 0,
        imputed_fraction: 0.0,
        period: Period {
            start: 0,
            end: n.saturating_sub(1) as i64 * MINUTE,
        },
        duplicates: 0,
        malformed_rows: 0,
    };
    Ok((series, report))
}

pub fn run(args: &AnalyzeArgs) -> Result<(), CliError> {
    let cfg = WindowConfig {
        window_minutes: args.window_minutes,
        step_minutes: args.step_minutes,
        alpha: args.alpha,
        n_surrogates: args.surrogates,
        l: args.block_l,
        smoothing: args.smoothing,
        seed: args.seed,
    };
    cfg.validate()?;

    let (returns, report) = match args.input_format {
        InputFormat::Ohlcv => {
            let parsed = parse_csv_path(&args.input)?;
            ingest(&parsed, args.seed).map_err(|e| CliError::from(e).with_path(&args.input))?
        }
        InputFormat::Returns => read_returns(&args.input)?,
    };
    let results =
        run_windows(&returns, &cfg).map_err(|e| CliError::from(e).with_path(&args.input))?;

    let mut manifest = RunManifest::new("analyze", args.seed);
    manifest
        .arg("input_format", args.input_format)
        .arg("window_minutes", cfg.window_minutes)
        .arg("step_minutes", cfg.step_minutes)
        .arg("alpha", cfg.alpha)
        .arg("surrogates", cfg.n_surrogates)
        .arg("block_l", cfg.l)
        .arg("smoothing", cfg.smoothing);
    manifest.add_input(&args.input)?;
    manifest.data_period = Some((report.period.start, report.period.end));
    let digest = manifest.digest();

    prepare_dir(&args.out_dir)?;
    write_windows(&args.out_dir, &results, &digest)?;

    let (pearson_r, pearson_note) = match index_correlation(&results) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let summary = Summary {
        manifest_sha256: &digest,
        manifest: &manifest,
        config: &cfg,
        ingest: &report,
        counts: Counts {
            windows: results.len(),
            i_t_defined: results.iter().filter(|w| w.i_t.is_some()).count(),
            i_star_defined: results.iter().filter(|w| w.i_star.is_some()).count(),
            i_t_significant: results.iter().filter(|w| w.i_t_significant).count(),
            i_star_significant: results.iter().filter(|w| w.i_star_significant).count(),
        },
        pearson_r,
        pearson_note,
    };
    write_json(&args.out_dir, "summary.json", &summary)
}

fn write_windows(dir: &Path, results: &[WindowResult], digest: &str) -> Result<(), CliError> {
    let (mut w, path) = csv_writer(dir, "windows.csv")?;
    w.write_record([
        "window_start_unix",
        "i_t",
        "i_t_threshold95",
        "i_t_significant",
        "i_star",
        "i_star_threshold95",
        "i_star_significant",
        "manifest_sha256",
    ])?;
    for r in results {
        w.write_record([
            r.window_start.to_string(),
            opt(r.i_t),
            opt(r.i_t_threshold),
            r.i_t_significant.to_string(),
            opt(r.i_star),
            opt(r.i_star_threshold),
            r.i_star_significant.to_string(),
            digest.to_string(),
        ])?;
    }
    finish_csv(w, &path)
}
