//! `irrev`: minute-data irreversibility and inefficiency analysis.

mod analyze;
mod manifest;
mod output;
mod synth;
mod validate;

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "irrev",
    version,
    about = "Time-irreversibility and market-inefficiency indices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sliding-window indices with surrogate significance over an OHLCV or return file.
    Analyze(analyze::AnalyzeArgs),
    /// Generate a synthetic benchmark series.
    Synth(synth::SynthArgs),
    /// Run the synthetic oracle suite and print a pass/fail table.
    Validate(validate::ValidateArgs),
}

/// Machine-readable error record written to stderr as one JSON line.
#[derive(Debug, Serialize)]
pub struct CliError {
    kind: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    failures: Vec<String>,
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            kind: "io",
            message: format!("{}: {e}", path.display()),
            path: Some(path.display().to_string()),
            failures: Vec::new(),
        }
    }

    pub fn validation(failures: Vec<String>) -> Self {
        Self {
            kind: "validation_failed",
            message: format!("{} check(s) failed", failures.len()),
            path: None,
            failures,
        }
    }

    pub fn with_path(mut self, path: &Path) -> Self {
        self.path.get_or_insert_with(|| path.display().to_string());
        self
    }
}

impl From<irrev::Error> for CliError {
    fn from(e: irrev::Error) -> Self {
        let path = match &e {
            irrev::Error::Io { path, .. } => Some(path.clone()),
            _ => None,
        };
        Self {
            kind: e.kind(),
            message: e.to_string(),
            path,
            failures: Vec::new(),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        irrev::Error::from(e).into()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => analyze::run(a),
        Command::Synth(a) => synth::run(a),
        Command::Validate(a) => validate::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": e }));
            ExitCode::FAILURE
        }
    }
}
