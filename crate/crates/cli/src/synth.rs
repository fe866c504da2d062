use std::path::PathBuf;

use clap::{Args, ValueEnum};
use irrev::synth::{NarTimeMode, ProcessKind, ProcessSpec};
use irrev::Error;
use serde::Serialize;

use crate::manifest::RunManifest;
use crate::output::{csv_writer, finish_csv, prepare_dir, write_json};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Process {
    RandomWalk,
    Ar2,
    Nar2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimeMode {
    Integer,
    Scaled,
}

impl From<TimeMode> for NarTimeMode {
    fn from(m: TimeMode) -> Self {
        match m {
            TimeMode::Integer => NarTimeMode::Integer,
            TimeMode::Scaled => NarTimeMode::Scaled,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub process: Process,
    /// Up-step probability (random walk only).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = TimeMode::Integer)]
    pub nar_time_mode: TimeMode,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Serialize)]
struct SynthManifest<'a> {
    manifest_sha256: &'a str,
    manifest: &'a RunManifest,
    process: &'a ProcessSpec,
}

pub fn run(args: &SynthArgs) -> Result<(), CliError> {
    let kind = match args.process {
        Process::RandomWalk => {
            let p = args.p.ok_or_else(|| {
                Error::InvalidInput("--p is required for --process random-walk".into())
            })?;
            ProcessKind::RandomWalk { p }
        }
        Process::Ar2 => ProcessKind::Ar2,
        Process::Nar2 => ProcessKind::Nar2 {
            time_mode: args.nar_time_mode.into(),
        },
    };
    let spec = ProcessSpec {
        kind,
        length: args.n,
        seed: args.seed,
    };
    let values = spec.generate()?;

    let mut manifest = RunManifest::new("synth", args.seed);
    manifest.arg("process", spec.kind).arg("n", spec.length);
    let digest = manifest.digest();

    prepare_dir(&args.out_dir)?;
    let (mut w, path) = csv_writer(&args.out_dir, "series.csv")?;
    w.write_record(["t", "value", "manifest_sha256"])?;
    for (t, v) in values.iter().enumerate() {
        w.write_record([t.to_string(), v.to_string(), digest.clone()])?;
    }
    finish_csv(w, &path)?;
    write_json(
        &args.out_dir,
        "manifest.json",
        &SynthManifest {
            manifest_sha256: &digest,
            manifest: &manifest,
            process: &spec,
        },
    )
}
