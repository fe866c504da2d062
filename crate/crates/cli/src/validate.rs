use std::path::PathBuf;

use clap::{Args, ValueEnum};
use irrev::divergence::{rw_kl_up_down, trend_irreversibility, DEFAULT_SMOOTHING};
use irrev::rng::derive_seed;
use irrev::surrogate::{significance_test, Statistic};
use irrev::synth::{gen_ar2, gen_nar2, gen_random_walk, NarTimeMode};

use crate::manifest::RunManifest;
use crate::output::{csv_writer, finish_csv, prepare_dir};
use crate::CliError;

const N_GRID: [usize; 4] = [1_000, 10_000, 100_000, 1_000_000];
const WALK_PS: [f64; 4] = [0.5, 0.6, 0.7, 0.9];
const WALK_N: usize = 100_000;
/// Smallest sample size at which the NAR process must test significant.
const NAR_MIN_N: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    RandomWalk,
    Ar,
    Nar,
    All,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Repetitions per sample size in the AR sweep.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    /// Largest sample size in the AR and NAR sweeps.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_n: usize,
    #[arg(long, default_value_t = 100)]
    pub surrogates: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Directory for validation.csv; the table is always printed.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

struct Check {
    suite: &'static str,
    name: String,
    observed: String,
    expected: String,
    /// `None` for informational rows.
    pass: Option<bool>,
}

fn trend_test(
    x: &[f64],
    args: &ValidateArgs,
    seed: u64,
) -> Result<irrev::surrogate::SurrogateEnsembleResult, CliError> {
    Ok(significance_test(
        x,
        Statistic::TrendIrreversibility {
            smoothing: DEFAULT_SMOOTHING,
        },
        args.surrogates,
        args.alpha,
        seed,
    )?)
}

fn walk_suite(args: &ValidateArgs, out: &mut Vec<Check>) -> Result<(), CliError> {
    for (i, p) in WALK_PS.into_iter().enumerate() {
        let seed = derive_seed(args.seed, i as u64);
        let walk: Vec<f64> = gen_random_walk(p, WALK_N, seed)?
            .into_iter()
            .map(|x| x as f64)
            .collect();
        let est = trend_irreversibility(&walk, DEFAULT_SMOOTHING)?.i_t;
        let exact = rw_kl_up_down(p)?;
        let tol = (0.05 * exact).max(0.01);
        out.push(Check {
            suite: "random-walk",
            name: format!("p={p} N={WALK_N}"),
            observed: format!("{est:.6}"),
            expected: format!("{exact:.6} +/- {tol:.4}"),
            pass: Some((est - exact).abs() <= tol),
        });
    }
    Ok(())
}

fn grid(args: &ValidateArgs) -> impl Iterator<Item = usize> + '_ {
    N_GRID.into_iter().filter(|&n| n <= args.max_n)
}

fn ar_suite(args: &ValidateArgs, out: &mut Vec<Check>) -> Result<(), CliError> {
    for n in grid(args) {
        let mut hits = 0;
        for rep in 0..args.reps {
            let seed = derive_seed(derive_seed(args.seed, 100 + n as u64), rep as u64);
            let x = gen_ar2(n, seed)?;
            hits += usize::from(trend_test(&x, args, derive_seed(seed, 1))?.significant());
        }
        out.push(Check {
            suite: "ar",
            name: format!("N={n} reps={}", args.reps),
            observed: format!("{hits} significant"),
            expected: "0 significant".into(),
            pass: Some(hits == 0),
        });
    }
    Ok(())
}

fn nar_suite(args: &ValidateArgs, out: &mut Vec<Check>) -> Result<(), CliError> {
    let mut good_modes = Vec::new();
    for (label, mode) in [
        ("integer", NarTimeMode::Integer),
        ("scaled", NarTimeMode::Scaled),
    ] {
        let mut all_sig = true;
        for n in grid(args) {
            let seed = derive_seed(derive_seed(args.seed, 200 + n as u64), mode as u64);
            let u = gen_nar2(n, seed, mode)?;
            let r = trend_test(&u, args, derive_seed(seed, 1))?;
            if n >= NAR_MIN_N {
                all_sig &= r.significant();
            }
            out.push(Check {
                suite: "nar",
                name: format!("mode={label} N={n}"),
                observed: format!("I_T={:.6} threshold={:.6}", r.observed, r.threshold),
                expected: if n >= NAR_MIN_N {
                    "significant".into()
                } else {
                    "unconstrained".into()
                },
                pass: None,
            });
        }
        if all_sig {
            good_modes.push(label);
        }
    }
    out.push(Check {
        suite: "nar",
        name: format!("significant at all N>={NAR_MIN_N}"),
        observed: if good_modes.is_empty() {
            "no mode".into()
        } else {
            good_modes.join(",")
        },
        expected: "at least one time mode".into(),
        pass: Some(!good_modes.is_empty()),
    });
    Ok(())
}

fn verdict(pass: Option<bool>) -> &'static str {
    match pass {
        Some(true) => "pass",
        Some(false) => "FAIL",
        None => "info",
    }
}

pub fn run(args: &ValidateArgs) -> Result<(), CliError> {
    let mut checks = Vec::new();
    if matches!(args.suite, Suite::RandomWalk | Suite::All) {
        walk_suite(args, &mut checks)?;
    }
    if matches!(args.suite, Suite::Ar | Suite::All) {
        ar_suite(args, &mut checks)?;
    }
    if matches!(args.suite, Suite::Nar | Suite::All) {
        nar_suite(args, &mut checks)?;
    }

    for c in &checks {
        println!(
            "{:<12} {:<30} {:<4}  observed {}  expected {}",
            c.suite,
            c.name,
            verdict(c.pass),
            c.observed,
            c.expected
        );
    }

    if let Some(dir) = &args.out_dir {
        let suite = args.suite.to_possible_value().expect("suite has a name");
        let mut manifest = RunManifest::new("validate", args.seed);
        manifest
            .arg("suite", suite.get_name())
            .arg("reps", args.reps)
            .arg("max_n", args.max_n)
            .arg("surrogates", args.surrogates)
            .arg("alpha", args.alpha);
        let digest = manifest.digest();
        prepare_dir(dir)?;
        let (mut w, path) = csv_writer(dir, "validation.csv")?;
        w.write_record([
            "suite",
            "check",
            "observed",
            "expected",
            "result",
            "manifest_sha256",
        ])?;
        for c in &checks {
            w.write_record([
                c.suite,
                &c.name,
                &c.observed,
                &c.expected,
                verdict(c.pass),
                &digest,
            ])?;
        }
        finish_csv(w, &path)?;
    }

    let failed: Vec<String> = checks
        .iter()
        .filter(|c| c.pass == Some(false))
        .map(|c| format!("{} {}", c.suite, c.name))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::validation(failed))
    }
}
