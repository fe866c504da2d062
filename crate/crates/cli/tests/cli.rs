use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use irrev::synth::gen_random_walk;
use serde_json::Value;

fn irrev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irrev"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn error_record(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("error line on stderr");
    serde_json::from_str(line).expect("error record is JSON")
}

fn series_values(dir: &Path) -> Vec<f64> {
    let mut r = csv::Reader::from_path(dir.join("series.csv")).unwrap();
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        vec!["t", "value", "manifest_sha256"]
    );
    r.records()
        .map(|rec| rec.unwrap()[1].parse().unwrap())
        .collect()
}

/// Minute candles whose open prices follow a ±0.1 % log random walk.
fn write_ohlcv(path: &Path, returns: usize) {
    let steps = gen_random_walk(0.5, returns + 1, 3).unwrap();
    let mut s = String::from("https://www.CryptoDataDownload.com\nunix,date,symbol,open,high,low,close,Volume BTC,Volume USD\n");
    for (i, x) in steps.iter().enumerate().rev() {
        let open = 100.0 * (0.001 * *x as f64).exp();
        s.push_str(&format!(
            "{},d,BTC/USD,{open},{},{},{open},1,{open}\n",
            1_600_000_000 + 60 * i as i64,
            open * 1.001,
            open * 0.999
        ));
    }
    fs::write(path, s).unwrap();
}

fn analyze(input: &Path, out: &Path) -> Output {
    irrev(&[
        "analyze",
        "--input",
        path_str(input),
        "--out-dir",
        path_str(out),
        "--window-minutes",
        "1000",
        "--step-minutes",
        "1000",
        "--surrogates",
        "30",
        "--seed",
        "5",
    ])
}

#[test]
fn analyze_two_windows() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("btc.csv");
    write_ohlcv(&input, 2_000);
    let out = tmp.path().join("out");
    let res = analyze(&input, &out);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );

    let mut r = csv::Reader::from_path(out.join("windows.csv")).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "window_start_unix",
            "i_t",
            "i_t_threshold95",
            "i_t_significant",
            "i_star",
            "i_star_threshold95",
            "i_star_significant",
            "manifest_sha256"
        ]
    );
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][0], "1600000060");
    assert_eq!(&rows[1][0], "1600060060");

    let summary: Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["counts"]["windows"], 2);
    assert_eq!(summary["ingest"]["rows_read"], 2_001);
    assert_eq!(summary["ingest"]["gaps_found"], 0);
    assert!(summary.get("pearson_r").is_some());
    let digest = summary["manifest_sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(rows.iter().all(|row| &row[7] == digest));
    assert_eq!(summary["manifest"]["seed"], 5);
    assert_eq!(
        summary["manifest"]["inputs"][0]["sha256"]
            .as_str()
            .unwrap()
            .len(),
        64
    );
}

#[test]
fn analyze_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("btc.csv");
    write_ohlcv(&input, 2_000);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(analyze(&input, &a).status.success());
    assert!(analyze(&input, &b).status.success());
    for name in ["windows.csv", "summary.json"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn missing_input_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("absent.csv");
    let res = analyze(&missing, &tmp.path().join("out"));
    assert!(!res.status.success());
    let err = error_record(&res);
    assert_eq!(err["error"]["kind"], "io");
    assert_eq!(err["error"]["path"], path_str(&missing));
}

#[test]
fn too_short_input_is_insufficient_data() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("btc.csv");
    write_ohlcv(&input, 500);
    let res = analyze(&input, &tmp.path().join("out"));
    assert!(!res.status.success());
    assert_eq!(error_record(&res)["error"]["kind"], "insufficient_data");
}

#[test]
fn synth_random_walk_steps_by_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("rw");
    let res = irrev(&[
        "synth",
        "--process",
        "random-walk",
        "--p",
        "0.6",
        "--n",
        "1000",
        "--seed",
        "1",
        "--out-dir",
        path_str(&out),
    ]);
    assert!(res.status.success());
    let v = series_values(&out);
    assert_eq!(v.len(), 1000);
    assert!(v.windows(2).all(|w| (w[1] - w[0]).abs() == 1.0));
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["process"]["length"], 1000);
}

#[test]
fn synth_ar2_and_nar2_values() {
    let tmp = tempfile::tempdir().unwrap();
    let ar = tmp.path().join("ar");
    assert!(irrev(&[
        "synth",
        "--process",
        "ar2",
        "--n",
        "100000",
        "--out-dir",
        path_str(&ar)
    ])
    .status
    .success());
    let v = series_values(&ar);
    assert_eq!(v.len(), 100_000);
    assert!(v.iter().all(|x| x.is_finite()));

    for mode in ["integer", "scaled"] {
        let nar = tmp.path().join(format!("nar-{mode}"));
        let res = irrev(&[
            "synth",
            "--process",
            "nar2",
            "--n",
            "100000",
            "--nar-time-mode",
            mode,
            "--out-dir",
            path_str(&nar),
        ]);
        assert!(res.status.success());
        let v = series_values(&nar);
        assert_eq!(v.len(), 100_000);
        assert!(v.iter().all(|&x| x >= 0.0 && x.is_finite()));
    }
}

#[test]
fn synth_is_reproducible_and_seeded() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |dir: &str, seed: &str| {
        let out = tmp.path().join(dir);
        assert!(irrev(&[
            "synth",
            "--process",
            "ar2",
            "--n",
            "500",
            "--seed",
            seed,
            "--out-dir",
            path_str(&out)
        ])
        .status
        .success());
        fs::read(out.join("series.csv")).unwrap()
    };
    assert_eq!(run("a", "4"), run("b", "4"));
    assert_ne!(run("a", "4"), run("c", "5"));
}

#[test]
fn synth_random_walk_needs_p() {
    let tmp = tempfile::tempdir().unwrap();
    let res = irrev(&[
        "synth",
        "--process",
        "random-walk",
        "--n",
        "10",
        "--out-dir",
        path_str(tmp.path()),
    ]);
    assert!(!res.status.success());
    assert_eq!(error_record(&res)["error"]["kind"], "invalid_input");
}

#[test]
fn synth_output_feeds_analyze() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("s");
    assert!(irrev(&[
        "synth",
        "--process",
        "ar2",
        "--n",
        "3000",
        "--out-dir",
        path_str(&s)
    ])
    .status
    .success());
    let out = tmp.path().join("out");
    let res = irrev(&[
        "analyze",
        "--input",
        path_str(&s.join("series.csv")),
        "--input-format",
        "returns",
        "--window-minutes",
        "1500",
        "--step-minutes",
        "1500",
        "--surrogates",
        "20",
        "--out-dir",
        path_str(&out),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let rows = csv::Reader::from_path(out.join("windows.csv"))
        .unwrap()
        .records()
        .count();
    assert_eq!(rows, 2);
}

#[test]
fn validate_nar_passes_on_small_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let res = irrev(&[
        "validate",
        "--suite",
        "nar",
        "--max-n",
        "10000",
        "--surrogates",
        "40",
        "--out-dir",
        path_str(tmp.path()),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stdout)
    );
    let table = fs::read_to_string(tmp.path().join("validation.csv")).unwrap();
    assert!(table.starts_with("suite,check,observed,expected,result,manifest_sha256"));
    assert_eq!(table.lines().count(), 1 + 4 + 1);
}

#[test]
fn validate_failures_exit_nonzero_and_are_listed() {
    let res = irrev(&["validate", "--suite", "random-walk"]);
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert_eq!(stdout.lines().count(), 4);
    // large-p walks miss the closed form (heavy unobserved tail)
    assert!(!res.status.success());
    let err = error_record(&res);
    assert_eq!(err["error"]["kind"], "validation_failed");
    let failures: Vec<&str> = err["error"]["failures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f.as_str().unwrap())
        .collect();
    assert!(
        failures.contains(&"random-walk p=0.9 N=100000"),
        "{failures:?}"
    );
    assert!(
        !failures.contains(&"random-walk p=0.6 N=100000"),
        "{failures:?}"
    );
}
