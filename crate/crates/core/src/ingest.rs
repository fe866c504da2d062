//! Exchange OHLCV CSV ingestion and minute-grid log returns.
//!
//! Input files carry the columns unix time, date, symbol, open, high, low,
//! close, base volume and quote volume, possibly preceded by a one-line
//! banner. Records are sorted by time, duplicate minutes keep their first
//! occurrence, and open-price log returns are laid on a one-per-minute grid
//! in which missing minutes are filled with normal draws matching the
//! observed returns' mean and standard deviation.

use std::io::Read;
use std::path::Path;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::series::{LogReturnSeries, MINUTE};

/// Unix times above this are taken to be milliseconds.
const MILLISECOND_CUTOFF: i64 = 100_000_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OhlcvRecord {
    pub unix_time: i64,
    pub date: String,
    pub symbol: String,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume_crypto: f64,
    pub volume_quote: f64,
}

impl OhlcvRecord {
    fn validate(&self) -> std::result::Result<(), String> {
        for (name, v) in [
            ("open", self.open),
            ("high", self.high),
            ("low", self.low),
            ("close", self.close),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} price {v} is not positive"));
            }
        }
        if self.low > self.high {
            return Err(format!("low {} above high {}", self.low, self.high));
        }
        for (name, v) in [
            ("volume", self.volume_crypto),
            ("quote volume", self.volume_quote),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(format!("{name} {v} is negative"));
            }
        }
        Ok(())
    }
}

/// A data row that could not be parsed; `line` is 1-based in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedCsv {
    /// Ascending by `unix_time`, one record per timestamp.
    pub records: Vec<OhlcvRecord>,
    pub row_errors: Vec<RowError>,
    pub duplicates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Period {
    pub start: i64,
    pub end: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    /// Distinct records used.
    pub rows_read: usize,
    /// Missing minutes inside the covered period.
    pub gaps_found: usize,
    /// `gaps_found / (rows_read + gaps_found)`.
    pub imputed_fraction: f64,
    pub period: Period,
    pub duplicates: usize,
    pub malformed_rows: usize,
}

#[derive(Debug, Clone, Copy)]
struct ColumnMap {
    unix: usize,
    date: usize,
    symbol: usize,
    open: usize,
    high: usize,
    low: usize,
    close: usize,
    volume_crypto: usize,
    volume_quote: usize,
}

impl ColumnMap {
    const POSITIONAL: ColumnMap = ColumnMap {
        unix: 0,
        date: 1,
        symbol: 2,
        open: 3,
        high: 4,
        low: 5,
        close: 6,
        volume_crypto: 7,
        volume_quote: 8,
    };

    /// Case-insensitive name lookup; any column not found keeps its position.
    fn from_header(header: &csv::StringRecord) -> Self {
        let names: Vec<String> = header
            .iter()
            .map(|h| h.trim().to_ascii_lowercase())
            .collect();
        let find = |pred: &dyn Fn(&str) -> bool| names.iter().position(|n| pred(n));
        let exact = |key: &'static str| move |n: &str| n == key;
        let mut map = Self::POSITIONAL;
        if let Some(i) = find(&|n| n.starts_with("unix") || n == "timestamp") {
            map.unix = i;
        }
        if let Some(i) = find(&exact("date")) {
            map.date = i;
        }
        if let Some(i) = find(&exact("symbol")) {
            map.symbol = i;
        }
        if let Some(i) = find(&exact("open")) {
            map.open = i;
        }
        if let Some(i) = find(&exact("high")) {
            map.high = i;
        }
        if let Some(i) = find(&exact("low")) {
            map.low = i;
        }
        if let Some(i) = find(&exact("close")) {
            map.close = i;
        }
        let volumes: Vec<usize> = names
            .iter()
            .enumerate()
            .filter(|(_, n)| n.starts_with("volume") || n.starts_with("vol_"))
            .map(|(i, _)| i)
            .collect();
        if let Some(&i) = volumes.first() {
            map.volume_crypto = i;
        }
        if let Some(&i) = volumes.get(1) {
            map.volume_quote = i;
        }
        map
    }

    fn max_index(&self) -> usize {
        [
            self.unix,
            self.date,
            self.symbol,
            self.open,
            self.high,
            self.low,
            self.close,
            self.volume_crypto,
            self.volume_quote,
        ]
        .into_iter()
        .max()
        .unwrap_or(0)
    }

    fn parse(&self, row: &csv::StringRecord) -> std::result::Result<OhlcvRecord, String> {
        if row.len() <= self.max_index() {
            return Err(format!(
                "expected at least {} fields, got {}",
                self.max_index() + 1,
                row.len()
            ));
        }
        let field = |i: usize| row.get(i).unwrap_or("").trim();
        let num = |i: usize, name: &str| -> std::result::Result<f64, String> {
            field(i)
                .parse::<f64>()
                .map_err(|_| format!("{name}: cannot parse {:?}", field(i)))
        };
        let raw_time = field(self.unix);
        let unix_time = raw_time
            .parse::<i64>()
            .or_else(|_| raw_time.parse::<f64>().map(|f| f as i64))
            .map_err(|_| format!("unix time: cannot parse {raw_time:?}"))?;
        let unix_time = if unix_time > MILLISECOND_CUTOFF {
            unix_time / 1000
        } else {
            unix_time
        };
        let rec = OhlcvRecord {
            unix_time,
            date: field(self.date).to_string(),
            symbol: field(self.symbol).to_string(),
            open: num(self.open, "open")?,
            high: num(self.high, "high")?,
            low: num(self.low, "low")?,
            close: num(self.close, "close")?,
            volume_crypto: num(self.volume_crypto, "volume")?,
            volume_quote: num(self.volume_quote, "quote volume")?,
        };
        rec.validate()?;
        Ok(rec)
    }
}

/// Parses an OHLCV CSV stream.
///
/// A first line with fewer comma-separated fields than the second is a
/// banner and is skipped. Malformed rows are collected with their line
/// numbers; more than half malformed is a hard error.
pub fn parse_csv<R: Read>(mut input: R) -> Result<ParsedCsv> {
    let mut text = String::new();
    input.read_to_string(&mut text).map_err(|e| Error::Io {
        path: "<input>".into(),
        source: e,
    })?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(&text);

    let mut lines = text.lines();
    let first = lines.next().unwrap_or("");
    let second = lines.next().unwrap_or("");
    let fields = |l: &str| l.split(',').count();
    let skip_banner = !second.trim().is_empty() && fields(first) < fields(second);
    let (body, line_offset) = if skip_banner {
        (&text[text.find('\n').map_or(text.len(), |i| i + 1)..], 1)
    } else {
        (text, 0)
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let columns = ColumnMap::from_header(reader.headers()?);

    let mut records = Vec::new();
    let mut row_errors = Vec::new();
    let mut total = 0usize;
    for (i, row) in reader.records().enumerate() {
        // header is line 1 of `body`
        let line = i as u64 + 2 + line_offset;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                total += 1;
                row_errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        if row.iter().all(|f| f.is_empty()) {
            continue;
        }
        total += 1;
        match columns.parse(&row) {
            Ok(rec) => records.push(rec),
            Err(message) => row_errors.push(RowError { line, message }),
        }
    }
    if row_errors.len() * 2 > total {
        return Err(Error::MalformedInput {
            malformed: row_errors.len(),
            total,
        });
    }

    // Stable sort keeps file order among equal timestamps, so dedup keeps the first.
    records.sort_by_key(|r| r.unix_time);
    let before = records.len();
    records.dedup_by_key(|r| r.unix_time);
    Ok(ParsedCsv {
        duplicates: before - records.len(),
        records,
        row_errors,
    })
}

pub fn parse_csv_path(path: impl AsRef<Path>) -> Result<ParsedCsv> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_csv(std::io::BufReader::new(file))
}

/// Open-price log returns on the minute grid, with imputed missing minutes.
///
/// `records` must be sorted with distinct timestamps (as produced by
/// [`parse_csv`]). Between records `k` minutes apart the `k − 1` missing
/// minutes are filled with `Normal(m, s)` draws, `m` and `s` being the
/// mean and sample standard deviation of the observed returns; the observed
/// return spanning the gap sits at the later record's minute.
pub fn build_log_returns_with_imputation(
    records: &[OhlcvRecord],
    seed: u64,
) -> Result<(LogReturnSeries, IngestReport)> {
    if records.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 records, got {}",
            records.len()
        )));
    }
    let mut steps = Vec::with_capacity(records.len() - 1);
    for w in records.windows(2) {
        let delta = w[1].unix_time - w[0].unix_time;
        if delta <= 0 || delta % MINUTE != 0 {
            return Err(Error::InvalidInput(format!(
                "records at {} and {} are not on an ascending minute grid",
                w[0].unix_time, w[1].unix_time
            )));
        }
        if !(w[0].open > 0.0 && w[1].open > 0.0) {
            return Err(Error::InvalidInput(format!(
                "non-positive open price near {}",
                w[1].unix_time
            )));
        }
        steps.push(((delta / MINUTE) as usize, (w[1].open / w[0].open).ln()));
    }

    let observed: Vec<f64> = steps.iter().map(|&(_, r)| r).collect();
    let n_obs = observed.len() as f64;
    let mean = observed.iter().sum::<f64>() / n_obs;
    let sd = if observed.len() > 1 {
        (observed.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n_obs - 1.0)).sqrt()
    } else {
        0.0
    };
    let normal = Normal::new(mean, sd).ok().filter(|_| sd > 0.0);
    let mut rng = rng_from_seed(seed);

    let len: usize = steps.iter().map(|&(k, _)| k).sum();
    let mut values = Vec::with_capacity(len);
    let mut mask = Vec::with_capacity(len);
    for &(k, r) in &steps {
        for _ in 1..k {
            values.push(match &normal {
                Some(dist) => dist.sample(&mut rng),
                None => mean,
            });
            mask.push(true);
        }
        values.push(r);
        mask.push(false);
    }

    let gaps = len - steps.len();
    let rows = records.len();
    let report = IngestReport {
        rows_read: rows,
        gaps_found: gaps,
        imputed_fraction: gaps as f64 / (rows + gaps) as f64,
        period: Period {
            start: records[0].unix_time,
            end: records[rows - 1].unix_time,
        },
        duplicates: 0,
        malformed_rows: 0,
    };
    let series = LogReturnSeries::new(values, records[0].unix_time + MINUTE, MINUTE, mask)?;
    Ok((series, report))
}

/// Parses `parsed` into returns and folds the parse statistics into the report.
pub fn ingest(parsed: &ParsedCsv, seed: u64) -> Result<(LogReturnSeries, IngestReport)> {
    let (series, mut report) = build_log_returns_with_imputation(&parsed.records, seed)?;
    report.duplicates = parsed.duplicates;
    report.malformed_rows = parsed.row_errors.len();
    Ok((series, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "unix,date,symbol,open,high,low,close,Volume BTC,Volume USD\n";

    fn row(t: i64, open: f64) -> String {
        format!(
            "{t},2020-01-01,BTC/USD,{open},{h},{l},{open},1.0,{open}\n",
            h = open * 1.01,
            l = open * 0.99
        )
    }

    fn csv(rows: &[(i64, f64)]) -> String {
        let mut s = String::from(HEADER);
        for &(t, o) in rows {
            s.push_str(&row(t, o));
        }
        s
    }

    #[test]
    fn header_only_is_empty() {
        let p = parse_csv(HEADER.as_bytes()).unwrap();
        assert!(p.records.is_empty());
        assert!(p.row_errors.is_empty());
    }

    #[test]
    fn rows_are_sorted() {
        let p = parse_csv(csv(&[(120, 2.0), (60, 1.0)]).as_bytes()).unwrap();
        let times: Vec<i64> = p.records.iter().map(|r| r.unix_time).collect();
        assert_eq!(times, vec![60, 120]);
    }

    #[test]
    fn duplicate_minute_keeps_first() {
        let p = parse_csv(csv(&[(60, 1.0), (120, 2.0), (60, 9.0)]).as_bytes()).unwrap();
        assert_eq!(p.records.len(), 2);
        assert_eq!(p.duplicates, 1);
        assert_eq!(p.records[0].open, 1.0);
    }

    #[test]
    fn banner_line_is_skipped() {
        let text = format!(
            "https://www.CryptoDataDownload.com\n{}",
            csv(&[(60, 1.0), (120, 2.0)])
        );
        let p = parse_csv(text.as_bytes()).unwrap();
        assert_eq!(p.records.len(), 2);
        assert_eq!(p.records[1].symbol, "BTC/USD");
    }

    #[test]
    fn header_names_are_case_insensitive_and_reorderable() {
        let text = "SYMBOL,Unix Timestamp,Date,OPEN,HIGH,LOW,CLOSE,Volume ETH,Volume USD\n\
                    ETH/USD,60,d,10,11,9,10,1,10\n\
                    ETH/USD,120,d,20,21,19,20,1,20\n";
        let p = parse_csv(text.as_bytes()).unwrap();
        assert_eq!(p.records.len(), 2);
        assert_eq!(p.records[0].unix_time, 60);
        assert_eq!(p.records[1].open, 20.0);
        assert_eq!(p.records[0].symbol, "ETH/USD");
    }

    #[test]
    fn unknown_header_falls_back_to_positions() {
        let text = "a,b,c,d,e,f,g,h,i\n60,x,S,5,6,4,5,0,0\n";
        let p = parse_csv(text.as_bytes()).unwrap();
        assert_eq!(p.records[0].open, 5.0);
        assert_eq!(p.records[0].low, 4.0);
    }

    #[test]
    fn millisecond_timestamps_are_normalized() {
        let p = parse_csv(csv(&[(1_600_000_020_000, 1.0)]).as_bytes()).unwrap();
        assert_eq!(p.records[0].unix_time, 1_600_000_020);
    }

    #[test]
    fn malformed_rows_are_collected_with_line_numbers() {
        let mut text = csv(&[(60, 1.0), (120, 2.0), (180, 3.0)]);
        text.push_str("240,d,S,abc,1,1,1,1,1\n");
        let p = parse_csv(text.as_bytes()).unwrap();
        assert_eq!(p.records.len(), 3);
        assert_eq!(p.row_errors.len(), 1);
        assert_eq!(p.row_errors[0].line, 5);
        assert!(p.row_errors[0].message.contains("open"));
    }

    #[test]
    fn mostly_malformed_is_fatal() {
        let mut text = csv(&[(60, 1.0)]);
        text.push_str("120,d,S,-1,1,1,1,1,1\n180,d,S,1,1,2,1,1,1\n");
        assert!(matches!(
            parse_csv(text.as_bytes()),
            Err(Error::MalformedInput {
                malformed: 2,
                total: 3
            })
        ));
    }

    fn records(rows: &[(i64, f64)]) -> Vec<OhlcvRecord> {
        parse_csv(csv(rows).as_bytes()).unwrap().records
    }

    #[test]
    fn no_gaps_means_plain_returns() {
        let recs = records(&[(60, 1.0), (120, 2.0), (180, 1.0)]);
        let (s, rep) = build_log_returns_with_imputation(&recs, 0).unwrap();
        assert_eq!(s.values(), &[2f64.ln(), 0.5f64.ln()]);
        assert_eq!(rep.imputed_fraction, 0.0);
        assert_eq!(rep.gaps_found, 0);
        assert_eq!(s.start_timestamp(), 120);
    }

    #[test]
    fn single_missing_minute_is_imputed() {
        let recs = records(&[(0, 100.0), (60, 101.0), (180, 99.0), (240, 100.0)]);
        let (s, rep) = build_log_returns_with_imputation(&recs, 5).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.imputed_mask(), &[false, true, false, false]);
        assert_eq!(rep.gaps_found, 1);
        assert_eq!(rep.rows_read, 4);
        assert!((rep.imputed_fraction - 0.2).abs() < 1e-15);
        assert_eq!(s.values()[2], (99.0f64 / 101.0).ln());
        assert_eq!(rep.period, Period { start: 0, end: 240 });
    }

    #[test]
    fn constant_returns_impute_the_mean() {
        let recs = records(&[(0, 1.0), (60, 2.0), (180, 4.0)]);
        let (s, _) = build_log_returns_with_imputation(&recs, 1).unwrap();
        assert_eq!(s.values()[1], 2f64.ln());
    }

    #[test]
    fn off_grid_and_short_inputs_are_rejected() {
        assert!(matches!(
            build_log_returns_with_imputation(&records(&[(0, 1.0)]), 0),
            Err(Error::InsufficientData(_))
        ));
        assert!(build_log_returns_with_imputation(&records(&[(0, 1.0), (90, 1.0)]), 0).is_err());
    }
}
