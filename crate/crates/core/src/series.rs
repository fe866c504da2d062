//! Price and return series, log returns, and sign binarization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling interval of minute data, in seconds.
pub const MINUTE: i64 = 60;

/// Timestamped positive prices on a nominal sampling grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    timestamps: Vec<i64>,
    prices: Vec<f64>,
    symbol: Option<String>,
    period_seconds: i64,
}

impl PriceSeries {
    pub fn new(
        timestamps: Vec<i64>,
        prices: Vec<f64>,
        symbol: Option<String>,
        period_seconds: i64,
    ) -> Result<Self> {
        if timestamps.len() != prices.len() {
            return Err(Error::InvalidInput(format!(
                "{} timestamps but {} prices",
                timestamps.len(),
                prices.len()
            )));
        }
        if period_seconds <= 0 {
            return Err(Error::InvalidInput(format!(
                "period must be positive, got {period_seconds}"
            )));
        }
        if let Some(i) = timestamps.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "timestamps not strictly increasing at index {}",
                i + 1
            )));
        }
        check_positive(&prices)?;
        Ok(Self {
            timestamps,
            prices,
            symbol,
            period_seconds,
        })
    }

    /// Prices on a regular grid starting at `start` with spacing `period_seconds`.
    pub fn regular(start: i64, period_seconds: i64, prices: Vec<f64>) -> Result<Self> {
        let timestamps = (0..prices.len() as i64)
            .map(|i| start + i * period_seconds)
            .collect();
        Self::new(timestamps, prices, None, period_seconds)
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn symbol(&self) -> Option<&str> {
        self.symbol.as_deref()
    }

    pub fn period_seconds(&self) -> i64 {
        self.period_seconds
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

fn check_positive(prices: &[f64]) -> Result<()> {
    match prices.iter().position(|&p| !(p > 0.0 && p.is_finite())) {
        Some(i) => Err(Error::InvalidInput(format!(
            "price at index {i} is not a positive finite number ({})",
            prices[i]
        ))),
        None => Ok(()),
    }
}

/// Log returns on a regular grid, with a flag for every synthetically filled value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogReturnSeries {
    values: Vec<f64>,
    start_timestamp: i64,
    period_seconds: i64,
    imputed_mask: Vec<bool>,
}

impl LogReturnSeries {
    pub fn new(
        values: Vec<f64>,
        start_timestamp: i64,
        period_seconds: i64,
        imputed_mask: Vec<bool>,
    ) -> Result<Self> {
        if values.len() != imputed_mask.len() {
            return Err(Error::InvalidInput(format!(
                "{} values but {} mask entries",
                values.len(),
                imputed_mask.len()
            )));
        }
        if period_seconds <= 0 {
            return Err(Error::InvalidInput(format!(
                "period must be positive, got {period_seconds}"
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "log return at index {i} is not finite"
            )));
        }
        Ok(Self {
            values,
            start_timestamp,
            period_seconds,
            imputed_mask,
        })
    }

    /// Observed (non-imputed) returns on a regular grid.
    pub fn observed(values: Vec<f64>, start_timestamp: i64, period_seconds: i64) -> Result<Self> {
        let mask = vec![false; values.len()];
        Self::new(values, start_timestamp, period_seconds, mask)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn imputed_mask(&self) -> &[bool] {
        &self.imputed_mask
    }

    pub fn start_timestamp(&self) -> i64 {
        self.start_timestamp
    }

    pub fn period_seconds(&self) -> i64 {
        self.period_seconds
    }

    /// Timestamp of the `i`-th return.
    pub fn timestamp_at(&self, i: usize) -> i64 {
        self.start_timestamp + i as i64 * self.period_seconds
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn imputed_count(&self) -> usize {
        self.imputed_mask.iter().filter(|&&m| m).count()
    }

    pub fn binarize(&self) -> Result<BinarySeries> {
        binarize(&self.values)
    }
}

/// `values[i] = ln(prices[i+1] / prices[i])`; the first return is stamped
/// with the second price's timestamp.
pub fn log_returns(series: &PriceSeries) -> Result<LogReturnSeries> {
    let values = log_returns_from_prices(series.prices())?;
    LogReturnSeries::observed(values, series.timestamps()[1], series.period_seconds())
}

pub fn log_returns_from_prices(prices: &[f64]) -> Result<Vec<f64>> {
    if prices.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "log returns need at least 2 prices, got {}",
            prices.len()
        )));
    }
    check_positive(prices)?;
    Ok(prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

/// Sequence of bits, one per return sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinarySeries(Vec<u8>);

impl BinarySeries {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(i) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidInput(format!(
                "bit at index {i} is {}, expected 0 or 1",
                bits[i]
            )));
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|b| 1 - b).collect())
    }
}

/// 1 for a strictly positive return, 0 otherwise (zero maps to 0).
pub fn binarize(values: &[f64]) -> Result<BinarySeries> {
    if values.is_empty() {
        return Err(Error::InvalidInput(
            "cannot binarize an empty series".into(),
        ));
    }
    Ok(BinarySeries(
        values.iter().map(|&v| u8::from(v > 0.0)).collect(),
    ))
}
