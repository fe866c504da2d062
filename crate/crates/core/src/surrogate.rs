//! Shuffle-surrogate significance tests.
//!
//! Each surrogate is a uniform random permutation of the input, which keeps
//! the value distribution and destroys temporal order. The statistic is
//! recomputed on every surrogate with identical settings and the observed
//! value is significant when it exceeds the empirical `1 − α` quantile.
//! Surrogate `i` draws from its own stream derived from `(seed, i, attempt)`,
//! so results do not depend on evaluation order or thread count.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::trend_irreversibility;
use crate::efficiency::inefficiency_of_returns;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Fewest surrogates accepted by [`significance_test`].
pub const MIN_SURROGATES: usize = 20;

/// Fresh draws tried for a surrogate on which the statistic is undefined.
pub const MAX_RETRIES: usize = 10;

/// Statistic evaluated on the original series and on each surrogate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statistic {
    TrendIrreversibility { smoothing: f64 },
    Inefficiency { block_length: usize },
}

impl Statistic {
    pub fn evaluate(&self, series: &[f64]) -> Result<f64> {
        match *self {
            Statistic::TrendIrreversibility { smoothing } => {
                Ok(trend_irreversibility(series, smoothing)?.i_t)
            }
            Statistic::Inefficiency { block_length } => {
                Ok(inefficiency_of_returns(series, block_length)?.i_star)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Statistic::TrendIrreversibility { .. } => "trend_irreversibility",
            Statistic::Inefficiency { .. } => "inefficiency",
        }
    }
}

/// Fisher–Yates shuffle of `series`, deterministic in `seed`.
pub fn shuffle_surrogate(series: &[f64], seed: u64) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(Error::InvalidInput("cannot shuffle an empty series".into()));
    }
    let mut out = series.to_vec();
    out.shuffle(&mut rng_from_seed(seed));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateEnsembleResult {
    pub statistic: Statistic,
    /// Statistic on the unshuffled series.
    pub observed: f64,
    /// Statistic on each surrogate, indexed by surrogate number.
    pub statistic_values: Vec<f64>,
    /// Empirical `1 − alpha` quantile of `statistic_values`.
    pub threshold: f64,
    pub mean: f64,
    pub n_surrogates: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl SurrogateEnsembleResult {
    pub fn significant(&self) -> bool {
        self.observed > self.threshold
    }
}

/// Quantile with linear interpolation between order statistics
/// (position `q·(n − 1)` in the sorted sample).
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientData(
            "quantile of an empty sample".into(),
        ));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidInput(format!(
            "quantile level {q} outside [0, 1]"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

fn surrogate_value(series: &[f64], statistic: Statistic, seed: u64, index: usize) -> Result<f64> {
    let stream = derive_seed(seed, index as u64);
    let mut last_err = None;
    for attempt in 0..=MAX_RETRIES {
        let shuffled = shuffle_surrogate(series, derive_seed(stream, attempt as u64))?;
        match statistic.evaluate(&shuffled) {
            Ok(v) => return Ok(v),
            Err(e @ (Error::InsufficientData(_) | Error::DivergenceUndefined { .. })) => {
                last_err = Some(e)
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::SurrogateExhausted {
        index,
        attempts: MAX_RETRIES + 1,
        source: Box::new(last_err.expect("at least one attempt")),
    })
}

/// Evaluates `statistic` on `series` and on `n_surrogates` shuffles of it.
pub fn significance_test(
    series: &[f64],
    statistic: Statistic,
    n_surrogates: usize,
    alpha: f64,
    seed: u64,
) -> Result<SurrogateEnsembleResult> {
    if n_surrogates < MIN_SURROGATES {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_SURROGATES} surrogates, got {n_surrogates}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let observed = statistic.evaluate(series)?;
    let statistic_values = (0..n_surrogates)
        .into_par_iter()
        .map(|i| surrogate_value(series, statistic, seed, i))
        .collect::<Result<Vec<f64>>>()?;
    let threshold = quantile(&statistic_values, 1.0 - alpha)?;
    let mean = statistic_values.iter().sum::<f64>() / n_surrogates as f64;
    Ok(SurrogateEnsembleResult {
        statistic,
        observed,
        statistic_values,
        threshold,
        mean,
        n_surrogates,
        alpha,
        seed,
    })
}
