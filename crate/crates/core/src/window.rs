//! Sliding-window evolution of both indices with per-window surrogate thresholds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::DEFAULT_SMOOTHING;
use crate::efficiency::DEFAULT_BLOCK_LENGTH;
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::series::LogReturnSeries;
use crate::surrogate::{significance_test, Statistic, SurrogateEnsembleResult};

/// 91 days of minutes.
pub const DEFAULT_WINDOW_MINUTES: usize = 91 * 24 * 60;
/// 10 days of minutes.
pub const DEFAULT_STEP_MINUTES: usize = 10 * 24 * 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub window_minutes: usize,
    pub step_minutes: usize,
    pub alpha: f64,
    pub n_surrogates: usize,
    /// Block length `L` of the inefficiency index `I_*^{L+1}`.
    pub l: usize,
    /// KL pseudo-count.
    pub smoothing: f64,
    pub seed: u64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            window_minutes: DEFAULT_WINDOW_MINUTES,
            step_minutes: DEFAULT_STEP_MINUTES,
            alpha: 0.05,
            n_surrogates: 100,
            l: DEFAULT_BLOCK_LENGTH,
            smoothing: DEFAULT_SMOOTHING,
            seed: 0,
        }
    }
}

impl WindowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_minutes == 0
            || self.step_minutes == 0
            || self.n_surrogates == 0
            || self.l == 0
        {
            return Err(Error::InvalidInput(
                "window, step, surrogate and block counts must be positive".into(),
            ));
        }
        if self.step_minutes > self.window_minutes {
            return Err(Error::InvalidInput(format!(
                "step ({}) exceeds window ({})",
                self.step_minutes, self.window_minutes
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidInput(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.smoothing >= 0.0 && self.smoothing.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "invalid smoothing {}",
                self.smoothing
            )));
        }
        Ok(())
    }

    /// Number of full windows over `n` returns.
    pub fn window_count(&self, n: usize) -> usize {
        if n < self.window_minutes {
            0
        } else {
            (n - self.window_minutes) / self.step_minutes + 1
        }
    }
}

/// Indices of one window; `None` where the index is undefined on that window
/// (for example no downtrend at all).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowResult {
    pub window_index: usize,
    /// Timestamp of the window's first return.
    pub window_start: i64,
    pub i_t: Option<f64>,
    pub i_t_threshold: Option<f64>,
    pub i_star: Option<f64>,
    pub i_star_threshold: Option<f64>,
    pub i_t_significant: bool,
    pub i_star_significant: bool,
}

fn tested(
    values: &[f64],
    statistic: Statistic,
    cfg: &WindowConfig,
    seed: u64,
) -> Result<Option<SurrogateEnsembleResult>> {
    match significance_test(values, statistic, cfg.n_surrogates, cfg.alpha, seed) {
        Ok(r) => Ok(Some(r)),
        Err(
            Error::InsufficientData(_)
            | Error::DivergenceUndefined { .. }
            | Error::SurrogateExhausted { .. },
        ) => Ok(None),
        Err(e) => Err(e),
    }
}

fn evaluate_window(
    returns: &LogReturnSeries,
    cfg: &WindowConfig,
    index: usize,
) -> Result<WindowResult> {
    let offset = index * cfg.step_minutes;
    let values = &returns.values()[offset..offset + cfg.window_minutes];
    let seed = derive_seed(cfg.seed, index as u64);
    let trend = tested(
        values,
        Statistic::TrendIrreversibility {
            smoothing: cfg.smoothing,
        },
        cfg,
        derive_seed(seed, 0),
    )?;
    let ineff = tested(
        values,
        Statistic::Inefficiency {
            block_length: cfg.l,
        },
        cfg,
        derive_seed(seed, 1),
    )?;
    Ok(WindowResult {
        window_index: index,
        window_start: returns.timestamp_at(offset),
        i_t: trend.as_ref().map(|r| r.observed),
        i_t_threshold: trend.as_ref().map(|r| r.threshold),
        i_t_significant: trend.as_ref().is_some_and(|r| r.significant()),
        i_star: ineff.as_ref().map(|r| r.observed),
        i_star_threshold: ineff.as_ref().map(|r| r.threshold),
        i_star_significant: ineff.as_ref().is_some_and(|r| r.significant()),
    })
}

/// Evaluates every full window at offsets `0, step, 2·step, …`; a trailing
/// partial window is dropped.
pub fn run_windows(returns: &LogReturnSeries, cfg: &WindowConfig) -> Result<Vec<WindowResult>> {
    cfg.validate()?;
    let count = cfg.window_count(returns.len());
    if count == 0 {
        return Err(Error::InsufficientData(format!(
            "{} returns do not fill one window of {}",
            returns.len(),
            cfg.window_minutes
        )));
    }
    (0..count)
        .into_par_iter()
        .map(|i| evaluate_window(returns, cfg, i))
        .collect()
}

/// Sample Pearson correlation coefficient.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::InsufficientData(
            "correlation needs at least 2 pairs".into(),
        ));
    }
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson r between the `I_T` and `I_*` curves over windows where both are defined.
pub fn index_correlation(results: &[WindowResult]) -> Result<f64> {
    let (a, b): (Vec<f64>, Vec<f64>) = results
        .iter()
        .filter_map(|r| Some((r.i_t?, r.i_star?)))
        .unzip();
    pearson_correlation(&a, &b)
}
