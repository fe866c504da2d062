//! Kullback-Leibler divergence between duration distributions, the trend
//! irreversibility index, and closed forms for the biased random walk on ℤ.
//!
//! All logarithms are natural; divergences are in nats.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trend::{extract_trend_durations, EmpiricalDistribution};

/// Default pseudo-count added to every duration of the union support.
pub const DEFAULT_SMOOTHING: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrreversibilityResult {
    /// `D_KL(P_up || P_down)` in nats.
    pub i_t: f64,
    pub n_up: usize,
    pub n_down: usize,
    pub smoothed: bool,
}

/// `Σ p̃(n) ln(p̃(n)/q̃(n))` over the union of both supports.
///
/// With `smoothing = α > 0` both count vectors get `α` added at every
/// duration of the union support before normalizing, which needs
/// sample-backed distributions. With `α = 0` this is the plug-in divergence
/// and fails if `p` has mass where `q` has none.
pub fn kl_divergence(
    p: &EmpiricalDistribution,
    q: &EmpiricalDistribution,
    smoothing: f64,
) -> Result<f64> {
    if !(smoothing >= 0.0 && smoothing.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "smoothing must be finite and nonnegative, got {smoothing}"
        )));
    }
    let aligned = align(p, q, smoothing)?;
    let mut kl = 0.0;
    for (n, pw, qw) in aligned.rows {
        let pm = pw / aligned.p_total;
        if pm == 0.0 {
            continue;
        }
        let qm = qw / aligned.q_total;
        if qm == 0.0 {
            return Err(Error::DivergenceUndefined { duration: n });
        }
        kl += pm * (pm / qm).ln();
    }
    // Rounding can leave a tiny negative value for identical inputs.
    Ok(kl.max(0.0))
}

struct Aligned {
    rows: Vec<(usize, f64, f64)>,
    p_total: f64,
    q_total: f64,
}

fn weights(d: &EmpiricalDistribution, smoothing: f64) -> Result<Vec<f64>> {
    if smoothing == 0.0 {
        return Ok(d.mass().to_vec());
    }
    match d.counts() {
        Some(c) => Ok(c.iter().map(|&c| c as f64).collect()),
        None => Err(Error::InvalidInput(
            "smoothing needs count-backed distributions".into(),
        )),
    }
}

fn align(p: &EmpiricalDistribution, q: &EmpiricalDistribution, smoothing: f64) -> Result<Aligned> {
    let (pw, qw) = (weights(p, smoothing)?, weights(q, smoothing)?);
    let (ps, qs) = (p.support(), q.support());
    let mut rows = Vec::with_capacity(ps.len().max(qs.len()));
    let (mut i, mut j) = (0, 0);
    while i < ps.len() || j < qs.len() {
        let row = match (ps.get(i), qs.get(j)) {
            (Some(&a), Some(&b)) if a == b => {
                i += 1;
                j += 1;
                (a, pw[i - 1], qw[j - 1])
            }
            (Some(&a), Some(&b)) if a < b => {
                i += 1;
                (a, pw[i - 1], 0.0)
            }
            (Some(&a), None) => {
                i += 1;
                (a, pw[i - 1], 0.0)
            }
            (_, Some(&b)) => {
                j += 1;
                (b, 0.0, qw[j - 1])
            }
            (None, None) => unreachable!(),
        };
        rows.push((row.0, row.1 + smoothing, row.2 + smoothing));
    }
    let p_total = rows.iter().map(|r| r.1).sum();
    let q_total = rows.iter().map(|r| r.2).sum();
    Ok(Aligned {
        rows,
        p_total,
        q_total,
    })
}

/// Trend irreversibility index `I_T = D_KL(P_up || P_down)` of a series.
pub fn trend_irreversibility(series: &[f64], smoothing: f64) -> Result<IrreversibilityResult> {
    let runs = extract_trend_durations(series)?;
    if runs.up.is_empty() || runs.down.is_empty() {
        return Err(Error::InsufficientData(format!(
            "need at least one uptrend and one downtrend, found {} and {}",
            runs.up.len(),
            runs.down.len()
        )));
    }
    let p_up = EmpiricalDistribution::from_durations(&runs.up)?;
    let p_down = EmpiricalDistribution::from_durations(&runs.down)?;
    let i_t = kl_divergence(&p_up, &p_down, smoothing)?;
    Ok(IrreversibilityResult {
        i_t,
        n_up: runs.up.len(),
        n_down: runs.down.len(),
        smoothed: smoothing > 0.0,
    })
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "step probability must lie in (0, 1), got {p}"
        )))
    }
}

/// Entropy production rate of the walk: `(2p − 1) ln(p / (1 − p))`.
pub fn rw_entropy_production(p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok((2.0 * p - 1.0) * (p / (1.0 - p)).ln())
}

/// `D_KL(P_up || P_down) = (2p − 1)/(1 − p) · ln(p / (1 − p))` for the walk.
pub fn rw_kl_up_down(p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok((2.0 * p - 1.0) / (1.0 - p) * (p / (1.0 - p)).ln())
}

/// `D_KL(P_down || P_up) = (1 − 2p)/p · ln((1 − p) / p)` for the walk.
pub fn rw_kl_down_up(p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok((1.0 - 2.0 * p) / p * ((1.0 - p) / p).ln())
}
