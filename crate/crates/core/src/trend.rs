//! Segmentation of a series into maximal monotone runs.
//!
//! First differences are mapped to signs and every maximal run of equal
//! signs becomes one duration, counted in steps. Runs partition the
//! difference sequence: a local extremum ends one trend and starts the next
//! without sharing a step, and zero differences form constant runs that
//! break both kinds of trend. A run still open at the end of the series is
//! kept with its observed (censored) length.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Durations of uptrends, downtrends and constant runs, in order of appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrendDurations {
    pub up: Vec<usize>,
    pub down: Vec<usize>,
    pub constant: Vec<usize>,
}

impl TrendDurations {
    /// Number of first differences covered by all runs.
    pub fn total_steps(&self) -> usize {
        self.up.iter().chain(&self.down).chain(&self.constant).sum()
    }
}

pub fn extract_trend_durations(series: &[f64]) -> Result<TrendDurations> {
    if series.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "trend extraction needs at least 2 points, got {}",
            series.len()
        )));
    }
    let mut out = TrendDurations::default();
    let mut current = step_sign(series[0], series[1]);
    let mut run = 1usize;
    for w in series.windows(2).skip(1) {
        let s = step_sign(w[0], w[1]);
        if s == current {
            run += 1;
        } else {
            push_run(&mut out, current, run);
            current = s;
            run = 1;
        }
    }
    push_run(&mut out, current, run);
    Ok(out)
}

fn step_sign(a: f64, b: f64) -> Ordering {
    // NaN compares as neither greater nor less and falls into a constant run.
    b.partial_cmp(&a).unwrap_or(Ordering::Equal)
}

fn push_run(out: &mut TrendDurations, sign: Ordering, len: usize) {
    match sign {
        Ordering::Greater => out.up.push(len),
        Ordering::Less => out.down.push(len),
        Ordering::Equal => out.constant.push(len),
    }
}

/// Probability mass function over positive integer durations.
///
/// Distributions built from samples keep their counts so that smoothed
/// divergences can be formed; analytic ones built with
/// [`EmpiricalDistribution::from_pmf`] carry masses only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    support: Vec<usize>,
    mass: Vec<f64>,
    counts: Option<Vec<u64>>,
}

impl EmpiricalDistribution {
    pub fn from_durations(durations: &[usize]) -> Result<Self> {
        let max = match durations.iter().max() {
            Some(&m) => m,
            None => {
                return Err(Error::InsufficientData(
                    "no durations to build a distribution from".into(),
                ))
            }
        };
        if durations.contains(&0) {
            return Err(Error::InvalidInput("durations must be at least 1".into()));
        }
        let mut hist = vec![0u64; max + 1];
        for &d in durations {
            hist[d] += 1;
        }
        let (support, counts): (Vec<usize>, Vec<u64>) =
            hist.into_iter().enumerate().filter(|&(_, c)| c > 0).unzip();
        let total = durations.len() as f64;
        let mass = counts.iter().map(|&c| c as f64 / total).collect();
        Ok(Self {
            support,
            mass,
            counts: Some(counts),
        })
    }

    /// Distribution from explicit masses; zero-mass entries are dropped and
    /// the rest renormalized.
    pub fn from_pmf(support: Vec<usize>, mass: Vec<f64>) -> Result<Self> {
        if support.len() != mass.len() {
            return Err(Error::InvalidInput(
                "support and mass lengths differ".into(),
            ));
        }
        if support.windows(2).any(|w| w[1] <= w[0]) || support.first() == Some(&0) {
            return Err(Error::InvalidInput(
                "support must be strictly increasing positive integers".into(),
            ));
        }
        if mass.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidInput(
                "masses must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = mass.iter().sum();
        if total <= 0.0 {
            return Err(Error::InsufficientData("distribution has no mass".into()));
        }
        let (support, mass) = support
            .into_iter()
            .zip(mass)
            .filter(|&(_, m)| m > 0.0)
            .map(|(n, m)| (n, m / total))
            .unzip();
        Ok(Self {
            support,
            mass,
            counts: None,
        })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Observation counts aligned with the support, if sample-backed.
    pub fn counts(&self) -> Option<&[u64]> {
        self.counts.as_deref()
    }

    pub fn sample_size(&self) -> Option<u64> {
        self.counts.as_ref().map(|c| c.iter().sum())
    }

    /// Mass at duration `n` (zero off-support).
    pub fn pmf(&self, n: usize) -> f64 {
        self.support
            .binary_search(&n)
            .map(|i| self.mass[i])
            .unwrap_or(0.0)
    }

    /// Total-variation distance to `other`.
    pub fn total_variation(&self, other: &Self) -> f64 {
        let mut all: Vec<usize> = self.support.iter().chain(&other.support).copied().collect();
        all.sort_unstable();
        all.dedup();
        0.5 * all
            .into_iter()
            .map(|n| (self.pmf(n) - other.pmf(n)).abs())
            .sum::<f64>()
    }
}

pub fn empirical_distribution(durations: &[usize]) -> Result<EmpiricalDistribution> {
    EmpiricalDistribution::from_durations(durations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_enumerated_runs() {
        let d = extract_trend_durations(&[1.0, 2.0, 3.0, 2.0, 1.0, 1.0, 2.0]).unwrap();
        assert_eq!(d.up, vec![2, 1]);
        assert_eq!(d.down, vec![2]);
        assert_eq!(d.constant, vec![1]);
    }

    #[test]
    fn strictly_increasing_is_one_run() {
        let s: Vec<f64> = (0..17).map(f64::from).collect();
        let d = extract_trend_durations(&s).unwrap();
        assert_eq!(d.up, vec![16]);
        assert!(d.down.is_empty() && d.constant.is_empty());
    }

    #[test]
    fn flat_series_is_constant() {
        let d = extract_trend_durations(&[5.0; 4]).unwrap();
        assert_eq!(d.constant, vec![3]);
        assert!(d.up.is_empty() && d.down.is_empty());
    }

    #[test]
    fn short_series_rejected() {
        assert!(matches!(
            extract_trend_durations(&[1.0]),
            Err(Error::InvalidInput(_))
        ));
        assert!(extract_trend_durations(&[]).is_err());
    }

    #[test]
    fn counting_distribution() {
        let p = empirical_distribution(&[1, 1, 2]).unwrap();
        assert_eq!(p.support(), &[1, 2]);
        assert!((p.mass()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.mass()[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.counts(), Some(&[2u64, 1][..]));

        let q = empirical_distribution(&[5]).unwrap();
        assert_eq!(q.support(), &[5]);
        assert_eq!(q.mass(), &[1.0]);
    }

    #[test]
    fn empty_durations_are_insufficient() {
        assert!(matches!(
            empirical_distribution(&[]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn pmf_drops_zeros_and_renormalizes() {
        let p = EmpiricalDistribution::from_pmf(vec![1, 2, 3], vec![2.0, 0.0, 2.0]).unwrap();
        assert_eq!(p.support(), &[1, 3]);
        assert_eq!(p.mass(), &[0.5, 0.5]);
        assert!(p.counts().is_none());
        assert!(EmpiricalDistribution::from_pmf(vec![2, 1], vec![0.5, 0.5]).is_err());
        assert!(EmpiricalDistribution::from_pmf(vec![0, 1], vec![0.5, 0.5]).is_err());
    }

    fn negated(s: &[f64]) -> Vec<f64> {
        s.iter().map(|x| -x).collect()
    }

    // Small integer alphabet so that ties (constant runs) actually occur.
    fn series_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec((-3i32..=3).prop_map(f64::from), 2..80)
    }

    proptest! {
        #[test]
        fn reversal_swaps_up_and_down(s in series_strategy()) {
            let fwd = extract_trend_durations(&s).unwrap();
            let mut rev = s.clone();
            rev.reverse();
            let back = extract_trend_durations(&rev).unwrap();
            let mut up = fwd.up.clone(); up.sort_unstable();
            let mut down = fwd.down.clone(); down.sort_unstable();
            let mut cst = fwd.constant.clone(); cst.sort_unstable();
            let mut bup = back.up.clone(); bup.sort_unstable();
            let mut bdown = back.down.clone(); bdown.sort_unstable();
            let mut bcst = back.constant.clone(); bcst.sort_unstable();
            prop_assert_eq!(up, bdown);
            prop_assert_eq!(down, bup);
            prop_assert_eq!(cst, bcst);
        }

        #[test]
        fn negation_swaps_up_and_down(s in series_strategy()) {
            let fwd = extract_trend_durations(&s).unwrap();
            let neg = extract_trend_durations(&negated(&s)).unwrap();
            prop_assert_eq!(&fwd.up, &neg.down);
            prop_assert_eq!(&fwd.down, &neg.up);
            prop_assert_eq!(&fwd.constant, &neg.constant);
        }

        #[test]
        fn durations_partition_differences(s in series_strategy()) {
            let d = extract_trend_durations(&s).unwrap();
            prop_assert_eq!(d.total_steps(), s.len() - 1);
            prop_assert!(d.up.iter().chain(&d.down).chain(&d.constant).all(|&x| x >= 1));
        }

        #[test]
        fn distribution_is_normalized(durations in prop::collection::vec(1usize..40, 1..200)) {
            let p = empirical_distribution(&durations).unwrap();
            prop_assert!((p.mass().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.mass().iter().all(|&m| m > 0.0));
            prop_assert!(p.support().windows(2).all(|w| w[0] < w[1]));
        }
    }
}
