//! Synthetic processes with known reversibility.
//!
//! * biased random walk on ℤ (closed-form trend divergence),
//! * linear AR(2) with Gaussian innovations (reversible),
//! * bivariate nonlinear AR with Laplace noise, observed through
//!   `u_t = x_t² + y_t²` (irreversible).
//!
//! Every generator is a deterministic function of its parameters and seed.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Transient samples simulated and discarded before AR/NAR output.
pub const BURN_IN: usize = 1_000;

/// Time step used by [`NarTimeMode::Scaled`].
pub const NAR_SCALED_DT: f64 = 0.01;

const NAR_NOISE_SCALE: f64 = 0.0025;

/// How the sinusoidal driver `sin(4πt) + sin(6πt)` reads its time argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NarTimeMode {
    /// `t` is the integer step index; the driver is identically zero.
    #[default]
    Integer,
    /// `t` is the step index times [`NAR_SCALED_DT`].
    Scaled,
}

impl NarTimeMode {
    fn driver(self, step: usize) -> f64 {
        // sin(2π·k·τ) evaluated through the fractional part of k·τ so that
        // integer times give exactly zero.
        let tau = match self {
            NarTimeMode::Integer => return 0.0,
            NarTimeMode::Scaled => step as f64 * NAR_SCALED_DT,
        };
        (TAU * (2.0 * tau).fract()).sin() + (TAU * (3.0 * tau).fract()).sin()
    }
}

impl std::str::FromStr for NarTimeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "integer" => Ok(Self::Integer),
            "scaled" => Ok(Self::Scaled),
            other => Err(Error::InvalidInput(format!(
                "unknown NAR time mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessKind {
    RandomWalk { p: f64 },
    Ar2,
    Nar2 { time_mode: NarTimeMode },
}

/// A synthetic process, its sample count and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub length: usize,
    pub seed: u64,
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<()> {
        check_length(self.length)?;
        if let ProcessKind::RandomWalk { p } = self.kind {
            check_p(p)?;
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Vec<f64>> {
        self.validate()?;
        match self.kind {
            ProcessKind::RandomWalk { p } => Ok(gen_random_walk(p, self.length, self.seed)?
                .into_iter()
                .map(|x| x as f64)
                .collect()),
            ProcessKind::Ar2 => gen_ar2(self.length, self.seed),
            ProcessKind::Nar2 { time_mode } => gen_nar2(self.length, self.seed, time_mode),
        }
    }
}

fn check_length(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidInput(format!(
            "step probability must lie in (0, 1), got {p}"
        )));
    }
    Ok(())
}

/// Positions `X_0 = 0, …, X_{n−1}` of a walk stepping +1 with probability `p`.
pub fn gen_random_walk(p: f64, n: usize, seed: u64) -> Result<Vec<i64>> {
    check_p(p)?;
    check_length(n)?;
    let mut rng = rng_from_seed(seed);
    let mut x = 0i64;
    let mut out = Vec::with_capacity(n);
    out.push(x);
    for _ in 1..n {
        x += if rng.random_bool(p) { 1 } else { -1 };
        out.push(x);
    }
    Ok(out)
}

/// `x_{t+2} = 0.7 x_{t+1} + 0.2 x_t + ξ_t` with standard normal `ξ_t`.
pub fn gen_ar2(n: usize, seed: u64) -> Result<Vec<f64>> {
    check_length(n)?;
    let mut rng = rng_from_seed(seed);
    Ok(ar2_with_innovations(n, || rng.sample(StandardNormal)))
}

/// AR(2) recursion driven by caller-supplied innovations, starting from
/// `x_0 = x_1 = 0` and dropping [`BURN_IN`] samples.
pub fn ar2_with_innovations(n: usize, mut innovation: impl FnMut() -> f64) -> Vec<f64> {
    let total = n + BURN_IN;
    let mut x = vec![0.0; total.max(2)];
    for t in 0..total.saturating_sub(2) {
        x[t + 2] = 0.7 * x[t + 1] + 0.2 * x[t] + innovation();
    }
    x.split_off(BURN_IN)
}

/// `u_t = x_t² + y_t²` of the nonlinear bivariate process
///
/// ```text
/// x_{t+2} = 0.5 x_{t+1} − 0.3 x_t + 0.1 y_t + 0.1 x_t² + 0.4 y_{t+1}² + 0.0025 η_t
/// y_{t+2} = sin(4πt) + sin(6πt) + 0.0025 ζ_t
/// ```
///
/// with independent Laplace(0, 1) noises `η`, `ζ`.
pub fn gen_nar2(n: usize, seed: u64, time_mode: NarTimeMode) -> Result<Vec<f64>> {
    check_length(n)?;
    let mut eta_rng = rng_from_seed(derive_seed(seed, 0));
    let mut zeta_rng = rng_from_seed(derive_seed(seed, 1));
    nar2_with_noise(
        n,
        time_mode,
        || sample_laplace(0.0, 1.0, &mut eta_rng),
        || sample_laplace(0.0, 1.0, &mut zeta_rng),
    )
}

/// NAR recursion driven by caller-supplied noises, from zero initial
/// conditions and dropping [`BURN_IN`] samples.
pub fn nar2_with_noise(
    n: usize,
    time_mode: NarTimeMode,
    mut eta: impl FnMut() -> f64,
    mut zeta: impl FnMut() -> f64,
) -> Result<Vec<f64>> {
    let total = n + BURN_IN;
    let mut x = vec![0.0; total.max(2)];
    let mut y = vec![0.0; total.max(2)];
    for t in 0..total.saturating_sub(2) {
        x[t + 2] = 0.5 * x[t + 1] - 0.3 * x[t]
            + 0.1 * y[t]
            + 0.1 * x[t] * x[t]
            + 0.4 * y[t + 1] * y[t + 1]
            + NAR_NOISE_SCALE * eta();
        y[t + 2] = time_mode.driver(t) + NAR_NOISE_SCALE * zeta();
        if !x[t + 2].is_finite() || x[t + 2].abs() > 1e100 {
            return Err(Error::Generation {
                step: t + 2,
                detail: format!("x = {}", x[t + 2]),
            });
        }
    }
    Ok(x.iter()
        .zip(&y)
        .skip(BURN_IN)
        .map(|(a, b)| a * a + b * b)
        .collect())
}

/// Laplace(μ, β) draw by inverse CDF from `v` uniform on `(−½, ½)`.
pub fn sample_laplace<R: Rng + ?Sized>(mu: f64, beta: f64, rng: &mut R) -> f64 {
    loop {
        let v: f64 = rng.random::<f64>() - 0.5;
        // v = −½ maps to −∞
        if v > -0.5 {
            return laplace_from_uniform(mu, beta, v);
        }
    }
}

/// `μ − β·sign(v)·ln(1 − 2|v|)`.
pub fn laplace_from_uniform(mu: f64, beta: f64, v: f64) -> f64 {
    mu - beta * v.signum() * (1.0 - 2.0 * v.abs()).ln()
}
