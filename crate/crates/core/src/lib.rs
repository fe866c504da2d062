//! Time-irreversibility and weak-form inefficiency of time series.
//!
//! The crate measures irreversibility through *trend patterns*: a series is
//! cut into maximal runs of strictly increasing and strictly decreasing
//! values, the run-length distributions are estimated, and the
//! Kullback-Leibler divergence of the uptrend distribution from the
//! downtrend distribution is reported as the trend irreversibility index
//! `I_T`. Market inefficiency is measured with the block-entropy index
//! `I_*^{L+1} = ln 2 + H^L - H^{L+1}` over the sign-binarized returns.
//!
//! Both indices are tested for significance against shuffled surrogates,
//! and [`window`] evaluates them over sliding windows of a minute-frequency
//! return series produced by [`ingest`].
//!
//! ```
//! use irrev::divergence::{rw_kl_up_down, trend_irreversibility};
//! use irrev::synth::gen_random_walk;
//!
//! let walk: Vec<f64> = gen_random_walk(0.6, 100_000, 7)
//!     .unwrap()
//!     .into_iter()
//!     .map(|x| x as f64)
//!     .collect();
//! let est = trend_irreversibility(&walk, 0.5).unwrap();
//! assert!((est.i_t - rw_kl_up_down(0.6).unwrap()).abs() < 0.02);
//! ```

pub mod divergence;
pub mod efficiency;
pub mod error;
pub mod ingest;
pub mod rng;
pub mod series;
pub mod surrogate;
pub mod synth;
pub mod trend;
pub mod window;

pub use error::{Error, Result};
