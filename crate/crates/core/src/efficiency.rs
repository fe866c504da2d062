//! Block-entropy inefficiency index over sign-binarized returns.
//!
//! `I_*^{L+1} = ln 2 + H^L − H^{L+1}` compares the joint entropy of
//! `L + 1` consecutive signs with the entropy they would have if the last
//! sign were an independent fair coin. A weak-form efficient market gives
//! zero; a fully predictable next sign gives `ln 2`.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::BinarySeries;

/// Largest supported block length (dense table of `2^L` counters).
pub const MAX_BLOCK_LENGTH: usize = 20;

/// Default `L`, so the reported index is `I_*^3`.
pub const DEFAULT_BLOCK_LENGTH: usize = 2;

/// Occurrence counts of every length-`L` pattern over overlapping windows.
///
/// Patterns are coded as integers with the earliest bit most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockEntropyTable {
    block_length: usize,
    counts: Vec<u64>,
    total: u64,
}

impl BlockEntropyTable {
    /// Counts every window of length `l` (stride 1).
    pub fn from_bits(bits: &BinarySeries, l: usize) -> Result<Self> {
        check_block_length(l)?;
        let b = bits.bits();
        if b.len() < l {
            return Err(Error::InsufficientData(format!(
                "{} bits cannot hold a block of length {l}",
                b.len()
            )));
        }
        Ok(Self::count(b, l, b.len() - l + 1))
    }

    /// Counts the first `windows` windows of length `l`.
    fn count(bits: &[u8], l: usize, windows: usize) -> Self {
        let mask = (1u64 << l) - 1;
        let mut counts = vec![0u64; 1 << l];
        let mut code = 0u64;
        for (i, &bit) in bits.iter().take(windows + l - 1).enumerate() {
            code = ((code << 1) | u64::from(bit)) & mask;
            if i + 1 >= l {
                counts[code as usize] += 1;
            }
        }
        Self {
            block_length: l,
            counts,
            total: windows as u64,
        }
    }

    /// Table of the length-`L−1` prefixes of every counted block.
    fn prefix_marginal(&self) -> Self {
        let l = self.block_length - 1;
        let mut counts = vec![0u64; 1 << l];
        for (code, &c) in self.counts.iter().enumerate() {
            counts[code >> 1] += c;
        }
        Self {
            block_length: l,
            counts,
            total: self.total,
        }
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count_of(&self, pattern: &[u8]) -> u64 {
        if pattern.len() != self.block_length {
            return 0;
        }
        let code = pattern
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
        self.counts[code]
    }

    /// Observed patterns (as `'0'`/`'1'` strings) with their counts.
    pub fn iter(&self) -> impl Iterator<Item = (String, u64)> + '_ {
        let l = self.block_length;
        self.counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(move |(code, &c)| {
                let s = (0..l)
                    .rev()
                    .map(|k| if (code >> k) & 1 == 1 { '1' } else { '0' })
                    .collect();
                (s, c)
            })
    }

    /// Plug-in Shannon entropy of the pattern frequencies, in nats.
    pub fn entropy(&self) -> f64 {
        // Summed in sorted order so tables with the same count multiset
        // (relabeled patterns) give bit-identical entropies.
        let mut nonzero: Vec<u64> = self.counts.iter().copied().filter(|&c| c > 0).collect();
        nonzero.sort_unstable();
        let total = self.total as f64;
        -nonzero
            .into_iter()
            .map(|c| {
                let p = c as f64 / total;
                p * p.ln()
            })
            .sum::<f64>()
    }
}

fn check_block_length(l: usize) -> Result<()> {
    if l == 0 || l > MAX_BLOCK_LENGTH {
        return Err(Error::InvalidInput(format!(
            "block length must be in 1..={MAX_BLOCK_LENGTH}, got {l}"
        )));
    }
    Ok(())
}

/// `H^L`: entropy of the length-`l` blocks over all `n − l + 1` windows.
pub fn block_entropy(bits: &BinarySeries, l: usize) -> Result<f64> {
    Ok(BlockEntropyTable::from_bits(bits, l)?.entropy())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InefficiencyResult {
    /// `ln 2 + H^L − H^{L+1}` in nats.
    pub i_star: f64,
    /// Block length `L`.
    pub l: usize,
    /// Number of `(L+1)`-blocks counted.
    pub n_blocks: u64,
}

/// Inefficiency index `I_*^{L+1}`.
///
/// `H^{L+1}` counts all `n − L` overlapping blocks of length `L + 1`, and
/// `H^L` is the entropy of their length-`L` prefixes, so both entropies
/// describe the same sample and `0 ≤ I_* ≤ ln 2` holds exactly.
pub fn inefficiency_index(bits: &BinarySeries, l: usize) -> Result<InefficiencyResult> {
    check_block_length(l)?;
    check_block_length(l + 1)?;
    let b = bits.bits();
    if b.len() < l + 1 {
        return Err(Error::InsufficientData(format!(
            "{} bits cannot hold a block of length {}",
            b.len(),
            l + 1
        )));
    }
    let joint = BlockEntropyTable::count(b, l + 1, b.len() - l);
    let h_next = joint.entropy();
    let h_prefix = joint.prefix_marginal().entropy();
    Ok(InefficiencyResult {
        i_star: LN_2 + (h_prefix - h_next),
        l,
        n_blocks: joint.total(),
    })
}

/// Inefficiency index of the signs of `values`.
pub fn inefficiency_of_returns(values: &[f64], l: usize) -> Result<InefficiencyResult> {
    inefficiency_index(&crate::series::binarize(values)?, l)
}
