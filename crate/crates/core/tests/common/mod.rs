//! Naive reference implementations, written independently of the crate.
#![allow(dead_code)]

use std::collections::BTreeMap;

/// Up and down run-length histograms by direct scanning from each run start.
pub fn naive_runs(x: &[f64]) -> (BTreeMap<usize, f64>, BTreeMap<usize, f64>) {
    let sign = |i: usize| -> i8 {
        if x[i + 1] > x[i] {
            1
        } else if x[i + 1] < x[i] {
            -1
        } else {
            0
        }
    };
    let (mut up, mut down) = (BTreeMap::new(), BTreeMap::new());
    let n = x.len() - 1;
    for start in 0..n {
        if start > 0 && sign(start) == sign(start - 1) {
            continue;
        }
        let s = sign(start);
        let mut len = 0;
        while start + len < n && sign(start + len) == s {
            len += 1;
        }
        match s {
            1 => *up.entry(len).or_insert(0.0) += 1.0,
            -1 => *down.entry(len).or_insert(0.0) += 1.0,
            _ => {}
        }
    }
    (up, down)
}

/// Smoothed KL of two count maps over their union support.
pub fn naive_kl(p: &BTreeMap<usize, f64>, q: &BTreeMap<usize, f64>, alpha: f64) -> f64 {
    let keys: Vec<usize> = p
        .keys()
        .chain(q.keys())
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let pt: f64 = keys.iter().map(|k| p.get(k).unwrap_or(&0.0) + alpha).sum();
    let qt: f64 = keys.iter().map(|k| q.get(k).unwrap_or(&0.0) + alpha).sum();
    let mut kl = 0.0;
    for k in &keys {
        let a = (p.get(k).unwrap_or(&0.0) + alpha) / pt;
        let b = (q.get(k).unwrap_or(&0.0) + alpha) / qt;
        if a > 0.0 {
            kl += a * (a / b).ln();
        }
    }
    kl
}

/// Plug-in entropy of all overlapping length-`l` blocks, patterns as strings.
pub fn naive_block_entropy(bits: &[u8], l: usize) -> f64 {
    let mut counts: BTreeMap<String, f64> = BTreeMap::new();
    for w in bits.windows(l) {
        let key: String = w.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect();
        *counts.entry(key).or_insert(0.0) += 1.0;
    }
    let total: f64 = counts.values().sum();
    -counts
        .values()
        .map(|c| (c / total) * (c / total).ln())
        .sum::<f64>()
}

/// All binary strings of length `n`.
pub fn all_strings(n: usize) -> impl Iterator<Item = Vec<u8>> {
    (0u32..(1 << n)).map(move |code| (0..n).map(|k| ((code >> k) & 1) as u8).collect())
}

pub fn walk_as_f64(w: Vec<i64>) -> Vec<f64> {
    w.into_iter().map(|x| x as f64).collect()
}
