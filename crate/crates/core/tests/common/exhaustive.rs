//! Brute-force attack oracle: every choice of exactly `m` features, each set
//! to 0 or 1.

use pagedelta::learn::LinearSvmModel;

fn score(m: &LinearSvmModel, v: &[f64]) -> f64 {
    m.weights.iter().zip(v).map(|(w, x)| w * x).sum::<f64>() + m.bias
}

/// Minimum score over all `C(d, m) · 2^m` settings of exactly `m` features.
pub fn exhaustive_min(model: &LinearSvmModel, x: &[f64], m: usize) -> f64 {
    let d = x.len();
    let mut best = f64::INFINITY;
    for subset in 0u32..(1 << d) {
        if subset.count_ones() as usize != m {
            continue;
        }
        let idx: Vec<usize> = (0..d).filter(|i| subset >> i & 1 == 1).collect();
        for bits in 0u32..(1 << m) {
            let mut v = x.to_vec();
            for (k, &i) in idx.iter().enumerate() {
                v[i] = (bits >> k & 1) as f64;
            }
            best = best.min(score(model, &v));
        }
    }
    best
}

/// Number of settings visited by [`exhaustive_min`].
pub fn settings_count(d: usize, m: usize) -> u64 {
    let mut c = 1u64;
    for k in 0..m as u64 {
        c = c * (d as u64 - k) / (k + 1);
    }
    c << m
}
