use std::collections::HashMap;

use super::vocabulary::Vocabulary;
use super::words::{squared_distance, Word};

/// Index of the closest centroid; ties go to the lowest index.
#[inline]
pub fn nearest_centroid(word: &Word, centroids: &[Word]) -> usize {
    let mut best = 0;
    let mut best_d = f32::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d = squared_distance(word, c);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

fn word_key(word: &Word) -> u64 {
    // FNV-1a over the bit patterns
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in word {
        h ^= v.to_bits() as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Normalized histogram of nearest-centroid assignments. An empty word list
/// yields the all-zero histogram.
pub fn bovw_histogram(words: &[Word], vocab: &Vocabulary) -> Vec<f64> {
    let mut counts = vec![0usize; vocab.k()];
    // snapshots repeat many words (flat regions, repeated glyphs); memoize
    let mut seen: HashMap<u64, Vec<(usize, usize)>> = HashMap::new();
    for (i, word) in words.iter().enumerate() {
        let bucket = seen.entry(word_key(word)).or_default();
        let hit = bucket.iter().find(|(j, _)| &words[*j] == word).map(|&(_, c)| c);
        let c = match hit {
            Some(c) => c,
            None => {
                let c = nearest_centroid(word, &vocab.centroids);
                bucket.push((i, c));
                c
            }
        };
        counts[c] += 1;
    }
    if words.is_empty() {
        return vec![0.0; vocab.k()];
    }
    let n = words.len() as f64;
    counts.into_iter().map(|c| c as f64 / n).collect()
}

/// Collapses repeated words into `(word, multiplicity)` pairs, keeping
/// first-occurrence order.
pub fn dedup_words(words: &[Word]) -> Vec<(Word, u32)> {
    let mut out: Vec<(Word, u32)> = Vec::new();
    let mut seen: HashMap<u64, Vec<usize>> = HashMap::new();
    for word in words {
        let bucket = seen.entry(word_key(word)).or_default();
        match bucket.iter().find(|&&j| &out[j].0 == word) {
            Some(&j) => out[j].1 += 1,
            None => {
                bucket.push(out.len());
                out.push((*word, 1));
            }
        }
    }
    out
}

/// Same as [`bovw_histogram`] over a deduplicated word list.
pub fn bovw_histogram_counted(words: &[(Word, u32)], vocab: &Vocabulary) -> Vec<f64> {
    let mut counts = vec![0u64; vocab.k()];
    let mut total = 0u64;
    for (word, n) in words {
        counts[nearest_centroid(word, &vocab.centroids)] += *n as u64;
        total += *n as u64;
    }
    if total == 0 {
        return vec![0.0; vocab.k()];
    }
    counts.into_iter().map(|c| c as f64 / total as f64).collect()
}
