//! Lloyd's k-means with k-means++ seeding.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::bovw::nearest_centroid;
use super::words::{squared_distance, Word, WORD_DIM};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub max_iter: usize,
    /// Stop once no centroid moves farther than this (Euclidean).
    pub tol: f64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self { max_iter: 300, tol: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub centroids: Vec<Word>,
    /// Within-cluster sum of squares after each assignment step.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn distinct_count(words: &[Word]) -> usize {
    words
        .iter()
        .map(|w| w.map(f32::to_bits))
        .collect::<HashSet<[u32; WORD_DIM]>>()
        .len()
}

fn seed_plus_plus(words: &[Word], k: usize, rng: &mut ChaCha8Rng) -> Vec<Word> {
    let mut centroids = Vec::with_capacity(k);
    centroids.push(words[rng.random_range(0..words.len())]);
    let mut d2: Vec<f64> = words
        .par_iter()
        .map(|w| squared_distance(w, &centroids[0]) as f64)
        .collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 {
                    pick = Some(i);
                    if target < d {
                        break;
                    }
                    target -= d;
                }
            }
            pick.expect("positive mass")
        } else {
            rng.random_range(0..words.len())
        };
        let c = words[next];
        centroids.push(c);
        d2.par_iter_mut()
            .zip(words.par_iter())
            .for_each(|(d, w)| *d = d.min(squared_distance(w, &c) as f64));
    }
    centroids
}

/// Clusters `words` into `k` centroids. Deterministic for a fixed seed.
pub fn kmeans(words: &[Word], k: usize, seed: u64, opts: KMeansOptions) -> Result<KMeansFit> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    let distinct = distinct_count(words);
    if distinct < k {
        return Err(Error::invalid(format!(
            "only {distinct} distinct visual words for k = {k}; use a smaller vocabulary size"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_plus_plus(words, k, &mut rng);
    let mut inertia_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let assign: Vec<(usize, f64)> = words
            .par_iter()
            .map(|w| {
                let c = nearest_centroid(w, &centroids);
                (c, squared_distance(w, &centroids[c]) as f64)
            })
            .collect();
        inertia_history.push(assign.iter().map(|a| a.1).sum());

        let mut sums = vec![[0.0f64; WORD_DIM]; k];
        let mut counts = vec![0usize; k];
        for (w, &(c, _)) in words.iter().zip(&assign) {
            counts[c] += 1;
            for (s, &v) in sums[c].iter_mut().zip(w) {
                *s += v as f64;
            }
        }

        let mut next = centroids.clone();
        for c in 0..k {
            if counts[c] > 0 {
                let n = counts[c] as f64;
                for (dst, s) in next[c].iter_mut().zip(&sums[c]) {
                    *dst = (s / n) as f32;
                }
            }
        }
        // re-seed empty clusters from the points farthest from their centroid
        let empty: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
        if !empty.is_empty() {
            let mut order: Vec<usize> = (0..words.len()).collect();
            order.sort_by(|&a, &b| assign[b].1.total_cmp(&assign[a].1).then(a.cmp(&b)));
            for (c, &p) in empty.iter().zip(&order) {
                next[*c] = words[p];
            }
        }

        let shift = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| (squared_distance(a, b) as f64).sqrt())
            .fold(0.0, f64::max);
        centroids = next;
        if shift < opts.tol && empty.is_empty() {
            converged = true;
            break;
        }
    }

    Ok(KMeansFit {
        centroids,
        inertia_history,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn embed(values: &[f32]) -> Word {
        let mut w = [0.0f32; WORD_DIM];
        w[..values.len()].copy_from_slice(values);
        w
    }

    fn sorted(mut v: Vec<Word>) -> Vec<Word> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn k_distinct_words_are_their_own_centroids() {
        let words: Vec<Word> = (0..6).map(|i| embed(&[i as f32, (i * i) as f32])).collect();
        let fit = kmeans(&words, 6, 3, KMeansOptions::default()).unwrap();
        assert_eq!(sorted(fit.centroids), sorted(words));
    }

    #[test]
    fn two_blobs_recover_means() {
        let words = vec![
            embed(&[0.0, 0.0]),
            embed(&[0.0, 1.0]),
            embed(&[10.0, 10.0]),
            embed(&[10.0, 11.0]),
        ];
        // brute-force oracle: the only 2-partition with minimal SSE splits the blobs
        let fit = kmeans(&words, 2, 11, KMeansOptions::default()).unwrap();
        assert!(fit.converged);
        assert_eq!(sorted(fit.centroids), vec![embed(&[0.0, 0.5]), embed(&[10.0, 10.5])]);
    }

    #[test]
    fn deterministic_for_seed() {
        let words: Vec<Word> = (0..200).map(|i| embed(&[(i % 17) as f32, (i % 13) as f32 * 0.5])).collect();
        let a = kmeans(&words, 5, 42, KMeansOptions::default()).unwrap();
        let b = kmeans(&words, 5, 42, KMeansOptions::default()).unwrap();
        assert_eq!(a.centroids, b.centroids);
    }

    #[test]
    fn too_few_distinct_words() {
        let words = vec![embed(&[1.0]); 10];
        let err = kmeans(&words, 2, 0, KMeansOptions::default()).unwrap_err();
        assert!(err.to_string().contains("smaller"));
    }

    #[test]
    fn inertia_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let words: Vec<Word> = (0..400)
            .map(|_| embed(&[rng.random::<f32>() * 10.0, rng.random::<f32>(), rng.random::<f32>() * 3.0]))
            .collect();
        let fit = kmeans(&words, 12, 5, KMeansOptions::default()).unwrap();
        for pair in fit.inertia_history.windows(2) {
            assert!(pair[1] <= pair[0] * (1.0 + 1e-6), "{pair:?}");
        }
    }
}
