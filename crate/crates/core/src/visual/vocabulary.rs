use std::fmt::Write as _;
use std::path::Path;

use super::kmeans::{kmeans, KMeansOptions};
use super::words::{Word, WORD_DIM};
use crate::{Error, Result};
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_VOCABULARY_SIZE: usize = 300;

const MAGIC: &str = "pagedelta-vocabulary";
const FORMAT_VERSION: u32 = 1;

/// Visual-word centroids.
///
/// On disk the vocabulary is a UTF-8 text file:
///
/// ```text
/// pagedelta-vocabulary 1
/// k <K>
/// dim 124
/// seed <u64>
/// source <free text to end of line>
/// <K lines of 124 space-separated f32 values, shortest round-trip form>
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    pub centroids: Vec<Word>,
    pub seed: u64,
    pub source: String,
}

impl Vocabulary {
    pub fn new(centroids: Vec<Word>, seed: u64, source: impl Into<String>) -> Result<Self> {
        if centroids.is_empty() {
            return Err(Error::invalid("vocabulary needs at least one centroid"));
        }
        Ok(Self {
            centroids,
            seed,
            source: source.into(),
        })
    }

    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC} {FORMAT_VERSION}");
        let _ = writeln!(out, "k {}", self.k());
        let _ = writeln!(out, "dim {WORD_DIM}");
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "source {}", self.source.replace('\n', " "));
        for c in &self.centroids {
            let row: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Schema(format!("vocabulary file: {msg}"));
        let mut lines = text.lines();
        let mut header = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad("truncated header"))?;
            line.strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| bad(&format!("expected `{key}` line")))
        };
        let version = header(MAGIC)?;
        if version.trim() != FORMAT_VERSION.to_string() {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let k: usize = header("k")?.trim().parse().map_err(|_| bad("bad k"))?;
        let dim: usize = header("dim")?.trim().parse().map_err(|_| bad("bad dim"))?;
        if dim != WORD_DIM {
            return Err(Error::DimensionMismatch {
                expected: WORD_DIM,
                actual: dim,
            });
        }
        let seed: u64 = header("seed")?.trim().parse().map_err(|_| bad("bad seed"))?;
        let source = header("source")?;
        let mut centroids = Vec::with_capacity(k);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let values: Vec<f32> = line
                .split_ascii_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("bad centroid value"))?;
            let word: Word = values.as_slice().try_into().map_err(|_| Error::DimensionMismatch {
                expected: WORD_DIM,
                actual: values.len(),
            })?;
            centroids.push(word);
        }
        if centroids.len() != k {
            return Err(bad(&format!("expected {k} centroids, found {}", centroids.len())));
        }
        Self::new(centroids, seed, source)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

/// k-means vocabulary over training visual words.
pub fn build_vocabulary(words: &[Word], k: usize, seed: u64) -> Result<Vocabulary> {
    build_vocabulary_with(words, k, seed, KMeansOptions::default(), "")
}

pub fn build_vocabulary_with(
    words: &[Word],
    k: usize,
    seed: u64,
    opts: KMeansOptions,
    source: &str,
) -> Result<Vocabulary> {
    let fit = kmeans(words, k, seed, opts)?;
    Vocabulary::new(fit.centroids, seed, source)
}

/// Draws at most `cap` words from a pool of `(word, multiplicity)` lists.
///
/// When the pool holds no more than `cap` words they are all returned with
/// their multiplicities; otherwise `cap` words are drawn with replacement,
/// proportionally to multiplicity.
pub fn sample_words<'a, I>(pool: I, cap: usize, seed: u64) -> Vec<Word>
where
    I: IntoIterator<Item = &'a (Word, u32)>,
{
    let pool: Vec<&(Word, u32)> = pool.into_iter().collect();
    let total: u64 = pool.iter().map(|(_, n)| *n as u64).sum();
    if total <= cap as u64 {
        return pool
            .iter()
            .flat_map(|(w, n)| std::iter::repeat_n(*w, *n as usize))
            .collect();
    }
    let dist = match WeightedIndex::new(pool.iter().map(|(_, n)| *n)) {
        Ok(d) => d,
        Err(_) => return Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cap).map(|_| pool[dist.sample(&mut rng)].0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_is_exact() {
        let centroids: Vec<Word> = (0..3)
            .map(|i| {
                let mut w = [0.0f32; WORD_DIM];
                w.iter_mut().enumerate().for_each(|(j, v)| *v = (i * 7 + j) as f32 / 3.0);
                w
            })
            .collect();
        let v = Vocabulary::new(centroids, 99, "unit test").unwrap();
        let back = Vocabulary::from_text(&v.to_text()).unwrap();
        assert_eq!(v, back);
    }

    #[test]
    fn rejects_wrong_dimension_and_count() {
        let text = "pagedelta-vocabulary 1\nk 1\ndim 3\nseed 0\nsource x\n1 2 3\n";
        assert!(matches!(
            Vocabulary::from_text(text),
            Err(Error::DimensionMismatch { expected: 124, actual: 3 })
        ));
        let text = "pagedelta-vocabulary 1\nk 2\ndim 124\nseed 0\nsource x\n";
        assert!(Vocabulary::from_text(text).is_err());
    }

    #[test]
    fn sampling_respects_cap_and_multiplicity() {
        let a = [0.0f32; WORD_DIM];
        let mut b = a;
        b[0] = 1.0;
        let pool = vec![(a, 3u32), (b, 1u32)];
        let all = sample_words(&pool, 10, 1);
        assert_eq!(all.len(), 4);
        assert_eq!(all.iter().filter(|w| **w == a).count(), 3);
        let some = sample_words(&pool, 2, 1);
        assert_eq!(some.len(), 2);
        assert_eq!(some, sample_words(&pool, 2, 1));
    }
}
