//! Combining the HTML and visual channel scores.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::evaluate::{candidate_grid, grid_search_cv, Candidate};
use crate::learn::{fit_score_minmax, score_rbf, train_rbf_svm, RbfCombinerModel, ScoreNormalizer};
use crate::{Error, Result};

/// Channel scores of one page. `label` is +1 for phishing, −1 for legitimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScorePair {
    pub s1: f64,
    pub s2: f64,
    pub label: Option<f64>,
}

impl ScorePair {
    pub fn new(s1: f64, s2: f64) -> Self {
        Self { s1, s2, label: None }
    }

    pub fn labeled(s1: f64, s2: f64, label: f64) -> Self {
        Self {
            s1,
            s2,
            label: Some(label),
        }
    }

    pub fn point(&self) -> [f64; 2] {
        [self.s1, self.s2]
    }

    fn is_phish(&self) -> bool {
        self.label.is_some_and(|l| l > 0.0)
    }
}

pub fn fuse_max(s: &ScorePair) -> f64 {
    s.s1.max(s.s2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionScheme {
    Max,
    Trained,
    Adversarial,
}

impl FusionScheme {
    pub const ALL: [FusionScheme; 3] = [FusionScheme::Max, FusionScheme::Trained, FusionScheme::Adversarial];

    pub fn name(self) -> &'static str {
        match self {
            FusionScheme::Max => "max",
            FusionScheme::Trained => "trained",
            FusionScheme::Adversarial => "adversarial",
        }
    }
}

/// Distribution of the simulated attacked HTML score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AttackDistribution {
    Uniform,
    Beta { alpha: f64, beta: f64 },
}

/// What the augmentation fraction is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FractionBase {
    /// The whole training score set.
    All,
    /// The phishing part of it.
    Phish,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversarialOptions {
    pub fraction: f64,
    pub base: FractionBase,
    pub distribution: AttackDistribution,
}

impl Default for AdversarialOptions {
    fn default() -> Self {
        Self {
            fraction: 0.3,
            base: FractionBase::All,
            distribution: AttackDistribution::Uniform,
        }
    }
}

/// Appends simulated attacks: copies of randomly drawn phishing pairs whose
/// HTML score is replaced by a random draw in `[0, 1]`.
pub fn augment_adversarial(scores: &[ScorePair], opts: &AdversarialOptions, seed: u64) -> Result<Vec<ScorePair>> {
    augment_with_sources(scores, opts, seed).map(|(v, _)| v)
}

/// As [`augment_adversarial`], also returning for every output pair the
/// index of the input pair it came from.
pub(crate) fn augment_with_sources(
    scores: &[ScorePair],
    opts: &AdversarialOptions,
    seed: u64,
) -> Result<(Vec<ScorePair>, Vec<usize>)> {
    if !(0.0..=1.0).contains(&opts.fraction) {
        return Err(Error::invalid(format!("fraction must lie in [0, 1], got {}", opts.fraction)));
    }
    let phish: Vec<usize> = (0..scores.len()).filter(|&i| scores[i].is_phish()).collect();
    let base = match opts.base {
        FractionBase::All => scores.len(),
        FractionBase::Phish => phish.len(),
    };
    let extra = (opts.fraction * base as f64).round() as usize;
    let mut out = scores.to_vec();
    let mut sources: Vec<usize> = (0..scores.len()).collect();
    if extra == 0 {
        return Ok((out, sources));
    }
    if phish.is_empty() {
        return Err(Error::invalid("adversarial augmentation needs phishing-labeled pairs"));
    }
    let beta = match opts.distribution {
        AttackDistribution::Uniform => None,
        AttackDistribution::Beta { alpha, beta } => Some(
            Beta::new(alpha, beta).map_err(|e| Error::invalid(format!("bad beta parameters: {e}")))?,
        ),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra {
        let src = phish[rng.random_range(0..phish.len())];
        let s1 = match &beta {
            None => rng.random::<f64>(),
            Some(b) => b.sample(&mut rng),
        };
        out.push(ScorePair::labeled(s1, scores[src].s2, 1.0));
        sources.push(src);
    }
    Ok((out, sources))
}

/// Settings for fitting the trained combiners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionTraining {
    pub c_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub folds: usize,
    pub adversarial: AdversarialOptions,
}

impl Default for FusionTraining {
    fn default() -> Self {
        let grid = vec![0.001, 0.01, 0.1, 1.0, 10.0, 100.0];
        Self {
            c_grid: grid.clone(),
            gamma_grid: grid,
            folds: 5,
            adversarial: AdversarialOptions::default(),
        }
    }
}

/// A fitted fusion rule. `fuse` takes raw channel scores.
///
/// The max rule compares raw scores directly, so its zero threshold means
/// "either channel flags the page". The trained rules first map each channel
/// score to `[0, 1]` with the stored normalizers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionModel {
    pub scheme: FusionScheme,
    pub normalizers: Option<[ScoreNormalizer; 2]>,
    pub combiner: Option<RbfCombinerModel>,
}

impl FusionModel {
    pub fn max() -> Self {
        Self {
            scheme: FusionScheme::Max,
            normalizers: None,
            combiner: None,
        }
    }

    /// Channel scores as seen by the combiner.
    pub fn normalize(&self, s1: f64, s2: f64) -> [f64; 2] {
        match &self.normalizers {
            Some([n1, n2]) => [n1.apply(s1), n2.apply(s2)],
            None => [s1, s2],
        }
    }

    pub fn fuse(&self, s1: f64, s2: f64) -> f64 {
        match &self.combiner {
            None => fuse_max(&ScorePair::new(s1, s2)),
            Some(m) => score_rbf(m, self.normalize(s1, s2)),
        }
    }
}

/// Fits `scheme` on raw out-of-fold channel scores. `groups` ties pairs of
/// the same family together during cross-validation.
pub fn train_fusion(
    raw: &[ScorePair],
    groups: &[usize],
    scheme: FusionScheme,
    training: &FusionTraining,
    seed: u64,
) -> Result<FusionModel> {
    if scheme == FusionScheme::Max {
        return Ok(FusionModel::max());
    }
    if raw.iter().any(|p| p.label.is_none()) {
        return Err(Error::invalid("fusion training needs labeled score pairs"));
    }
    let n1 = fit_score_minmax(&raw.iter().map(|p| p.s1).collect::<Vec<_>>())?;
    let n2 = fit_score_minmax(&raw.iter().map(|p| p.s2).collect::<Vec<_>>())?;
    let normalized: Vec<ScorePair> = raw
        .iter()
        .map(|p| ScorePair {
            s1: n1.apply(p.s1),
            s2: n2.apply(p.s2),
            label: p.label,
        })
        .collect();
    let (pairs, sources) = match scheme {
        FusionScheme::Adversarial => augment_with_sources(&normalized, &training.adversarial, seed)?,
        _ => (normalized, (0..raw.len()).collect()),
    };
    let combiner = fit_combiner(&pairs, &sources.iter().map(|&s| groups[s]).collect::<Vec<_>>(), training, seed)?;
    Ok(FusionModel {
        scheme,
        normalizers: Some([n1, n2]),
        combiner: Some(combiner),
    })
}

/// Tunes (C, γ) by cross-validation and fits the RBF combiner on all pairs.
pub fn fit_combiner(
    pairs: &[ScorePair],
    groups: &[usize],
    training: &FusionTraining,
    seed: u64,
) -> Result<RbfCombinerModel> {
    let points: Vec<[f64; 2]> = pairs.iter().map(ScorePair::point).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.label.unwrap_or(-1.0)).collect();
    let grid = candidate_grid(&training.c_grid, Some(&training.gamma_grid));
    let outcome = grid_search_cv(&y, groups, &grid, training.folds, seed, |cand: &Candidate, train, test| {
        let gamma = cand.gamma.unwrap_or(1.0);
        let tp: Vec<[f64; 2]> = train.iter().map(|&i| points[i]).collect();
        let ty: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let m = train_rbf_svm(&tp, &ty, cand.c, gamma)?;
        Ok(test.iter().map(|&i| score_rbf(&m, points[i])).collect())
    })?;
    let best = outcome.best;
    train_rbf_svm(&points, &y, best.c, best.gamma.unwrap_or(1.0))
}
