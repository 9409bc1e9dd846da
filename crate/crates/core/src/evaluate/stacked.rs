use super::folds::{fold_split, stratified_group_folds};
use crate::fusion::ScorePair;
use crate::learn::{fit_score_minmax, ScoreNormalizer};
use crate::pipeline::{pairs_from, train_channel, TrainingSet};
use crate::Result;

/// Out-of-fold channel scores of a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedScores {
    /// Raw decision values, one pair per training page, in input order.
    pub raw: Vec<ScorePair>,
    /// The same pairs min-max normalized to `[0, 1]`.
    pub normalized: Vec<ScorePair>,
    pub normalizers: [ScoreNormalizer; 2],
    /// Outer fold each page was scored in.
    pub fold_of: Vec<usize>,
}

fn subset(rows: &[Vec<f64>], idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter().map(|&i| rows[i].clone()).collect()
}

/// Outer `folds`-fold split by family; in each fold both channels are tuned
/// (inner cross-validation) and trained on the remaining families, then
/// score the held-out ones.
pub fn stacked_scores(set: &TrainingSet, c_grid: &[f64], folds: usize, seed: u64) -> Result<StackedScores> {
    let n = set.y.len();
    let fold_of = stratified_group_folds(&set.y, &set.groups, folds, seed)?;
    let mut s1 = vec![0.0; n];
    let mut s2 = vec![0.0; n];
    for f in 0..folds {
        let (train, held) = fold_split(&fold_of, f);
        let y: Vec<f64> = train.iter().map(|&i| set.y[i]).collect();
        let groups: Vec<usize> = train.iter().map(|&i| set.groups[i]).collect();
        let inner_seed = seed.wrapping_add(f as u64 + 1);
        let (html, _) = train_channel(&subset(&set.html, &train), &y, &groups, c_grid, folds, inner_seed)?;
        let (visual, _) = train_channel(&subset(&set.visual, &train), &y, &groups, c_grid, folds, inner_seed)?;
        for &i in &held {
            s1[i] = html.score(&set.html[i])?;
            s2[i] = visual.score(&set.visual[i])?;
        }
    }
    let raw = pairs_from(&s1, &s2, &set.y);
    let normalizers = [fit_score_minmax(&s1)?, fit_score_minmax(&s2)?];
    let normalized = raw
        .iter()
        .map(|p| ScorePair {
            s1: normalizers[0].apply(p.s1),
            s2: normalizers[1].apply(p.s2),
            label: p.label,
        })
        .collect();
    Ok(StackedScores {
        raw,
        normalized,
        normalizers,
        fold_of,
    })
}
