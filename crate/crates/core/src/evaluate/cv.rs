use serde::{Deserialize, Serialize};

use super::folds::{fold_split, stratified_group_folds};
use super::roc::compute_roc;
use crate::{Error, Result};

/// One grid point. `gamma` is `None` for linear models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub c: f64,
    pub gamma: Option<f64>,
}

/// Cartesian grid, deduplicated and sorted by C then γ.
pub fn candidate_grid(c_grid: &[f64], gamma_grid: Option<&[f64]>) -> Vec<Candidate> {
    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let cs = sorted(c_grid);
    match gamma_grid {
        None => cs.into_iter().map(|c| Candidate { c, gamma: None }).collect(),
        Some(g) => {
            let gs = sorted(g);
            cs.iter()
                .flat_map(|&c| gs.iter().map(move |&g| Candidate { c, gamma: Some(g) }))
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub candidate: Candidate,
    pub mean_auc: f64,
    pub mean_balanced_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome {
    pub best: Candidate,
    pub scores: Vec<CandidateScore>,
}

fn balanced_accuracy(scores: &[f64], y: &[f64]) -> f64 {
    let mut hit = [0usize; 2];
    let mut total = [0usize; 2];
    for (&s, &l) in scores.iter().zip(y) {
        let cls = usize::from(l > 0.0);
        total[cls] += 1;
        if (s >= 0.0) == (l > 0.0) {
            hit[cls] += 1;
        }
    }
    (hit[0] as f64 / total[0] as f64 + hit[1] as f64 / total[1] as f64) / 2.0
}

/// k-fold grid search with group-aware stratified folds.
///
/// `fit_score(candidate, train, test)` trains on the `train` indices and
/// returns decision values for the `test` indices. The winner has the highest
/// mean fold AUC; candidates tied on AUC are separated by mean balanced
/// accuracy at the zero threshold, then by grid order (smallest C, then
/// smallest γ).
pub fn grid_search_cv<F>(
    y: &[f64],
    groups: &[usize],
    candidates: &[Candidate],
    folds: usize,
    seed: u64,
    mut fit_score: F,
) -> Result<CvOutcome>
where
    F: FnMut(&Candidate, &[usize], &[usize]) -> Result<Vec<f64>>,
{
    let mut grid = candidates.to_vec();
    grid.sort_by(|a, b| {
        a.c.total_cmp(&b.c)
            .then(a.gamma.unwrap_or(0.0).total_cmp(&b.gamma.unwrap_or(0.0)))
    });
    grid.dedup();
    if grid.is_empty() {
        return Err(Error::invalid("empty parameter grid"));
    }
    let assignment = stratified_group_folds(y, groups, folds, seed)?;
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..folds).map(|f| fold_split(&assignment, f)).collect();
    for (f, (train, test)) in splits.iter().enumerate() {
        for part in [train, test] {
            let pos = part.iter().filter(|&&i| y[i] > 0.0).count();
            if pos == 0 || pos == part.len() {
                return Err(Error::invalid(format!("fold {f} is degenerate: a class is missing")));
            }
        }
    }

    let mut scores = Vec::with_capacity(grid.len());
    for cand in &grid {
        let (mut auc, mut bacc) = (0.0, 0.0);
        for (train, test) in &splits {
            let s = fit_score(cand, train, test)?;
            let yt: Vec<f64> = test.iter().map(|&i| y[i]).collect();
            auc += compute_roc(&s, &yt)?.auc();
            bacc += balanced_accuracy(&s, &yt);
        }
        scores.push(CandidateScore {
            candidate: *cand,
            mean_auc: auc / folds as f64,
            mean_balanced_accuracy: bacc / folds as f64,
        });
    }
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        let b = &scores[best];
        if s.mean_auc > b.mean_auc || (s.mean_auc == b.mean_auc && s.mean_balanced_accuracy > b.mean_balanced_accuracy) {
            best = i;
        }
    }
    Ok(CvOutcome {
        best: scores[best].candidate,
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Vec<f64>, Vec<usize>) {
        let y: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let g: Vec<usize> = (0..20).map(|i| i / 2).collect();
        (y, g)
    }

    #[test]
    fn grid_sizes() {
        let g = [0.001, 0.01, 0.1, 1.0, 10.0, 100.0];
        assert_eq!(candidate_grid(&g, None).len(), 6);
        assert_eq!(candidate_grid(&g, Some(&g)).len(), 36);
        let dup = [1.0, 0.1, 1.0];
        assert_eq!(candidate_grid(&dup, None).len(), 2);
        assert_eq!(candidate_grid(&dup, None)[0].c, 0.1);
    }

    #[test]
    fn single_point_is_returned() {
        let (y, g) = toy();
        let only = Candidate { c: 3.0, gamma: None };
        let out = grid_search_cv(&y, &g, &[only], 5, 1, |_, _, test| Ok(test.iter().map(|&i| y[i]).collect())).unwrap();
        assert_eq!(out.best, only);
    }

    #[test]
    fn picks_best_auc_and_breaks_ties_by_order() {
        let (y, g) = toy();
        let grid = candidate_grid(&[0.1, 1.0, 10.0], None);
        // C = 10 inverts the scores, the other two are perfect
        let f = |c: &Candidate, _: &[usize], test: &[usize]| {
            Ok(test.iter().map(|&i| if c.c == 10.0 { -y[i] } else { y[i] }).collect())
        };
        let out = grid_search_cv(&y, &g, &grid, 5, 1, f).unwrap();
        assert_eq!(out.best.c, 0.1);
        let dup: Vec<Candidate> = grid.iter().chain(&grid).copied().collect();
        assert_eq!(grid_search_cv(&y, &g, &dup, 5, 1, f).unwrap().best, out.best);
    }

    #[test]
    fn auc_ties_prefer_correct_sign() {
        let (y, g) = toy();
        let grid = candidate_grid(&[0.1, 1.0], None);
        // both rank perfectly; only C = 1 puts phish above zero
        let f = |c: &Candidate, _: &[usize], test: &[usize]| {
            Ok(test.iter().map(|&i| if c.c == 1.0 { y[i] } else { y[i] - 5.0 }).collect())
        };
        assert_eq!(grid_search_cv(&y, &g, &grid, 5, 1, f).unwrap().best.c, 1.0);
    }

    #[test]
    fn degenerate_fold_is_error() {
        let y = vec![1.0, -1.0, -1.0, -1.0, -1.0, -1.0];
        let g = vec![0, 1, 2, 3, 4, 5];
        let r = grid_search_cv(&y, &g, &candidate_grid(&[1.0], None), 3, 0, |_, _, t| Ok(vec![0.0; t.len()]));
        assert!(r.is_err());
    }
}
