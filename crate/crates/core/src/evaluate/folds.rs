use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Assigns every sample a fold in `0..k` so that groups are never split and
/// each fold receives a similar share of both classes.
///
/// Groups are shuffled with `seed`, then placed largest-first into the fold
/// whose class counts stay closest to an even share.
pub fn stratified_group_folds(y: &[f64], groups: &[usize], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {k}")));
    }
    if y.len() != groups.len() {
        return Err(Error::invalid("labels and groups disagree in size"));
    }
    let mut members: BTreeMap<usize, [usize; 2]> = BTreeMap::new();
    for (&g, &l) in groups.iter().zip(y) {
        members.entry(g).or_default()[usize::from(l > 0.0)] += 1;
    }
    if members.len() < k {
        return Err(Error::invalid(format!("{} groups cannot fill {k} folds", members.len())));
    }
    let mut order: Vec<(usize, [usize; 2])> = members.into_iter().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order.sort_by_key(|(_, c)| std::cmp::Reverse(c[0] + c[1]));

    let totals = order.iter().fold([0usize; 2], |t, (_, c)| [t[0] + c[0], t[1] + c[1]]);
    let mut load = vec![[0usize; 2]; k];
    let mut fold_of = BTreeMap::new();
    for (g, c) in &order {
        let cost = |f: usize| -> f64 {
            (0..2)
                .filter(|&cls| totals[cls] > 0)
                .map(|cls| (load[f][cls] + c[cls]) as f64 / totals[cls] as f64)
                .sum()
        };
        let best = (0..k).fold(0, |b, f| if cost(f) < cost(b) { f } else { b });
        load[best][0] += c[0];
        load[best][1] += c[1];
        fold_of.insert(*g, best);
    }
    Ok(groups.iter().map(|g| fold_of[g]).collect())
}

/// Sample indices of (train, test) for fold `f`.
pub fn fold_split(assignment: &[usize], f: usize) -> (Vec<usize>, Vec<usize>) {
    (0..assignment.len()).partition(|&i| assignment[i] != f)
}
