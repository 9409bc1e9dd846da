//! Worst-case evasion of the HTML channel: an attacker who knows the model
//! sets features to 0 or 1, greedily, to drive the HTML score down.

use serde::{Deserialize, Serialize};

use crate::html::{HtmlDeltaVector, HTML_FEATURE_COUNT};
use crate::learn::LinearSvmModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackBudget {
    pub max_features: usize,
}

impl AttackBudget {
    pub fn new(max_features: usize) -> Result<Self> {
        if max_features > HTML_FEATURE_COUNT {
            return Err(Error::invalid(format!(
                "attack budget {max_features} exceeds the {HTML_FEATURE_COUNT} HTML features"
            )));
        }
        Ok(Self { max_features })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AttackTrace {
    pub modified_indices: Vec<usize>,
    /// Score after each modification.
    pub scores: Vec<f64>,
}

/// A score that is a sum of independent per-feature terms plus a bias.
pub trait SeparableScore {
    fn dim(&self) -> usize;
    fn bias(&self) -> f64;
    fn term(&self, feature: usize, value: f64) -> f64;

    fn separable_score(&self, x: &[f64]) -> f64 {
        x.iter().enumerate().map(|(i, &v)| self.term(i, v)).sum::<f64>() + self.bias()
    }
}

impl SeparableScore for LinearSvmModel {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn bias(&self) -> f64 {
        self.bias
    }

    fn term(&self, feature: usize, value: f64) -> f64 {
        self.weights[feature] * value
    }
}

/// Greedy box attack over the admissible values `{0, 1}`.
///
/// Each step takes the untouched feature whose best setting lowers the score
/// most (lowest index on ties); the attack stops at the budget or when no
/// setting lowers the score.
pub fn greedy_attack<M: SeparableScore + ?Sized>(model: &M, x: &[f64], budget: usize) -> Result<(Vec<f64>, AttackTrace)> {
    if x.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            actual: x.len(),
        });
    }
    let mut v = x.to_vec();
    let mut touched = vec![false; v.len()];
    let mut trace = AttackTrace::default();
    for _ in 0..budget {
        let mut best: Option<(usize, f64, f64)> = None;
        for i in (0..v.len()).filter(|&i| !touched[i]) {
            let now = model.term(i, v[i]);
            let (t0, t1) = (model.term(i, 0.0), model.term(i, 1.0));
            let (target, low) = if t1 < t0 { (1.0, t1) } else { (0.0, t0) };
            let gain = now - low;
            if gain > 0.0 && best.is_none_or(|(_, g, _)| gain > g) {
                best = Some((i, gain, target));
            }
        }
        let Some((i, _, target)) = best else { break };
        v[i] = target;
        touched[i] = true;
        trace.modified_indices.push(i);
        trace.scores.push(model.separable_score(&v));
    }
    Ok((v, trace))
}

/// Attacks a raw HTML delta vector under a linear model over the same
/// features.
pub fn optimal_html_attack(
    model: &LinearSvmModel,
    delta: &HtmlDeltaVector,
    budget: AttackBudget,
) -> Result<(HtmlDeltaVector, AttackTrace)> {
    let (v, trace) = greedy_attack(model, &delta.to_array(), budget.max_features)?;
    Ok((HtmlDeltaVector::from_slice(&v)?, trace))
}
