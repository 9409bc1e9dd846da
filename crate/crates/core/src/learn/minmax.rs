use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Min-max normalizer for classifier scores, clipping to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreNormalizer {
    pub low: f64,
    pub high: f64,
}

pub fn fit_score_minmax(scores: &[f64]) -> Result<ScoreNormalizer> {
    if scores.len() < 2 {
        return Err(Error::invalid(format!("score normalizer needs at least 2 values, got {}", scores.len())));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("non-finite score"));
    }
    let low = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let high = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if low == high {
        return Err(Error::invalid(format!("all scores equal {low}; range undefined")));
    }
    Ok(ScoreNormalizer { low, high })
}

impl ScoreNormalizer {
    pub fn apply(&self, s: f64) -> f64 {
        ((s - self.low) / (self.high - self.low)).clamp(0.0, 1.0)
    }
}
