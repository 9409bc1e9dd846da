use serde::{Deserialize, Serialize};

use crate::learn::check_labels;
use crate::Result;

/// One operating point. `threshold` is the score cut-off: samples scoring at
/// or above it are flagged as phishing. The first point of every curve has
/// threshold `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub fp: f64,
    pub tp: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

/// Sweeps the distinct scores in descending order; equal scores enter
/// together.
pub fn compute_roc(scores: &[f64], labels: &[f64]) -> Result<RocCurve> {
    check_labels(labels)?;
    if scores.len() != labels.len() {
        return Err(crate::Error::invalid("scores and labels disagree in size"));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(crate::Error::invalid("NaN score"));
    }
    let pos = labels.iter().filter(|&&l| l > 0.0).count() as f64;
    let neg = labels.len() as f64 - pos;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint {
        fp: 0.0,
        tp: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let t = scores[order[i]];
        while i < order.len() && scores[order[i]] == t {
            if labels[order[i]] > 0.0 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fp: fp as f64 / neg,
            tp: tp as f64 / pos,
            threshold: t,
        });
    }
    Ok(RocCurve { points })
}

impl RocCurve {
    /// Area under the curve by the trapezoid rule (tied groups contribute
    /// half credit).
    pub fn auc(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].fp - w[0].fp) * (w[1].tp + w[0].tp) / 2.0)
            .sum()
    }

    /// Step-function TP rate at `fp`: the best TP among points whose FP does
    /// not exceed it.
    pub fn tp_at(&self, fp: f64) -> f64 {
        self.operating_point(fp).tp
    }

    fn operating_point(&self, fp_target: f64) -> RocPoint {
        let mut best = self.points[0];
        for p in &self.points {
            if p.fp <= fp_target {
                best = *p;
            } else {
                break;
            }
        }
        best
    }
}

/// Detection rate and threshold at the loosest cut-off whose false-positive
/// rate stays within `fp_target` (no interpolation).
pub fn dr_at_fp(roc: &RocCurve, fp_target: f64) -> (f64, f64) {
    let p = roc.operating_point(fp_target);
    (p.tp, p.threshold)
}

/// Vertical average: mean step-function TP rate of every curve at each FP
/// grid value.
pub fn vertical_average(curves: &[RocCurve], fp_grid: &[f64]) -> Vec<(f64, f64)> {
    fp_grid
        .iter()
        .map(|&fp| {
            let tp = curves.iter().map(|c| c.tp_at(fp)).sum::<f64>() / curves.len().max(1) as f64;
            (fp, tp)
        })
        .collect()
}

pub fn default_fp_grid() -> Vec<f64> {
    (0..=1000).map(|i| i as f64 / 1000.0).collect()
}

/// Fraction of positives at or above `threshold`.
pub fn detection_rate(scores: &[f64], threshold: f64) -> f64 {
    if scores.is_empty() {
        return 0.0;
    }
    scores.iter().filter(|&&s| s >= threshold).count() as f64 / scores.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub fp_target: f64,
    pub detection_rate: f64,
    /// `None` stands for `+∞` (nothing flagged).
    pub threshold: Option<f64>,
}

impl OperatingPoint {
    pub fn at(roc: &RocCurve, fp_target: f64) -> Self {
        let (dr, t) = dr_at_fp(roc, fp_target);
        Self {
            fp_target,
            detection_rate: dr,
            threshold: t.is_finite().then_some(t),
        }
    }

    pub fn threshold_value(&self) -> f64 {
        self.threshold.unwrap_or(f64::INFINITY)
    }
}
