use serde::{Deserialize, Serialize};

use super::smo::{self, Problem};
use super::{check_labels, SolverStats};
use crate::{Error, Result};

/// Kernel expansion `g(s) = Σ coef_i · exp(−γ‖s − s_i‖²) + b` over the
/// support points of a trained combiner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfCombinerModel {
    pub support_scores: Vec<[f64; 2]>,
    /// `y_i · α_i` per support point.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c_param: f64,
}

pub fn rbf_kernel(a: &[f64; 2], b: &[f64; 2], gamma: f64) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    (-gamma * (d0 * d0 + d1 * d1)).exp()
}

pub fn rbf_gram(points: &[[f64; 2]], gamma: f64) -> Vec<f64> {
    let n = points.len();
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        gram[i * n + i] = 1.0;
        for j in i + 1..n {
            let k = rbf_kernel(&points[i], &points[j], gamma);
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
    }
    gram
}

pub fn train_rbf_svm(points: &[[f64; 2]], y: &[f64], c: f64, gamma: f64) -> Result<RbfCombinerModel> {
    train_rbf_svm_with_stats(points, y, c, gamma).map(|(m, _)| m)
}

pub fn train_rbf_svm_with_stats(
    points: &[[f64; 2]],
    y: &[f64],
    c: f64,
    gamma: f64,
) -> Result<(RbfCombinerModel, SolverStats)> {
    check_labels(y)?;
    if points.len() != y.len() {
        return Err(Error::invalid("score points and labels disagree in size"));
    }
    if !(c > 0.0 && c.is_finite() && gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("C and gamma must be positive, got C={c}, gamma={gamma}")));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite score point"));
    }
    let gram = rbf_gram(points, gamma);
    let upper = vec![c; y.len()];
    let problem = Problem {
        kernel: &gram,
        y,
        upper: &upper,
    };
    let sol = smo::solve(&problem, smo::DEFAULT_EPS, 1e-4);
    let stats = SolverStats::collect(&problem, &sol);
    let mut support_scores = Vec::new();
    let mut dual_coefs = Vec::new();
    for ((p, a), l) in points.iter().zip(&sol.alpha).zip(y) {
        if *a != 0.0 {
            support_scores.push(*p);
            dual_coefs.push(a * l);
        }
    }
    Ok((
        RbfCombinerModel {
            support_scores,
            dual_coefs,
            bias: sol.bias,
            gamma,
            c_param: c,
        },
        stats,
    ))
}

pub fn score_rbf(model: &RbfCombinerModel, s: [f64; 2]) -> f64 {
    model
        .support_scores
        .iter()
        .zip(&model.dual_coefs)
        .map(|(p, c)| c * rbf_kernel(&s, p, model.gamma))
        .sum::<f64>()
        + model.bias
}

impl RbfCombinerModel {
    pub fn score(&self, s: [f64; 2]) -> f64 {
        score_rbf(self, s)
    }
}
