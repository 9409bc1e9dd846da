use serde::{Deserialize, Serialize};

use super::smo::{self, Problem};
use super::{check_labels, SolverStats};
use crate::{Error, Result};

/// Affine scorer `w·x + b`; positive scores fall on the phishing side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub c_param: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSvmOptions {
    pub c: f64,
    /// Multiplies C for positive samples.
    pub positive_weight: f64,
    /// Multiplies C for negative samples.
    pub negative_weight: f64,
    pub eps: f64,
    pub gap_tol: f64,
}

impl LinearSvmOptions {
    pub fn new(c: f64) -> Self {
        Self {
            c,
            positive_weight: 1.0,
            negative_weight: 1.0,
            eps: smo::DEFAULT_EPS,
            gap_tol: 1e-4,
        }
    }
}

/// Row-major Gram matrix of inner products.
pub fn linear_gram<R: AsRef<[f64]> + Sync>(rows: &[R]) -> Vec<f64> {
    use rayon::prelude::*;
    let n = rows.len();
    let mut gram = vec![0.0; n * n];
    gram.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
        let a = rows[i].as_ref();
        for (j, o) in out.iter_mut().enumerate().skip(i) {
            *o = dot(a, rows[j].as_ref());
        }
    });
    for i in 0..n {
        for j in 0..i {
            gram[i * n + j] = gram[j * n + i];
        }
    }
    gram
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn train_linear_svm<R: AsRef<[f64]> + Sync>(x: &[R], y: &[f64], c: f64) -> Result<LinearSvmModel> {
    train_linear_svm_with(x, y, &LinearSvmOptions::new(c)).map(|(m, _)| m)
}

pub fn train_linear_svm_with<R: AsRef<[f64]> + Sync>(
    x: &[R],
    y: &[f64],
    opts: &LinearSvmOptions,
) -> Result<(LinearSvmModel, SolverStats)> {
    let gram = linear_gram(x);
    train_linear_svm_gram(x, y, &gram, opts)
}

/// Trains from a precomputed Gram matrix of `x`.
pub fn train_linear_svm_gram<R: AsRef<[f64]>>(
    x: &[R],
    y: &[f64],
    gram: &[f64],
    opts: &LinearSvmOptions,
) -> Result<(LinearSvmModel, SolverStats)> {
    check_labels(y)?;
    if x.len() != y.len() || gram.len() != x.len() * x.len() {
        return Err(Error::invalid("feature rows, labels and Gram matrix disagree in size"));
    }
    if !(opts.c > 0.0 && opts.c.is_finite()) {
        return Err(Error::invalid(format!("C must be positive, got {}", opts.c)));
    }
    let dim = x[0].as_ref().len();
    for r in x {
        let r = r.as_ref();
        if r.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: r.len(),
            });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite feature value"));
        }
    }
    let upper: Vec<f64> = y
        .iter()
        .map(|&l| opts.c * if l > 0.0 { opts.positive_weight } else { opts.negative_weight })
        .collect();
    let problem = Problem { kernel: gram, y, upper: &upper };
    let sol = smo::solve(&problem, opts.eps, opts.gap_tol);

    let mut weights = vec![0.0; dim];
    for ((a, l), r) in sol.alpha.iter().zip(y).zip(x) {
        if *a != 0.0 {
            for (w, v) in weights.iter_mut().zip(r.as_ref()) {
                *w += a * l * v;
            }
        }
    }
    let stats = SolverStats::collect(&problem, &sol);
    Ok((
        LinearSvmModel {
            weights,
            bias: sol.bias,
            c_param: opts.c,
        },
        stats,
    ))
}

impl LinearSvmModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        score_linear(self, x)
    }

    /// ½‖w‖² + C Σ hinge.
    pub fn primal_objective<R: AsRef<[f64]>>(&self, x: &[R], y: &[f64]) -> f64 {
        let hinge: f64 = x
            .iter()
            .zip(y)
            .map(|(r, l)| (1.0 - l * (dot(&self.weights, r.as_ref()) + self.bias)).max(0.0))
            .sum();
        0.5 * dot(&self.weights, &self.weights) + self.c_param * hinge
    }
}

pub fn score_linear(model: &LinearSvmModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            actual: x.len(),
        });
    }
    Ok(dot(&model.weights, x) + model.bias)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_dimensional_max_margin() {
        let x = vec![vec![0.0], vec![1.0]];
        let m = train_linear_svm(&x, &[-1.0, 1.0], 1e3).unwrap();
        assert!((m.weights[0] - 2.0).abs() < 1e-6);
        assert!((m.bias + 1.0).abs() < 1e-6);
        assert!(score_linear(&m, &[0.5]).unwrap().abs() < 1e-6);
    }

    #[test]
    fn duplicated_data_with_half_c_is_equivalent() {
        let x = vec![vec![0.1, 0.9], vec![0.3, 0.4], vec![0.8, 0.2], vec![0.6, 0.7], vec![0.5, 0.5]];
        let y = [-1.0, -1.0, 1.0, 1.0, -1.0];
        let a = train_linear_svm(&x, &y, 2.0).unwrap();
        let x2: Vec<Vec<f64>> = x.iter().chain(&x).cloned().collect();
        let y2: Vec<f64> = y.iter().chain(&y).copied().collect();
        let b = train_linear_svm(&x2, &y2, 1.0).unwrap();
        for (u, v) in a.weights.iter().zip(&b.weights) {
            assert!((u - v).abs() < 1e-3);
        }
        assert!((a.bias - b.bias).abs() < 1e-3);
    }

    #[test]
    fn class_weight_shifts_boundary_towards_cheap_class() {
        let x = vec![vec![0.0], vec![0.4], vec![0.6], vec![1.0]];
        let y = [-1.0, 1.0, -1.0, 1.0];
        let plain = train_linear_svm(&x, &y, 1.0).unwrap();
        let mut opts = LinearSvmOptions::new(1.0);
        opts.positive_weight = 5.0;
        let (weighted, _) = train_linear_svm_with(&x, &y, &opts).unwrap();
        let pos_plain = x.iter().filter(|r| score_linear(&plain, r).unwrap() >= 0.0).count();
        let pos_weighted = x.iter().filter(|r| score_linear(&weighted, r).unwrap() >= 0.0).count();
        assert!(pos_weighted >= pos_plain);
    }

    #[test]
    fn scoring_contract() {
        let m = LinearSvmModel {
            weights: vec![0.0, 0.0],
            bias: 0.5,
            c_param: 1.0,
        };
        assert_eq!(score_linear(&m, &[7.0, -3.0]).unwrap(), 0.5);
        let m = LinearSvmModel {
            weights: vec![1.0, -1.0],
            bias: 0.0,
            c_param: 1.0,
        };
        assert!((score_linear(&m, &[0.3, 0.1]).unwrap() - 0.2).abs() < 1e-15);
        assert!(score_linear(&m, &[1.0]).is_err());
        let neg = LinearSvmModel {
            weights: vec![-0.5; 11],
            bias: 1.0,
            c_param: 1.0,
        };
        assert!(score_linear(&neg, &[1.0; 11]).unwrap() < score_linear(&neg, &[0.0; 11]).unwrap());
    }

    #[test]
    fn errors() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(matches!(train_linear_svm(&x, &[1.0, 1.0], 1.0), Err(Error::SingleClass)));
        assert!(train_linear_svm(&x, &[1.0, 0.0], 1.0).is_err());
        assert!(train_linear_svm(&x, &[1.0, -1.0], 0.0).is_err());
        assert!(train_linear_svm(&[vec![0.0], vec![f64::NAN]], &[1.0, -1.0], 1.0).is_err());
    }

    proptest! {
        #[test]
        fn score_is_affine(
            w in proptest::collection::vec(-5.0f64..5.0, 4),
            b in -3.0f64..3.0,
            x in proptest::collection::vec(-1.0f64..1.0, 4),
            z in proptest::collection::vec(-1.0f64..1.0, 4),
            t in 0.0f64..1.0,
        ) {
            let m = LinearSvmModel { weights: w, bias: b, c_param: 1.0 };
            let mix: Vec<f64> = x.iter().zip(&z).map(|(a, c)| t * a + (1.0 - t) * c).collect();
            let lhs = score_linear(&m, &mix).unwrap();
            let rhs = t * score_linear(&m, &x).unwrap() + (1.0 - t) * score_linear(&m, &z).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }

        #[test]
        fn kkt_holds_after_training(
            pts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4..16),
            c in prop_oneof![Just(0.1), Just(1.0), Just(10.0)],
        ) {
            let x: Vec<Vec<f64>> = pts.iter().map(|&(a, b)| vec![a, b]).collect();
            let mut y: Vec<f64> = pts.iter().map(|&(a, b)| if a + 0.3 * b > 0.0 { 1.0 } else { -1.0 }).collect();
            y[0] = 1.0;
            y[1] = -1.0;
            let (_, stats) = train_linear_svm_with(&x, &y, &LinearSvmOptions::new(c)).unwrap();
            prop_assert!(stats.kkt_violation < 1e-4, "violation {}", stats.kkt_violation);
            prop_assert!(stats.relative_gap() <= 1e-4, "gap {}", stats.relative_gap());
        }
    }
}
