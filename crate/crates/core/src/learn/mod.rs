//! Base classifiers, the kernel combiner and the normalizers used around them.

mod linear;
mod minmax;
mod rbf;
mod scaler;
mod smo;

pub use linear::{
    linear_gram, score_linear, train_linear_svm, train_linear_svm_gram, train_linear_svm_with, LinearSvmModel,
    LinearSvmOptions,
};
pub use minmax::{fit_score_minmax, ScoreNormalizer};
pub use rbf::{rbf_gram, rbf_kernel, score_rbf, train_rbf_svm, train_rbf_svm_with_stats, RbfCombinerModel};
pub use scaler::{fit_percentile_scaler, percentile_sorted, PercentileScaler};

use crate::{Error, Result};

/// Convergence diagnostics of one dual solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverStats {
    pub iterations: usize,
    pub primal: f64,
    pub dual: f64,
    /// Largest KKT violation `max_{I_up} −y∇ − min_{I_low} −y∇`.
    pub kkt_violation: f64,
}

impl SolverStats {
    fn collect(p: &smo::Problem, sol: &smo::DualSolution) -> Self {
        let n = p.y.len();
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        for t in 0..n {
            let mut g = -1.0;
            for i in 0..n {
                if sol.alpha[i] != 0.0 {
                    g += p.y[t] * p.y[i] * p.kernel[t * n + i] * sol.alpha[i];
                }
            }
            let v = -p.y[t] * g;
            let (a, c, y) = (sol.alpha[t], p.upper[t], p.y[t]);
            if (y > 0.0 && a < c) || (y < 0.0 && a > 0.0) {
                gmax = gmax.max(v);
            }
            if (y > 0.0 && a > 0.0) || (y < 0.0 && a < c) {
                gmin = gmin.min(v);
            }
        }
        Self {
            iterations: sol.iterations,
            primal: smo::primal_objective(p, &sol.alpha, sol.bias),
            dual: smo::dual_objective(p, &sol.alpha),
            kkt_violation: (gmax - gmin).max(0.0),
        }
    }

    pub fn relative_gap(&self) -> f64 {
        (self.primal - self.dual) / self.primal.abs().max(1.0)
    }
}

/// Labels must be ±1 and both classes present.
pub(crate) fn check_labels(y: &[f64]) -> Result<()> {
    if let Some(l) = y.iter().find(|&&l| l != 1.0 && l != -1.0) {
        return Err(Error::invalid(format!("labels must be -1 or +1, got {l}")));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(Error::SingleClass);
    }
    Ok(())
}
