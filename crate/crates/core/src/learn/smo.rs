//! Sequential minimal optimization for the SVM dual
//!
//! ```text
//! min ½ αᵀQα − Σα   s.t.  yᵀα = 0,  0 ≤ α_i ≤ C_i,   Q_ij = y_i y_j K_ij
//! ```
//!
//! over a precomputed kernel matrix, using second-order working-set
//! selection.

const TAU: f64 = 1e-12;

/// Stopping tolerance on the maximal KKT violation.
pub(crate) const DEFAULT_EPS: f64 = 1e-5;

pub(crate) struct DualSolution {
    pub alpha: Vec<f64>,
    /// Decision-function offset: f(x) = Σ α_i y_i K(x_i, x) + bias.
    pub bias: f64,
    pub iterations: usize,
}

pub(crate) struct Problem<'a> {
    /// Row-major n×n kernel matrix.
    pub kernel: &'a [f64],
    pub y: &'a [f64],
    /// Per-sample upper bounds.
    pub upper: &'a [f64],
}

impl Problem<'_> {
    fn n(&self) -> usize {
        self.y.len()
    }

    fn k(&self, i: usize, j: usize) -> f64 {
        self.kernel[i * self.n() + j]
    }
}

fn is_up(alpha: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && alpha < c) || (y < 0.0 && alpha > 0.0)
}

fn is_low(alpha: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && alpha > 0.0) || (y < 0.0 && alpha < c)
}

/// Continues optimization from `alpha` (feasible) with gradient `grad` until
/// the maximal violation drops below `eps`.
pub(crate) fn solve_from(p: &Problem, alpha: &mut [f64], grad: &mut [f64], eps: f64, max_iter: usize) -> usize {
    let n = p.n();
    let mut iter = 0;
    while iter < max_iter {
        // i: maximal violating index in I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if is_up(alpha[t], p.y[t], p.upper[t]) {
                let v = -p.y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i = t;
                }
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !is_low(alpha[t], p.y[t], p.upper[t]) {
                continue;
            }
            let v = -p.y[t] * grad[t];
            gmin = gmin.min(v);
            if i == usize::MAX {
                continue;
            }
            let b = gmax - v;
            if b > 0.0 {
                let mut a = p.k(i, i) + p.k(t, t) - 2.0 * p.k(i, t);
                if a <= 0.0 {
                    a = TAU;
                }
                let obj = -(b * b) / a;
                if obj < best {
                    best = obj;
                    j = t;
                }
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < eps {
            break;
        }
        iter += 1;
        update_pair(p, alpha, grad, i, j);
    }
    iter
}

// Two-variable analytic step, following the LIBSVM update rules.
fn update_pair(p: &Problem, alpha: &mut [f64], grad: &mut [f64], i: usize, j: usize) {
    let (yi, yj) = (p.y[i], p.y[j]);
    let (ci, cj) = (p.upper[i], p.upper[j]);
    let (kii, kjj, kij) = (p.k(i, i), p.k(j, j), p.k(i, j));
    let (old_i, old_j) = (alpha[i], alpha[j]);
    let (mut ai, mut aj) = (old_i, old_j);

    if yi != yj {
        let mut quad = kii + kjj - 2.0 * kij;
        if quad <= 0.0 {
            quad = TAU;
        }
        let delta = (-grad[i] - grad[j]) / quad;
        let diff = ai - aj;
        ai += delta;
        aj += delta;
        if diff > 0.0 {
            if aj < 0.0 {
                aj = 0.0;
                ai = diff;
            }
        } else if ai < 0.0 {
            ai = 0.0;
            aj = -diff;
        }
        if diff > ci - cj {
            if ai > ci {
                ai = ci;
                aj = ci - diff;
            }
        } else if aj > cj {
            aj = cj;
            ai = cj + diff;
        }
    } else {
        let mut quad = kii + kjj - 2.0 * kij;
        if quad <= 0.0 {
            quad = TAU;
        }
        let delta = (grad[i] - grad[j]) / quad;
        let sum = ai + aj;
        ai -= delta;
        aj += delta;
        if sum > ci {
            if ai > ci {
                ai = ci;
                aj = sum - ci;
            }
        } else if aj < 0.0 {
            aj = 0.0;
            ai = sum;
        }
        if sum > cj {
            if aj > cj {
                aj = cj;
                ai = sum - cj;
            }
        } else if ai < 0.0 {
            ai = 0.0;
            aj = sum;
        }
    }
    alpha[i] = ai;
    alpha[j] = aj;

    let (di, dj) = (ai - old_i, aj - old_j);
    let n = p.n();
    let (row_i, row_j) = (&p.kernel[i * n..(i + 1) * n], &p.kernel[j * n..(j + 1) * n]);
    for t in 0..n {
        grad[t] += p.y[t] * (yi * row_i[t] * di + yj * row_j[t] * dj);
    }
}

/// Bias from the free support vectors, or the midpoint of the feasible
/// interval when there are none.
pub(crate) fn bias(p: &Problem, alpha: &[f64], grad: &[f64]) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut free = 0usize;
    for t in 0..p.n() {
        let yg = p.y[t] * grad[t];
        if alpha[t] >= p.upper[t] {
            if p.y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if p.y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    let rho = if free > 0 {
        sum / free as f64
    } else if ub.is_finite() && lb.is_finite() {
        (ub + lb) / 2.0
    } else if ub.is_finite() {
        ub
    } else {
        lb
    };
    -rho
}

/// Decision values f(x_t) = Σ α_i y_i K_it + bias on the training points.
pub(crate) fn decision_values(p: &Problem, alpha: &[f64], bias: f64) -> Vec<f64> {
    let n = p.n();
    let mut f = vec![bias; n];
    for (i, a) in alpha.iter().enumerate().filter(|(_, a)| **a != 0.0) {
        let c = a * p.y[i];
        for (ft, k) in f.iter_mut().zip(&p.kernel[i * n..(i + 1) * n]) {
            *ft += c * k;
        }
    }
    f
}

pub(crate) fn dual_objective(p: &Problem, alpha: &[f64]) -> f64 {
    let n = p.n();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            quad += alpha[i] * alpha[j] * p.y[i] * p.y[j] * p.k(i, j);
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Primal objective ½‖w‖² + Σ C_i hinge_i of the kernel expansion with the
/// given bias.
pub(crate) fn primal_objective(p: &Problem, alpha: &[f64], bias: f64) -> f64 {
    let n = p.n();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            quad += alpha[i] * alpha[j] * p.y[i] * p.y[j] * p.k(i, j);
        }
    }
    let f = decision_values(p, alpha, bias);
    let hinge: f64 = (0..n).map(|t| p.upper[t] * (1.0 - p.y[t] * f[t]).max(0.0)).sum();
    0.5 * quad + hinge
}

/// Solves to KKT tolerance `eps`, then keeps tightening until the relative
/// duality gap is at most `gap_tol` (or the tolerance floor is reached).
pub(crate) fn solve(p: &Problem, eps: f64, gap_tol: f64) -> DualSolution {
    let n = p.n();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let max_iter = 1_000_000usize.max(100 * n);
    let mut eps = eps;
    let mut iterations = 0;
    loop {
        iterations += solve_from(p, &mut alpha, &mut grad, eps, max_iter);
        let b = bias(p, &alpha, &grad);
        let primal = primal_objective(p, &alpha, b);
        let dual = dual_objective(p, &alpha);
        if (primal - dual) <= gap_tol * primal.abs().max(1.0) || eps < 1e-12 {
            return DualSolution { alpha, bias: b, iterations };
        }
        eps *= 0.1;
    }
}
