//! Interior-point QP oracles for the SVM problems.
#![allow(dead_code)]

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};
use pagedelta::learn::rbf_kernel;

/// Dense column-major matrix to CSC, dropping zeros.
fn csc(rows: usize, cols: usize, at: impl Fn(usize, usize) -> f64) -> CscMatrix<f64> {
    let mut colptr = vec![0];
    let mut rowval = Vec::new();
    let mut nzval = Vec::new();
    for j in 0..cols {
        for i in 0..rows {
            let v = at(i, j);
            if v != 0.0 {
                rowval.push(i);
                nzval.push(v);
            }
        }
        colptr.push(rowval.len());
    }
    CscMatrix::new(rows, cols, colptr, rowval, nzval)
}

fn solve_qp(
    n: usize,
    p: impl Fn(usize, usize) -> f64,
    q: Vec<f64>,
    m: usize,
    a: impl Fn(usize, usize) -> f64,
    b: Vec<f64>,
    cones: Vec<SupportedConeT<f64>>,
) -> Vec<f64> {
    let pm = csc(n, n, |i, j| if i <= j { p(i, j) } else { 0.0 });
    let am = csc(m, n, a);
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .tol_gap_abs(1e-10)
        .tol_gap_rel(1e-10)
        .tol_feas(1e-10)
        .build()
        .unwrap();
    let mut solver = DefaultSolver::new(&pm, &q, &am, &b, &cones, settings).unwrap();
    solver.solve();
    assert!(
        matches!(solver.solution.status, SolverStatus::Solved | SolverStatus::AlmostSolved),
        "oracle status {:?}",
        solver.solution.status
    );
    solver.solution.x.clone()
}

/// Soft-margin primal over `z = [w, b, ξ]`.
pub fn primal_oracle(x: &[Vec<f64>], y: &[f64], c: f64) -> (Vec<f64>, f64) {
    let (n, d) = (x.len(), x[0].len());
    let nv = d + 1 + n;
    let q: Vec<f64> = (0..nv).map(|k| if k > d { c } else { 0.0 }).collect();
    // rows 0..n: margin constraints, rows n..2n: ξ ≥ 0
    let a = |i: usize, k: usize| -> f64 {
        if i < n {
            if k < d {
                -y[i] * x[i][k]
            } else if k == d {
                -y[i]
            } else if k - d - 1 == i {
                -1.0
            } else {
                0.0
            }
        } else if k > d && k - d - 1 == i - n {
            -1.0
        } else {
            0.0
        }
    };
    let b: Vec<f64> = (0..2 * n).map(|i| if i < n { -1.0 } else { 0.0 }).collect();
    let z = solve_qp(
        nv,
        |i, j| if i == j && i < d { 1.0 } else { 0.0 },
        q,
        2 * n,
        a,
        b,
        vec![SupportedConeT::NonnegativeConeT(2 * n)],
    );
    let w = z[..d].to_vec();
    let obj = 0.5 * w.iter().map(|v| v * v).sum::<f64>() + c * z[d + 1..].iter().map(|v| v.max(0.0)).sum::<f64>();
    (w, obj)
}

pub fn primal_objective(w: &[f64], b: f64, x: &[Vec<f64>], y: &[f64], c: f64) -> f64 {
    let hinge: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (1.0 - yi * (xi.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + b)).max(0.0))
        .sum();
    0.5 * w.iter().map(|v| v * v).sum::<f64>() + c * hinge
}

/// Dual `min ½αᵀQα − 1ᵀα` with `yᵀα = 0`, `0 ≤ α ≤ C`.
pub fn dual_oracle(pts: &[[f64; 2]], y: &[f64], c: f64, gamma: f64) -> Vec<f64> {
    let n = pts.len();
    let q = |i: usize, j: usize| y[i] * y[j] * rbf_kernel(&pts[i], &pts[j], gamma);
    // row 0: equality; rows 1..=n: −α ≤ 0; rows n+1..=2n: α ≤ C
    let a = |i: usize, k: usize| -> f64 {
        if i == 0 {
            y[k]
        } else if i <= n {
            if i - 1 == k {
                -1.0
            } else {
                0.0
            }
        } else if i - 1 - n == k {
            1.0
        } else {
            0.0
        }
    };
    let b: Vec<f64> = (0..=2 * n).map(|i| if i > n { c } else { 0.0 }).collect();
    solve_qp(
        n,
        q,
        vec![-1.0; n],
        2 * n + 1,
        a,
        b,
        vec![SupportedConeT::ZeroConeT(1), SupportedConeT::NonnegativeConeT(2 * n)],
    )
}

