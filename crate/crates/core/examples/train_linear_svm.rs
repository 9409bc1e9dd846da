//! Percentile scaling and a soft-margin linear SVM on toy data.

use pagedelta::learn::{fit_percentile_scaler, score_linear, train_linear_svm};

fn main() -> pagedelta::Result<()> {
    let x: Vec<Vec<f64>> = vec![
        vec![0.9, 0.8],
        vec![0.8, 0.95],
        vec![1.0, 0.7],
        vec![0.1, 0.2],
        vec![0.0, 0.3],
        vec![0.2, 0.05],
    ];
    let y = [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0];
    let scaler = fit_percentile_scaler(&x)?;
    let scaled = scaler.transform_rows(&x)?;
    for c in [0.01, 1.0, 100.0] {
        let m = train_linear_svm(&scaled, &y, c)?;
        let scores: Vec<String> = scaled
            .iter()
            .map(|r| score_linear(&m, r).map(|s| format!("{s:+.2}")))
            .collect::<pagedelta::Result<_>>()?;
        println!("C={c:<6} w={:.3?} b={:+.3} scores=[{}]", m.weights, m.bias, scores.join(" "));
    }
    Ok(())
}
