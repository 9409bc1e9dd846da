//! Greedy worst-case attack on the HTML features of a phishing page.

use pagedelta::evasion::{optimal_html_attack, AttackBudget};
use pagedelta::html::{HtmlDeltaVector, HTML_FEATURE_NAMES};
use pagedelta::learn::LinearSvmModel;

fn main() -> pagedelta::Result<()> {
    // similarity to the homepage pushes the score towards legitimate
    let model = LinearSvmModel {
        weights: vec![-1.2, -0.4, -0.3, -0.9, -0.2, -1.0, -0.3, -0.8, -1.5, -0.6, -0.7],
        bias: 2.0,
        c_param: 1.0,
    };
    let phish = HtmlDeltaVector::from_array([0.0; 11]);
    for m in 0..=4 {
        let (_, trace) = optimal_html_attack(&model, &phish, AttackBudget::new(m)?)?;
        let changed: Vec<&str> = trace.modified_indices.iter().map(|&i| HTML_FEATURE_NAMES[i]).collect();
        let score = trace.scores.last().copied().unwrap_or(model.bias);
        println!("budget {m}: score {score:+.2} changed {changed:?}");
    }
    Ok(())
}
