//! Full protocol on a small synthetic corpus.
//!
//! `cargo run --release --example synthetic_experiment [families] [repetitions]`

use pagedelta::corpus::{generate_synthetic_corpus, load_corpus};
use pagedelta::evaluate::{run_experiment, ExperimentConfig};

fn main() -> pagedelta::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("numeric argument"));
    let families = args.next().unwrap_or(20);
    let repetitions = args.next().unwrap_or(1);
    let dir = std::env::temp_dir().join("pagedelta-synthetic-experiment");
    let corpus = load_corpus(&generate_synthetic_corpus(families, 4, 7, &dir)?)?;
    let config = ExperimentConfig {
        repetitions,
        vocabulary_size: 100,
        ..ExperimentConfig::default()
    };
    let report = run_experiment(&corpus, &config)?;
    for avg in &report.averages {
        let dr: Vec<String> = avg.detection.iter().map(|d| format!("DR@{}={:.3}", d.fp_target, d.mean)).collect();
        println!("{:<12} AUC={:.3} {}", avg.scheme.name(), avg.mean_auc, dr.join(" "));
    }
    for a in report.attack_averages.iter().filter(|a| a.budget <= 2) {
        println!("attack budget {} {:<12} DR={:.3}", a.budget, a.scheme.name(), a.detection_rate);
    }
    Ok(())
}
