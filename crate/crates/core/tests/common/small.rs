//! A small synthetic corpus and a fast configuration for end-to-end tests.

use std::path::{Path, PathBuf};

use pagedelta::corpus::{generate_synthetic_corpus, load_corpus, FamilyRecord};
use pagedelta::evaluate::ExperimentConfig;
use pagedelta::html::HtmlExtractor;
use pagedelta::pipeline::{prepare_corpus, PreparedFamily};

pub fn fast_config() -> ExperimentConfig {
    ExperimentConfig {
        seed: 3,
        repetitions: 2,
        c_grid: vec![0.01, 1.0, 100.0],
        gamma_grid: vec![0.1, 1.0, 10.0],
        vocabulary_size: 40,
        vocabulary_sample: 4000,
        max_budget: 3,
        ..ExperimentConfig::default()
    }
}

pub fn corpus(dir: &Path, families: usize, seed: u64) -> (PathBuf, Vec<FamilyRecord>) {
    let manifest = generate_synthetic_corpus(families, 4, seed, dir).unwrap();
    let records = load_corpus(&manifest).unwrap();
    (manifest, records)
}

pub fn prepared(families: &[FamilyRecord], config: &ExperimentConfig) -> Vec<PreparedFamily> {
    prepare_corpus(families, &HtmlExtractor::default(), config.canonical_size()).unwrap()
}
