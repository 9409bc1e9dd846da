use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fusion::AdversarialOptions;
use crate::pipeline::TrainSettings;
use crate::visual::{CANONICAL_HEIGHT, CANONICAL_WIDTH, DEFAULT_VOCABULARY_SIZE};
use crate::{Error, Result};

fn default_grid() -> Vec<f64> {
    vec![0.001, 0.01, 0.1, 1.0, 10.0, 100.0]
}

/// Experiment configuration. Every field has a default, so `{}` is a valid
/// configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub repetitions: usize,
    pub train_fraction: f64,
    pub cv_folds: usize,
    pub c_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub adversarial: AdversarialOptions,
    pub fp_targets: Vec<f64>,
    /// FP rate fixing the clean operating threshold of the attack sweep.
    pub attack_fp_target: f64,
    pub max_budget: usize,
    pub snapshot_width: u32,
    pub snapshot_height: u32,
    pub vocabulary_size: usize,
    /// Cap on the number of training words clustered into the vocabulary.
    pub vocabulary_sample: usize,
    pub kmeans_max_iter: usize,
    pub kmeans_tol: f64,
    pub suffix_list: Option<PathBuf>,
    pub stop_words_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            repetitions: 20,
            train_fraction: 0.6,
            cv_folds: 5,
            c_grid: default_grid(),
            gamma_grid: default_grid(),
            adversarial: AdversarialOptions::default(),
            fp_targets: vec![0.005, 0.01],
            attack_fp_target: 0.01,
            max_budget: 11,
            snapshot_width: CANONICAL_WIDTH,
            snapshot_height: CANONICAL_HEIGHT,
            vocabulary_size: DEFAULT_VOCABULARY_SIZE,
            vocabulary_sample: 10_000,
            kmeans_max_iter: 300,
            kmeans_tol: 1e-6,
            suffix_list: None,
            stop_words_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(m));
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad(format!("train_fraction must lie in (0, 1), got {}", self.train_fraction));
        }
        if self.cv_folds < 2 {
            return bad(format!("cv_folds must be at least 2, got {}", self.cv_folds));
        }
        if self.c_grid.is_empty() || self.gamma_grid.is_empty() {
            return bad("parameter grids must not be empty".into());
        }
        if self.c_grid.iter().chain(&self.gamma_grid).any(|v| !(*v > 0.0 && v.is_finite())) {
            return bad("grid values must be positive".into());
        }
        if self.fp_targets.iter().chain([&self.attack_fp_target]).any(|f| !(0.0..=1.0).contains(f)) {
            return bad("FP targets must lie in [0, 1]".into());
        }
        if self.max_budget > crate::html::HTML_FEATURE_COUNT {
            return bad(format!("max_budget must not exceed {}", crate::html::HTML_FEATURE_COUNT));
        }
        if self.vocabulary_size == 0 {
            return bad("vocabulary_size must be positive".into());
        }
        Ok(())
    }

    pub fn canonical_size(&self) -> (u32, u32) {
        (self.snapshot_width, self.snapshot_height)
    }

    pub fn train_settings(&self) -> TrainSettings {
        TrainSettings {
            c_grid: self.c_grid.clone(),
            gamma_grid: self.gamma_grid.clone(),
            folds: self.cv_folds,
            adversarial: self.adversarial,
            vocabulary_size: self.vocabulary_size,
            vocabulary_sample: self.vocabulary_sample,
            kmeans_max_iter: self.kmeans_max_iter,
            kmeans_tol: self.kmeans_tol,
        }
    }
}
