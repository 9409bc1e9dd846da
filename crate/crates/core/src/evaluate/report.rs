use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::cv::Candidate;
use super::roc::{OperatingPoint, RocCurve};
use crate::corpus::PageLabel;
use crate::pipeline::{PageScores, Scheme};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    pub auc: f64,
    pub operating_points: Vec<OperatingPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageScoreRecord {
    pub family_id: String,
    pub page_id: String,
    pub label: PageLabel,
    pub scores: PageScores,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackPoint {
    pub repetition: usize,
    pub budget: usize,
    pub scheme: Scheme,
    pub detection_rate: f64,
    /// `None` stands for `+∞`.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectedParameters {
    pub html_c: f64,
    pub visual_c: f64,
    pub trained: Option<Candidate>,
    pub adversarial: Option<Candidate>,
}

/// False-positive rates of the two trained combiners at the detection rate
/// the trained combiner reaches at the attack FP target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedFalsePositives {
    pub detection_rate: f64,
    pub trained_fp: f64,
    pub adversarial_fp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionReport {
    pub index: usize,
    pub seed: u64,
    pub train_families: Vec<String>,
    pub test_families: Vec<String>,
    pub selected: SelectedParameters,
    pub schemes: Vec<SchemeSummary>,
    pub attack: Vec<AttackPoint>,
    /// Snapshot-only detection rate at the max rule's attack threshold.
    pub snapshot_dr_at_max_threshold: f64,
    pub matched_fp: MatchedFalsePositives,
    pub test_scores: Vec<PageScoreRecord>,
    /// Digest of every fitted artifact (vocabulary, scalers, models,
    /// normalizers).
    pub artifact_digest: String,
    pub vocabulary_words: usize,
    #[serde(skip)]
    pub rocs: Vec<(Scheme, RocCurve)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    pub fp_target: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageSummary {
    pub scheme: Scheme,
    pub mean_auc: f64,
    pub detection: Vec<RateSummary>,
    /// Vertically averaged ROC as `(fp, tp)` pairs.
    pub roc: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackAverage {
    pub budget: usize,
    pub scheme: Scheme,
    pub detection_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format_version: u32,
    pub config: ExperimentConfig,
    pub roc_averaging: String,
    pub repetitions: Vec<RepetitionReport>,
    pub averages: Vec<AverageSummary>,
    pub attack_averages: Vec<AttackAverage>,
    /// Wall-clock seconds per repetition; excluded from [`Self::same_results`].
    pub timing_seconds: Vec<f64>,
}

impl ExperimentReport {
    /// Equality ignoring timing.
    pub fn same_results(&self, other: &Self) -> bool {
        self.config == other.config
            && self.repetitions == other.repetitions
            && self.averages == other.averages
            && self.attack_averages == other.attack_averages
    }

    pub fn average(&self, scheme: Scheme) -> Option<&AverageSummary> {
        self.averages.iter().find(|a| a.scheme == scheme)
    }

    /// Writes `report.json`, `roc.csv`, `dr.csv` and `attack.csv`.
    pub fn write_to(&self, out_dir: &Path) -> Result<()> {
        std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        let json = out_dir.join("report.json");
        std::fs::write(&json, serde_json::to_string_pretty(self)?).map_err(|e| Error::io(&json, e))?;
        self.write_roc_csv(&out_dir.join("roc.csv"))?;
        self.write_dr_csv(&out_dir.join("dr.csv"))?;
        self.write_attack_csv(&out_dir.join("attack.csv"))
    }

    fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
        csv::Writer::from_path(path).map_err(Error::Csv)
    }

    pub fn write_roc_csv(&self, path: &Path) -> Result<()> {
        let mut w = Self::writer(path)?;
        w.write_record(["repetition", "scheme", "fp", "tp", "threshold"])?;
        for r in &self.repetitions {
            for (scheme, roc) in &r.rocs {
                for p in &roc.points {
                    w.write_record([
                        r.index.to_string(),
                        scheme.name().to_string(),
                        p.fp.to_string(),
                        p.tp.to_string(),
                        fmt_threshold(Some(p.threshold).filter(|t| t.is_finite())),
                    ])?;
                }
            }
        }
        for a in &self.averages {
            for (fp, tp) in &a.roc {
                w.write_record(["mean".to_string(), a.scheme.name().to_string(), fp.to_string(), tp.to_string(), String::new()])?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_dr_csv(&self, path: &Path) -> Result<()> {
        let mut w = Self::writer(path)?;
        w.write_record(["repetition", "scheme", "fp_target", "detection_rate", "threshold", "auc"])?;
        for r in &self.repetitions {
            for s in &r.schemes {
                for op in &s.operating_points {
                    w.write_record([
                        r.index.to_string(),
                        s.scheme.name().to_string(),
                        op.fp_target.to_string(),
                        op.detection_rate.to_string(),
                        fmt_threshold(op.threshold),
                        s.auc.to_string(),
                    ])?;
                }
            }
        }
        for a in &self.averages {
            for d in &a.detection {
                w.write_record([
                    "mean".to_string(),
                    a.scheme.name().to_string(),
                    d.fp_target.to_string(),
                    d.mean.to_string(),
                    String::new(),
                    a.mean_auc.to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_attack_csv(&self, path: &Path) -> Result<()> {
        let mut w = Self::writer(path)?;
        w.write_record(["repetition", "budget", "scheme", "detection_rate", "threshold"])?;
        for r in &self.repetitions {
            for a in &r.attack {
                w.write_record([
                    a.repetition.to_string(),
                    a.budget.to_string(),
                    a.scheme.name().to_string(),
                    a.detection_rate.to_string(),
                    fmt_threshold(a.threshold),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn fmt_threshold(t: Option<f64>) -> String {
    t.map_or_else(|| "inf".to_string(), |v| v.to_string())
}
