//! The evaluation protocol: grouped cross-validation, stacked
//! generalization, ROC analysis and repeated family-wise train/test runs.

mod config;
mod cv;
mod experiment;
mod folds;
mod report;
mod roc;
mod stacked;

pub use config::ExperimentConfig;
pub use cv::{candidate_grid, grid_search_cv, Candidate, CandidateScore, CvOutcome};
pub use experiment::{
    detection_under_attack, repetition_seed, run_experiment, run_prepared, run_repetition, REPORT_FORMAT_VERSION,
};
pub use folds::{fold_split, stratified_group_folds};
pub use report::{
    AttackAverage, AttackPoint, AverageSummary, ExperimentReport, MatchedFalsePositives, PageScoreRecord, RateSummary,
    RepetitionReport, SchemeSummary, SelectedParameters,
};
pub use roc::{
    compute_roc, default_fp_grid, detection_rate, dr_at_fp, vertical_average, OperatingPoint, RocCurve, RocPoint,
};
pub use stacked::{stacked_scores, StackedScores};

pub use experiment::artifact_digest;
