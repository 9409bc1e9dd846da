use std::time::Instant;

use super::config::ExperimentConfig;
use super::report::{
    AttackAverage, AttackPoint, AverageSummary, ExperimentReport, MatchedFalsePositives, PageScoreRecord, RateSummary,
    RepetitionReport, SchemeSummary, SelectedParameters,
};
use super::roc::{compute_roc, default_fp_grid, detection_rate, vertical_average, OperatingPoint, RocCurve};
use crate::corpus::{make_id_splits, FamilyRecord, PageLabel, Split};
use crate::evasion::greedy_attack;
use crate::fusion::FusionScheme;
use crate::html::HtmlExtractor;
use crate::pipeline::{
    prepare_corpus, train_detector, visual_deltas, ChannelScores, DetectorModels, PreparedFamily, Scheme,
};
use crate::{Error, Result};

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Runs the full protocol on a loaded corpus.
pub fn run_experiment(families: &[FamilyRecord], config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let extractor = HtmlExtractor::from_config(config.stop_words_dir.as_deref(), config.suffix_list.as_deref())?;
    let prepared = prepare_corpus(families, &extractor, config.canonical_size())?;
    run_prepared(&prepared, config)
}

/// Runs the protocol on already-extracted features.
pub fn run_prepared(prepared: &[PreparedFamily], config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let ids: Vec<String> = prepared.iter().map(|f| f.family_id.clone()).collect();
    let plan = make_id_splits(&ids, config.train_fraction, config.repetitions, config.seed)?;
    let mut repetitions = Vec::with_capacity(plan.repetitions.len());
    let mut timing_seconds = Vec::with_capacity(plan.repetitions.len());
    for (i, split) in plan.repetitions.iter().enumerate() {
        let start = Instant::now();
        repetitions.push(run_repetition(prepared, split, i, config)?);
        timing_seconds.push(start.elapsed().as_secs_f64());
    }
    let (averages, attack_averages) = summarize(&repetitions, config);
    Ok(ExperimentReport {
        format_version: REPORT_FORMAT_VERSION,
        config: config.clone(),
        roc_averaging: "vertical".into(),
        repetitions,
        averages,
        attack_averages,
        timing_seconds,
    })
}

pub fn repetition_seed(seed: u64, index: usize) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index as u64 + 1)
}

fn select<'a>(prepared: &'a [PreparedFamily], ids: &[String]) -> Result<Vec<&'a PreparedFamily>> {
    ids.iter()
        .map(|id| {
            prepared
                .iter()
                .find(|f| &f.family_id == id)
                .ok_or_else(|| Error::invalid(format!("unknown family {id}")))
        })
        .collect()
}

/// FNV-1a digest of every fitted artifact.
pub fn artifact_digest(models: &DetectorModels) -> Result<String> {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |bytes: &[u8]| {
        for b in bytes {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    feed(models.vocabulary.to_text().as_bytes());
    feed(serde_json::to_string(&models.html)?.as_bytes());
    feed(serde_json::to_string(&models.visual)?.as_bytes());
    feed(serde_json::to_string(&models.fusion)?.as_bytes());
    Ok(format!("{h:016x}"))
}

/// Smallest false-positive rate at which `roc` reaches `dr`.
fn fp_at_dr(roc: &RocCurve, dr: f64) -> f64 {
    roc.points.iter().find(|p| p.tp >= dr).map_or(1.0, |p| p.fp)
}

/// One train/test repetition: train on the split's training families only,
/// then evaluate and attack on its test families.
pub fn run_repetition(
    prepared: &[PreparedFamily],
    split: &Split,
    index: usize,
    config: &ExperimentConfig,
) -> Result<RepetitionReport> {
    let seed = repetition_seed(config.seed, index);
    let train = select(prepared, &split.train)?;
    let test = select(prepared, &split.test)?;
    let (models, diag) = train_detector(&train, &config.train_settings(), seed)?;

    let test_visual = visual_deltas(&test, &models.vocabulary)?;
    let mut test_scores = Vec::new();
    for (f, deltas) in test.iter().zip(&test_visual) {
        for (p, v) in f.pages.iter().zip(deltas) {
            test_scores.push(PageScoreRecord {
                family_id: f.family_id.clone(),
                page_id: p.page_id.clone(),
                label: p.label,
                scores: models.page_scores(&p.html_delta, v)?,
            });
        }
    }
    let labels: Vec<f64> = test_scores.iter().map(|r| r.label.sign()).collect();

    let mut schemes = Vec::new();
    let mut rocs = Vec::new();
    let mut attack_threshold = Vec::new();
    for scheme in Scheme::ALL {
        let s: Vec<f64> = test_scores.iter().map(|r| r.scores.get(scheme)).collect();
        let roc = compute_roc(&s, &labels)?;
        schemes.push(SchemeSummary {
            scheme,
            auc: roc.auc(),
            operating_points: config.fp_targets.iter().map(|&fp| OperatingPoint::at(&roc, fp)).collect(),
        });
        attack_threshold.push((scheme, OperatingPoint::at(&roc, config.attack_fp_target)));
        rocs.push((scheme, roc));
    }
    let threshold_of = |scheme: Scheme| {
        attack_threshold
            .iter()
            .find(|(s, _)| *s == scheme)
            .map(|(_, op)| op.threshold)
            .unwrap_or(None)
    };

    // attack sweep over the test phishing pages
    let phish: Vec<&PageScoreRecord> = test_scores.iter().filter(|r| r.label == PageLabel::Phish).collect();
    let phish_deltas: Vec<[f64; 11]> = test
        .iter()
        .flat_map(|f| f.pages.iter())
        .filter(|p| p.label == PageLabel::Phish)
        .map(|p| p.html_delta.to_array())
        .collect();
    let phish_channels: Vec<ChannelScores> = phish.iter().map(|r| r.scores.channels).collect();
    let thresholds: Vec<(Scheme, Option<f64>)> = Scheme::ALL.iter().map(|&s| (s, threshold_of(s))).collect();
    let attack = detection_under_attack(&models, &phish_deltas, &phish_channels, &thresholds, config.max_budget)?
        .into_iter()
        .map(|(budget, scheme, detection_rate)| AttackPoint {
            repetition: index,
            budget,
            scheme,
            detection_rate,
            threshold: threshold_of(scheme),
        })
        .collect();
    let visual_phish: Vec<f64> = phish.iter().map(|r| r.scores.channels.visual).collect();
    let snapshot_dr_at_max_threshold =
        detection_rate(&visual_phish, threshold_of(Scheme::Max).unwrap_or(f64::INFINITY));

    let roc_of = |scheme: Scheme| &rocs.iter().find(|(s, _)| *s == scheme).expect("all schemes evaluated").1;
    let trained_op = OperatingPoint::at(roc_of(Scheme::Trained), config.attack_fp_target);
    let matched_fp = MatchedFalsePositives {
        detection_rate: trained_op.detection_rate,
        trained_fp: fp_at_dr(roc_of(Scheme::Trained), trained_op.detection_rate),
        adversarial_fp: fp_at_dr(roc_of(Scheme::Adversarial), trained_op.detection_rate),
    };

    let candidate = |s: FusionScheme| {
        models.fusion_model(s).and_then(|m| m.combiner.as_ref()).map(|c| super::cv::Candidate {
            c: c.c_param,
            gamma: Some(c.gamma),
        })
    };
    Ok(RepetitionReport {
        index,
        seed,
        train_families: split.train.clone(),
        test_families: split.test.clone(),
        selected: SelectedParameters {
            html_c: diag.html_c,
            visual_c: diag.visual_c,
            trained: candidate(FusionScheme::Trained),
            adversarial: candidate(FusionScheme::Adversarial),
        },
        schemes,
        attack,
        snapshot_dr_at_max_threshold,
        matched_fp,
        test_scores,
        artifact_digest: artifact_digest(&models)?,
        vocabulary_words: diag.vocabulary_words,
        rocs,
    })
}

/// Detection rate of each scheme at its fixed threshold (`None` = `+∞`) when
/// every phishing page's HTML delta is attacked with budgets `0..=max_budget`.
/// Visual scores are left untouched. Returns `(budget, scheme, rate)` rows.
pub fn detection_under_attack(
    models: &DetectorModels,
    phish_html: &[[f64; 11]],
    phish_scores: &[ChannelScores],
    thresholds: &[(Scheme, Option<f64>)],
    max_budget: usize,
) -> Result<Vec<(usize, Scheme, f64)>> {
    if phish_html.len() != phish_scores.len() {
        return Err(Error::DimensionMismatch {
            expected: phish_html.len(),
            actual: phish_scores.len(),
        });
    }
    let mut out = Vec::new();
    for budget in 0..=max_budget {
        let attacked = phish_html
            .iter()
            .zip(phish_scores)
            .map(|(d, ch)| {
                let (v, _) = greedy_attack(&models.html, d, budget)?;
                Ok(ChannelScores {
                    html: models.html.score(&v)?,
                    visual: ch.visual,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for &(scheme, threshold) in thresholds {
            let scores = attacked
                .iter()
                .map(|ch| models.scheme_score(scheme, *ch))
                .collect::<Result<Vec<_>>>()?;
            out.push((budget, scheme, detection_rate(&scores, threshold.unwrap_or(f64::INFINITY))));
        }
    }
    Ok(out)
}

fn summarize(reps: &[RepetitionReport], config: &ExperimentConfig) -> (Vec<AverageSummary>, Vec<AttackAverage>) {
    let n = reps.len() as f64;
    let grid = default_fp_grid();
    let averages = Scheme::ALL
        .iter()
        .map(|&scheme| {
            let summaries: Vec<&SchemeSummary> =
                reps.iter().filter_map(|r| r.schemes.iter().find(|s| s.scheme == scheme)).collect();
            let detection = config
                .fp_targets
                .iter()
                .enumerate()
                .map(|(k, &fp)| {
                    let v: Vec<f64> = summaries.iter().map(|s| s.operating_points[k].detection_rate).collect();
                    RateSummary {
                        fp_target: fp,
                        mean: v.iter().sum::<f64>() / n,
                        min: v.iter().copied().fold(f64::INFINITY, f64::min),
                        max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    }
                })
                .collect();
            let curves: Vec<RocCurve> = reps
                .iter()
                .filter_map(|r| r.rocs.iter().find(|(s, _)| *s == scheme).map(|(_, c)| c.clone()))
                .collect();
            AverageSummary {
                scheme,
                mean_auc: summaries.iter().map(|s| s.auc).sum::<f64>() / n,
                detection,
                roc: vertical_average(&curves, &grid),
            }
        })
        .collect();
    let mut attack_averages = Vec::new();
    for budget in 0..=config.max_budget {
        for scheme in Scheme::ALL {
            let v: Vec<f64> = reps
                .iter()
                .flat_map(|r| r.attack.iter())
                .filter(|a| a.budget == budget && a.scheme == scheme)
                .map(|a| a.detection_rate)
                .collect();
            attack_averages.push(AttackAverage {
                budget,
                scheme,
                detection_rate: v.iter().sum::<f64>() / v.len().max(1) as f64,
            });
        }
    }
    (averages, attack_averages)
}
