//! The end-to-end detector: per-page feature preparation, the two channel
//! models, and a trained bundle of everything needed to score a page.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use url::Url;

use crate::corpus::{FamilyRecord, PageArtifact, PageLabel};
use crate::evaluate::{candidate_grid, grid_search_cv, stacked_scores, Candidate, StackedScores};
use crate::evasion::SeparableScore;
use crate::fusion::{train_fusion, AdversarialOptions, FusionModel, FusionScheme, FusionTraining, ScorePair};
use crate::html::{HtmlDeltaVector, HtmlExtractor};
use crate::learn::{
    fit_percentile_scaler, linear_gram, score_linear, train_linear_svm_gram, LinearSvmModel, LinearSvmOptions,
    PercentileScaler,
};
use crate::visual::{
    build_vocabulary_with, load_snapshot, sample_words, visual_delta, KMeansOptions, SnapshotFeatures, Vocabulary,
};
use crate::{Error, Result};

/// Classifier outputs that can be thresholded: the two channels alone and
/// the three fusion rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Html,
    Visual,
    Max,
    Trained,
    Adversarial,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::Html, Scheme::Visual, Scheme::Max, Scheme::Trained, Scheme::Adversarial];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Html => "html",
            Scheme::Visual => "visual",
            Scheme::Max => "max",
            Scheme::Trained => "trained",
            Scheme::Adversarial => "adversarial",
        }
    }

    pub fn fusion(self) -> Option<FusionScheme> {
        match self {
            Scheme::Max => Some(FusionScheme::Max),
            Scheme::Trained => Some(FusionScheme::Trained),
            Scheme::Adversarial => Some(FusionScheme::Adversarial),
            _ => None,
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown scheme {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct PreparedPage {
    pub page_id: String,
    pub label: PageLabel,
    pub html_delta: HtmlDeltaVector,
    pub snapshot: SnapshotFeatures,
}

/// A family with every vocabulary-independent feature extracted.
#[derive(Debug, Clone)]
pub struct PreparedFamily {
    pub family_id: String,
    pub homepage_snapshot: SnapshotFeatures,
    pub pages: Vec<PreparedPage>,
}

fn read(path: &std::path::Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn parse_url(raw: &str) -> Result<Url> {
    Url::parse(raw).map_err(|e| Error::InvalidUrl {
        url: raw.to_string(),
        reason: e.to_string(),
    })
}

fn snapshot(a: &PageArtifact, canonical: (u32, u32)) -> Result<SnapshotFeatures> {
    SnapshotFeatures::extract(&load_snapshot(&a.snapshot_path)?, canonical)
}

pub fn prepare_family(family: &FamilyRecord, extractor: &HtmlExtractor, canonical: (u32, u32)) -> Result<PreparedFamily> {
    let home = extractor.parse(&read(&family.homepage.html_path)?, &parse_url(&family.homepage.url)?);
    let pages = family
        .pages
        .par_iter()
        .map(|p| {
            let parsed = extractor.parse(&read(&p.html_path)?, &parse_url(&p.url)?);
            Ok(PreparedPage {
                page_id: p.page_id.clone(),
                label: p.label,
                html_delta: extractor.delta(&parsed, &home, &family.homepage_aliases),
                snapshot: snapshot(p, canonical)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PreparedFamily {
        family_id: family.family_id.clone(),
        homepage_snapshot: snapshot(&family.homepage, canonical)?,
        pages,
    })
}

pub fn prepare_corpus(
    families: &[FamilyRecord],
    extractor: &HtmlExtractor,
    canonical: (u32, u32),
) -> Result<Vec<PreparedFamily>> {
    families.iter().map(|f| prepare_family(f, extractor, canonical)).collect()
}

/// Visual delta vectors of every page of every family, in order.
pub fn visual_deltas(families: &[&PreparedFamily], vocab: &Vocabulary) -> Result<Vec<Vec<Vec<f64>>>> {
    families
        .par_iter()
        .map(|f| {
            let home = f.homepage_snapshot.describe(vocab);
            f.pages
                .iter()
                .map(|p| Ok(visual_delta(&p.snapshot.describe(vocab), &home)?.into_values()))
                .collect()
        })
        .collect()
}

/// Percentile scaling followed by a linear SVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub scaler: PercentileScaler,
    pub svm: LinearSvmModel,
}

impl ChannelModel {
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        score_linear(&self.svm, &self.scaler.transform(x)?)
    }
}

impl SeparableScore for ChannelModel {
    fn dim(&self) -> usize {
        self.svm.weights.len()
    }

    fn bias(&self) -> f64 {
        self.svm.bias
    }

    fn term(&self, feature: usize, value: f64) -> f64 {
        self.svm.weights[feature] * self.scaler.scale(feature, value)
    }
}

/// Fits the scaler on `rows`, selects C by grouped cross-validation and
/// trains on all rows.
pub fn train_channel(
    rows: &[Vec<f64>],
    y: &[f64],
    groups: &[usize],
    c_grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<(ChannelModel, Candidate)> {
    let scaler = fit_percentile_scaler(rows)?;
    let scaled = scaler.transform_rows(rows)?;
    let gram = linear_gram(&scaled);
    let n = rows.len();
    let sub_gram = |idx: &[usize]| -> Vec<f64> {
        idx.iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| gram[i * n + j])
            .collect()
    };
    let grid = candidate_grid(c_grid, None);
    let outcome = grid_search_cv(y, groups, &grid, folds, seed, |cand, train, test| {
        let tx: Vec<&Vec<f64>> = train.iter().map(|&i| &scaled[i]).collect();
        let ty: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let (m, _) = train_linear_svm_gram(&tx, &ty, &sub_gram(train), &LinearSvmOptions::new(cand.c))?;
        test.iter().map(|&i| score_linear(&m, &scaled[i])).collect()
    })?;
    let (svm, _) = train_linear_svm_gram(&scaled, y, &gram, &LinearSvmOptions::new(outcome.best.c))?;
    Ok((ChannelModel { scaler, svm }, outcome.best))
}

/// Everything needed to score a page against its homepage.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorModels {
    pub vocabulary: Vocabulary,
    pub html: ChannelModel,
    pub visual: ChannelModel,
    pub fusion: Vec<FusionModel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelScores {
    pub html: f64,
    pub visual: f64,
}

impl DetectorModels {
    pub fn fusion_model(&self, scheme: FusionScheme) -> Option<&FusionModel> {
        self.fusion.iter().find(|f| f.scheme == scheme)
    }

    pub fn channel_scores(&self, html_delta: &HtmlDeltaVector, visual_delta: &[f64]) -> Result<ChannelScores> {
        Ok(ChannelScores {
            html: self.html.score(&html_delta.to_array())?,
            visual: self.visual.score(visual_delta)?,
        })
    }

    /// Output of `scheme` for raw channel scores.
    pub fn scheme_score(&self, scheme: Scheme, s: ChannelScores) -> Result<f64> {
        match scheme {
            Scheme::Html => Ok(s.html),
            Scheme::Visual => Ok(s.visual),
            _ => {
                let fs = scheme.fusion().unwrap_or(FusionScheme::Max);
                let m = self
                    .fusion_model(fs)
                    .ok_or_else(|| Error::invalid(format!("no {} fusion model", fs.name())))?;
                Ok(m.fuse(s.html, s.visual))
            }
        }
    }
}

/// Training-time settings of a detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSettings {
    pub c_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub folds: usize,
    pub adversarial: AdversarialOptions,
    pub vocabulary_size: usize,
    pub vocabulary_sample: usize,
    pub kmeans_max_iter: usize,
    pub kmeans_tol: f64,
}

impl TrainSettings {
    fn fusion_training(&self) -> FusionTraining {
        FusionTraining {
            c_grid: self.c_grid.clone(),
            gamma_grid: self.gamma_grid.clone(),
            folds: self.folds,
            adversarial: self.adversarial,
        }
    }
}

/// Model-selection outcomes and intermediate training data.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingDiagnostics {
    pub html_c: f64,
    pub visual_c: f64,
    pub stacked: StackedScores,
    pub vocabulary_words: usize,
}

/// Visual vocabulary from the training families' words only.
pub fn train_vocabulary(train: &[&PreparedFamily], settings: &TrainSettings, seed: u64) -> Result<(Vocabulary, usize)> {
    let pool = train
        .iter()
        .flat_map(|f| f.homepage_snapshot.words().chain(f.pages.iter().flat_map(|p| p.snapshot.words())));
    let sample = sample_words(pool, settings.vocabulary_sample, seed);
    let opts = KMeansOptions {
        max_iter: settings.kmeans_max_iter,
        tol: settings.kmeans_tol,
    };
    let vocab = build_vocabulary_with(&sample, settings.vocabulary_size, seed, opts, "training families")?;
    Ok((vocab, sample.len()))
}

/// Feature rows, labels and family groups of a set of prepared families.
pub struct TrainingSet {
    pub html: Vec<Vec<f64>>,
    pub visual: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub groups: Vec<usize>,
}

pub fn training_set(families: &[&PreparedFamily], vocab: &Vocabulary) -> Result<TrainingSet> {
    let deltas = visual_deltas(families, vocab)?;
    let mut set = TrainingSet {
        html: Vec::new(),
        visual: Vec::new(),
        y: Vec::new(),
        groups: Vec::new(),
    };
    for (g, (f, vd)) in families.iter().zip(deltas).enumerate() {
        for (p, v) in f.pages.iter().zip(vd) {
            set.html.push(p.html_delta.to_array().to_vec());
            set.visual.push(v);
            set.y.push(p.label.sign());
            set.groups.push(g);
        }
    }
    Ok(set)
}

/// Trains vocabulary, both channels and all fusion rules on `train`.
pub fn train_detector(
    train: &[&PreparedFamily],
    settings: &TrainSettings,
    seed: u64,
) -> Result<(DetectorModels, TrainingDiagnostics)> {
    let (vocabulary, vocabulary_words) = train_vocabulary(train, settings, seed)?;
    let set = training_set(train, &vocabulary)?;
    let stacked = stacked_scores(&set, &settings.c_grid, settings.folds, seed)?;
    let (html, html_c) = train_channel(&set.html, &set.y, &set.groups, &settings.c_grid, settings.folds, seed)?;
    let (visual, visual_c) = train_channel(&set.visual, &set.y, &set.groups, &settings.c_grid, settings.folds, seed)?;
    let training = settings.fusion_training();
    let fusion = FusionScheme::ALL
        .iter()
        .map(|&s| train_fusion(&stacked.raw, &set.groups, s, &training, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        DetectorModels {
            vocabulary,
            html,
            visual,
            fusion,
        },
        TrainingDiagnostics {
            html_c: html_c.c,
            visual_c: visual_c.c,
            stacked,
            vocabulary_words,
        },
    ))
}

/// Scores of one page under every scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageScores {
    pub channels: ChannelScores,
    pub normalized: [f64; 2],
    pub max: f64,
    pub trained: f64,
    pub adversarial: f64,
}

impl PageScores {
    pub fn get(&self, scheme: Scheme) -> f64 {
        match scheme {
            Scheme::Html => self.channels.html,
            Scheme::Visual => self.channels.visual,
            Scheme::Max => self.max,
            Scheme::Trained => self.trained,
            Scheme::Adversarial => self.adversarial,
        }
    }
}

impl DetectorModels {
    pub fn page_scores(&self, html_delta: &HtmlDeltaVector, visual_delta: &[f64]) -> Result<PageScores> {
        let channels = self.channel_scores(html_delta, visual_delta)?;
        let normalized = self
            .fusion_model(FusionScheme::Trained)
            .map_or([channels.html, channels.visual], |m| m.normalize(channels.html, channels.visual));
        Ok(PageScores {
            channels,
            normalized,
            max: self.scheme_score(Scheme::Max, channels)?,
            trained: self.scheme_score(Scheme::Trained, channels)?,
            adversarial: self.scheme_score(Scheme::Adversarial, channels)?,
        })
    }

    /// Scores a page given its raw artifacts and its homepage's.
    #[allow(clippy::too_many_arguments)]
    pub fn score_artifacts(
        &self,
        extractor: &HtmlExtractor,
        canonical: (u32, u32),
        page_html: &[u8],
        page_url: &str,
        page_png: &std::path::Path,
        home_html: &[u8],
        home_url: &str,
        home_png: &std::path::Path,
        aliases: &[String],
    ) -> Result<PageScores> {
        let page = extractor.parse(page_html, &parse_url(page_url)?);
        let home = extractor.parse(home_html, &parse_url(home_url)?);
        let delta = extractor.delta(&page, &home, aliases);
        let p = SnapshotFeatures::extract(&load_snapshot(page_png)?, canonical)?.describe(&self.vocabulary);
        let h = SnapshotFeatures::extract(&load_snapshot(home_png)?, canonical)?.describe(&self.vocabulary);
        self.page_scores(&delta, visual_delta(&p, &h)?.values())
    }
}

pub(crate) fn pairs_from(html: &[f64], visual: &[f64], y: &[f64]) -> Vec<ScorePair> {
    html.iter()
        .zip(visual)
        .zip(y)
        .map(|((a, b), l)| ScorePair::labeled(*a, *b, *l))
        .collect()
}
