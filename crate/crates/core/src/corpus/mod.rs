//! Family-structured page corpora: manifest loading, family-level
//! train/test splits and a synthetic corpus generator.

mod render;
mod synthetic;

pub use synthetic::generate_synthetic_corpus;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use url::Url;

use crate::html::{registrable_domain, DomainRule};
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PageLabel {
    Phish,
    Legit,
    Homepage,
}

impl PageLabel {
    /// +1 for phishing, −1 otherwise.
    pub fn sign(self) -> f64 {
        if self == PageLabel::Phish {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageArtifact {
    pub page_id: String,
    pub html_path: PathBuf,
    pub snapshot_path: PathBuf,
    pub url: String,
    pub label: PageLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub family_id: String,
    pub homepage: PageArtifact,
    /// Other URLs under which the homepage is reachable.
    pub homepage_aliases: Vec<String>,
    pub pages: Vec<PageArtifact>,
}

impl FamilyRecord {
    pub fn phish_count(&self) -> usize {
        self.pages.iter().filter(|p| p.label == PageLabel::Phish).count()
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct Manifest {
    pub version: u32,
    pub families: Vec<ManifestFamily>,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct ManifestFamily {
    pub id: String,
    pub homepage: ManifestHomepage,
    pub pages: Vec<ManifestPage>,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct ManifestHomepage {
    pub html: String,
    pub png: String,
    pub url: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct ManifestPage {
    pub id: String,
    pub html: String,
    pub png: String,
    pub url: String,
    pub label: String,
}

fn existing(root: &Path, rel: &str) -> Result<PathBuf> {
    let p = root.join(rel);
    if !p.is_file() {
        return Err(Error::MissingFile(p));
    }
    Ok(p)
}

fn absolute_url(raw: &str) -> Result<String> {
    let u = Url::parse(raw).map_err(|e| Error::InvalidUrl {
        url: raw.to_string(),
        reason: e.to_string(),
    })?;
    if u.host_str().is_none_or(str::is_empty) {
        return Err(Error::InvalidUrl {
            url: raw.to_string(),
            reason: "no host".into(),
        });
    }
    Ok(raw.to_string())
}

/// Loads and validates `manifest.json`, returning the families.
pub fn load_corpus(manifest_path: &Path) -> Result<Vec<FamilyRecord>> {
    load_corpus_with_warnings(manifest_path).map(|(f, _)| f)
}

/// Like [`load_corpus`], also returning non-fatal findings (pages whose
/// registrable domain differs from the homepage's).
pub fn load_corpus_with_warnings(manifest_path: &Path) -> Result<(Vec<FamilyRecord>, Vec<String>)> {
    if !manifest_path.is_file() {
        return Err(Error::MissingFile(manifest_path.to_path_buf()));
    }
    let text = std::fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", manifest_path.display())))?;
    if manifest.version != MANIFEST_VERSION {
        return Err(Error::Schema(format!(
            "unsupported manifest version {} (expected {MANIFEST_VERSION})",
            manifest.version
        )));
    }
    let root = manifest_path.parent().unwrap_or(Path::new("."));
    let mut seen = BTreeSet::new();
    let mut families = Vec::with_capacity(manifest.families.len());
    let mut warnings = Vec::new();
    for fam in manifest.families {
        if !seen.insert(fam.id.clone()) {
            return Err(Error::Schema(format!("duplicate family id {:?}", fam.id)));
        }
        if fam.pages.is_empty() {
            return Err(Error::Schema(format!("family {:?} has no pages", fam.id)));
        }
        let homepage = PageArtifact {
            page_id: format!("{}/homepage", fam.id),
            html_path: existing(root, &fam.homepage.html)?,
            snapshot_path: existing(root, &fam.homepage.png)?,
            url: absolute_url(&fam.homepage.url)?,
            label: PageLabel::Homepage,
        };
        let home_domain = registrable_domain(&homepage.url, &DomainRule::Naive)?;
        let mut page_ids = BTreeSet::new();
        let mut pages = Vec::with_capacity(fam.pages.len());
        for p in fam.pages {
            let label = match p.label.as_str() {
                "phish" => PageLabel::Phish,
                "legit" => PageLabel::Legit,
                other => {
                    return Err(Error::Schema(format!(
                        "page {:?} in family {:?}: unknown label {other:?}",
                        p.id, fam.id
                    )))
                }
            };
            if !page_ids.insert(p.id.clone()) {
                return Err(Error::Schema(format!("duplicate page id {:?} in family {:?}", p.id, fam.id)));
            }
            let url = absolute_url(&p.url)?;
            let domain = registrable_domain(&url, &DomainRule::Naive)?;
            if domain != home_domain {
                warnings.push(format!(
                    "family {}: page {} is on {domain}, homepage on {home_domain}",
                    fam.id, p.id
                ));
            }
            pages.push(PageArtifact {
                page_id: p.id,
                html_path: existing(root, &p.html)?,
                snapshot_path: existing(root, &p.png)?,
                url,
                label,
            });
        }
        for a in &fam.homepage.aliases {
            absolute_url(a)?;
        }
        families.push(FamilyRecord {
            family_id: fam.id,
            homepage,
            homepage_aliases: fam.homepage.aliases,
            pages,
        });
    }
    Ok((families, warnings))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<String>,
    pub test: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub repetitions: Vec<Split>,
    pub seed: u64,
}

/// Random family-level splits. Each repetition sends
/// `round(train_fraction · N)` families (at least one, at most `N − 1`) to
/// training.
pub fn make_splits(families: &[FamilyRecord], train_fraction: f64, repetitions: usize, seed: u64) -> Result<SplitPlan> {
    let ids: Vec<String> = families.iter().map(|f| f.family_id.clone()).collect();
    make_id_splits(&ids, train_fraction, repetitions, seed)
}

pub fn make_id_splits(ids: &[String], train_fraction: f64, repetitions: usize, seed: u64) -> Result<SplitPlan> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!("train fraction must lie in (0, 1), got {train_fraction}")));
    }
    if repetitions == 0 {
        return Err(Error::invalid("at least one repetition is required"));
    }
    let mut sorted = ids.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != ids.len() {
        return Err(Error::Schema("duplicate family ids".into()));
    }
    let n = sorted.len();
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 families to split, got {n}")));
    }
    let n_train = ((train_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let repetitions = (0..repetitions)
        .map(|_| {
            let mut order = sorted.clone();
            order.shuffle(&mut rng);
            let mut train = order[..n_train].to_vec();
            let mut test = order[n_train..].to_vec();
            train.sort();
            test.sort();
            Split { train, test }
        })
        .collect();
    Ok(SplitPlan { repetitions, seed })
}
