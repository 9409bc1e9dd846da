//! On-disk model bundle: one directory holding every artifact `score`
//! needs, tied together by a versioned manifest.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::fusion::{FusionModel, FusionScheme};
use crate::html::HtmlExtractor;
use crate::pipeline::{ChannelModel, DetectorModels};
use crate::visual::Vocabulary;
use crate::{Error, Result};

pub const BUNDLE_FILE: &str = "bundle.json";
pub const BUNDLE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleComponents {
    pub vocabulary: String,
    pub html_model: String,
    pub visual_model: String,
    pub fusion_max: String,
    pub fusion_trained: String,
    pub fusion_adversarial: String,
}

impl Default for BundleComponents {
    fn default() -> Self {
        Self {
            vocabulary: "vocabulary.txt".into(),
            html_model: "html_model.json".into(),
            visual_model: "visual_model.json".into(),
            fusion_max: "fusion_max.json".into(),
            fusion_trained: "fusion_trained.json".into(),
            fusion_adversarial: "fusion_adversarial.json".into(),
        }
    }
}

impl BundleComponents {
    fn fusion(&self, scheme: FusionScheme) -> &str {
        match scheme {
            FusionScheme::Max => &self.fusion_max,
            FusionScheme::Trained => &self.fusion_trained,
            FusionScheme::Adversarial => &self.fusion_adversarial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleManifest {
    pub format_version: u32,
    pub seed: u64,
    pub snapshot_width: u32,
    pub snapshot_height: u32,
    pub suffix_list: Option<PathBuf>,
    pub stop_words_dir: Option<PathBuf>,
    pub components: BundleComponents,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub manifest: BundleManifest,
    pub models: DetectorModels,
}

/// Component versions are stamped into every JSON file so a bundle mixed
/// from two training runs of different formats is rejected.
#[derive(Serialize, Deserialize)]
struct Versioned<T> {
    format_version: u32,
    #[serde(flatten)]
    inner: T,
}

#[derive(Serialize, Deserialize)]
struct Wrapped<T> {
    model: T,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let v = Versioned {
        format_version: BUNDLE_VERSION,
        inner: Wrapped { model: value },
    };
    std::fs::write(path, serde_json::to_string_pretty(&v)?).map_err(|e| Error::io(path, e))
}

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    if !path.is_file() {
        return Err(Error::Schema(format!("bundle is missing its {what} ({})", path.display())));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let v: Versioned<Wrapped<T>> =
        serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{what} ({}): {e}", path.display())))?;
    if v.format_version != BUNDLE_VERSION {
        return Err(Error::Schema(format!(
            "{what} ({}) has format version {}, expected {BUNDLE_VERSION}",
            path.display(),
            v.format_version
        )));
    }
    Ok(v.inner.model)
}

impl ModelBundle {
    pub fn canonical_size(&self) -> (u32, u32) {
        (self.manifest.snapshot_width, self.manifest.snapshot_height)
    }

    pub fn extractor(&self) -> Result<HtmlExtractor> {
        HtmlExtractor::from_config(self.manifest.stop_words_dir.as_deref(), self.manifest.suffix_list.as_deref())
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let c = &self.manifest.components;
        self.models.vocabulary.save(&dir.join(&c.vocabulary))?;
        write_json(&dir.join(&c.html_model), &self.models.html)?;
        write_json(&dir.join(&c.visual_model), &self.models.visual)?;
        for scheme in FusionScheme::ALL {
            let m = self
                .models
                .fusion_model(scheme)
                .ok_or_else(|| Error::invalid(format!("no {} fusion model to save", scheme.name())))?;
            write_json(&dir.join(c.fusion(scheme)), m)?;
        }
        let path = dir.join(BUNDLE_FILE);
        std::fs::write(&path, serde_json::to_string_pretty(&self.manifest)?).map_err(|e| Error::io(&path, e))
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(BUNDLE_FILE);
        if !path.is_file() {
            return Err(Error::MissingFile(path));
        }
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: BundleManifest =
            serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        if manifest.format_version != BUNDLE_VERSION {
            return Err(Error::Schema(format!(
                "bundle format version {} is not supported (expected {BUNDLE_VERSION})",
                manifest.format_version
            )));
        }
        let c = &manifest.components;
        let vocab_path = dir.join(&c.vocabulary);
        if !vocab_path.is_file() {
            return Err(Error::Schema(format!("bundle is missing its vocabulary ({})", vocab_path.display())));
        }
        let vocabulary = Vocabulary::load(&vocab_path)?;
        let html: ChannelModel = read_json(&dir.join(&c.html_model), "HTML model")?;
        let visual: ChannelModel = read_json(&dir.join(&c.visual_model), "visual model")?;
        if visual.svm.weights.len() != crate::visual::VisualDescriptor::dimension_for(vocabulary.k()) {
            return Err(Error::Schema(format!(
                "visual model dimension {} does not match a {}-word vocabulary",
                visual.svm.weights.len(),
                vocabulary.k()
            )));
        }
        let mut fusion = Vec::new();
        for scheme in FusionScheme::ALL {
            let m: FusionModel = read_json(&dir.join(c.fusion(scheme)), &format!("{} fusion model", scheme.name()))?;
            if m.scheme != scheme {
                return Err(Error::Schema(format!("{} holds a {} model", c.fusion(scheme), m.scheme.name())));
            }
            fusion.push(m);
        }
        Ok(Self {
            manifest,
            models: DetectorModels {
                vocabulary,
                html,
                visual,
                fusion,
            },
        })
    }
}
