//! Trains a bundle on a synthetic corpus, saves it, and scores pages.

use pagedelta::bundle::{BundleComponents, BundleManifest, ModelBundle, BUNDLE_VERSION};
use pagedelta::corpus::{generate_synthetic_corpus, load_corpus, PageLabel};
use pagedelta::evaluate::ExperimentConfig;
use pagedelta::html::HtmlExtractor;
use pagedelta::pipeline::{prepare_corpus, train_detector, PreparedFamily, Scheme};

fn main() -> pagedelta::Result<()> {
    let dir = std::env::temp_dir().join("pagedelta-score-page");
    let families = load_corpus(&generate_synthetic_corpus(16, 4, 11, &dir.join("corpus"))?)?;
    let config = ExperimentConfig {
        vocabulary_size: 64,
        ..ExperimentConfig::default()
    };
    let extractor = HtmlExtractor::default();
    let prepared = prepare_corpus(&families[..12], &extractor, config.canonical_size())?;
    let refs: Vec<&PreparedFamily> = prepared.iter().collect();
    let (models, _) = train_detector(&refs, &config.train_settings(), config.seed)?;
    let bundle = ModelBundle {
        manifest: BundleManifest {
            format_version: BUNDLE_VERSION,
            seed: config.seed,
            snapshot_width: config.snapshot_width,
            snapshot_height: config.snapshot_height,
            suffix_list: None,
            stop_words_dir: None,
            components: BundleComponents::default(),
        },
        models,
    };
    bundle.save(&dir.join("bundle"))?;
    let bundle = ModelBundle::load(&dir.join("bundle"))?;

    for f in &families[12..] {
        let h = &f.homepage;
        for p in &f.pages {
            let s = bundle.models.score_artifacts(
                &extractor,
                bundle.canonical_size(),
                &std::fs::read(&p.html_path).unwrap(),
                &p.url,
                &p.snapshot_path,
                &std::fs::read(&h.html_path).unwrap(),
                &h.url,
                &h.snapshot_path,
                &f.homepage_aliases,
            )?;
            let g = s.get(Scheme::Trained);
            let truth = if p.label == PageLabel::Phish { "phish" } else { "legit" };
            println!("{}/{:<3} g={g:+.3} truth={truth}", f.family_id, p.page_id);
        }
    }
    Ok(())
}
