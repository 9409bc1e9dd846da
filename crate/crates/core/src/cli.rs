//! Command-line front end. [`run`] returns the process exit code: 0 for
//! success or a legitimate verdict, 1 for a phishing verdict, 2 for errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bundle::{BundleComponents, BundleManifest, ModelBundle, BUNDLE_VERSION};
use crate::corpus::{generate_synthetic_corpus, load_corpus_with_warnings, FamilyRecord, PageLabel};
use crate::evaluate::{compute_roc, detection_under_attack, run_prepared, ExperimentConfig, OperatingPoint};
use crate::html::{HtmlExtractor, HTML_FEATURE_NAMES};
use crate::pipeline::{prepare_corpus, train_detector, train_vocabulary, visual_deltas, PreparedFamily, Scheme};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PHISH: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pagedelta", version, about = "Phishing page detection from page-vs-homepage deltas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic corpus with one phishing page per family.
    GenCorpus(GenCorpusArgs),
    /// Build a visual vocabulary from every snapshot of a corpus.
    BuildVocab(BuildVocabArgs),
    /// Write per-page HTML (and optionally visual) delta features as CSV.
    Extract(ExtractArgs),
    /// Train all models on a corpus and write a model bundle.
    Train(TrainArgs),
    /// Score one page against its homepage.
    Score(ScoreArgs),
    /// Run the repeated train/test protocol and write report files.
    Evaluate(EvaluateArgs),
    /// Attack a corpus's phishing pages under a trained bundle.
    Attack(AttackArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON experiment configuration; defaults apply to missing fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the configuration's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct GenCorpusArgs {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub families: usize,
    /// Pages per family, including the phishing page.
    #[arg(long, default_value_t = 4)]
    pub pages: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BuildVocabArgs {
    /// Corpus manifest (or the directory holding `manifest.json`).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output vocabulary file.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output directory for `html_features.csv` and `visual_features.csv`.
    #[arg(long)]
    pub out: PathBuf,
    /// Vocabulary for visual features; without it only HTML features are written.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output bundle directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Model bundle directory.
    #[arg(long)]
    pub bundle: PathBuf,
    #[arg(long)]
    pub page_html: PathBuf,
    #[arg(long)]
    pub page_png: PathBuf,
    #[arg(long)]
    pub page_url: String,
    #[arg(long)]
    pub homepage_html: PathBuf,
    #[arg(long)]
    pub homepage_png: PathBuf,
    #[arg(long)]
    pub homepage_url: String,
    /// Additional URL under which the homepage is reachable (repeatable).
    #[arg(long = "alias")]
    pub aliases: Vec<String>,
    /// Scheme producing the decision score.
    #[arg(long, default_value = "trained")]
    pub scheme: Scheme,
    /// Decision threshold: score ≥ threshold is a phish.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output directory for report.json, roc.csv, dr.csv and attack.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// Adds an FP operating point to the configured ones.
    #[arg(long)]
    pub fp_target: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[arg(long)]
    pub bundle: PathBuf,
    /// Corpus whose pages fix the clean threshold and get attacked.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output CSV (repetition, budget, scheme, detection_rate, threshold).
    #[arg(long)]
    pub out: PathBuf,
    /// FP rate of the clean operating threshold.
    #[arg(long, default_value_t = 0.01)]
    pub fp_target: f64,
    /// Largest number of modified HTML features.
    #[arg(long, default_value_t = 11)]
    pub budget: usize,
    /// Restrict to one scheme; all schemes by default.
    #[arg(long)]
    pub scheme: Option<Scheme>,
}

/// Parses `args` (including the program name) and runs the command.
/// Output lines go to `out`, errors to `err`.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match run(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::GenCorpus(a) => {
            let manifest = generate_synthetic_corpus(a.families, a.pages, a.seed, &a.out)?;
            say(out, format_args!("wrote {}", manifest.display()))?;
            Ok(EXIT_OK)
        }
        Command::BuildVocab(a) => {
            let cfg = a.common.load()?;
            let prepared = prepare(&a.corpus, &cfg, err)?;
            let refs: Vec<&PreparedFamily> = prepared.iter().collect();
            let (vocab, n) = train_vocabulary(&refs, &cfg.train_settings(), cfg.seed)?;
            vocab.save(&a.out)?;
            say(out, format_args!("wrote {} ({} words from {n} samples)", a.out.display(), vocab.k()))?;
            Ok(EXIT_OK)
        }
        Command::Extract(a) => extract(a, out, err),
        Command::Train(a) => {
            let cfg = a.common.load()?;
            let prepared = prepare(&a.corpus, &cfg, err)?;
            let refs: Vec<&PreparedFamily> = prepared.iter().collect();
            let (models, diag) = train_detector(&refs, &cfg.train_settings(), cfg.seed)?;
            let bundle = ModelBundle {
                manifest: BundleManifest {
                    format_version: BUNDLE_VERSION,
                    seed: cfg.seed,
                    snapshot_width: cfg.snapshot_width,
                    snapshot_height: cfg.snapshot_height,
                    suffix_list: cfg.suffix_list.clone(),
                    stop_words_dir: cfg.stop_words_dir.clone(),
                    components: BundleComponents::default(),
                },
                models,
            };
            bundle.save(&a.out)?;
            say(
                out,
                format_args!("wrote {} (html C={}, visual C={})", a.out.display(), diag.html_c, diag.visual_c),
            )?;
            Ok(EXIT_OK)
        }
        Command::Score(a) => score(a, out),
        Command::Evaluate(a) => {
            let mut cfg = a.common.load()?;
            if let Some(fp) = a.fp_target {
                if !cfg.fp_targets.contains(&fp) {
                    cfg.fp_targets.push(fp);
                }
                cfg.validate()?;
            }
            let prepared = prepare(&a.corpus, &cfg, err)?;
            let report = run_prepared(&prepared, &cfg)?;
            report.write_to(&a.out)?;
            for avg in &report.averages {
                for d in &avg.detection {
                    say(
                        out,
                        format_args!(
                            "{:<12} DR@{:.3}={:.4} AUC={:.4}",
                            avg.scheme.name(),
                            d.fp_target,
                            d.mean,
                            avg.mean_auc
                        ),
                    )?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Attack(a) => attack(a, out, err),
    }
}

fn say(out: &mut dyn Write, args: std::fmt::Arguments) -> Result<()> {
    writeln!(out, "{args}").map_err(|e| Error::io("<stdout>", e))
}

fn manifest_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(crate::corpus::MANIFEST_FILE)
    } else {
        p.to_path_buf()
    }
}

fn load(corpus: &Path, err: &mut dyn Write) -> Result<Vec<FamilyRecord>> {
    let (families, warnings) = load_corpus_with_warnings(&manifest_path(corpus))?;
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(families)
}

fn prepare(corpus: &Path, cfg: &ExperimentConfig, err: &mut dyn Write) -> Result<Vec<PreparedFamily>> {
    let families = load(corpus, err)?;
    let extractor = HtmlExtractor::from_config(cfg.stop_words_dir.as_deref(), cfg.suffix_list.as_deref())?;
    prepare_corpus(&families, &extractor, cfg.canonical_size())
}

fn label_name(l: PageLabel) -> &'static str {
    match l {
        PageLabel::Phish => "phish",
        PageLabel::Legit => "legit",
        PageLabel::Homepage => "homepage",
    }
}

fn extract(a: ExtractArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = a.common.load()?;
    let prepared = prepare(&a.corpus, &cfg, err)?;
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let html_path = a.out.join("html_features.csv");
    let mut w = csv::Writer::from_path(&html_path)?;
    let mut header = vec!["family_id".to_string(), "page_id".into(), "label".into()];
    header.extend(HTML_FEATURE_NAMES.iter().map(|s| s.to_string()));
    w.write_record(&header)?;
    for f in &prepared {
        for p in &f.pages {
            let mut row = vec![f.family_id.clone(), p.page_id.clone(), label_name(p.label).into()];
            row.extend(p.html_delta.to_array().iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| Error::io(&html_path, e))?;
    say(out, format_args!("wrote {}", html_path.display()))?;
    if let Some(vp) = &a.vocab {
        let vocab = crate::visual::Vocabulary::load(vp)?;
        let refs: Vec<&PreparedFamily> = prepared.iter().collect();
        let deltas = visual_deltas(&refs, &vocab)?;
        let path = a.out.join("visual_features.csv");
        let mut w = csv::Writer::from_path(&path)?;
        let dim = crate::visual::VisualDescriptor::dimension_for(vocab.k());
        let mut header = vec!["family_id".to_string(), "page_id".into(), "label".into()];
        header.extend((0..dim).map(|i| format!("v{i}")));
        w.write_record(&header)?;
        for (f, d) in prepared.iter().zip(&deltas) {
            for (p, v) in f.pages.iter().zip(d) {
                let mut row = vec![f.family_id.clone(), p.page_id.clone(), label_name(p.label).into()];
                row.extend(v.iter().map(|x| x.to_string()));
                w.write_record(&row)?;
            }
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        say(out, format_args!("wrote {}", path.display()))?;
    }
    Ok(EXIT_OK)
}

fn require(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::MissingFile(path.to_path_buf()))
    }
}

fn score(a: ScoreArgs, out: &mut dyn Write) -> Result<i32> {
    for p in [&a.page_html, &a.page_png, &a.homepage_html, &a.homepage_png] {
        require(p)?;
    }
    let bundle = ModelBundle::load(&a.bundle)?;
    let extractor = bundle.extractor()?;
    let read = |p: &Path| std::fs::read(p).map_err(|e| Error::io(p, e));
    let scores = bundle.models.score_artifacts(
        &extractor,
        bundle.canonical_size(),
        &read(&a.page_html)?,
        &a.page_url,
        &a.page_png,
        &read(&a.homepage_html)?,
        &a.homepage_url,
        &a.homepage_png,
        &a.aliases,
    )?;
    let g = scores.get(a.scheme);
    let phish = g >= a.threshold;
    say(
        out,
        format_args!(
            "s1={:.6} s2={:.6} g={:.6} scheme={} verdict={}",
            scores.normalized[0],
            scores.normalized[1],
            g,
            a.scheme.name(),
            if phish { "phish" } else { "legit" }
        ),
    )?;
    Ok(if phish { EXIT_PHISH } else { EXIT_OK })
}

fn attack(a: AttackArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if a.budget > crate::html::HTML_FEATURE_COUNT {
        return Err(Error::invalid(format!(
            "budget {} exceeds the {} HTML features",
            a.budget,
            crate::html::HTML_FEATURE_COUNT
        )));
    }
    if !(0.0..=1.0).contains(&a.fp_target) {
        return Err(Error::invalid(format!("fp target {} outside [0, 1]", a.fp_target)));
    }
    let bundle = ModelBundle::load(&a.bundle)?;
    let families = load(&a.corpus, err)?;
    let prepared = prepare_corpus(&families, &bundle.extractor()?, bundle.canonical_size())?;
    let refs: Vec<&PreparedFamily> = prepared.iter().collect();
    let deltas = visual_deltas(&refs, &bundle.models.vocabulary)?;
    let mut all = Vec::new();
    let mut phish_html = Vec::new();
    let mut phish_scores = Vec::new();
    for (f, d) in prepared.iter().zip(&deltas) {
        for (p, v) in f.pages.iter().zip(d) {
            let s = bundle.models.page_scores(&p.html_delta, v)?;
            if p.label == PageLabel::Phish {
                phish_html.push(p.html_delta.to_array());
                phish_scores.push(s.channels);
            }
            all.push((s, p.label.sign()));
        }
    }
    let labels: Vec<f64> = all.iter().map(|(_, l)| *l).collect();
    let schemes: Vec<Scheme> = a.scheme.map_or_else(|| Scheme::ALL.to_vec(), |s| vec![s]);
    let mut thresholds = Vec::new();
    for &s in &schemes {
        let sc: Vec<f64> = all.iter().map(|(p, _)| p.get(s)).collect();
        thresholds.push((s, OperatingPoint::at(&compute_roc(&sc, &labels)?, a.fp_target).threshold));
    }
    let rows = detection_under_attack(&bundle.models, &phish_html, &phish_scores, &thresholds, a.budget)?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(&a.out)?;
    w.write_record(["repetition", "budget", "scheme", "detection_rate", "threshold"])?;
    for (budget, scheme, dr) in &rows {
        let t = thresholds.iter().find(|(s, _)| s == scheme).and_then(|(_, t)| *t);
        w.write_record([
            "0".to_string(),
            budget.to_string(),
            scheme.name().to_string(),
            dr.to_string(),
            t.map_or_else(|| "inf".to_string(), |v| v.to_string()),
        ])?;
        say(out, format_args!("budget={budget} scheme={} dr={dr:.4}", scheme.name()))?;
    }
    w.flush().map_err(|e| Error::io(&a.out, e))?;
    Ok(EXIT_OK)
}
