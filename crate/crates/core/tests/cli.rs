use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pagedelta"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, repetitions: usize) -> PathBuf {
    let path = dir.join(format!("config{repetitions}.json"));
    let cfg = serde_json::json!({
        "seed": 4,
        "repetitions": repetitions,
        "c_grid": [0.01, 1.0, 100.0],
        "gamma_grid": [0.1, 1.0, 10.0],
        "vocabulary_size": 40,
        "vocabulary_sample": 4000,
        "max_budget": 2
    });
    std::fs::write(&path, cfg.to_string()).unwrap();
    path
}

struct Page {
    html: String,
    png: String,
    url: String,
}

fn page(root: &Path, v: &Value) -> Page {
    Page {
        html: s(&root.join(v["html"].as_str().unwrap())).to_string(),
        png: s(&root.join(v["png"].as_str().unwrap())).to_string(),
        url: v["url"].as_str().unwrap().to_string(),
    }
}

fn score(bundle: &Path, p: &Page, h: &Page, extra: &[&str]) -> Output {
    let mut args = vec![
        "score",
        "--bundle",
        s(bundle),
        "--page-html",
        &p.html,
        "--page-png",
        &p.png,
        "--page-url",
        &p.url,
        "--homepage-html",
        &h.html,
        "--homepage-png",
        &h.png,
        "--homepage-url",
        &h.url,
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn train_score_attack_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let o = run(&["gen-corpus", "--out", s(&corpus), "--families", "14", "--pages", "4", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cfg = write_config(dir.path(), 1);
    let bundle = dir.path().join("bundle");
    let o = run(&["train", "--corpus", s(&corpus), "--config", s(&cfg), "--out", s(&bundle)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["bundle.json", "vocabulary.txt", "html_model.json", "visual_model.json", "fusion_trained.json"] {
        assert!(bundle.join(f).is_file(), "{f}");
    }

    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(corpus.join("manifest.json")).unwrap()).unwrap();
    let fam = &manifest["families"][0];
    let home = page(&corpus, &fam["homepage"]);
    let phish = fam["pages"].as_array().unwrap().iter().find(|p| p["label"] == "phish").unwrap();
    let phish = page(&corpus, phish);

    for scheme in ["trained", "max", "adversarial", "html", "visual"] {
        let o = score(&bundle, &home, &home, &["--scheme", scheme]);
        assert_eq!(o.status.code(), Some(0), "{scheme}: {}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).contains("verdict=legit"));
        let o = score(&bundle, &phish, &home, &["--scheme", scheme]);
        assert_eq!(o.status.code(), Some(1), "{scheme}: {}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).contains("verdict=phish"));
    }
    let line = stdout(&score(&bundle, &phish, &home, &[]));
    for key in ["s1=", "s2=", "g=", "verdict="] {
        assert!(line.contains(key), "{line}");
    }
    // an unreachable threshold turns the verdict
    let o = score(&bundle, &phish, &home, &["--threshold", "1e9"]);
    assert_eq!(o.status.code(), Some(0));

    let missing = Page {
        png: s(&dir.path().join("absent.png")).to_string(),
        ..page(&corpus, &fam["pages"][0])
    };
    let o = score(&bundle, &missing, &home, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("absent.png"), "{}", stderr(&o));

    std::fs::remove_file(bundle.join("fusion_adversarial.json")).unwrap();
    let o = score(&bundle, &phish, &home, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("adversarial fusion model"), "{}", stderr(&o));
    std::fs::copy(bundle.join("fusion_trained.json"), bundle.join("fusion_adversarial.json")).unwrap();
    let o = score(&bundle, &phish, &home, &[]);
    assert_eq!(o.status.code(), Some(2));

    // rebuild for the attack command
    let o = run(&["train", "--corpus", s(&corpus), "--config", s(&cfg), "--out", s(&bundle)]);
    assert_eq!(o.status.code(), Some(0));
    let attack = dir.path().join("attack.csv");
    let o = run(&[
        "attack", "--bundle", s(&bundle), "--corpus", s(&corpus), "--out", s(&attack), "--budget", "3", "--scheme",
        "html", "--fp-target", "0.01",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&attack).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("repetition,budget,scheme,detection_rate,threshold"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    let dr: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(dr.windows(2).all(|w| w[1] <= w[0]), "{dr:?}");
    let o = run(&["attack", "--bundle", s(&bundle), "--corpus", s(&corpus), "--out", s(&attack), "--budget", "12"]);
    assert_eq!(o.status.code(), Some(2));

    let vocab = dir.path().join("vocab.txt");
    let o = run(&["build-vocab", "--corpus", s(&corpus), "--config", s(&cfg), "--out", s(&vocab)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let feats = dir.path().join("features");
    let o = run(&["extract", "--corpus", s(&corpus), "--out", s(&feats), "--vocab", s(&vocab)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let html = std::fs::read_to_string(feats.join("html_features.csv")).unwrap();
    assert_eq!(html.lines().count(), 1 + 14 * 4);
    let visual = std::fs::read_to_string(feats.join("visual_features.csv")).unwrap();
    assert_eq!(visual.lines().next().unwrap().split(',').count(), 3 + pagedelta::visual::TILE_COUNT * (40 + pagedelta::visual::COLOR_BINS));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["score", "--bundle", "x"]).status.code(), Some(2));
    assert_eq!(run(&["evaluate", "--corpus", "/nonexistent", "--out", "/tmp/x"]).status.code(), Some(2));
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for sub in ["gen-corpus", "build-vocab", "extract", "train", "score", "evaluate", "attack"] {
        assert!(stdout(&o).contains(sub), "{sub}");
    }
    let o = run(&["score", "--help"]);
    assert!(stdout(&o).contains("--threshold") && stdout(&o).contains("--scheme"));
}

#[test]
fn evaluate_writes_reproducible_reports() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    assert_eq!(run(&["gen-corpus", "--out", s(&corpus), "--families", "12", "--seed", "9"]).status.code(), Some(0));
    let cfg = write_config(dir.path(), 1);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let o = run(&["evaluate", "--corpus", s(&corpus), "--config", s(&cfg), "--out", s(out), "--fp-target", "0.05"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["roc.csv", "attack.csv", "dr.csv"] {
        assert_eq!(std::fs::read(out_a.join(f)).unwrap(), std::fs::read(out_b.join(f)).unwrap(), "{f}");
    }
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out_a.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["repetitions"].as_array().unwrap().len(), 1);
    assert_eq!(report["config"]["fp_targets"], serde_json::json!([0.005, 0.01, 0.05]));
    let rep = &report["repetitions"][0];
    for avg in report["averages"].as_array().unwrap() {
        let scheme = &avg["scheme"];
        let s = rep["schemes"].as_array().unwrap().iter().find(|x| &x["scheme"] == scheme).unwrap();
        assert_eq!(avg["mean_auc"], s["auc"]);
        for (d, op) in avg["detection"].as_array().unwrap().iter().zip(s["operating_points"].as_array().unwrap()) {
            assert_eq!(d["mean"], op["detection_rate"]);
            assert_eq!(d["min"], d["max"]);
        }
    }
}
