//! CLI-level integration tests: argument handling, artifact layout, the
//! thread-cap determinism contract and the audit property that every report
//! value can be recomputed offline from the emitted score table.

use std::path::Path;
use std::process::Command;

use salbench::corpus::{load_manifest, synth_dataset, GtKind, SynthOptions};
use salbench::metrics::{MetricId, ScoreTable};
use salbench::stats::{friedman_test, kendalls_w, RankMatrix};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_salbench")
}

fn make_corpus(dir: &Path, n: usize) -> std::path::PathBuf {
    synth_dataset(
        dir,
        3,
        n,
        [0.34, 0.33, 0.33],
        &SynthOptions {
            width: 80,
            height: 60,
            ..SynthOptions::default()
        },
    )
    .unwrap();
    dir.join("manifest.json")
}

#[test]
fn synth_subcommand_writes_a_loadable_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ds");
    let status = Command::new(binary())
        .args([
            "synth",
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "5",
            "--n-images",
            "6",
            "--mix",
            "0.5,0.25,0.25",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let manifest = load_manifest(&out.join("manifest.json")).unwrap();
    assert_eq!(manifest.len(), 6);
}

#[test]
fn score_subcommand_emits_the_score_table() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = make_corpus(dir.path(), 3);
    let out = dir.path().join("out");
    let status = Command::new(binary())
        .args([
            "score",
            "--manifest",
            manifest.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--model",
            "FT",
            "--reps",
            "10",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let table = ScoreTable::read_csv(&out.join("scores.csv")).unwrap();
    // 3 images x 1 model x 2 metrics x 2 gts
    assert_eq!(table.len(), 12);
    assert!(out.join("report.json").exists());
    assert!(!out.join("exp1.json").exists());
}

#[test]
fn unknown_model_fails_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = make_corpus(dir.path(), 2);
    let output = Command::new(binary())
        .args([
            "score",
            "--manifest",
            manifest.to_str().unwrap(),
            "--out",
            dir.path().join("out").to_str().unwrap(),
            "--model",
            "NOPE",
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("unknown model"), "stderr: {stderr}");
}

#[test]
fn thread_cap_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = make_corpus(dir.path(), 4);
    let run = |out: &Path, threads: &str| {
        let status = Command::new(binary())
            .env("SALBENCH_THREADS", threads)
            .args([
                "score",
                "--manifest",
                manifest.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--reps",
                "25",
                "--seed",
                "9",
            ])
            .status()
            .unwrap();
        assert!(status.success());
    };
    let out1 = dir.path().join("one");
    let out8 = dir.path().join("eight");
    run(&out1, "1");
    run(&out8, "8");
    let bytes1 = std::fs::read(out1.join("scores.csv")).unwrap();
    let bytes8 = std::fs::read(out8.join("scores.csv")).unwrap();
    assert_eq!(bytes1, bytes8, "thread count changed the score table");
}

/// Audit: recompute experiment-1 numbers offline from scores.csv and compare
/// against the values the toolkit reported.
#[test]
fn exp1_report_is_recomputable_from_the_score_table() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = make_corpus(dir.path(), 6);
    let out = dir.path().join("out");
    let status = Command::new(binary())
        .args([
            "all",
            "--manifest",
            manifest.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--reps",
            "25",
            "--seed",
            "3",
        ])
        .status()
        .unwrap();
    assert!(status.success());

    let table = ScoreTable::read_csv(&out.join("scores.csv")).unwrap();
    let exp1: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("exp1.json")).unwrap()).unwrap();

    for row in exp1["table"].as_array().unwrap() {
        let metric = MetricId::parse(row["metric"].as_str().unwrap()).unwrap();

        // recompute the Friedman statistic over (image, model) blocks
        let mut blocks = Vec::new();
        let mut pairs = Vec::new();
        for r in table.rows() {
            if r.metric == metric && r.gt == GtKind::Fixations {
                pairs.push((r.image.clone(), r.model.clone()));
            }
        }
        for (image, model) in &pairs {
            let fix = table.value(image, model, GtKind::Fixations, metric);
            let reg = table.value(image, model, GtKind::Regions, metric);
            if let (Some(f), Some(g)) = (fix, reg) {
                blocks.push(vec![f, g]);
            }
        }
        let friedman = friedman_test(&blocks).unwrap();
        assert!((friedman.chi_square - row["chi2"].as_f64().unwrap()).abs() < 1e-12);
        assert!((friedman.p_value - row["p_value"].as_f64().unwrap()).abs() < 1e-12);

        // recompute W over the per-gt model mean rankings
        let mut models: Vec<String> = pairs.iter().map(|(_, m)| m.clone()).collect();
        models.sort();
        models.dedup();
        let mean_for = |gt: GtKind| -> Vec<f64> {
            models
                .iter()
                .map(|m| {
                    let vals = table.series(m, gt, metric);
                    vals.iter().sum::<f64>() / vals.len() as f64
                })
                .collect()
        };
        let ranks =
            RankMatrix::from_scores(&[mean_for(GtKind::Fixations), mean_for(GtKind::Regions)])
                .unwrap();
        let (w, _) = kendalls_w(&ranks).unwrap();
        assert!((w - row["W"].as_f64().unwrap()).abs() < 1e-12);
    }
}

/// The preprocess configuration is echoed into every experiment report.
#[test]
fn reports_echo_the_preprocess_config() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = make_corpus(dir.path(), 3);
    let out = dir.path().join("out");
    let status = Command::new(binary())
        .args([
            "all",
            "--manifest",
            manifest.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--reps",
            "10",
            "--blur-sigma",
            "0.05",
            "--border-cut",
            "3",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    for name in ["exp1.json", "exp2.json", "exp3.json", "report.json"] {
        let value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join(name)).unwrap()).unwrap();
        let preprocess = if name == "report.json" {
            &value["config"]["preprocess"]
        } else {
            &value["preprocess"]
        };
        assert_eq!(preprocess["blur_sigma"].as_f64(), Some(0.05), "{name}");
        assert_eq!(preprocess["border_cut"]["mode"], "pixels", "{name}");
        assert_eq!(preprocess["border_cut"]["value"].as_u64(), Some(3), "{name}");
    }
}
