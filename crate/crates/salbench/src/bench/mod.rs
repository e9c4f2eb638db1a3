//! Orchestration of the three experiments and report emission.
//!
//! `BenchContext::run` scores the corpus once, executes the requested
//! experiments over the score table, and writes `scores.csv`, the
//! experiment JSONs, plot-ready figure CSVs and a top-level `report.json`
//! into the output directory. Identical configuration and seed produce
//! byte-identical outputs.

mod exp1;
mod exp2;
mod exp3;
mod report;

pub use exp1::{run_exp1, Exp1Report};
pub use exp2::{run_exp2, Exp2Report, BONFERRONI_THRESHOLD};
pub use exp3::{run_exp3, Exp3Report};
pub use report::BenchmarkReport;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{load_manifest, CategoryLabel, CorpusError, DatasetManifest, GtKind};
use crate::metrics::{score_corpus, MetricId, ScoreTable, ScoringConfig};
use crate::models::{ModelError, ModelOptions, ModelRegistry};
use crate::preprocess::PreprocessConfig;
use crate::stats::StatsError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("fewer than 2 size categories present (found {0})")]
    MissingCategory(usize),
    #[error("experiment needs at least 2 models, got {0}")]
    TooFewModels(usize),
    #[error("no usable scores for {0}")]
    NoUsableScores(String),
}

/// Full configuration of a benchmark run. Echoed into every report.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub manifest_path: PathBuf,
    pub model_specs: Vec<String>,
    pub metrics: Vec<MetricId>,
    pub gt_kinds: Vec<GtKind>,
    pub preprocess: PreprocessConfig,
    pub model_options: ModelOptions,
    pub reps: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Models excluded from the experiment-2 trend fit (outliers).
    pub exclude_from_trend: Vec<String>,
}

impl ExperimentConfig {
    pub fn new(manifest_path: PathBuf, out_dir: PathBuf) -> Self {
        ExperimentConfig {
            manifest_path,
            model_specs: vec!["SR".into(), "PFT".into(), "FT".into()],
            metrics: vec![MetricId::Nss, MetricId::Auroc],
            gt_kinds: vec![GtKind::Fixations, GtKind::Regions],
            preprocess: PreprocessConfig::default(),
            model_options: ModelOptions::default(),
            reps: 100,
            seed: 0,
            out_dir,
            exclude_from_trend: vec!["FT".into()],
        }
    }

    fn scoring(&self) -> ScoringConfig {
        ScoringConfig {
            preprocess: self.preprocess,
            model_options: self.model_options.clone(),
            metrics: self.metrics.clone(),
            gt_kinds: self.gt_kinds.clone(),
            reps: self.reps,
            seed: self.seed,
        }
    }
}

/// Which experiments a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunSet {
    ScoreOnly,
    Exp1,
    Exp2,
    Exp3,
    All,
}

/// Mean, spread and count of one model's clean scores.
#[derive(Debug, Clone, Serialize)]
pub struct ModelMeanRow {
    pub model: String,
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
    pub n: usize,
}

pub(crate) fn summarize(model: &str, values: &[f64]) -> Option<ModelMeanRow> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    Some(ModelMeanRow {
        model: model.to_string(),
        mean,
        std,
        stderr: std / n.sqrt(),
        n: values.len(),
    })
}

/// Per-model mean rows for one (gt, metric) series, in roster order.
pub(crate) fn model_means(
    table: &ScoreTable,
    models: &[String],
    gt: GtKind,
    metric: MetricId,
) -> Vec<ModelMeanRow> {
    models
        .iter()
        .filter_map(|m| summarize(m, &table.series(m, gt, metric)))
        .collect()
}

pub(crate) fn category_of(manifest: &DatasetManifest) -> BTreeMap<String, CategoryLabel> {
    manifest
        .entries()
        .iter()
        .map(|e| (e.id.clone(), e.category))
        .collect()
}

/// A loaded corpus plus model roster, ready to score and analyze.
pub struct BenchContext {
    pub manifest: DatasetManifest,
    pub registry: ModelRegistry,
    pub config: ExperimentConfig,
}

impl BenchContext {
    pub fn load(config: ExperimentConfig) -> Result<BenchContext, BenchError> {
        let manifest = load_manifest(&config.manifest_path)?;
        let registry = ModelRegistry::from_specs(&config.model_specs)?;
        Ok(BenchContext {
            manifest,
            registry,
            config,
        })
    }

    /// Score every cell, honoring the `SALBENCH_THREADS` cap when set.
    pub fn score(&self) -> ScoreTable {
        let scoring = self.config.scoring();
        match std::env::var("SALBENCH_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|n| *n > 0)
        {
            Some(threads) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .expect("thread pool");
                pool.install(|| score_corpus(&self.manifest, &self.registry, &scoring))
            }
            None => score_corpus(&self.manifest, &self.registry, &scoring),
        }
    }

    /// Score, run the requested experiments, and write every artifact.
    pub fn run(&self, set: RunSet) -> Result<BenchmarkReport, BenchError> {
        let out = &self.config.out_dir;
        std::fs::create_dir_all(out).map_err(|source| BenchError::Io {
            path: out.clone(),
            source,
        })?;

        let table = self.score();
        table.write_csv(&out.join("scores.csv"))?;
        let mut artifacts = vec!["scores.csv".to_string()];

        let model_ids = self.registry.ids();
        if matches!(set, RunSet::Exp1 | RunSet::All) {
            let exp1 = run_exp1(&table, &model_ids, &self.config)?;
            report::write_json(out, "exp1.json", &exp1)?;
            report::write_exp1_figures(out, &exp1)?;
            artifacts.push("exp1.json".into());
            artifacts.push("exp1_means_fixations.csv".into());
            artifacts.push("exp1_means_regions.csv".into());
        }
        if matches!(set, RunSet::Exp2 | RunSet::All) {
            let exp2 = run_exp2(&self.manifest, &table, &model_ids, &self.config)?;
            report::write_json(out, "exp2.json", &exp2)?;
            report::write_exp2_figures(out, &exp2)?;
            artifacts.push("exp2.json".into());
            artifacts.push("exp2_category_means.csv".into());
        }
        if matches!(set, RunSet::Exp3 | RunSet::All) {
            let exp3 = run_exp3(&self.manifest, &table, &model_ids, &self.config)?;
            report::write_json(out, "exp3.json", &exp3)?;
            report::write_exp3_figures(out, &exp3)?;
            artifacts.push("exp3.json".into());
            for gt in &self.config.gt_kinds {
                artifacts.push(format!("exp3_fused_{gt}.csv"));
            }
        }

        let summary = BenchmarkReport::assemble(&self.config, &table, artifacts);
        report::write_json(out, "report.json", &summary)?;
        Ok(summary)
    }
}
