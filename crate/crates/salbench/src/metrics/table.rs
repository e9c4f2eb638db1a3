//! Long-form score table and batch corpus scoring.
//!
//! Scoring never aborts on a single bad cell: failures land in the `error`
//! column and the batch continues. Per-cell RNG seeds are derived from the
//! run seed and the cell identity, so results are independent of scheduling
//! and parallelism.

use std::path::Path;

use rayon::prelude::*;

use super::{auroc, nss, AurocOptions, MetricError, MetricId, NegativeSampling};
use crate::corpus::{DatasetManifest, GroundTruth, GtKind, ManifestEntry};
use crate::models::{Model, ModelOptions, ModelRegistry};
use crate::preprocess::{shape_stages, PreprocessConfig};

/// One (image, model, ground truth, metric) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub image: String,
    pub model: String,
    pub gt: GtKind,
    pub metric: MetricId,
    pub value: Option<f64>,
    pub reps: usize,
    pub seed: u64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct ScoreTable {
    rows: Vec<ScoreRow>,
}

impl ScoreTable {
    pub fn new(rows: Vec<ScoreRow>) -> Self {
        ScoreTable { rows }
    }

    pub fn rows(&self) -> &[ScoreRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn failure_count(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    /// Scored value of one cell, if present and clean.
    pub fn value(&self, image: &str, model: &str, gt: GtKind, metric: MetricId) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.image == image && r.model == model && r.gt == gt && r.metric == metric)
            .and_then(|r| r.value)
    }

    /// All clean values for a (model, gt, metric) series, in row order.
    pub fn series(&self, model: &str, gt: GtKind, metric: MetricId) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.model == model && r.gt == gt && r.metric == metric)
            .filter_map(|r| r.value)
            .collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), csv::Error> {
        let mut writer = csv::Writer::from_path(path)?;
        writer.write_record(["image", "model", "gt", "metric", "value", "reps", "seed", "error"])?;
        for row in &self.rows {
            writer.write_record([
                row.image.as_str(),
                row.model.as_str(),
                &row.gt.to_string(),
                &row.metric.to_string(),
                &row.value.map(|v| format!("{v}")).unwrap_or_default(),
                &row.reps.to_string(),
                &row.seed.to_string(),
                row.error.as_deref().unwrap_or(""),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<ScoreTable, csv::Error> {
        let mut reader = csv::Reader::from_path(path)?;
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let gt = match record.get(2) {
                Some("fixations") => GtKind::Fixations,
                _ => GtKind::Regions,
            };
            let metric = MetricId::parse(record.get(3).unwrap_or("")).unwrap_or(MetricId::Nss);
            let value = record
                .get(4)
                .filter(|s| !s.is_empty())
                .and_then(|s| s.parse().ok());
            let error = record
                .get(7)
                .filter(|s| !s.is_empty())
                .map(|s| s.to_string());
            rows.push(ScoreRow {
                image: record.get(0).unwrap_or("").to_string(),
                model: record.get(1).unwrap_or("").to_string(),
                gt,
                metric,
                value,
                reps: record.get(5).and_then(|s| s.parse().ok()).unwrap_or(0),
                seed: record.get(6).and_then(|s| s.parse().ok()).unwrap_or(0),
                error,
            });
        }
        Ok(ScoreTable { rows })
    }
}

/// Stable FNV-1a over the run seed and cell identity; never touches the
/// platform hasher so tables replay identically everywhere.
pub fn cell_seed(seed: u64, image: &str, model: &str, metric: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for b in bytes {
            hash ^= *b as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(&seed.to_le_bytes());
    eat(image.as_bytes());
    eat(&[0xff]);
    eat(model.as_bytes());
    eat(&[0xff]);
    eat(metric.as_bytes());
    hash
}

#[derive(Debug, Clone)]
pub struct ScoringConfig {
    pub preprocess: PreprocessConfig,
    pub model_options: ModelOptions,
    pub metrics: Vec<MetricId>,
    pub gt_kinds: Vec<GtKind>,
    pub reps: usize,
    pub seed: u64,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            preprocess: PreprocessConfig::default(),
            model_options: ModelOptions::default(),
            metrics: vec![MetricId::Nss, MetricId::Auroc],
            gt_kinds: vec![GtKind::Fixations, GtKind::Regions],
            reps: 100,
            seed: 0,
        }
    }
}

fn score_cell(
    map_result: &Result<crate::models::SaliencyMap, String>,
    gt: &GroundTruth,
    metric: MetricId,
    config: &ScoringConfig,
    image: &str,
    model: &str,
) -> ScoreRow {
    let gt_kind = match gt {
        GroundTruth::Fixations(_) => GtKind::Fixations,
        GroundTruth::Regions(_) => GtKind::Regions,
    };
    let seed = cell_seed(config.seed, image, model, &metric.to_string());
    let base = ScoreRow {
        image: image.to_string(),
        model: model.to_string(),
        gt: gt_kind,
        metric,
        value: None,
        reps: 0,
        seed,
        error: None,
    };
    let map = match map_result {
        Ok(map) => map,
        Err(reason) => {
            return ScoreRow {
                error: Some(reason.clone()),
                ..base
            }
        }
    };
    let outcome: Result<super::MetricScore, MetricError> = match metric {
        MetricId::Nss => nss(map, gt),
        MetricId::Auroc => auroc(
            map,
            gt,
            &AurocOptions {
                sampling: NegativeSampling::Random { reps: config.reps },
                seed,
                ..AurocOptions::default()
            },
        ),
    };
    match outcome {
        Ok(score) => ScoreRow {
            value: Some(score.value),
            reps: score.reps,
            ..base
        },
        Err(e) => ScoreRow {
            error: Some(e.to_string()),
            ..base
        },
    }
}

fn score_entry(
    manifest: &DatasetManifest,
    entry: &ManifestEntry,
    models: &[Model],
    config: &ScoringConfig,
) -> Vec<ScoreRow> {
    let mut rows = Vec::new();

    let loaded = manifest.load_image(entry).map_err(|e| e.to_string());
    let fixations = manifest.load_fixations(entry).map_err(|e| e.to_string());
    let mask = manifest.load_mask(entry).map_err(|e| e.to_string());

    for model in models {
        let map_result: Result<crate::models::SaliencyMap, String> = loaded
            .as_ref()
            .map_err(|e| e.clone())
            .and_then(|image| {
                model
                    .compute(image, &config.model_options)
                    .map_err(|e| e.to_string())
                    .and_then(|map| {
                        shape_stages(&map, &config.preprocess, image.dims())
                            .map_err(|e| e.to_string())
                    })
            });

        for gt_kind in &config.gt_kinds {
            let gt: Result<GroundTruth, String> = match gt_kind {
                GtKind::Fixations => fixations.clone().map(GroundTruth::Fixations),
                GtKind::Regions => mask.clone().map(GroundTruth::Regions),
            };
            for metric in &config.metrics {
                let row = match &gt {
                    Ok(gt) => score_cell(
                        &map_result,
                        gt,
                        *metric,
                        config,
                        &entry.id,
                        model.id.as_str(),
                    ),
                    Err(reason) => ScoreRow {
                        image: entry.id.clone(),
                        model: model.id.as_str().to_string(),
                        gt: *gt_kind,
                        metric: *metric,
                        value: None,
                        reps: 0,
                        seed: cell_seed(
                            config.seed,
                            &entry.id,
                            model.id.as_str(),
                            &metric.to_string(),
                        ),
                        error: Some(reason.clone()),
                    },
                };
                rows.push(row);
            }
        }
    }
    rows
}

/// Score every (image × model × gt kind × metric) cell. Entries are scored in
/// parallel; the output row order is fixed by manifest and roster order.
pub fn score_corpus(
    manifest: &DatasetManifest,
    registry: &ModelRegistry,
    config: &ScoringConfig,
) -> ScoreTable {
    let rows: Vec<Vec<ScoreRow>> = manifest
        .entries()
        .par_iter()
        .map(|entry| score_entry(manifest, entry, registry.models(), config))
        .collect();
    ScoreTable::new(rows.into_iter().flatten().collect())
}
