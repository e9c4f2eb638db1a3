//! Experiment 2: effect of region size (Large / Medium / Small) on model
//! performance.
//!
//! Per (metric × ground truth): category-level model means, a least-squares
//! trend over the ordinal size codes (with outlier models excluded from the
//! fit), and a Friedman test over the per-category means with models as
//! blocks, paired with Kendall's W over the per-category model rankings.
//! Significance is judged against the Bonferroni-corrected threshold.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{category_of, summarize, BenchError, ExperimentConfig, ModelMeanRow};
use crate::corpus::{CategoryLabel, DatasetManifest, GtKind};
use crate::metrics::{MetricId, ScoreTable};
use crate::preprocess::PreprocessConfig;
use crate::stats::{friedman_test, interpret_w, kendalls_w, ols_trend, RankMatrix, TrendPoint};

/// 0.05 split over the four (metric × ground truth) tests.
pub const BONFERRONI_THRESHOLD: f64 = 0.05 / 4.0;

#[derive(Debug, Clone, Serialize)]
pub struct Exp2Row {
    pub metric: String,
    pub gt: String,
    pub p_value: f64,
    pub chi2: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub bonferroni_significant: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CategoryMeans {
    pub category: String,
    pub ordinal: f64,
    pub models: Vec<ModelMeanRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendSummary {
    pub slope: f64,
    pub intercept: f64,
    pub n_used: usize,
    pub excluded: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Exp2Detail {
    pub metric: String,
    pub gt: String,
    pub dof: usize,
    pub interpretation: String,
    pub s: f64,
    pub trend: TrendSummary,
    pub categories: Vec<CategoryMeans>,
    /// Models dropped from Friedman/W because a category mean was missing.
    pub models_dropped: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Exp2Report {
    pub bonferroni_threshold: f64,
    pub table: Vec<Exp2Row>,
    pub details: Vec<Exp2Detail>,
    pub preprocess: PreprocessConfig,
    pub seed: u64,
}

const SIZE_ORDER: [CategoryLabel; 3] = [
    CategoryLabel::Small,
    CategoryLabel::Medium,
    CategoryLabel::Large,
];

pub fn run_exp2(
    manifest: &DatasetManifest,
    table: &ScoreTable,
    models: &[String],
    config: &ExperimentConfig,
) -> Result<Exp2Report, BenchError> {
    if models.len() < 2 {
        return Err(BenchError::TooFewModels(models.len()));
    }
    let categories = category_of(manifest);
    let present: Vec<CategoryLabel> = SIZE_ORDER
        .iter()
        .copied()
        .filter(|c| categories.values().any(|v| v == c))
        .collect();
    if present.len() < 2 {
        return Err(BenchError::MissingCategory(present.len()));
    }

    let mut rows = Vec::new();
    let mut details = Vec::new();

    // fixed row order: AUROC fixations, NSS fixations, AUROC regions, NSS regions
    let mut combos = Vec::new();
    for gt in [GtKind::Fixations, GtKind::Regions] {
        for metric in [MetricId::Auroc, MetricId::Nss] {
            if config.gt_kinds.contains(&gt) && config.metrics.contains(&metric) {
                combos.push((metric, gt));
            }
        }
    }

    for (metric, gt) in combos {
        // per (category, model) mean over clean cells
        let mut per_cat: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
        for row in table.rows() {
            if row.metric != metric || row.gt != gt {
                continue;
            }
            let Some(value) = row.value else { continue };
            let Some(category) = categories.get(&row.image) else {
                continue;
            };
            if !present.contains(category) {
                continue;
            }
            per_cat
                .entry(category.to_string())
                .or_default()
                .entry(row.model.clone())
                .or_default()
                .push(value);
        }

        let mut category_means = Vec::new();
        for cat in &present {
            let models_in_cat = per_cat.get(&cat.to_string());
            let mut model_rows = Vec::new();
            for model in models {
                if let Some(values) = models_in_cat.and_then(|m| m.get(model)) {
                    if let Some(summary) = summarize(model, values) {
                        model_rows.push(summary);
                    }
                }
            }
            category_means.push(CategoryMeans {
                category: cat.to_string(),
                ordinal: cat.ordinal().unwrap_or(0.0),
                models: model_rows,
            });
        }

        // Friedman over means: blocks = models, treatments = categories;
        // models missing any category are dropped and reported
        let mut kept_models = Vec::new();
        let mut dropped_models = Vec::new();
        let mut blocks = Vec::new();
        for model in models {
            let mut block = Vec::with_capacity(present.len());
            for cat_means in &category_means {
                if let Some(m) = cat_means.models.iter().find(|r| &r.model == model) {
                    block.push(m.mean);
                }
            }
            if block.len() == present.len() {
                kept_models.push(model.clone());
                blocks.push(block);
            } else {
                dropped_models.push(model.clone());
            }
        }
        if blocks.len() < 2 {
            return Err(BenchError::NoUsableScores(format!(
                "{metric}/{gt} category means for experiment 2"
            )));
        }
        let friedman = friedman_test(&blocks)?;

        // Kendall's W: judges = categories ranking the kept models
        let judge_rows: Vec<Vec<f64>> = (0..present.len())
            .map(|ci| blocks.iter().map(|b| b[ci]).collect())
            .collect();
        let ranks = RankMatrix::from_scores(&judge_rows)?;
        let (w, s) = kendalls_w(&ranks)?;
        let interp = interpret_w(w)?;

        // trend over ordinal size codes, outliers excluded from the fit
        let mut points = Vec::new();
        for cat_means in &category_means {
            for m in &cat_means.models {
                points.push(TrendPoint {
                    model: m.model.clone(),
                    x: cat_means.ordinal,
                    y: m.mean,
                });
            }
        }
        let fit = ols_trend(&points, &config.exclude_from_trend)?;

        rows.push(Exp2Row {
            metric: metric.to_string(),
            gt: gt.to_string(),
            p_value: friedman.p_value,
            chi2: friedman.chi_square,
            w,
            bonferroni_significant: friedman.p_value < BONFERRONI_THRESHOLD,
        });
        details.push(Exp2Detail {
            metric: metric.to_string(),
            gt: gt.to_string(),
            dof: friedman.dof,
            interpretation: interp.label.to_string(),
            s,
            trend: TrendSummary {
                slope: fit.slope,
                intercept: fit.intercept,
                n_used: fit.n_used,
                excluded: fit.excluded,
            },
            categories: category_means,
            models_dropped: dropped_models,
        });
    }

    Ok(Exp2Report {
        bonferroni_threshold: BONFERRONI_THRESHOLD,
        table: rows,
        details,
        preprocess: config.preprocess,
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{synth_dataset, SynthOptions};
    use crate::metrics::ScoreRow;

    fn config() -> ExperimentConfig {
        let mut c = ExperimentConfig::new("m.json".into(), "out".into());
        c.exclude_from_trend = vec![];
        c
    }

    fn manifest_with_categories() -> (tempfile::TempDir, DatasetManifest) {
        let dir = tempfile::tempdir().unwrap();
        let third = 1.0 / 3.0;
        let manifest = synth_dataset(
            dir.path(),
            5,
            6,
            [third, third, third],
            &SynthOptions {
                width: 32,
                height: 24,
                ..SynthOptions::default()
            },
        )
        .unwrap();
        (dir, manifest)
    }

    fn score_rows(
        manifest: &DatasetManifest,
        score_for: impl Fn(CategoryLabel, &str) -> f64,
    ) -> ScoreTable {
        let mut rows = Vec::new();
        for entry in manifest.entries() {
            for model in ["M1", "M2", "M3"] {
                for gt in [GtKind::Fixations, GtKind::Regions] {
                    for metric in [MetricId::Auroc, MetricId::Nss] {
                        rows.push(ScoreRow {
                            image: entry.id.clone(),
                            model: model.into(),
                            gt,
                            metric,
                            value: Some(score_for(entry.category, model)),
                            reps: 1,
                            seed: 0,
                            error: None,
                        });
                    }
                }
            }
        }
        ScoreTable::new(rows)
    }

    #[test]
    fn identical_categories_are_null_and_flat() {
        let (_dir, manifest) = manifest_with_categories();
        // score depends only on the model, never the category
        let table = score_rows(&manifest, |_, model| match model {
            "M1" => 0.8,
            "M2" => 0.6,
            _ => 0.4,
        });
        let models = vec!["M1".into(), "M2".into(), "M3".into()];
        let report = run_exp2(&manifest, &table, &models, &config()).unwrap();
        assert_eq!(report.table.len(), 4);
        for (row, detail) in report.table.iter().zip(&report.details) {
            assert_eq!(row.chi2, 0.0);
            assert_eq!(row.p_value, 1.0);
            assert!(!row.bonferroni_significant);
            assert_eq!(row.w, 1.0, "model ranking stable across categories");
            assert!(detail.trend.slope.abs() < 1e-12);
        }
    }

    #[test]
    fn planted_monotone_effect_gives_negative_slope() {
        let (_dir, manifest) = manifest_with_categories();
        // Small > Medium > Large scores, with model offsets
        let table = score_rows(&manifest, |cat, model| {
            let base = match cat {
                CategoryLabel::Small => 0.9,
                CategoryLabel::Medium => 0.7,
                CategoryLabel::Large => 0.5,
                CategoryLabel::Uncategorized => 0.0,
            };
            let offset = match model {
                "M1" => 0.0,
                "M2" => -0.02,
                _ => -0.04,
            };
            base + offset
        });
        let models = vec!["M1".into(), "M2".into(), "M3".into()];
        let report = run_exp2(&manifest, &table, &models, &config()).unwrap();
        for detail in &report.details {
            assert!(
                detail.trend.slope < -0.1,
                "slope {} should be negative",
                detail.trend.slope
            );
        }
        // 3 models ranked unanimously across 3 categories: chi2 = 2b = 6
        for row in &report.table {
            assert!((row.chi2 - 6.0).abs() < 1e-9);
            assert_eq!(row.w, 1.0);
        }
    }

    #[test]
    fn missing_category_detected() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = synth_dataset(
            dir.path(),
            5,
            3,
            [1.0, 0.0, 0.0],
            &SynthOptions {
                width: 32,
                height: 24,
                ..SynthOptions::default()
            },
        )
        .unwrap();
        let table = score_rows(&manifest, |_, _| 0.5);
        let models = vec!["M1".into(), "M2".into(), "M3".into()];
        assert!(matches!(
            run_exp2(&manifest, &table, &models, &config()),
            Err(BenchError::MissingCategory(1))
        ));
    }
}
