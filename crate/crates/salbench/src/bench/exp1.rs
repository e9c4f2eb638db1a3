//! Experiment 1: coherence between the fixation and region ground truths.
//!
//! Per metric, the two ground truths are compared twice: a two-way Friedman
//! test over (image × model) blocks asks whether the ground truths score
//! differently at all, and Kendall's W over the two model rankings measures
//! how far the disagreement actually moves the ranking.

use serde::Serialize;

use super::{model_means, BenchError, ExperimentConfig, ModelMeanRow};
use crate::corpus::GtKind;
use crate::metrics::ScoreTable;
use crate::preprocess::PreprocessConfig;
use crate::stats::{friedman_test, interpret_w, kendalls_w, RankMatrix};

/// One concordance summary row; exactly these columns.
#[derive(Debug, Clone, Serialize)]
pub struct Exp1Row {
    pub metric: String,
    pub p_value: f64,
    pub chi2: f64,
    pub dof: usize,
    #[serde(rename = "W")]
    pub w: f64,
    pub interpretation: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Exp1Detail {
    pub metric: String,
    pub s: f64,
    pub confidence: String,
    pub blocks_used: usize,
    pub blocks_dropped: usize,
    pub fixation_means: Vec<ModelMeanRow>,
    pub region_means: Vec<ModelMeanRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Exp1Report {
    pub table: Vec<Exp1Row>,
    pub details: Vec<Exp1Detail>,
    pub preprocess: PreprocessConfig,
    pub seed: u64,
}

pub fn run_exp1(
    table: &ScoreTable,
    models: &[String],
    config: &ExperimentConfig,
) -> Result<Exp1Report, BenchError> {
    if models.len() < 2 {
        return Err(BenchError::TooFewModels(models.len()));
    }
    let mut rows = Vec::new();
    let mut details = Vec::new();

    for metric in &config.metrics {
        // blocks: every (image, model) cell scored under both ground truths
        let mut blocks: Vec<Vec<f64>> = Vec::new();
        let mut dropped = 0usize;
        let mut seen: Vec<(String, String)> = Vec::new();
        for row in table.rows() {
            if row.metric != *metric || row.gt != GtKind::Fixations {
                continue;
            }
            seen.push((row.image.clone(), row.model.clone()));
        }
        for (image, model) in &seen {
            let fix = table.value(image, model, GtKind::Fixations, *metric);
            let reg = table.value(image, model, GtKind::Regions, *metric);
            match (fix, reg) {
                (Some(f), Some(r)) => blocks.push(vec![f, r]),
                _ => dropped += 1,
            }
        }
        if blocks.len() < 2 {
            return Err(BenchError::NoUsableScores(format!(
                "{metric} blocks for experiment 1"
            )));
        }
        let friedman = friedman_test(&blocks)?;

        let fixation_means = model_means(table, models, GtKind::Fixations, *metric);
        let region_means = model_means(table, models, GtKind::Regions, *metric);
        if fixation_means.len() < 2 || region_means.len() < 2 {
            return Err(BenchError::NoUsableScores(format!(
                "{metric} model means for experiment 1"
            )));
        }
        let judge_rows = vec![
            fixation_means.iter().map(|m| m.mean).collect::<Vec<f64>>(),
            region_means.iter().map(|m| m.mean).collect::<Vec<f64>>(),
        ];
        let ranks = RankMatrix::from_scores(&judge_rows)?;
        let (w, s) = kendalls_w(&ranks)?;
        let interp = interpret_w(w)?;

        rows.push(Exp1Row {
            metric: metric.to_string(),
            p_value: friedman.p_value,
            chi2: friedman.chi_square,
            dof: friedman.dof,
            w,
            interpretation: interp.label.to_string(),
        });
        details.push(Exp1Detail {
            metric: metric.to_string(),
            s,
            confidence: interp.confidence.to_string(),
            blocks_used: blocks.len(),
            blocks_dropped: dropped,
            fixation_means,
            region_means,
        });
    }

    Ok(Exp1Report {
        table: rows,
        details,
        preprocess: config.preprocess,
        seed: config.seed,
    })
}
