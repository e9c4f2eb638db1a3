//! Experiment 3: PCA fusion of the two metrics into a single ranking per
//! ground truth, followed by a category-adjusted ANOVA across models with
//! Tukey-HSD post-hoc pairs and partial eta-squared.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{category_of, BenchError, ExperimentConfig};
use crate::corpus::DatasetManifest;
use crate::metrics::{MetricId, ScoreTable};
use crate::preprocess::PreprocessConfig;
use crate::stats::{anova_adjusted, pca_fuse, AnovaObservation, TukeyPair};

/// One fusion summary row per ground truth.
#[derive(Debug, Clone, Serialize)]
pub struct Exp3Row {
    pub gt: String,
    pub explained_variance: f64,
    pub partial_eta_squared: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FusedModelRow {
    pub model: String,
    pub fused_mean: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnovaSummary {
    pub f_statistic: f64,
    pub p_value: f64,
    pub dof_between: usize,
    pub dof_within: usize,
    pub ss_between: f64,
    pub ss_within: f64,
    pub critical_q: f64,
}

/// PCA refitted on per-model mean scores instead of per-image scores.
#[derive(Debug, Clone, Serialize)]
pub struct MeanVariant {
    pub explained_variance: f64,
    pub loadings: [f64; 2],
    pub ranking: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Exp3Detail {
    pub gt: String,
    /// Loadings of (NSS, AUROC) on the first component.
    pub loadings: [f64; 2],
    pub orientation_sign: f64,
    pub mixed_signs: bool,
    pub correlation: f64,
    pub observations: usize,
    pub fused_ranking: Vec<FusedModelRow>,
    pub anova: AnovaSummary,
    pub tukey: Vec<TukeyPair>,
    pub per_model_mean_variant: Option<MeanVariant>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Exp3Report {
    pub table: Vec<Exp3Row>,
    pub details: Vec<Exp3Detail>,
    pub preprocess: PreprocessConfig,
    pub seed: u64,
}

pub fn run_exp3(
    manifest: &DatasetManifest,
    table: &ScoreTable,
    models: &[String],
    config: &ExperimentConfig,
) -> Result<Exp3Report, BenchError> {
    if models.len() < 2 {
        return Err(BenchError::TooFewModels(models.len()));
    }
    let categories = category_of(manifest);
    let mut rows = Vec::new();
    let mut details = Vec::new();

    for gt in &config.gt_kinds {
        // observations: (image, model) cells with both metric values present
        let mut keys = Vec::new();
        let mut nss_col = Vec::new();
        let mut auroc_col = Vec::new();
        for row in table.rows() {
            if row.gt != *gt || row.metric != MetricId::Nss {
                continue;
            }
            let Some(nss_value) = row.value else { continue };
            let Some(auroc_value) = table.value(&row.image, &row.model, *gt, MetricId::Auroc)
            else {
                continue;
            };
            keys.push((row.image.clone(), row.model.clone()));
            nss_col.push(nss_value);
            auroc_col.push(auroc_value);
        }
        if keys.is_empty() {
            return Err(BenchError::NoUsableScores(format!(
                "{gt} cells for experiment 3"
            )));
        }

        let fusion = pca_fuse(&nss_col, &auroc_col)?;

        // fused ranking over models
        let mut per_model: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for ((_, model), fused) in keys.iter().zip(&fusion.fused) {
            per_model.entry(model).or_default().push(*fused);
        }
        let mut fused_ranking: Vec<FusedModelRow> = per_model
            .iter()
            .map(|(model, values)| FusedModelRow {
                model: model.to_string(),
                fused_mean: values.iter().sum::<f64>() / values.len() as f64,
                n: values.len(),
            })
            .collect();
        fused_ranking.sort_by(|a, b| b.fused_mean.partial_cmp(&a.fused_mean).expect("finite"));

        // category-adjusted ANOVA over the fused per-image scores
        let observations: Vec<AnovaObservation> = keys
            .iter()
            .zip(&fusion.fused)
            .map(|((image, model), fused)| AnovaObservation {
                model: model.clone(),
                category: categories
                    .get(image)
                    .map(|c| c.to_string())
                    .unwrap_or_else(|| "Uncategorized".to_string()),
                score: *fused,
            })
            .collect();
        let anova = anova_adjusted(&observations)?;

        // the per-mean variant needs at least 3 models to be meaningful
        let per_model_mean_variant = if per_model.len() >= 3 {
            let mut mean_nss = Vec::new();
            let mut mean_auroc = Vec::new();
            let mut names = Vec::new();
            for model in per_model.keys() {
                let nss_vals: Vec<f64> = keys
                    .iter()
                    .zip(&nss_col)
                    .filter(|((_, m), _)| m == model)
                    .map(|(_, v)| *v)
                    .collect();
                let auroc_vals: Vec<f64> = keys
                    .iter()
                    .zip(&auroc_col)
                    .filter(|((_, m), _)| m == model)
                    .map(|(_, v)| *v)
                    .collect();
                names.push(model.to_string());
                mean_nss.push(nss_vals.iter().sum::<f64>() / nss_vals.len() as f64);
                mean_auroc.push(auroc_vals.iter().sum::<f64>() / auroc_vals.len() as f64);
            }
            match pca_fuse(&mean_nss, &mean_auroc) {
                Ok(fit) => {
                    let mut ranking: Vec<(String, f64)> = names
                        .into_iter()
                        .zip(fit.fused.iter().copied())
                        .collect();
                    ranking.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite"));
                    Some(MeanVariant {
                        explained_variance: fit.explained_variance,
                        loadings: fit.loadings,
                        ranking,
                    })
                }
                Err(_) => None,
            }
        } else {
            None
        };

        rows.push(Exp3Row {
            gt: gt.to_string(),
            explained_variance: fusion.explained_variance,
            partial_eta_squared: anova.partial_eta_squared,
        });
        details.push(Exp3Detail {
            gt: gt.to_string(),
            loadings: fusion.loadings,
            orientation_sign: fusion.orientation_sign,
            mixed_signs: fusion.mixed_signs,
            correlation: fusion.correlation,
            observations: keys.len(),
            fused_ranking,
            anova: AnovaSummary {
                f_statistic: anova.f_statistic,
                p_value: anova.p_value,
                dof_between: anova.dof_between,
                dof_within: anova.dof_within,
                ss_between: anova.ss_between,
                ss_within: anova.ss_within,
                critical_q: anova.critical_q,
            },
            tukey: anova.tukey,
            per_model_mean_variant,
        });
    }

    Ok(Exp3Report {
        table: rows,
        details,
        preprocess: config.preprocess,
        seed: config.seed,
    })
}
