//! Artifact emission: experiment JSONs, plot-ready figure CSVs and the
//! top-level run report.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::{BenchError, Exp1Report, Exp2Report, Exp3Report, ExperimentConfig};
use crate::metrics::ScoreTable;
use crate::preprocess::PreprocessConfig;

pub(crate) fn write_json<T: Serialize>(
    out: &Path,
    name: &str,
    value: &T,
) -> Result<(), BenchError> {
    let path = out.join(name);
    let mut text = serde_json::to_string_pretty(value).expect("report serialization");
    text.push('\n');
    std::fs::write(&path, text).map_err(|source| BenchError::Io { path, source })
}

fn write_csv_rows(out: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), BenchError> {
    let path = out.join(name);
    let mut writer = csv::Writer::from_path(&path).map_err(BenchError::Csv)?;
    writer.write_record(header).map_err(BenchError::Csv)?;
    for row in rows {
        writer.write_record(row).map_err(BenchError::Csv)?;
    }
    writer.flush().map_err(|source| BenchError::Io { path, source })?;
    Ok(())
}

/// Per-model mean, std and stderr series for each ground truth.
pub(crate) fn write_exp1_figures(out: &Path, report: &Exp1Report) -> Result<(), BenchError> {
    for (name, pick) in [
        ("exp1_means_fixations.csv", 0usize),
        ("exp1_means_regions.csv", 1usize),
    ] {
        let mut rows = Vec::new();
        for detail in &report.details {
            let means = if pick == 0 {
                &detail.fixation_means
            } else {
                &detail.region_means
            };
            for m in means {
                rows.push(vec![
                    detail.metric.clone(),
                    m.model.clone(),
                    format!("{}", m.mean),
                    format!("{}", m.std),
                    format!("{}", m.stderr),
                    m.n.to_string(),
                ]);
            }
        }
        write_csv_rows(out, name, &["metric", "model", "mean", "std", "stderr", "n"], &rows)?;
    }
    Ok(())
}

/// Per (metric, gt, category, model) mean series.
pub(crate) fn write_exp2_figures(out: &Path, report: &Exp2Report) -> Result<(), BenchError> {
    let mut rows = Vec::new();
    for detail in &report.details {
        for cat in &detail.categories {
            for m in &cat.models {
                rows.push(vec![
                    detail.metric.clone(),
                    detail.gt.clone(),
                    cat.category.clone(),
                    format!("{}", cat.ordinal),
                    m.model.clone(),
                    format!("{}", m.mean),
                    format!("{}", m.std),
                    format!("{}", m.stderr),
                    m.n.to_string(),
                ]);
            }
        }
    }
    write_csv_rows(
        out,
        "exp2_category_means.csv",
        &[
            "metric", "gt", "category", "ordinal", "model", "mean", "std", "stderr", "n",
        ],
        &rows,
    )
}

/// Fused model ranking series per ground truth.
pub(crate) fn write_exp3_figures(out: &Path, report: &Exp3Report) -> Result<(), BenchError> {
    for detail in &report.details {
        let rows: Vec<Vec<String>> = detail
            .fused_ranking
            .iter()
            .map(|m| {
                vec![
                    m.model.clone(),
                    format!("{}", m.fused_mean),
                    m.n.to_string(),
                ]
            })
            .collect();
        write_csv_rows(
            out,
            &format!("exp3_fused_{}.csv", detail.gt),
            &["model", "fused_mean", "n"],
            &rows,
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub manifest: String,
    pub models: Vec<String>,
    pub metrics: Vec<String>,
    pub gt_kinds: Vec<String>,
    pub reps: usize,
    pub seed: u64,
    pub preprocess: PreprocessConfig,
    /// Fixed stage order applied to every map before scoring.
    pub pipeline_order: [&'static str; 4],
    pub exclude_from_trend: Vec<String>,
}

/// Top-level run summary written as `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub toolkit_version: String,
    pub config: ConfigEcho,
    pub cells_total: usize,
    pub cells_failed: usize,
    pub failures_by_reason: BTreeMap<String, usize>,
    pub artifacts: Vec<String>,
}

impl BenchmarkReport {
    pub fn assemble(
        config: &ExperimentConfig,
        table: &ScoreTable,
        artifacts: Vec<String>,
    ) -> BenchmarkReport {
        let mut failures_by_reason: BTreeMap<String, usize> = BTreeMap::new();
        for row in table.rows() {
            if let Some(reason) = &row.error {
                *failures_by_reason.entry(reason.clone()).or_default() += 1;
            }
        }
        BenchmarkReport {
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            config: ConfigEcho {
                manifest: config.manifest_path.to_string_lossy().into_owned(),
                models: config.model_specs.clone(),
                metrics: config.metrics.iter().map(|m| m.to_string()).collect(),
                gt_kinds: config.gt_kinds.iter().map(|g| g.to_string()).collect(),
                reps: config.reps,
                seed: config.seed,
                preprocess: config.preprocess,
                pipeline_order: ["resize", "blur", "border_cut", "standardize"],
                exclude_from_trend: config.exclude_from_trend.clone(),
            },
            cells_total: table.len(),
            cells_failed: table.failure_count(),
            failures_by_reason,
            artifacts,
        }
    }
}
