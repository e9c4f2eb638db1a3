//! Covariate-adjusted one-way ANOVA across models with Tukey-HSD post-hoc
//! comparisons and partial eta-squared effect size.
//!
//! Scores are first adjusted for the region-size category covariate by
//! regressing on dummy-coded categories and keeping residuals plus the grand
//! mean (with a lone categorical regressor this equals subtracting category
//! means). The ANOVA then compares models on the adjusted scores.

use std::collections::BTreeMap;

use serde::Serialize;

use super::special::{f_sf, studentized_range_quantile, studentized_range_sf};
use super::StatsError;

#[derive(Debug, Clone, PartialEq)]
pub struct AnovaObservation {
    pub model: String,
    pub category: String,
    pub score: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TukeyPair {
    pub model_a: String,
    pub model_b: String,
    pub mean_diff: f64,
    pub q_statistic: f64,
    pub adjusted_p: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnovaReport {
    pub f_statistic: f64,
    pub p_value: f64,
    pub dof_between: usize,
    pub dof_within: usize,
    pub ss_between: f64,
    pub ss_within: f64,
    pub partial_eta_squared: f64,
    pub grand_mean: f64,
    /// Adjusted mean and observation count per model.
    pub model_means: Vec<(String, f64, usize)>,
    /// Tukey critical value of q at alpha = 0.05.
    pub critical_q: f64,
    pub tukey: Vec<TukeyPair>,
}

const ALPHA: f64 = 0.05;

/// Run the category-adjusted ANOVA. Every model needs at least two
/// observations; at least two models must be present.
pub fn anova_adjusted(observations: &[AnovaObservation]) -> Result<AnovaReport, StatsError> {
    if observations.iter().any(|o| !o.score.is_finite()) {
        return Err(StatsError::NonFiniteScore(f64::NAN));
    }
    let n = observations.len();
    let grand_mean = observations.iter().map(|o| o.score).sum::<f64>() / n as f64;

    // covariate adjustment: residuals of score ~ category, plus grand mean
    let mut category_totals: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for obs in observations {
        let entry = category_totals.entry(&obs.category).or_insert((0.0, 0));
        entry.0 += obs.score;
        entry.1 += 1;
    }
    let category_means: BTreeMap<&str, f64> = category_totals
        .iter()
        .map(|(k, (sum, count))| (*k, sum / *count as f64))
        .collect();

    let mut by_model: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for obs in observations {
        let adjusted = obs.score - category_means[obs.category.as_str()] + grand_mean;
        by_model.entry(&obs.model).or_default().push(adjusted);
    }

    let k = by_model.len();
    if k < 2 {
        return Err(StatsError::TooFewTreatments(k));
    }
    for (model, scores) in &by_model {
        if scores.len() < 2 {
            return Err(StatsError::UnbalancedDegenerate {
                model: model.to_string(),
            });
        }
    }

    let adjusted_grand = by_model
        .values()
        .flatten()
        .sum::<f64>()
        / n as f64;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    let mut model_means = Vec::with_capacity(k);
    for (model, scores) in &by_model {
        let m = scores.iter().sum::<f64>() / scores.len() as f64;
        ss_between += scores.len() as f64 * (m - adjusted_grand) * (m - adjusted_grand);
        ss_within += scores.iter().map(|s| (s - m) * (s - m)).sum::<f64>();
        model_means.push((model.to_string(), m, scores.len()));
    }

    let dof_between = k - 1;
    let dof_within = n - k;
    let ms_within = ss_within / dof_within as f64;
    let (f_statistic, p_value) = if ss_within == 0.0 {
        if ss_between == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY, 0.0)
        }
    } else {
        let f = (ss_between / dof_between as f64) / ms_within;
        (f, f_sf(f, dof_between as f64, dof_within as f64))
    };
    let partial_eta_squared = if ss_between + ss_within == 0.0 {
        0.0
    } else {
        ss_between / (ss_between + ss_within)
    };

    let critical_q = studentized_range_quantile(1.0 - ALPHA, k, dof_within as f64);
    let mut tukey = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..model_means.len() {
        for j in i + 1..model_means.len() {
            let (ref model_a, mean_a, n_a) = model_means[i];
            let (ref model_b, mean_b, n_b) = model_means[j];
            let mean_diff = mean_a - mean_b;
            // Tukey-Kramer standard error for unequal group sizes
            let se = (ms_within / 2.0 * (1.0 / n_a as f64 + 1.0 / n_b as f64)).sqrt();
            let q_statistic = if se > 0.0 {
                mean_diff.abs() / se
            } else if mean_diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            let adjusted_p = if q_statistic.is_infinite() {
                0.0
            } else {
                studentized_range_sf(q_statistic, k, dof_within as f64)
            };
            tukey.push(TukeyPair {
                model_a: model_a.clone(),
                model_b: model_b.clone(),
                mean_diff,
                q_statistic,
                adjusted_p,
                significant: adjusted_p < ALPHA,
            });
        }
    }

    Ok(AnovaReport {
        f_statistic,
        p_value,
        dof_between,
        dof_within,
        ss_between,
        ss_within,
        partial_eta_squared,
        grand_mean,
        model_means,
        critical_q,
        tukey,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn obs(model: &str, category: &str, score: f64) -> AnovaObservation {
        AnovaObservation {
            model: model.into(),
            category: category.into(),
            score,
        }
    }

    #[test]
    fn identical_models_give_null_result() {
        let mut observations = Vec::new();
        for i in 0..6 {
            let cat = if i % 2 == 0 { "Large" } else { "Small" };
            let score = 0.5 + 0.1 * (i % 2) as f64;
            observations.push(obs("A", cat, score));
            observations.push(obs("B", cat, score));
        }
        let report = anova_adjusted(&observations).unwrap();
        assert_eq!(report.f_statistic, 0.0);
        assert_eq!(report.p_value, 1.0);
        assert!(report.tukey.iter().all(|p| !p.significant));
    }

    #[test]
    fn planted_huge_effect_is_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut observations = Vec::new();
        for i in 0..20 {
            let cat = ["Large", "Medium", "Small"][i % 3];
            let noise: f64 = rng.random_range(-0.01..0.01);
            let base: f64 = rng.random_range(0.4..0.6);
            observations.push(obs("A", cat, base + 1.0 + noise));
            observations.push(obs("B", cat, base));
        }
        let report = anova_adjusted(&observations).unwrap();
        assert!(report.p_value < 1e-6);
        assert_eq!(report.tukey.len(), 1);
        assert!(report.tukey[0].significant);
        assert!(report.partial_eta_squared > 0.9);
    }

    #[test]
    fn category_adjustment_removes_category_shift() {
        // model effect zero, category effect big: adjusted ANOVA must be null
        let mut observations = Vec::new();
        for i in 0..8 {
            let (cat, shift) = if i % 2 == 0 {
                ("Large", 10.0)
            } else {
                ("Small", -10.0)
            };
            observations.push(obs("A", cat, 0.5 + shift));
            observations.push(obs("B", cat, 0.5 + shift));
        }
        let report = anova_adjusted(&observations).unwrap();
        assert!(report.f_statistic.abs() < 1e-18);
        assert!(report.ss_between < 1e-18);
    }

    /// Balanced two-group identity: partial eta^2 = t^2 / (t^2 + dof).
    #[test]
    fn partial_eta_squared_matches_t_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n_per = 12;
        let mut observations = Vec::new();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for _ in 0..n_per {
            let x: f64 = rng.random_range(0.0..1.0);
            let y: f64 = rng.random_range(0.3..1.3);
            observations.push(obs("A", "Large", x));
            observations.push(obs("B", "Large", y));
            xs.push(x);
            ys.push(y);
        }
        let report = anova_adjusted(&observations).unwrap();

        // two-sample pooled t statistic
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (mx, my) = (mean(&xs), mean(&ys));
        let ssx: f64 = xs.iter().map(|v| (v - mx) * (v - mx)).sum();
        let ssy: f64 = ys.iter().map(|v| (v - my) * (v - my)).sum();
        let dof = (2 * n_per - 2) as f64;
        let pooled = ((ssx + ssy) / dof).sqrt();
        let t = (mx - my) / (pooled * (2.0 / n_per as f64).sqrt());
        let expected = t * t / (t * t + dof);
        assert!(
            (report.partial_eta_squared - expected).abs() < 1e-9,
            "eta2={} t-identity={expected}",
            report.partial_eta_squared
        );
        // and F = t^2 on two balanced groups
        assert!((report.f_statistic - t * t).abs() < 1e-9);
    }

    #[test]
    fn single_observation_model_is_degenerate() {
        let observations = vec![
            obs("A", "Large", 0.1),
            obs("A", "Large", 0.2),
            obs("B", "Large", 0.5),
        ];
        assert!(matches!(
            anova_adjusted(&observations),
            Err(StatsError::UnbalancedDegenerate { .. })
        ));
    }
}
