//! Saliency metrics: Normalized Scanpath Saliency and sampled-ROC AUROC.
//!
//! NSS is the mean of the standardized map at the ground-truth locations.
//! AUROC treats the map as a classifier separating ground-truth pixels from
//! an equal count of randomly sampled non-positive pixels; the sampling is
//! repeated (default 100 times) and the areas averaged. An enumeration mode
//! replaces sampling with an exhaustive sweep over every possible negative
//! set so small fixtures can be checked against exact oracles.

mod table;

pub use table::{cell_seed, score_corpus, ScoreRow, ScoreTable, ScoringConfig};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{GroundTruth, GtKind};
use crate::models::SaliencyMap;

/// Cap on region positives fed to AUROC; NSS always uses every mask pixel.
pub const REGION_POSITIVE_CAP: usize = 10_000;

/// Guard for enumeration mode: refuse to enumerate more negative sets than
/// this.
pub const MAX_ENUMERATED_SETS: u128 = 2_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("map is constant; NSS is undefined")]
    DegenerateMap,
    #[error("ground truth holds no positive location")]
    EmptyGroundTruth,
    #[error("not enough negatives: {positives} positives but only {pool} candidate pixels")]
    TooFewNegatives { positives: usize, pool: usize },
    #[error("enumeration would visit {sets} negative sets (cap {MAX_ENUMERATED_SETS})")]
    EnumerationTooLarge { sets: u128 },
    #[error("map and ground truth dimensions differ")]
    DimensionMismatch,
    #[error("map contains non-finite values")]
    NonFiniteMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricId {
    #[serde(rename = "NSS")]
    Nss,
    #[serde(rename = "AUROC")]
    Auroc,
}

impl std::fmt::Display for MetricId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricId::Nss => f.write_str("NSS"),
            MetricId::Auroc => f.write_str("AUROC"),
        }
    }
}

impl MetricId {
    pub fn parse(s: &str) -> Option<MetricId> {
        match s.to_ascii_uppercase().as_str() {
            "NSS" => Some(MetricId::Nss),
            "AUROC" => Some(MetricId::Auroc),
            _ => None,
        }
    }
}

/// One metric evaluation of one map against one ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricScore {
    pub metric: MetricId,
    pub value: f64,
    pub gt_kind: GtKind,
    /// Sampling repetitions that entered the value (1 for NSS).
    pub reps: usize,
    pub seed: u64,
}

/// ROC curve as (false-positive rate, true-positive rate) pairs running from
/// (0,0) to (1,1); both coordinates are non-decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    points: Vec<(f64, f64)>,
}

impl RocCurve {
    /// Build the curve by sweeping a threshold over all distinct values in
    /// the sample; tied values collapse into a single step.
    pub fn from_scores(positives: &[f64], negatives: &[f64]) -> RocCurve {
        assert!(!positives.is_empty() && !negatives.is_empty());
        let mut all: Vec<(f64, bool)> = positives
            .iter()
            .map(|v| (*v, true))
            .chain(negatives.iter().map(|v| (*v, false)))
            .collect();
        all.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite scores"));

        let p = positives.len() as f64;
        let n = negatives.len() as f64;
        let mut points = vec![(0.0, 0.0)];
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut i = 0;
        while i < all.len() {
            let threshold = all[i].0;
            while i < all.len() && all[i].0 == threshold {
                if all[i].1 {
                    tp += 1;
                } else {
                    fp += 1;
                }
                i += 1;
            }
            points.push((fp as f64 / n, tp as f64 / p));
        }
        RocCurve { points }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Trapezoidal area under the curve.
    pub fn auc(&self) -> f64 {
        let mut area = 0.0;
        for pair in self.points.windows(2) {
            let (x0, y0) = pair[0];
            let (x1, y1) = pair[1];
            area += (x1 - x0) * (y1 + y0) / 2.0;
        }
        area
    }
}

fn gt_positions(gt: &GroundTruth, dedup: bool) -> Vec<(u32, u32)> {
    match gt {
        GroundTruth::Fixations(fx) => {
            if dedup {
                fx.distinct_points()
            } else {
                fx.points().to_vec()
            }
        }
        GroundTruth::Regions(mask) => mask.positive_points(),
    }
}

fn check_dims(map: &SaliencyMap, gt: &GroundTruth) -> Result<(), MetricError> {
    let dims = map.dims();
    let ok = match gt {
        GroundTruth::Fixations(fx) => fx.points().iter().all(|&(x, y)| x < dims.0 && y < dims.1),
        GroundTruth::Regions(mask) => mask.dims() == dims,
    };
    if ok {
        Ok(())
    } else {
        Err(MetricError::DimensionMismatch)
    }
}

/// Normalized Scanpath Saliency: mean standardized map value over the
/// ground-truth locations. Fixations keep duplicates (the metric averages per
/// fixation); region positives are every mask pixel.
pub fn nss(map: &SaliencyMap, gt: &GroundTruth) -> Result<MetricScore, MetricError> {
    check_dims(map, gt)?;
    if !map.grid.all_finite() {
        return Err(MetricError::NonFiniteMap);
    }
    let positions = gt_positions(gt, false);
    if positions.is_empty() {
        return Err(MetricError::EmptyGroundTruth);
    }
    if map.grid.max() == map.grid.min() {
        return Err(MetricError::DegenerateMap);
    }
    let mean = map.grid.mean();
    let std = map.grid.std_pop();
    if std == 0.0 {
        return Err(MetricError::DegenerateMap);
    }
    let sum: f64 = positions
        .iter()
        .map(|&(x, y)| (map.grid.get(x as usize, y as usize) - mean) / std)
        .sum();
    Ok(MetricScore {
        metric: MetricId::Nss,
        value: sum / positions.len() as f64,
        gt_kind: match gt {
            GroundTruth::Fixations(_) => GtKind::Fixations,
            GroundTruth::Regions(_) => GtKind::Regions,
        },
        reps: 1,
        seed: 0,
    })
}

/// How AUROC draws its negative sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeSampling {
    /// `reps` independent uniform samples without replacement.
    Random { reps: usize },
    /// Exhaustively enumerate every negative set (small inputs only).
    Enumerate,
}

#[derive(Debug, Clone)]
pub struct AurocOptions {
    pub sampling: NegativeSampling,
    pub seed: u64,
    pub region_positive_cap: usize,
}

impl Default for AurocOptions {
    fn default() -> Self {
        AurocOptions {
            sampling: NegativeSampling::Random { reps: 100 },
            seed: 0,
            region_positive_cap: REGION_POSITIVE_CAP,
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > MAX_ENUMERATED_SETS * 1000 {
            return u128::MAX;
        }
    }
    acc
}

/// Sampled-ROC AUROC. Positives are the deduplicated ground-truth pixels
/// (regions subsampled to the cap); each repetition draws an equal count of
/// negatives from the non-positive pixels and the trapezoidal areas are
/// averaged. Deterministic for a fixed seed.
pub fn auroc(
    map: &SaliencyMap,
    gt: &GroundTruth,
    options: &AurocOptions,
) -> Result<MetricScore, MetricError> {
    check_dims(map, gt)?;
    if !map.grid.all_finite() {
        return Err(MetricError::NonFiniteMap);
    }
    let all_positives = gt_positions(gt, true);
    if all_positives.is_empty() {
        return Err(MetricError::EmptyGroundTruth);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    // region positives may be subsampled for cost; the negative pool still
    // excludes the full positive set
    let used_positives: Vec<(u32, u32)> = if all_positives.len() > options.region_positive_cap {
        index::sample(&mut rng, all_positives.len(), options.region_positive_cap)
            .iter()
            .map(|i| all_positives[i])
            .collect()
    } else {
        all_positives.clone()
    };

    let (w, h) = map.dims();
    let mut is_positive = vec![false; (w as usize) * (h as usize)];
    for &(x, y) in &all_positives {
        is_positive[y as usize * w as usize + x as usize] = true;
    }
    let pool: Vec<usize> = (0..is_positive.len()).filter(|i| !is_positive[*i]).collect();
    if pool.len() < used_positives.len() {
        return Err(MetricError::TooFewNegatives {
            positives: used_positives.len(),
            pool: pool.len(),
        });
    }

    let pos_scores: Vec<f64> = used_positives
        .iter()
        .map(|&(x, y)| map.grid.get(x as usize, y as usize))
        .collect();
    let k = pos_scores.len();

    let (mean_auc, reps_used) = match options.sampling {
        NegativeSampling::Random { reps } => {
            assert!(reps >= 1, "reps must be >= 1");
            let mut total = 0.0;
            let mut neg_scores = vec![0.0; k];
            for _ in 0..reps {
                let chosen = index::sample(&mut rng, pool.len(), k);
                for (slot, idx) in neg_scores.iter_mut().zip(chosen.iter()) {
                    *slot = map.grid.values()[pool[idx]];
                }
                total += RocCurve::from_scores(&pos_scores, &neg_scores).auc();
            }
            (total / reps as f64, reps)
        }
        NegativeSampling::Enumerate => {
            let sets = binomial(pool.len(), k);
            if sets > MAX_ENUMERATED_SETS {
                return Err(MetricError::EnumerationTooLarge { sets });
            }
            let n = pool.len();
            let mut total = 0.0;
            let mut count = 0usize;
            let mut combo: Vec<usize> = (0..k).collect();
            let mut neg_scores = vec![0.0; k];
            loop {
                for (slot, &idx) in neg_scores.iter_mut().zip(&combo) {
                    *slot = map.grid.values()[pool[idx]];
                }
                total += RocCurve::from_scores(&pos_scores, &neg_scores).auc();
                count += 1;
                // advance to the next lexicographic combination
                let mut i = k as i64 - 1;
                while i >= 0 && combo[i as usize] == n - k + i as usize {
                    i -= 1;
                }
                if i < 0 {
                    break;
                }
                let i = i as usize;
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
            }
            (total / count as f64, count)
        }
    };

    Ok(MetricScore {
        metric: MetricId::Auroc,
        value: mean_auc.clamp(0.0, 1.0),
        gt_kind: match gt {
            GroundTruth::Fixations(_) => GtKind::Fixations,
            GroundTruth::Regions(_) => GtKind::Regions,
        },
        reps: reps_used,
        seed: options.seed,
    })
}
