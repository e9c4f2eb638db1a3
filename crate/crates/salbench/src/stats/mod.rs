//! Statistical engine: tie-aware ranking, two-way Friedman with blocking,
//! Kendall's W with interpretation bands, least-squares trends, PCA metric
//! fusion, covariate-adjusted ANOVA, Tukey-HSD and partial eta-squared.
//!
//! All operations are pure functions over in-memory matrices; they are small
//! enough to run single-threaded.

mod anova;
mod concordance;
mod friedman;
mod fusion;
mod rank;
pub mod special;
mod trend;

pub use anova::{anova_adjusted, AnovaObservation, AnovaReport, TukeyPair};
pub use concordance::{interpret_w, kendalls_w, WInterpretation};
pub use friedman::{friedman_test, FriedmanResult};
pub use fusion::{pca_fuse, FusionReport};
pub use rank::{rank_with_ties, tie_term, RankMatrix};
pub use trend::{ols_trend, TrendFit, TrendPoint};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("non-finite score {0}")]
    NonFiniteScore(f64),
    #[error("need at least 2 treatments, got {0}")]
    TooFewTreatments(usize),
    #[error("need at least 2 blocks, got {0}")]
    TooFewBlocks(usize),
    #[error("all ranks tied; concordance is undefined")]
    DegenerateAllTied,
    #[error("value {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("need at least 2 usable points, got {0}")]
    TooFewPoints(usize),
    #[error("metric column is constant")]
    ConstantMetricColumn,
    #[error("need at least 3 observations, got {0}")]
    TooFewObservations(usize),
    #[error("model `{model}` has fewer than 2 observations")]
    UnbalancedDegenerate { model: String },
    #[error("invalid rank matrix: {0}")]
    InvalidRankMatrix(String),
}
