//! Benchmark toolkit for visual saliency models.
//!
//! The crate evaluates saliency maps against two kinds of ground truth
//! (eye fixations and labelled regions) with the NSS and AUROC metrics,
//! then runs three statistical experiments over the resulting score table:
//! rank concordance between ground truths (Friedman + Kendall's W),
//! region-size category analysis, and PCA metric fusion with a
//! covariate-adjusted ANOVA and Tukey-HSD post-hoc tests.
//!
//! See the `book/` guide for worked examples of every stage.

pub mod bench;
#[cfg(doctest)]
mod book;
pub mod corpus;
pub mod grid;
pub mod metrics;
pub mod models;
pub mod preprocess;
pub mod stats;

pub use grid::Grid;
