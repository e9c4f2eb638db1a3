//! Runs every code block in the book as a doc-test, so the guide can never
//! drift out of sync with the API. One module per chapter keeps failures
//! attributable.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/datasets.md")]
mod datasets {}

#[doc = include_str!("../../../book/src/models.md")]
mod models {}

#[doc = include_str!("../../../book/src/preprocessing.md")]
mod preprocessing {}

#[doc = include_str!("../../../book/src/metrics.md")]
mod metrics {}

#[doc = include_str!("../../../book/src/concordance.md")]
mod concordance {}

#[doc = include_str!("../../../book/src/categories.md")]
mod categories {}

#[doc = include_str!("../../../book/src/fusion.md")]
mod fusion {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
