//! Feature selection and risk classification on labeled tabular records.
//!
//! The toolkit discretizes continuous variables into items (fuzzy c-means or
//! equal-width bins), mines an FP-tree over the resulting transactions, scores
//! variables by accumulating each branch pattern's relative object purity
//! ratio (ROPR) onto its exclusive items, and feeds the resulting ranking into
//! two baseline classifiers: a k-nearest-neighbor model on z-scored inputs and
//! an all-parents Bayesian network on equal-width bins with a posterior
//! threshold. An experiment harness evaluates sensitivity and false-alarm rate
//! over a scenario grid and emits reproducible reports.

pub mod classifiers;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod fptree;
pub mod importance;

pub use error::{Error, Result};
