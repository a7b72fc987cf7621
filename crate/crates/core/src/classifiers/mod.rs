//! The two baseline predictors: k-NN on z-scored continuous variables and an
//! all-parents Bayesian network on equal-width bins with a posterior
//! threshold.

mod bayes;
mod knn;

pub use bayes::{bn_fit, BayesNet, DEFAULT_ALPHA, DEFAULT_THRESHOLD};
pub use knn::{knn_fit, KnnModel};
