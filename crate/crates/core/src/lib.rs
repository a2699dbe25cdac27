//! Classifier ensembles for two-class imbalanced data: class-aware
//! bagging into balanced subsets, resampling (SMOTE, random, neighborhood
//! cleaning), genetic-programming boosted members, and cross-bag voting,
//! plus the metrics and experiment protocols needed to evaluate them.

pub mod boosting;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod gp;
pub mod resampling;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
