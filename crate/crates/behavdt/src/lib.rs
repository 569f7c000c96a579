//! Behavioral decision trees for categorical context data.
//!
//! The centerpiece is a confidence-thresholded, generalization-aware tree
//! learner: any node — interior or leaf — whose training subset is dominated
//! by one behavior class strongly enough becomes a decision node, and only
//! the deviating branches below it are expanded. Classic ID3-style trees and
//! a majority-class baseline ship alongside it, plus a deterministic k-fold
//! evaluation harness, synthetic dataset generation, and experiment drivers
//! for node-count and precision/recall-versus-confidence comparisons.

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod learner;
pub mod metrics;
pub mod model;
pub mod rng;

pub use error::{Error, Result};
