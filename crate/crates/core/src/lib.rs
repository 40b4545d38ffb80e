//! Prediction-boosted randomized contraction for global minimum cut.
//!
//! The crate provides exact oracles (Stoer–Wagner, brute force), Karger
//! and FPZ contraction with optional edge predictions, tools to measure
//! and synthesize prediction error, a learner for predictions from sample
//! instances, instance generators, and an experiment runner.

pub mod contraction;
pub mod dsu;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod learner;
pub mod oracle;
pub mod prediction;
pub mod sampler;

pub use contraction::{Algorithm, QSchedule, TrialStats};
pub use error::{Error, Result};
pub use graph::{Cut, Edge, WeightedGraph};
pub use prediction::{ErrorProfile, Prediction};
