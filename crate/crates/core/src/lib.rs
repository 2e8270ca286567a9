//! Detects likely unwanted feature interactions in a software product line.
//!
//! A product line is modeled as an undirected graph whose nodes are the
//! optional features and whose edges are the documented pairwise
//! interactions, each labeled `wanted` or `unwanted`. Link-prediction
//! similarity metrics computed on the unwanted-interaction subgraph turn
//! every feature pair into a row of scores, and small from-scratch
//! classifiers label the pairs. The [`evaluation`] module drives tuning,
//! importance analysis, and the leave-one-out detection experiment behind
//! a single deterministic pipeline.

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod io;
pub mod learners;
pub mod seeds;
pub mod similarity;

pub use dataset::{EdgeDataset, FoldPlan, SplitPlan};
pub use error::{Error, Result};
pub use graph::{AdjacencyMatrix, FeatureGraph, InteractionLabel, LabelFilter};
pub use learners::{ClassMetrics, HyperParams, ModelFamily, ModelSpec, TrainedModel};
pub use similarity::{MetricId, MetricParams, SimilarityTable};
