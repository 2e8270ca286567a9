//! End-to-end pipeline: score, assemble, split, tune, fit, evaluate,
//! rank importance, run the leave-one-out experiment, and assemble the
//! report. Fully deterministic given the master seed.

use serde::{Deserialize, Serialize};

use crate::dataset::{build_dataset, stratified_kfold, stratified_split, EdgeDataset, FoldPlan, SplitPlan};
use crate::error::{Error, Result};
use crate::graph::{FeatureGraph, InteractionLabel, LabelFilter};
use crate::learners::{ClassMetrics, ModelFamily, ModelSpec, TrainedModel, FAMILIES};
use crate::seeds::sub_seed;
use crate::similarity::{score_table, MetricId, MetricParams, METRICS};

use super::loo::{loo_detection, LooDetectionResult};
use super::{
    auc_filter_importance, default_grid, evaluate_model, family_importance, tune,
    ImportanceRanking, TuningResult,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub train_fraction: f64,
    pub k_folds: usize,
    pub families: Vec<ModelFamily>,
    /// Metrics the leave-one-out experiment reports on.
    pub loo_metrics: Vec<MetricId>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            train_fraction: 0.8,
            k_folds: 10,
            families: FAMILIES.to_vec(),
            loo_metrics: METRICS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSummary {
    pub features: usize,
    pub mandatory_features: usize,
    pub unwanted_edges: usize,
    pub pairs: usize,
    pub digest: String,
}

/// Everything the pipeline produced for one model family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyOutcome {
    pub family: ModelFamily,
    pub tuning: TuningResult,
    pub final_spec: ModelSpec,
    pub test_metrics: ClassMetrics,
    pub importance: ImportanceRanking,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub master_seed: u64,
    /// Digest of the caller's full run configuration; filled by front ends.
    pub config_digest: Option<String>,
    /// The caller's configuration echoed verbatim; filled by front ends.
    pub cli_config: Option<serde_json::Value>,
    pub graph: GraphSummary,
    pub params: MetricParams,
    pub config: PipelineConfig,
    pub split: SplitPlan,
    pub fold_plan: FoldPlan,
    pub families: Vec<FamilyOutcome>,
    /// Model-independent AUC-filter ranking over the full dataset.
    pub dataset_importance: ImportanceRanking,
    pub loo: LooDetectionResult,
    pub notes: Vec<String>,
}

impl EvaluationReport {
    pub fn family(&self, family: ModelFamily) -> Option<&FamilyOutcome> {
        self.families.iter().find(|f| f.family == family)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn select<T: Clone>(rows: &[T], indices: &[usize]) -> Vec<T> {
    indices.iter().map(|&i| rows[i].clone()).collect()
}

/// Runs the whole experiment. Any stage error aborts with the stage name
/// attached.
pub fn run_pipeline(
    g: &FeatureGraph,
    params: &MetricParams,
    master_seed: u64,
    config: &PipelineConfig,
) -> Result<EvaluationReport> {
    if config.families.is_empty() {
        return Err(Error::InvalidParameter("no model families selected".to_string()));
    }
    if config.loo_metrics.is_empty() {
        return Err(Error::InvalidParameter("no leave-one-out metrics selected".to_string()));
    }

    let table = score_table(g, params).map_err(|e| Error::stage("score_table", e))?;
    let ds: EdgeDataset =
        build_dataset(&table, g).map_err(|e| Error::stage("build_dataset", e))?;
    for label in [InteractionLabel::Unwanted, InteractionLabel::Wanted] {
        if ds.class_count(label) == 0 {
            return Err(Error::stage(
                "build_dataset",
                Error::DegenerateData("single-class dataset".to_string()),
            ));
        }
    }

    let split = stratified_split(&ds, config.train_fraction, sub_seed(master_seed, "split", 0))
        .map_err(|e| Error::stage("stratified_split", e))?;
    let rows = ds.feature_rows();
    let labels = ds.labels();
    let train_x = select(&rows, &split.train_indices);
    let train_y = select(&labels, &split.train_indices);
    let test_x = select(&rows, &split.test_indices);
    let test_y = select(&labels, &split.test_indices);

    let fold_plan = stratified_kfold(&train_y, config.k_folds, sub_seed(master_seed, "folds", 0))
        .map_err(|e| Error::stage("stratified_kfold", e))?;

    let schema = METRICS.to_vec();
    let mut families = Vec::with_capacity(config.families.len());
    for &family in &config.families {
        let grid = default_grid(family, schema.len());
        let tuning = tune(
            family,
            grid,
            &schema,
            &train_x,
            &train_y,
            &fold_plan,
            sub_seed(master_seed, &format!("tune:{family}"), 0),
        )
        .map_err(|e| Error::stage("tune", e))?;

        // refit on the full training partition with the selected point
        let final_spec = ModelSpec::new(
            tuning.best_spec.params.clone(),
            sub_seed(master_seed, &format!("final:{family}"), 0),
        )?;
        let model = TrainedModel::train(&final_spec, &schema, &train_x, &train_y)
            .map_err(|e| Error::stage("final_fit", e))?;
        let test_metrics =
            evaluate_model(&model, &test_x, &test_y).map_err(|e| Error::stage("test_eval", e))?;
        let importance = family_importance(&model, &train_x, &train_y)
            .map_err(|e| Error::stage("importance", e))?;
        families.push(FamilyOutcome {
            family,
            tuning,
            final_spec,
            test_metrics,
            importance,
        });
    }

    let dataset_importance = auc_filter_importance(&schema, &rows, &labels)
        .map_err(|e| Error::stage("importance", e))?;

    let unwanted = g.unwanted_subgraph();
    let loo = loo_detection(&unwanted, params, &config.loo_metrics)
        .map_err(|e| Error::stage("loo_detection", e))?;

    let notes = vec![format!(
        "leave-one-out detection evaluated over {} metric(s): {}",
        config.loo_metrics.len(),
        config
            .loo_metrics
            .iter()
            .map(|m| m.name())
            .collect::<Vec<_>>()
            .join(", ")
    )];

    Ok(EvaluationReport {
        master_seed,
        config_digest: None,
        cli_config: None,
        graph: GraphSummary {
            features: g.node_count(),
            mandatory_features: g.mandatory().len(),
            unwanted_edges: g.edge_count(LabelFilter::Only(InteractionLabel::Unwanted)),
            pairs: ds.len(),
            digest: g.digest(),
        },
        params: params.clone(),
        config: config.clone(),
        split,
        fold_plan,
        families,
        dataset_importance,
        loo,
        notes,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidatePrediction {
    pub feature_a: String,
    pub feature_b: String,
    pub label: InteractionLabel,
    pub score: f64,
}

/// Scores candidate pairs against the graph's unwanted subgraph and applies
/// the model. Candidate endpoints must already be nodes of `g`; a new
/// feature is introduced by adding it (and its known interactions) to the
/// input documents first.
pub fn classify_candidates(
    g: &FeatureGraph,
    model: &TrainedModel,
    params: &MetricParams,
    candidates: &[(String, String)],
) -> Result<Vec<CandidatePrediction>> {
    if model.schema != METRICS {
        return Err(Error::SchemaMismatch(
            "model schema does not cover the eight similarity metrics".to_string(),
        ));
    }
    for (a, b) in candidates {
        for name in [a, b] {
            if !g.contains(name) {
                return Err(Error::UnknownFeature(name.clone()));
            }
        }
        if a == b {
            return Err(Error::InvalidParameter(format!(
                "candidate pair has identical endpoints `{a}`"
            )));
        }
    }

    let table = score_table(g, params)?;
    let mut out = Vec::with_capacity(candidates.len());
    for (a, b) in candidates {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let row = table
            .pairs()
            .iter()
            .position(|(x, y)| x == lo && y == hi)
            .ok_or_else(|| {
                Error::SchemaMismatch(format!("pair {a},{b} missing from score table"))
            })?;
        let scores = table.row(row).to_vec();
        let score = model.predict_score(&scores)?;
        let label = model.predict_label(&scores)?;
        out.push(CandidatePrediction {
            feature_a: a.clone(),
            feature_b: b.clone(),
            label,
            score,
        });
    }
    Ok(out)
}
