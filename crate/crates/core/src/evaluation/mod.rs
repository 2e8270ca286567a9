//! Evaluation harness: cross-validated tuning, variable importance, the
//! leave-one-out detection experiment, and the end-to-end pipeline.

mod loo;
mod pipeline;
mod report;

use serde::{Deserialize, Serialize};

use crate::dataset::FoldPlan;
use crate::error::{Error, Result};
use crate::graph::InteractionLabel;
use crate::learners::{
    confusion_from_predictions, roc_auc, HyperParams, LearnedState, ModelFamily, ModelSpec,
    TrainedModel,
};
use crate::similarity::MetricId;

pub use loo::{loo_detection, EdgeHoldout, HoldoutMetric, LooDetectionResult};
pub use pipeline::{
    classify_candidates, run_pipeline, CandidatePrediction, EvaluationReport, FamilyOutcome,
    GraphSummary, PipelineConfig,
};
pub use report::render_markdown;

/// Mean cross-validated accuracy of one grid point, or `None` when some
/// training complement lost a class (the grid point is infeasible, not an
/// abort).
pub fn cross_validate(
    spec: &ModelSpec,
    schema: &[MetricId],
    x: &[Vec<f64>],
    y: &[InteractionLabel],
    folds: &FoldPlan,
) -> Result<Option<f64>> {
    cross_validate_with(x, y, folds, |train_x, train_y, eval_x| {
        let model = TrainedModel::train(spec, schema, train_x, train_y)?;
        eval_x.iter().map(|row| model.predict_label(row)).collect()
    })
}

/// Generic cross-validation: `fit_predict` trains on the complement of a
/// fold and returns predictions for the fold rows. Returns the unweighted
/// mean accuracy over non-empty folds, or `None` if any training complement
/// is single-class.
pub fn cross_validate_with<F>(
    x: &[Vec<f64>],
    y: &[InteractionLabel],
    folds: &FoldPlan,
    mut fit_predict: F,
) -> Result<Option<f64>>
where
    F: FnMut(&[Vec<f64>], &[InteractionLabel], &[Vec<f64>]) -> Result<Vec<InteractionLabel>>,
{
    if folds.fold_of.len() != x.len() {
        return Err(Error::SchemaMismatch(format!(
            "fold plan covers {} rows, dataset has {}",
            folds.fold_of.len(),
            x.len()
        )));
    }
    let mut fold_accuracies = Vec::new();
    for fold in 0..folds.k {
        let eval_idx = folds.fold_indices(fold);
        if eval_idx.is_empty() {
            continue;
        }
        let mut train_x = Vec::new();
        let mut train_y = Vec::new();
        for (i, row) in x.iter().enumerate() {
            if folds.fold_of[i] != fold {
                train_x.push(row.clone());
                train_y.push(y[i]);
            }
        }
        let classes = train_y.contains(&InteractionLabel::Unwanted)
            && train_y.contains(&InteractionLabel::Wanted);
        if !classes {
            return Ok(None);
        }
        let eval_x: Vec<Vec<f64>> = eval_idx.iter().map(|&i| x[i].clone()).collect();
        let predicted = fit_predict(&train_x, &train_y, &eval_x)?;
        let hits = predicted
            .iter()
            .zip(eval_idx.iter().map(|&i| y[i]))
            .filter(|(&p, t)| p == *t)
            .count();
        fold_accuracies.push(hits as f64 / eval_idx.len() as f64);
    }
    if fold_accuracies.is_empty() {
        return Err(Error::DegenerateData("no non-empty folds".to_string()));
    }
    Ok(Some(
        fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64,
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridPoint {
    pub params: HyperParams,
    pub label: String,
    /// Mean CV accuracy; `None` marks an infeasible grid point.
    pub cv_accuracy: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TuningResult {
    pub family: ModelFamily,
    pub grid: Vec<GridPoint>,
    pub best_spec: ModelSpec,
    pub best_cv_accuracy: f64,
}

/// The tuning grid of each family, ordered simplest first (fewer
/// units/neighbors/trials, stronger regularization) so that the first
/// maximum wins ties.
pub fn default_grid(family: ModelFamily, n_columns: usize) -> Vec<HyperParams> {
    match family {
        ModelFamily::NaiveBayes => vec![HyperParams::NaiveBayes {}],
        ModelFamily::RandomForest => [2usize, 5, 8]
            .into_iter()
            .filter(|&m| m <= n_columns)
            .map(|mtry| HyperParams::RandomForest { mtry, n_trees: 500 })
            .collect(),
        ModelFamily::NeuralNet => {
            let mut grid = Vec::new();
            for hidden_units in [1usize, 3, 5] {
                for weight_decay in [1e-1, 1e-4, 0.0] {
                    grid.push(HyperParams::NeuralNet {
                        hidden_units,
                        weight_decay,
                    });
                }
            }
            grid
        }
        ModelFamily::C50BoostedTree => [1usize, 10, 20]
            .into_iter()
            .map(|trials| HyperParams::BoostedTree { trials })
            .collect(),
        ModelFamily::SvmLinear => [0.25, 0.5, 1.0]
            .into_iter()
            .map(|cost| HyperParams::SvmLinear { cost })
            .collect(),
        ModelFamily::Knn => [5usize, 7, 9]
            .into_iter()
            .map(|k| HyperParams::Knn { k })
            .collect(),
    }
}

/// Cross-validates every grid point and selects the best; ties go to the
/// earlier (simpler) grid point.
pub fn tune(
    family: ModelFamily,
    grid: Vec<HyperParams>,
    schema: &[MetricId],
    x: &[Vec<f64>],
    y: &[InteractionLabel],
    folds: &FoldPlan,
    base_seed: u64,
) -> Result<TuningResult> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "empty tuning grid for {family}"
        )));
    }
    let mut points = Vec::with_capacity(grid.len());
    let mut best: Option<(usize, f64)> = None;
    for (i, params) in grid.into_iter().enumerate() {
        if params.family() != family {
            return Err(Error::InvalidParameter(format!(
                "grid point {} does not belong to family {family}",
                params.label()
            )));
        }
        let spec = ModelSpec::new(params.clone(), crate::seeds::sub_seed(base_seed, "grid", i as u64))?;
        let accuracy = cross_validate(&spec, schema, x, y, folds)?;
        if let Some(acc) = accuracy {
            let better = match best {
                None => true,
                Some((_, best_acc)) => acc > best_acc,
            };
            if better {
                best = Some((i, acc));
            }
        }
        points.push(GridPoint {
            label: params.label(),
            params,
            cv_accuracy: accuracy,
        });
    }
    let Some((best_idx, best_acc)) = best else {
        return Err(Error::DegenerateData(format!(
            "every grid point of {family} was infeasible"
        )));
    };
    let best_spec = ModelSpec::new(
        points[best_idx].params.clone(),
        crate::seeds::sub_seed(base_seed, "grid", best_idx as u64),
    )?;
    Ok(TuningResult {
        family,
        grid: points,
        best_spec,
        best_cv_accuracy: best_acc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceMethod {
    AucFilter,
    ForestImpurity,
    TreeUsage,
    NetworkWeights,
}

impl ImportanceMethod {
    pub fn name(self) -> &'static str {
        match self {
            ImportanceMethod::AucFilter => "auc_filter",
            ImportanceMethod::ForestImpurity => "forest_impurity",
            ImportanceMethod::TreeUsage => "tree_usage",
            ImportanceMethod::NetworkWeights => "network_weights",
        }
    }
}

/// Per-metric importance scores, sorted descending with ties broken by
/// metric name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImportanceRanking {
    pub method: ImportanceMethod,
    pub ranked: Vec<(MetricId, f64)>,
}

impl ImportanceRanking {
    fn sorted(method: ImportanceMethod, mut scores: Vec<(MetricId, f64)>) -> Self {
        scores.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.name().cmp(b.0.name())));
        ImportanceRanking {
            method,
            ranked: scores,
        }
    }

    /// 1-based rank of the metric, if present.
    pub fn rank_of(&self, metric: MetricId) -> Option<usize> {
        self.ranked.iter().position(|(m, _)| *m == metric).map(|p| p + 1)
    }

    pub fn score_of(&self, metric: MetricId) -> Option<f64> {
        self.ranked
            .iter()
            .find(|(m, _)| *m == metric)
            .map(|(_, s)| *s)
    }
}

/// Model-independent filter importance: per column, max(AUC, 1 - AUC) of
/// the raw column used as a classifier score.
pub fn auc_filter_importance(
    schema: &[MetricId],
    x: &[Vec<f64>],
    y: &[InteractionLabel],
) -> Result<ImportanceRanking> {
    let mut scores = Vec::with_capacity(schema.len());
    for (c, &metric) in schema.iter().enumerate() {
        let column: Vec<f64> = x.iter().map(|row| row[c]).collect();
        let auc = roc_auc(&column, y)?;
        scores.push((metric, auc.max(1.0 - auc)));
    }
    Ok(ImportanceRanking::sorted(ImportanceMethod::AucFilter, scores))
}

/// Built-in importance of tree and network models, normalized to max 100.
/// Other families fall back to [`auc_filter_importance`] at the call site.
pub fn model_importance(model: &TrainedModel) -> Result<ImportanceRanking> {
    let (method, raw): (ImportanceMethod, Vec<f64>) = match &model.state {
        LearnedState::RandomForest(f) => (ImportanceMethod::ForestImpurity, f.importance.clone()),
        LearnedState::BoostedTrees(b) => (ImportanceMethod::TreeUsage, b.importance.clone()),
        LearnedState::NeuralNet(n) => (ImportanceMethod::NetworkWeights, n.garson_importance()),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "family {} has no built-in importance",
                model.spec.family
            )))
        }
    };
    let max = raw.iter().cloned().fold(0.0, f64::max);
    let normalized: Vec<f64> = if max > 0.0 {
        raw.iter().map(|v| v * 100.0 / max).collect()
    } else {
        raw
    };
    let scores = model
        .schema
        .iter()
        .copied()
        .zip(normalized)
        .collect();
    Ok(ImportanceRanking::sorted(method, scores))
}

/// Importance used in reports for one family: built-in when the family has
/// one, the AUC filter over the training rows otherwise.
pub fn family_importance(
    model: &TrainedModel,
    x: &[Vec<f64>],
    y: &[InteractionLabel],
) -> Result<ImportanceRanking> {
    match model.spec.family {
        ModelFamily::RandomForest | ModelFamily::C50BoostedTree | ModelFamily::NeuralNet => {
            model_importance(model)
        }
        _ => auc_filter_importance(&model.schema, x, y),
    }
}

/// Test metrics of a fitted model over labeled rows.
pub fn evaluate_model(
    model: &TrainedModel,
    x: &[Vec<f64>],
    y: &[InteractionLabel],
) -> Result<crate::learners::ClassMetrics> {
    let predicted: Result<Vec<InteractionLabel>> =
        x.iter().map(|row| model.predict_label(row)).collect();
    confusion_from_predictions(&predicted?, y)
}
