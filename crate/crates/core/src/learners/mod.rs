//! From-scratch classifiers for labeling feature pairs, plus classification
//! metrics and versioned model persistence.
//!
//! Six families: Gaussian naive Bayes, a random forest of Gini trees, a
//! one-hidden-layer logistic network, adaptively boosted trees, a linear
//! hinge-loss SVM, and k-nearest neighbors. Distance- and gradient-based
//! families standardize their inputs with train-set statistics; trees and
//! naive Bayes consume raw columns.

pub mod boosted;
pub mod knn;
pub mod naive_bayes;
pub mod neural_net;
pub mod svm;
pub mod tree;

mod forest;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::InteractionLabel;
use crate::similarity::MetricId;

pub use boosted::BoostedEnsemble;
pub use forest::Forest;
pub use knn::KnnState;
pub use naive_bayes::GaussianNb;
pub use neural_net::{Network, NnConfig};
pub use svm::{LinearSvm, SvmConfig};

/// Version gate for persisted model files.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    NaiveBayes,
    RandomForest,
    NeuralNet,
    C50BoostedTree,
    SvmLinear,
    Knn,
}

/// Canonical family order used by reports.
pub const FAMILIES: [ModelFamily; 6] = [
    ModelFamily::NaiveBayes,
    ModelFamily::RandomForest,
    ModelFamily::NeuralNet,
    ModelFamily::C50BoostedTree,
    ModelFamily::SvmLinear,
    ModelFamily::Knn,
];

impl ModelFamily {
    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::NaiveBayes => "naive_bayes",
            ModelFamily::RandomForest => "random_forest",
            ModelFamily::NeuralNet => "neural_net",
            ModelFamily::C50BoostedTree => "c50_boosted_tree",
            ModelFamily::SvmLinear => "svm_linear",
            ModelFamily::Knn => "knn",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        FAMILIES.into_iter().find(|f| f.name() == s)
    }

    /// Distance- and gradient-based learners need comparable column scales.
    pub fn standardizes(self) -> bool {
        matches!(
            self,
            ModelFamily::NeuralNet | ModelFamily::SvmLinear | ModelFamily::Knn
        )
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperParams {
    NaiveBayes {},
    RandomForest { mtry: usize, n_trees: usize },
    NeuralNet { hidden_units: usize, weight_decay: f64 },
    BoostedTree { trials: usize },
    SvmLinear { cost: f64 },
    Knn { k: usize },
}

impl HyperParams {
    pub fn family(&self) -> ModelFamily {
        match self {
            HyperParams::NaiveBayes {} => ModelFamily::NaiveBayes,
            HyperParams::RandomForest { .. } => ModelFamily::RandomForest,
            HyperParams::NeuralNet { .. } => ModelFamily::NeuralNet,
            HyperParams::BoostedTree { .. } => ModelFamily::C50BoostedTree,
            HyperParams::SvmLinear { .. } => ModelFamily::SvmLinear,
            HyperParams::Knn { .. } => ModelFamily::Knn,
        }
    }

    /// Stable label for tuning tables.
    pub fn label(&self) -> String {
        match self {
            HyperParams::NaiveBayes {} => "gaussian".to_string(),
            HyperParams::RandomForest { mtry, .. } => format!("mtry={mtry}"),
            HyperParams::NeuralNet {
                hidden_units,
                weight_decay,
            } => format!("units={hidden_units},decay={weight_decay}"),
            HyperParams::BoostedTree { trials } => format!("trials={trials}"),
            HyperParams::SvmLinear { cost } => format!("cost={cost}"),
            HyperParams::Knn { k } => format!("k={k}"),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            HyperParams::NaiveBayes {} => Ok(()),
            HyperParams::RandomForest { mtry, n_trees } => {
                if mtry == 0 {
                    return bad("random_forest mtry must be >= 1".to_string());
                }
                if n_trees == 0 {
                    return bad("random_forest n_trees must be >= 1".to_string());
                }
                Ok(())
            }
            HyperParams::NeuralNet {
                hidden_units,
                weight_decay,
            } => {
                if hidden_units == 0 {
                    return bad("neural_net hidden_units must be >= 1".to_string());
                }
                if weight_decay.is_nan() || weight_decay < 0.0 {
                    return bad(format!("neural_net weight_decay must be >= 0, got {weight_decay}"));
                }
                Ok(())
            }
            HyperParams::BoostedTree { trials } => {
                if trials == 0 {
                    return bad("c50_boosted_tree trials must be >= 1".to_string());
                }
                Ok(())
            }
            HyperParams::SvmLinear { cost } => {
                if cost.is_nan() || cost <= 0.0 {
                    return bad(format!("svm_linear cost must be > 0, got {cost}"));
                }
                Ok(())
            }
            HyperParams::Knn { k } => {
                if k == 0 {
                    return bad("knn k must be >= 1".to_string());
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: ModelFamily,
    pub params: HyperParams,
    pub seed: u64,
    pub standardize: bool,
}

impl ModelSpec {
    pub fn new(params: HyperParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let family = params.family();
        Ok(ModelSpec {
            family,
            params,
            seed,
            standardize: family.standardizes(),
        })
    }
}

/// Per-column z-scoring statistics fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len() as f64;
        let mut means = vec![0.0; cols];
        for row in rows {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut stds = vec![0.0; cols];
        for row in rows {
            for ((s, v), m) in stds.iter_mut().zip(row).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
        }
        Standardizer { means, stds }
    }

    /// Constant columns map to exactly 0 so that rescaling any column by a
    /// positive factor leaves transformed rows unchanged.
    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| if *s == 0.0 { 0.0 } else { (v - m) / s })
            .collect()
    }

    pub fn transform_all(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform(r)).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnedState {
    NaiveBayes(GaussianNb),
    RandomForest(Forest),
    NeuralNet(Network),
    BoostedTrees(BoostedEnsemble),
    SvmLinear(LinearSvm),
    Knn(KnnState),
}

/// A fitted classifier together with its spec, column schema, and (when the
/// family standardizes) the training-set scaling statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ModelSpec,
    pub schema: Vec<MetricId>,
    pub standardizer: Option<Standardizer>,
    pub state: LearnedState,
}

fn validate_training_data(
    schema: &[MetricId],
    x: &[Vec<f64>],
    y: &[InteractionLabel],
) -> Result<()> {
    if x.is_empty() {
        return Err(Error::DegenerateData("no training rows".to_string()));
    }
    if x.len() != y.len() {
        return Err(Error::SchemaMismatch(format!(
            "{} rows but {} labels",
            x.len(),
            y.len()
        )));
    }
    for row in x {
        if row.len() != schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "row has {} columns, schema has {}",
                row.len(),
                schema.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite value in training rows".to_string(),
            ));
        }
    }
    for label in [InteractionLabel::Unwanted, InteractionLabel::Wanted] {
        if !y.contains(&label) {
            return Err(Error::DegenerateData(format!(
                "training rows contain no `{label}` examples"
            )));
        }
    }
    Ok(())
}

impl TrainedModel {
    pub fn train(
        spec: &ModelSpec,
        schema: &[MetricId],
        x: &[Vec<f64>],
        y: &[InteractionLabel],
    ) -> Result<Self> {
        spec.params.validate()?;
        validate_training_data(schema, x, y)?;
        let standardizer = spec.standardize.then(|| Standardizer::fit(x));
        let fitted: Vec<Vec<f64>> = match &standardizer {
            Some(s) => s.transform_all(x),
            None => x.to_vec(),
        };
        let state = match &spec.params {
            HyperParams::NaiveBayes {} => LearnedState::NaiveBayes(GaussianNb::fit(&fitted, y)?),
            HyperParams::RandomForest { mtry, n_trees } => LearnedState::RandomForest(
                Forest::fit(&fitted, y, *mtry, *n_trees, spec.seed)?,
            ),
            HyperParams::NeuralNet {
                hidden_units,
                weight_decay,
            } => {
                let config = NnConfig {
                    hidden_units: *hidden_units,
                    weight_decay: *weight_decay,
                    ..NnConfig::default()
                };
                LearnedState::NeuralNet(Network::fit(&fitted, y, &config, spec.seed))
            }
            HyperParams::BoostedTree { trials } => {
                LearnedState::BoostedTrees(BoostedEnsemble::fit(&fitted, y, *trials, spec.seed)?)
            }
            HyperParams::SvmLinear { cost } => {
                let config = SvmConfig {
                    cost: *cost,
                    ..SvmConfig::default()
                };
                LearnedState::SvmLinear(LinearSvm::fit(&fitted, y, &config))
            }
            HyperParams::Knn { k } => LearnedState::Knn(KnnState::fit(&fitted, y, *k)),
        };
        Ok(TrainedModel {
            spec: spec.clone(),
            schema: schema.to_vec(),
            standardizer,
            state,
        })
    }

    /// Probability-like score for the `unwanted` class.
    pub fn predict_score(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "row has {} columns, model schema has {}",
                row.len(),
                self.schema.len()
            )));
        }
        let transformed;
        let input: &[f64] = match &self.standardizer {
            Some(s) => {
                transformed = s.transform(row);
                &transformed
            }
            None => row,
        };
        let score = match &self.state {
            LearnedState::NaiveBayes(m) => m.score(input),
            LearnedState::RandomForest(m) => m.score(input),
            LearnedState::NeuralNet(m) => m.forward(input),
            LearnedState::BoostedTrees(m) => m.score(input),
            LearnedState::SvmLinear(m) => m.score(input),
            LearnedState::Knn(m) => m.score(input),
        };
        Ok(score)
    }

    /// `unwanted` iff the score reaches 0.5; a score of exactly 0.5 is
    /// classified unwanted.
    pub fn predict_label(&self, row: &[f64]) -> Result<InteractionLabel> {
        Ok(if self.predict_score(row)? >= 0.5 {
            InteractionLabel::Unwanted
        } else {
            InteractionLabel::Wanted
        })
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Envelope<'a> {
            format_version: u32,
            model: &'a TrainedModel,
        }
        Ok(serde_json::to_string_pretty(&Envelope {
            format_version: MODEL_FORMAT_VERSION,
            model: self,
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Envelope {
            format_version: u32,
            model: serde_json::Value,
        }
        let envelope: Envelope = serde_json::from_str(text)
            .map_err(|e| Error::ModelFormat(format!("not a model file: {e}")))?;
        if envelope.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported format_version {} (expected {MODEL_FORMAT_VERSION})",
                envelope.format_version
            )));
        }
        serde_json::from_value(envelope.model)
            .map_err(|e| Error::ModelFormat(format!("malformed model state: {e}")))
    }
}

/// Confusion counts and derived rates with `unwanted` as the positive class.
/// Rates with an empty denominator are reported as undefined (`None`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub tp: u32,
    pub fp: u32,
    pub tn: u32,
    pub fn_: u32,
    pub accuracy: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

pub fn confusion_from_predictions(
    predicted: &[InteractionLabel],
    truth: &[InteractionLabel],
) -> Result<ClassMetrics> {
    if predicted.is_empty() || predicted.len() != truth.len() {
        return Err(Error::SchemaMismatch(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0u32, 0u32, 0u32, 0u32);
    for (&p, &t) in predicted.iter().zip(truth) {
        match (t, p) {
            (InteractionLabel::Unwanted, InteractionLabel::Unwanted) => tp += 1,
            (InteractionLabel::Unwanted, InteractionLabel::Wanted) => fn_ += 1,
            (InteractionLabel::Wanted, InteractionLabel::Unwanted) => fp += 1,
            (InteractionLabel::Wanted, InteractionLabel::Wanted) => tn += 1,
        }
    }
    let rate = |num: u32, den: u32| (den > 0).then(|| f64::from(num) / f64::from(den));
    Ok(ClassMetrics {
        tp,
        fp,
        tn,
        fn_,
        accuracy: f64::from(tp + tn) / predicted.len() as f64,
        sensitivity: rate(tp, tp + fn_),
        specificity: rate(tn, tn + fp),
    })
}

pub fn confusion_metrics(
    model: &TrainedModel,
    x: &[Vec<f64>],
    y: &[InteractionLabel],
) -> Result<ClassMetrics> {
    let predicted: Result<Vec<InteractionLabel>> =
        x.iter().map(|row| model.predict_label(row)).collect();
    confusion_from_predictions(&predicted?, y)
}

/// Area under the ROC curve via the Mann-Whitney rank statistic; ties count
/// one half. `unwanted` is the positive class.
pub fn roc_auc(scores: &[f64], labels: &[InteractionLabel]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::SchemaMismatch(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let positives: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == InteractionLabel::Unwanted)
        .map(|(&s, _)| s)
        .collect();
    let negatives: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == InteractionLabel::Wanted)
        .map(|(&s, _)| s)
        .collect();
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::DegenerateData(
            "roc_auc needs both classes".to_string(),
        ));
    }
    let mut total = 0.0;
    for &p in &positives {
        for &n in &negatives {
            total += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    Ok(total / (positives.len() as f64 * negatives.len() as f64))
}
