//! Command implementations behind the `fi-linkpred` binary: ingestion,
//! scoring, training, evaluation, persistence, and candidate
//! classification, wired into reproducible runs.
//!
//! Exit codes: 0 success, 2 input/parse error, 3 degenerate data,
//! 4 model load/version error.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use fi_linkpred_core::dataset::{build_dataset, stratified_kfold, stratified_split};
use fi_linkpred_core::error::Error as CoreError;
use fi_linkpred_core::evaluation::{
    classify_candidates, default_grid, render_markdown, run_pipeline, tune, PipelineConfig,
    TuningResult,
};
use fi_linkpred_core::io::{parse_candidates, sha256_hex};
use fi_linkpred_core::learners::MODEL_FORMAT_VERSION;
use fi_linkpred_core::seeds::sub_seed;
use fi_linkpred_core::similarity::{score_table, METRICS};
use fi_linkpred_core::{FeatureGraph, MetricParams, ModelFamily, ModelSpec, TrainedModel};

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV_VAR: &str = "FI_LINKPRED_SEED";

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn core_exit_code(err: &CoreError) -> i32 {
    match err {
        CoreError::DegenerateData(_) => 3,
        CoreError::SchemaMismatch(_) | CoreError::ModelFormat(_) => 4,
        CoreError::Stage { source, .. } | CoreError::Holdout { source, .. } => {
            core_exit_code(source)
        }
        _ => 2,
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        CliError {
            code: core_exit_code(&err),
            message: err.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Markdown,
}

/// Validated run configuration; serialized verbatim into every artifact's
/// provenance header.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub features: PathBuf,
    pub interactions: PathBuf,
    pub out: PathBuf,
    pub master_seed: u64,
    pub params: MetricParams,
    pub train_fraction: f64,
    pub k_folds: usize,
    pub families: Vec<ModelFamily>,
    pub formats: Vec<ReportFormat>,
    pub model: Option<PathBuf>,
    pub candidates: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.train_fraction.is_nan() || self.train_fraction <= 0.0 || self.train_fraction >= 1.0
        {
            return Err(input_error(format!(
                "--train-fraction must be in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.k_folds < 2 {
            return Err(input_error(format!(
                "--folds must be at least 2, got {}",
                self.k_folds
            )));
        }
        if self.families.is_empty() {
            return Err(input_error("--families resolved to an empty list"));
        }
        if self.formats.is_empty() {
            return Err(input_error("--format resolved to an empty list"));
        }
        Ok(())
    }

    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        sha256_hex(canonical.as_bytes())
    }

    fn provenance_comments(&self) -> Vec<String> {
        vec![
            format!("config_digest: {}", self.digest()),
            format!("master_seed: {}", self.master_seed),
        ]
    }
}

/// Seed precedence: explicit flag, then FI_LINKPRED_SEED, then the default.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text
            .parse::<u64>()
            .map_err(|_| input_error(format!("{SEED_ENV_VAR} is not a 64-bit unsigned integer: `{text}`"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

pub fn parse_families(raw: &[String]) -> Result<Vec<ModelFamily>, CliError> {
    if raw.is_empty() {
        return Ok(fi_linkpred_core::learners::FAMILIES.to_vec());
    }
    let mut out = Vec::new();
    for name in raw {
        let family = ModelFamily::parse(name).ok_or_else(|| {
            input_error(format!(
                "unknown model family `{name}` (expected one of: {})",
                fi_linkpred_core::learners::FAMILIES
                    .map(|f| f.name())
                    .join(", ")
            ))
        })?;
        if !out.contains(&family) {
            out.push(family);
        }
    }
    Ok(out)
}

pub fn parse_formats(raw: &[String]) -> Result<Vec<ReportFormat>, CliError> {
    if raw.is_empty() {
        return Ok(vec![ReportFormat::Json, ReportFormat::Markdown]);
    }
    let mut out = Vec::new();
    for name in raw {
        let format = match name.as_str() {
            "json" => ReportFormat::Json,
            "markdown" | "md" => ReportFormat::Markdown,
            other => {
                return Err(input_error(format!(
                    "unknown report format `{other}` (expected json or markdown)"
                )))
            }
        };
        if !out.contains(&format) {
            out.push(format);
        }
    }
    Ok(out)
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read `{}`: {e}", path.display())))
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let file_name = path
        .file_name()
        .ok_or_else(|| input_error(format!("`{}` has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, contents)
        .and_then(|()| fs::rename(&tmp, path))
        .map_err(|e| input_error(format!("cannot write `{}`: {e}", path.display())))
}

fn load_graph(config: &RunConfig) -> Result<FeatureGraph, CliError> {
    let features = read_input(&config.features)?;
    let interactions = read_input(&config.interactions)?;
    FeatureGraph::parse(&features, &interactions).map_err(|e| CliError {
        code: 2,
        message: format!(
            "{} / {}: {e}",
            config.features.display(),
            config.interactions.display()
        ),
    })
}

fn ensure_out_dir(config: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&config.out)
        .map_err(|e| input_error(format!("cannot create `{}`: {e}", config.out.display())))
}

/// `scores`: writes the similarity table CSV for every feature pair.
pub fn cmd_scores(config: &RunConfig) -> Result<PathBuf, CliError> {
    config.validate()?;
    let g = load_graph(config)?;
    let table = score_table(&g, &config.params)?;
    let labels: Vec<_> = g.all_pairs().iter().map(|p| p.2).collect();
    let mut comments = config.provenance_comments();
    comments.push(format!("graph_digest: {}", g.digest()));
    let csv = table.to_csv(&labels, &comments)?;
    ensure_out_dir(config)?;
    let path = config.out.join("scores.csv");
    write_atomic(&path, &csv)?;
    Ok(path)
}

/// Persisted model envelope: the trained model plus the provenance needed
/// to warn when predictions run under a different setup.
#[derive(Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub metric_params: MetricParams,
    pub graph_digest: String,
    pub model: TrainedModel,
}

#[derive(Serialize)]
struct TrainArtifact<'a> {
    config_digest: String,
    master_seed: u64,
    graph_digest: String,
    tuning: &'a [TuningResult],
}

/// `train`: tunes each family on the stratified training partition, refits
/// on the full partition, and persists one model file per family plus the
/// tuning tables.
pub fn cmd_train(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    config.validate()?;
    let g = load_graph(config)?;
    let seed = config.master_seed;
    let table = score_table(&g, &config.params)?;
    let ds = build_dataset(&table, &g)?;
    let split = stratified_split(&ds, config.train_fraction, sub_seed(seed, "split", 0))?;
    let rows = ds.feature_rows();
    let labels = ds.labels();
    let train_x: Vec<Vec<f64>> = split.train_indices.iter().map(|&i| rows[i].clone()).collect();
    let train_y: Vec<_> = split.train_indices.iter().map(|&i| labels[i]).collect();
    let folds = stratified_kfold(&train_y, config.k_folds, sub_seed(seed, "folds", 0))?;

    ensure_out_dir(config)?;
    let schema = METRICS.to_vec();
    let mut written = Vec::new();
    let mut tunings = Vec::new();
    for &family in &config.families {
        let tuning = tune(
            family,
            default_grid(family, schema.len()),
            &schema,
            &train_x,
            &train_y,
            &folds,
            sub_seed(seed, &format!("tune:{family}"), 0),
        )?;
        let final_spec = ModelSpec::new(
            tuning.best_spec.params.clone(),
            sub_seed(seed, &format!("final:{family}"), 0),
        )?;
        let model = TrainedModel::train(&final_spec, &schema, &train_x, &train_y)?;
        let file = ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            metric_params: config.params.clone(),
            graph_digest: g.digest(),
            model,
        };
        let path = config.out.join(format!("model_{}.json", family.name()));
        let body = serde_json::to_string_pretty(&file).map_err(CoreError::from)?;
        write_atomic(&path, &body)?;
        written.push(path);
        tunings.push(tuning);
    }
    let artifact = TrainArtifact {
        config_digest: config.digest(),
        master_seed: seed,
        graph_digest: g.digest(),
        tuning: &tunings,
    };
    let tuning_path = config.out.join("tuning.json");
    let body = serde_json::to_string_pretty(&artifact).map_err(CoreError::from)?;
    write_atomic(&tuning_path, &body)?;
    written.push(tuning_path);
    Ok(written)
}

/// `evaluate`: runs the full pipeline and writes the report in the
/// requested formats.
pub fn cmd_evaluate(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    config.validate()?;
    let g = load_graph(config)?;
    let pipeline = PipelineConfig {
        train_fraction: config.train_fraction,
        k_folds: config.k_folds,
        families: config.families.clone(),
        loo_metrics: METRICS.to_vec(),
    };
    let mut report = run_pipeline(&g, &config.params, config.master_seed, &pipeline)?;
    report.config_digest = Some(config.digest());
    report.cli_config = Some(serde_json::to_value(config).map_err(CoreError::from)?);

    ensure_out_dir(config)?;
    let mut written = Vec::new();
    for format in &config.formats {
        match format {
            ReportFormat::Json => {
                let path = config.out.join("report.json");
                write_atomic(&path, &report.to_json()?)?;
                written.push(path);
            }
            ReportFormat::Markdown => {
                let path = config.out.join("report.md");
                write_atomic(&path, &render_markdown(&report))?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

pub fn load_model_file(path: &Path) -> Result<ModelFile, CliError> {
    let text = read_input(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError {
            code: 4,
            message: format!("`{}` is not a model file: {e}", path.display()),
        })?;
    let version = value.get("format_version").and_then(|v| v.as_u64());
    if version != Some(u64::from(MODEL_FORMAT_VERSION)) {
        return Err(CliError {
            code: 4,
            message: format!(
                "`{}` has unsupported format_version {:?} (expected {MODEL_FORMAT_VERSION})",
                path.display(),
                version
            ),
        });
    }
    serde_json::from_value(value).map_err(|e| CliError {
        code: 4,
        message: format!("`{}` is malformed: {e}", path.display()),
    })
}

/// `predict`: classifies candidate pairs with a persisted model.
pub fn cmd_predict(config: &RunConfig) -> Result<PathBuf, CliError> {
    config.validate()?;
    let model_path = config
        .model
        .as_ref()
        .ok_or_else(|| input_error("--model is required for predict"))?;
    let candidates_path = config
        .candidates
        .as_ref()
        .ok_or_else(|| input_error("--candidates is required for predict"))?;
    let g = load_graph(config)?;
    let file = load_model_file(model_path)?;
    let candidates = parse_candidates(&read_input(candidates_path)?)?;

    let mut comments = config.provenance_comments();
    comments.push(format!("model_family: {}", file.model.spec.family));
    if file.metric_params != config.params {
        comments.push(
            "warning: model was trained under different metric parameters".to_string(),
        );
    }
    if file.graph_digest != g.digest() {
        comments.push("warning: model was trained on a different graph".to_string());
    }

    let predictions = classify_candidates(&g, &file.model, &config.params, &candidates)?;
    let mut csv = String::new();
    for comment in &comments {
        csv.push_str("# ");
        csv.push_str(comment);
        csv.push('\n');
    }
    csv.push_str("feature_a,feature_b,label,score\n");
    for p in &predictions {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            p.feature_a,
            p.feature_b,
            p.label,
            fi_linkpred_core::io::format_significant(p.score, 12)
        ));
    }
    ensure_out_dir(config)?;
    let path = config.out.join("predictions.csv");
    write_atomic(&path, &csv)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_resolution_order() {
        // flag wins regardless of environment
        assert_eq!(resolve_seed(Some(7)).unwrap(), 7);
    }

    #[test]
    fn family_parsing() {
        let all = parse_families(&[]).unwrap();
        assert_eq!(all.len(), 6);
        let one = parse_families(&["naive_bayes".to_string()]).unwrap();
        assert_eq!(one, vec![ModelFamily::NaiveBayes]);
        assert!(parse_families(&["bogus".to_string()]).is_err());
    }

    #[test]
    fn format_parsing() {
        assert_eq!(
            parse_formats(&["json".to_string()]).unwrap(),
            vec![ReportFormat::Json]
        );
        assert!(parse_formats(&["yaml".to_string()]).is_err());
    }

    #[test]
    fn degenerate_data_maps_to_exit_3() {
        let err = CliError::from(CoreError::DegenerateData("x".to_string()));
        assert_eq!(err.code, 3);
        let wrapped = CliError::from(CoreError::stage(
            "build_dataset",
            CoreError::DegenerateData("single-class dataset".to_string()),
        ));
        assert_eq!(wrapped.code, 3);
        let model = CliError::from(CoreError::ModelFormat("bad".to_string()));
        assert_eq!(model.code, 4);
    }
}
