//! Human-readable Markdown rendering of an evaluation report.

use std::fmt::Write;

use crate::learners::ClassMetrics;
use crate::similarity::{MetricCategory, MetricId};

use super::pipeline::EvaluationReport;

fn fmt_rate(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.4}"),
        None => "undefined".to_string(),
    }
}

fn metrics_row(family: &str, m: &ClassMetrics) -> String {
    format!(
        "| {family} | {:.4} | {} | {} | {} | {} | {} | {} |\n",
        m.accuracy,
        fmt_rate(m.sensitivity),
        fmt_rate(m.specificity),
        m.tp,
        m.fp,
        m.tn,
        m.fn_
    )
}

fn category_tag(metric: MetricId) -> &'static str {
    match metric.category() {
        MetricCategory::Local => "local",
        MetricCategory::Global => "global",
        MetricCategory::QuasiLocal => "quasi_local",
    }
}

pub fn render_markdown(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let w = &mut out;

    let _ = writeln!(w, "# Feature-interaction evaluation report\n");
    let _ = writeln!(w, "- master seed: {}", report.master_seed);
    if let Some(digest) = &report.config_digest {
        let _ = writeln!(w, "- config digest: {digest}");
    }
    let _ = writeln!(w, "- graph digest: {}", report.graph.digest);
    let _ = writeln!(
        w,
        "- graph: {} features ({} mandatory carried separately), {} unwanted edges, {} pairs",
        report.graph.features,
        report.graph.mandatory_features,
        report.graph.unwanted_edges,
        report.graph.pairs
    );
    let _ = writeln!(
        w,
        "- metric parameters: katz_beta={}, rwr_restart={}, lp_epsilon={}, rwr_tolerance={}, katz_series_len={}",
        report.params.katz_beta,
        report.params.rwr_restart,
        report.params.lp_epsilon,
        report.params.rwr_tolerance,
        report.params.katz_series_len
    );
    let _ = writeln!(
        w,
        "- split: {} train / {} test rows (fraction {}), {}-fold cross-validation\n",
        report.split.train_indices.len(),
        report.split.test_indices.len(),
        report.split.train_fraction,
        report.fold_plan.k
    );

    let _ = writeln!(w, "## Cross-validated tuning\n");
    for outcome in &report.families {
        let _ = writeln!(w, "### {}\n", outcome.family);
        let _ = writeln!(w, "| grid point | mean CV accuracy |");
        let _ = writeln!(w, "|---|---|");
        for point in &outcome.tuning.grid {
            let acc = match point.cv_accuracy {
                Some(a) => format!("{a:.4}"),
                None => "infeasible".to_string(),
            };
            let _ = writeln!(w, "| {} | {acc} |", point.label);
        }
        let _ = writeln!(
            w,
            "\nselected: {} (CV accuracy {:.4})\n",
            outcome.tuning.best_spec.params.label(),
            outcome.tuning.best_cv_accuracy
        );
    }

    let _ = writeln!(w, "## Test-set performance\n");
    let _ = writeln!(
        w,
        "| family | accuracy | sensitivity | specificity | tp | fp | tn | fn |"
    );
    let _ = writeln!(w, "|---|---|---|---|---|---|---|---|");
    for outcome in &report.families {
        let _ = write!(w, "{}", metrics_row(outcome.family.name(), &outcome.test_metrics));
    }
    let _ = writeln!(w);

    let _ = writeln!(w, "## Variable importance\n");
    let _ = writeln!(w, "### dataset (auc_filter)\n");
    let _ = writeln!(w, "| metric | category | score |");
    let _ = writeln!(w, "|---|---|---|");
    for (metric, score) in &report.dataset_importance.ranked {
        let _ = writeln!(w, "| {metric} | {} | {score:.4} |", category_tag(*metric));
    }
    let _ = writeln!(w);
    for outcome in &report.families {
        let _ = writeln!(
            w,
            "### {} ({})\n",
            outcome.family,
            outcome.importance.method.name()
        );
        let _ = writeln!(w, "| metric | score |");
        let _ = writeln!(w, "|---|---|");
        for (metric, score) in &outcome.importance.ranked {
            let _ = writeln!(w, "| {metric} | {score:.4} |");
        }
        let _ = writeln!(w);
    }

    let _ = writeln!(w, "## Leave-one-out detection\n");
    let _ = write!(w, "| held-out edge |");
    for metric in &report.loo.metrics {
        let _ = write!(w, " {} rank | {} AUC |", metric.csv_column(), metric.csv_column());
    }
    let _ = writeln!(w);
    let _ = write!(w, "|---|");
    for _ in &report.loo.metrics {
        let _ = write!(w, "---|---|");
    }
    let _ = writeln!(w);
    for holdout in &report.loo.holdouts {
        let _ = write!(w, "| {},{} |", holdout.feature_a, holdout.feature_b);
        for hm in &holdout.metrics {
            let _ = write!(w, " {} | {:.3} |", hm.rank, hm.auc);
        }
        let _ = writeln!(w);
    }
    let _ = write!(w, "\ndetection counts (rank 1):");
    for (metric, count) in report.loo.metrics.iter().zip(&report.loo.detection_counts) {
        let _ = write!(w, " {}={count}", metric.csv_column());
    }
    let _ = writeln!(w, "\n");

    for note in &report.notes {
        let _ = writeln!(w, "> {note}");
    }
    out
}
