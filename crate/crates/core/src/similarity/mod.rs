//! Link-prediction similarity metrics.
//!
//! Five local metrics (common neighbors, Jaccard, cosine, Adamic/Adar,
//! resource allocation), two global metrics (Katz, random walk with
//! restart), and the quasi-local local-path index. All metrics are
//! computed on the unwanted-interaction subgraph; see [`score_table`].

mod global;
mod local;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FeatureGraph, InteractionLabel, LabelFilter};
use crate::io::format_significant;

pub use global::{
    katz_matrix, katz_series_matrix, local_path_matrix, rwr, spectral_radius, RwrSolution,
};
pub use local::{adamic_adar, common_neighbors, cosine, jaccard, resource_allocation};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    CommonNeighbors,
    Jaccard,
    Cosine,
    AdamicAdar,
    ResourceAllocation,
    Katz,
    Rwr,
    LocalPath,
}

/// Canonical metric order; matches the CSV column order.
pub const METRICS: [MetricId; 8] = [
    MetricId::CommonNeighbors,
    MetricId::Jaccard,
    MetricId::Cosine,
    MetricId::AdamicAdar,
    MetricId::ResourceAllocation,
    MetricId::Katz,
    MetricId::Rwr,
    MetricId::LocalPath,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricCategory {
    Local,
    Global,
    QuasiLocal,
}

impl MetricId {
    pub fn name(self) -> &'static str {
        match self {
            MetricId::CommonNeighbors => "common_neighbors",
            MetricId::Jaccard => "jaccard",
            MetricId::Cosine => "cosine",
            MetricId::AdamicAdar => "adamic_adar",
            MetricId::ResourceAllocation => "resource_allocation",
            MetricId::Katz => "katz",
            MetricId::Rwr => "rwr",
            MetricId::LocalPath => "local_path",
        }
    }

    /// Short CSV column name.
    pub fn csv_column(self) -> &'static str {
        match self {
            MetricId::CommonNeighbors => "cn",
            MetricId::Jaccard => "jaccard",
            MetricId::Cosine => "cosine",
            MetricId::AdamicAdar => "aa",
            MetricId::ResourceAllocation => "ra",
            MetricId::Katz => "katz",
            MetricId::Rwr => "rwr",
            MetricId::LocalPath => "lp",
        }
    }

    pub fn category(self) -> MetricCategory {
        match self {
            MetricId::Katz | MetricId::Rwr => MetricCategory::Global,
            MetricId::LocalPath => MetricCategory::QuasiLocal,
            _ => MetricCategory::Local,
        }
    }

    pub fn index(self) -> usize {
        METRICS.iter().position(|&m| m == self).unwrap()
    }

    pub fn parse(s: &str) -> Option<Self> {
        METRICS
            .into_iter()
            .find(|m| m.name() == s || m.csv_column() == s)
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of the global and quasi-local metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    /// Katz attenuation; must also stay below 1/rho(A), checked per graph.
    pub katz_beta: f64,
    /// RWR restart probability, in (0, 1).
    pub rwr_restart: f64,
    /// Weight of the cubic term in the local-path index, >= 0.
    pub lp_epsilon: f64,
    /// L1 stopping threshold of the RWR power iteration, > 0.
    pub rwr_tolerance: f64,
    /// Truncation length of the Katz series oracle, >= 1.
    pub katz_series_len: usize,
    /// RWR iteration cap.
    pub rwr_max_iterations: usize,
}

impl MetricParams {
    pub fn new(
        katz_beta: f64,
        rwr_restart: f64,
        lp_epsilon: f64,
        rwr_tolerance: f64,
        katz_series_len: usize,
    ) -> Result<Self> {
        if katz_beta.is_nan() || katz_beta <= 0.0 || katz_beta >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "katz_beta must be in (0, 1), got {katz_beta}"
            )));
        }
        if rwr_restart.is_nan() || rwr_restart <= 0.0 || rwr_restart >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "rwr_restart must be in (0, 1), got {rwr_restart}"
            )));
        }
        if lp_epsilon.is_nan() || lp_epsilon < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lp_epsilon must be >= 0, got {lp_epsilon}"
            )));
        }
        if rwr_tolerance.is_nan() || rwr_tolerance <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "rwr_tolerance must be > 0, got {rwr_tolerance}"
            )));
        }
        if katz_series_len == 0 {
            return Err(Error::InvalidParameter(
                "katz_series_len must be >= 1".to_string(),
            ));
        }
        Ok(MetricParams {
            katz_beta,
            rwr_restart,
            lp_epsilon,
            rwr_tolerance,
            katz_series_len,
            rwr_max_iterations: 100_000,
        })
    }
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams::new(0.05, 0.15, 0.001, 1e-10, 50).unwrap()
    }
}

/// Per-pair scores for all eight metrics, in `all_pairs` order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimilarityTable {
    pairs: Vec<(String, String)>,
    scores: Vec<[f64; 8]>,
    params: MetricParams,
}

impl SimilarityTable {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn score(&self, row: usize, metric: MetricId) -> f64 {
        self.scores[row][metric.index()]
    }

    pub fn row(&self, row: usize) -> &[f64; 8] {
        &self.scores[row]
    }

    pub fn params(&self) -> &MetricParams {
        &self.params
    }

    /// CSV with the pinned header; scores printed with 12 significant
    /// digits. `labels` must align with the pair order; `comments` become
    /// leading `# ` lines.
    pub fn to_csv(&self, labels: &[InteractionLabel], comments: &[String]) -> Result<String> {
        if labels.len() != self.pairs.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} labels for {} pairs",
                labels.len(),
                self.pairs.len()
            )));
        }
        let mut out = String::new();
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(crate::io::SIMILARITY_CSV_HEADER);
        out.push('\n');
        for (i, (a, b)) in self.pairs.iter().enumerate() {
            out.push_str(a);
            out.push(',');
            out.push_str(b);
            for v in self.scores[i] {
                out.push(',');
                out.push_str(&format_significant(v, 12));
            }
            out.push(',');
            out.push_str(labels[i].as_str());
            out.push('\n');
        }
        Ok(out)
    }
}

/// Computes all eight metrics for every unordered node pair of `g`.
///
/// Scores are computed on the unwanted-interaction subgraph; existing edges
/// are scored on the observed graph as-is (masking happens only in the
/// leave-one-out experiment).
pub fn score_table(g: &FeatureGraph, params: &MetricParams) -> Result<SimilarityTable> {
    let scored = g.unwanted_subgraph();
    let pairs = g.all_pairs();
    if pairs.is_empty() {
        return Ok(SimilarityTable {
            pairs: Vec::new(),
            scores: Vec::new(),
            params: params.clone(),
        });
    }

    let adj = scored.adjacency(LabelFilter::All)?;
    let katz = katz_matrix(&adj, params)?;
    let walk = rwr(&adj, params)?;
    let lp = local_path_matrix(&adj, params);

    let mut rows = Vec::with_capacity(pairs.len());
    let mut keys = Vec::with_capacity(pairs.len());
    for (a, b, _) in &pairs {
        let i = adj.index_of(a).expect("pair endpoint is a node");
        let j = adj.index_of(b).expect("pair endpoint is a node");
        let row = [
            common_neighbors(&scored, a, b)?,
            jaccard(&scored, a, b)?,
            cosine(&scored, a, b)?,
            adamic_adar(&scored, a, b)?,
            resource_allocation(&scored, a, b)?,
            katz[(i, j)],
            walk.pair_scores[(i, j)],
            lp[(i, j)],
        ];
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite score for pair {a},{b}"
            )));
        }
        rows.push(row);
        keys.push((a.clone(), b.clone()));
    }
    Ok(SimilarityTable {
        pairs: keys,
        scores: rows,
        params: params.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn email_like() -> FeatureGraph {
        // 4-cycle plus a chord; enough structure for every metric.
        FeatureGraph::from_parts(
            &["a", "b", "c", "d"],
            &[],
            &[
                ("a", "b", InteractionLabel::Unwanted),
                ("b", "c", InteractionLabel::Unwanted),
                ("c", "d", InteractionLabel::Unwanted),
                ("a", "d", InteractionLabel::Unwanted),
                ("a", "c", InteractionLabel::Unwanted),
            ],
        )
        .unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(MetricParams::new(0.0, 0.15, 0.001, 1e-10, 50).is_err());
        assert!(MetricParams::new(0.05, 1.0, 0.001, 1e-10, 50).is_err());
        assert!(MetricParams::new(0.05, 0.15, -0.1, 1e-10, 50).is_err());
        assert!(MetricParams::new(0.05, 0.15, 0.001, 0.0, 50).is_err());
        assert!(MetricParams::new(0.05, 0.15, 0.001, 1e-10, 0).is_err());
    }

    #[test]
    fn table_covers_all_pairs() {
        let g = email_like();
        let table = score_table(&g, &MetricParams::default()).unwrap();
        assert_eq!(table.len(), 6);
        for row in 0..table.len() {
            for m in METRICS {
                assert!(table.score(row, m).is_finite());
                assert!(table.score(row, m) >= 0.0);
            }
        }
    }

    #[test]
    fn single_node_graph_gives_empty_table() {
        let g = FeatureGraph::from_parts(&["only"], &[], &[]).unwrap();
        let table = score_table(&g, &MetricParams::default()).unwrap();
        assert!(table.is_empty());
    }

    #[test]
    fn wanted_edges_do_not_contribute_to_scores() {
        let with_wanted = FeatureGraph::from_parts(
            &["a", "b", "c"],
            &[],
            &[
                ("a", "b", InteractionLabel::Unwanted),
                ("b", "c", InteractionLabel::Wanted),
            ],
        )
        .unwrap();
        let without = FeatureGraph::from_parts(
            &["a", "b", "c"],
            &[],
            &[("a", "b", InteractionLabel::Unwanted)],
        )
        .unwrap();
        let params = MetricParams::default();
        let t1 = score_table(&with_wanted, &params).unwrap();
        let t2 = score_table(&without, &params).unwrap();
        for row in 0..t1.len() {
            for m in METRICS {
                assert_eq!(t1.score(row, m), t2.score(row, m));
            }
        }
    }

    #[test]
    fn csv_has_pinned_header_and_label_column() {
        let g = email_like();
        let table = score_table(&g, &MetricParams::default()).unwrap();
        let labels: Vec<InteractionLabel> = g.all_pairs().iter().map(|p| p.2).collect();
        let csv = table.to_csv(&labels, &["seed: 42".to_string()]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "# seed: 42");
        assert_eq!(lines.next().unwrap(), crate::io::SIMILARITY_CSV_HEADER);
        assert_eq!(csv.lines().count(), 2 + table.len());
        assert!(csv.lines().last().unwrap().ends_with("wanted"));
    }

    #[test]
    fn metric_id_round_trip() {
        for m in METRICS {
            assert_eq!(MetricId::parse(m.name()), Some(m));
            assert_eq!(MetricId::parse(m.csv_column()), Some(m));
            assert_eq!(METRICS[m.index()], m);
        }
        assert_eq!(MetricId::parse("nope"), None);
    }
}
