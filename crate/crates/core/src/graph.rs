//! Feature-interaction graph of a software product line.
//!
//! Nodes are the product line's optional features; edges are documented
//! pairwise interactions labeled wanted or unwanted. Mandatory features
//! (commonalities) are parsed and carried for provenance but are not nodes
//! of the interaction graph. Node order is lexicographic everywhere so
//! matrices, pair enumerations, and serializations are reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::sha256_hex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionLabel {
    Unwanted,
    Wanted,
}

impl InteractionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            InteractionLabel::Unwanted => "unwanted",
            InteractionLabel::Wanted => "wanted",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "unwanted" => Some(InteractionLabel::Unwanted),
            "wanted" => Some(InteractionLabel::Wanted),
            _ => None,
        }
    }
}

impl fmt::Display for InteractionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Edge filter for neighbor/degree/adjacency queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelFilter {
    All,
    Only(InteractionLabel),
}

impl LabelFilter {
    fn admits(self, label: InteractionLabel) -> bool {
        match self {
            LabelFilter::All => true,
            LabelFilter::Only(l) => l == label,
        }
    }
}

/// Symmetric 0/1 adjacency matrix with a name-to-row index.
#[derive(Debug, Clone)]
pub struct AdjacencyMatrix {
    matrix: DMatrix<f64>,
    names: Vec<String>,
    node_index: BTreeMap<String, usize>,
}

impl AdjacencyMatrix {
    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.node_index.get(name).copied()
    }

    pub fn dense(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn degree(&self, i: usize) -> usize {
        self.matrix.row(i).iter().filter(|&&v| v != 0.0).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureGraph {
    /// Optional features (graph nodes), sorted lexicographically.
    nodes: Vec<String>,
    node_index: BTreeMap<String, usize>,
    /// Mandatory features (commonalities), sorted; not graph nodes.
    mandatory: Vec<String>,
    /// Edge map keyed by node-index pairs with i < j.
    edges: BTreeMap<(usize, usize), InteractionLabel>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Strips a trailing comment and whitespace; returns None for blank lines.
fn record_of(line: &str) -> Option<&str> {
    let body = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let body = body.trim();
    if body.is_empty() {
        None
    } else {
        Some(body)
    }
}

impl FeatureGraph {
    /// Parses the features and interactions documents.
    ///
    /// Features document: one `name[,mandatory]` record per line. Interactions
    /// document: one `featureA,featureB,label` record per line with label
    /// `unwanted` or `wanted`; pairs are unordered. `#` starts a comment in
    /// both documents.
    pub fn parse(features_doc: &str, interactions_doc: &str) -> Result<Self> {
        let mut optional = Vec::new();
        let mut mandatory = Vec::new();
        let mut seen: BTreeSet<String> = BTreeSet::new();

        for (lineno, line) in features_doc.lines().enumerate() {
            let lineno = lineno + 1;
            let Some(record) = record_of(line) else {
                continue;
            };
            let mut parts = record.split(',').map(str::trim);
            let name = parts.next().unwrap_or("");
            if !valid_name(name) {
                return Err(Error::parse(
                    "features",
                    lineno,
                    format!("invalid feature name `{name}` (expected [A-Za-z0-9_]+)"),
                ));
            }
            let is_mandatory = match parts.next() {
                None => false,
                Some("mandatory") => true,
                Some(other) => {
                    return Err(Error::parse(
                        "features",
                        lineno,
                        format!("unexpected field `{other}` (only `mandatory` is allowed)"),
                    ));
                }
            };
            if parts.next().is_some() {
                return Err(Error::parse("features", lineno, "too many fields"));
            }
            if !seen.insert(name.to_string()) {
                return Err(Error::parse(
                    "features",
                    lineno,
                    format!("duplicate feature name `{name}`"),
                ));
            }
            if is_mandatory {
                mandatory.push(name.to_string());
            } else {
                optional.push(name.to_string());
            }
        }

        optional.sort();
        mandatory.sort();
        let node_index: BTreeMap<String, usize> = optional
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let mandatory_set: BTreeSet<&str> = mandatory.iter().map(String::as_str).collect();

        let mut edges = BTreeMap::new();
        for (lineno, line) in interactions_doc.lines().enumerate() {
            let lineno = lineno + 1;
            let Some(record) = record_of(line) else {
                continue;
            };
            let fields: Vec<&str> = record.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    "interactions",
                    lineno,
                    format!("expected `featureA,featureB,label`, got `{record}`"),
                ));
            }
            let (a, b, label_str) = (fields[0], fields[1], fields[2]);
            let label = InteractionLabel::parse(label_str).ok_or_else(|| {
                Error::parse(
                    "interactions",
                    lineno,
                    format!("invalid label `{label_str}` (expected unwanted or wanted)"),
                )
            })?;
            for name in [a, b] {
                if !node_index.contains_key(name) {
                    let detail = if mandatory_set.contains(name) {
                        format!("feature `{name}` is mandatory and cannot take part in an interaction")
                    } else {
                        format!("unknown feature `{name}`")
                    };
                    return Err(Error::parse("interactions", lineno, detail));
                }
            }
            if a == b {
                return Err(Error::parse(
                    "interactions",
                    lineno,
                    format!("self-loop on feature `{a}`"),
                ));
            }
            let (i, j) = (node_index[a], node_index[b]);
            let key = (i.min(j), i.max(j));
            if edges.insert(key, label).is_some() {
                return Err(Error::parse(
                    "interactions",
                    lineno,
                    format!("duplicate edge `{a},{b}`"),
                ));
            }
        }

        Ok(FeatureGraph {
            nodes: optional,
            node_index,
            mandatory,
            edges,
        })
    }

    /// Builds a graph directly; used by tests and candidate construction.
    pub fn from_parts(
        features: &[&str],
        mandatory: &[&str],
        edges: &[(&str, &str, InteractionLabel)],
    ) -> Result<Self> {
        let features_doc: String = features
            .iter()
            .map(|f| format!("{f}\n"))
            .chain(mandatory.iter().map(|f| format!("{f},mandatory\n")))
            .collect();
        let interactions_doc: String = edges
            .iter()
            .map(|(a, b, l)| format!("{a},{b},{l}\n"))
            .collect();
        Self::parse(&features_doc, &interactions_doc)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn mandatory(&self) -> &[String] {
        &self.mandatory
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.node_index.contains_key(name)
    }

    fn index_of(&self, name: &str) -> Result<usize> {
        self.node_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }

    /// Edges in canonical (min, max) name order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, InteractionLabel)> {
        self.edges
            .iter()
            .map(|(&(i, j), &l)| (self.nodes[i].as_str(), self.nodes[j].as_str(), l))
    }

    pub fn edge_count(&self, filter: LabelFilter) -> usize {
        self.edges.values().filter(|&&l| filter.admits(l)).count()
    }

    pub fn edge_label(&self, a: &str, b: &str) -> Result<Option<InteractionLabel>> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        Ok(self.edges.get(&(i.min(j), i.max(j))).copied())
    }

    /// Neighbor ids of node `i` under `filter`, ascending.
    pub(crate) fn neighbor_ids(&self, i: usize, filter: LabelFilter) -> Vec<usize> {
        let mut out = Vec::new();
        for (&(a, b), &label) in &self.edges {
            if !filter.admits(label) {
                continue;
            }
            if a == i {
                out.push(b);
            } else if b == i {
                out.push(a);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn neighbors(&self, feature: &str, filter: LabelFilter) -> Result<BTreeSet<String>> {
        let i = self.index_of(feature)?;
        Ok(self
            .neighbor_ids(i, filter)
            .into_iter()
            .map(|j| self.nodes[j].clone())
            .collect())
    }

    pub fn degree(&self, feature: &str, filter: LabelFilter) -> Result<usize> {
        let i = self.index_of(feature)?;
        Ok(self.neighbor_ids(i, filter).len())
    }

    /// Symmetric 0/1 matrix in lexicographic node order.
    pub fn adjacency(&self, filter: LabelFilter) -> Result<AdjacencyMatrix> {
        let n = self.nodes.len();
        if n == 0 {
            return Err(Error::DegenerateData("graph has no features".to_string()));
        }
        let mut matrix = DMatrix::zeros(n, n);
        for (&(i, j), &label) in &self.edges {
            if filter.admits(label) {
                matrix[(i, j)] = 1.0;
                matrix[(j, i)] = 1.0;
            }
        }
        Ok(AdjacencyMatrix {
            matrix,
            names: self.nodes.clone(),
            node_index: self.node_index.clone(),
        })
    }

    /// Every unordered node pair in lexicographic order, labeled with its
    /// edge label or `wanted` when the pair is not an edge (absence of a
    /// documented unwanted interaction is a normal combination).
    pub fn all_pairs(&self) -> Vec<(String, String, InteractionLabel)> {
        let n = self.nodes.len();
        let mut out = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                let label = self
                    .edges
                    .get(&(i, j))
                    .copied()
                    .unwrap_or(InteractionLabel::Wanted);
                out.push((self.nodes[i].clone(), self.nodes[j].clone(), label));
            }
        }
        out
    }

    pub fn pair_label(&self, a: &str, b: &str) -> Result<InteractionLabel> {
        Ok(self
            .edge_label(a, b)?
            .unwrap_or(InteractionLabel::Wanted))
    }

    /// Same nodes, unwanted edges only. This is the graph similarity
    /// metrics are computed on.
    pub fn unwanted_subgraph(&self) -> FeatureGraph {
        let edges = self
            .edges
            .iter()
            .filter(|(_, &l)| l == InteractionLabel::Unwanted)
            .map(|(&k, &l)| (k, l))
            .collect();
        FeatureGraph {
            nodes: self.nodes.clone(),
            node_index: self.node_index.clone(),
            mandatory: self.mandatory.clone(),
            edges,
        }
    }

    /// Copy of the graph without the given edge.
    pub fn without_edge(&self, a: &str, b: &str) -> Result<FeatureGraph> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        let key = (i.min(j), i.max(j));
        if !self.edges.contains_key(&key) {
            return Err(Error::InvalidParameter(format!(
                "no edge between `{a}` and `{b}`"
            )));
        }
        let mut edges = self.edges.clone();
        edges.remove(&key);
        Ok(FeatureGraph {
            nodes: self.nodes.clone(),
            node_index: self.node_index.clone(),
            mandatory: self.mandatory.clone(),
            edges,
        })
    }

    /// Canonical features document: sorted, mandatory flags preserved.
    pub fn to_features_doc(&self) -> String {
        let mut names: Vec<(&str, bool)> = self
            .nodes
            .iter()
            .map(|n| (n.as_str(), false))
            .chain(self.mandatory.iter().map(|n| (n.as_str(), true)))
            .collect();
        names.sort();
        let mut doc = String::new();
        for (name, mandatory) in names {
            doc.push_str(name);
            if mandatory {
                doc.push_str(",mandatory");
            }
            doc.push('\n');
        }
        doc
    }

    /// Canonical interactions document: edges sorted by (min, max) name.
    pub fn to_interactions_doc(&self) -> String {
        let mut doc = String::new();
        for (a, b, label) in self.edges() {
            doc.push_str(&format!("{a},{b},{label}\n"));
        }
        doc
    }

    /// Digest of the canonical serialization; used for provenance.
    pub fn digest(&self) -> String {
        let mut payload = self.to_features_doc();
        payload.push('\x1e');
        payload.push_str(&self.to_interactions_doc());
        sha256_hex(payload.as_bytes())
    }
}
