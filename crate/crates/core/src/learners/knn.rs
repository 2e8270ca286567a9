//! k-nearest neighbors over stored (standardized) training rows with
//! Euclidean distance. Ties at the k-th distance enlarge the voting set,
//! keeping predictions deterministic.

use serde::{Deserialize, Serialize};

use crate::graph::InteractionLabel;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnnState {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<InteractionLabel>,
    pub k: usize,
}

impl KnnState {
    pub fn fit(x: &[Vec<f64>], y: &[InteractionLabel], k: usize) -> KnnState {
        KnnState {
            rows: x.to_vec(),
            labels: y.to_vec(),
            k,
        }
    }

    /// Fraction of `unwanted` votes among the k nearest rows, including
    /// every row tied with the k-th distance.
    pub fn score(&self, row: &[f64]) -> f64 {
        let mut by_distance: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let d2: f64 = r.iter().zip(row).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let k = self.k.min(by_distance.len());
        let cutoff = by_distance[k - 1].0;
        let voters = by_distance.iter().take_while(|(d, _)| *d <= cutoff);
        let mut total = 0usize;
        let mut unwanted = 0usize;
        for (_, i) in voters {
            total += 1;
            if self.labels[*i] == InteractionLabel::Unwanted {
                unwanted += 1;
            }
        }
        unwanted as f64 / total as f64
    }
}
