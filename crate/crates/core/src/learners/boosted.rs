//! Adaptively boosted Gini trees. Stands in for C5.0's boosting mode: each
//! trial refits a full tree on reweighted rows, misclassified rows gaining
//! weight, and prediction is the stage-weighted vote.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::InteractionLabel;
use crate::learners::tree::{Item, Tree};
use crate::seeds::sub_seed;

const MIN_ERROR: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoostedEnsemble {
    /// (tree, stage weight alpha) pairs.
    pub stages: Vec<(Tree, f64)>,
    /// Weighted Gini decrease per column accumulated over all stages.
    pub importance: Vec<f64>,
    pub n_columns: usize,
}

impl BoostedEnsemble {
    pub fn fit(
        x: &[Vec<f64>],
        y: &[InteractionLabel],
        trials: usize,
        seed: u64,
    ) -> Result<BoostedEnsemble> {
        let n = x.len();
        let n_columns = x.first().map_or(0, Vec::len);
        let mut weights = vec![1.0 / n as f64; n];
        let mut stages = Vec::new();
        let mut importance = vec![0.0; n_columns];

        for trial in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, "trial", trial as u64));
            let items: Vec<Item> = weights.iter().copied().enumerate().collect();
            let tree = Tree::fit(x, y, items, n_columns, &mut rng, &mut importance);

            let mistakes: Vec<bool> = x
                .iter()
                .zip(y)
                .map(|(row, &label)| tree.predict(row) != label)
                .collect();
            let error: f64 = weights
                .iter()
                .zip(&mistakes)
                .filter(|(_, &m)| m)
                .map(|(w, _)| w)
                .sum();

            if error >= 0.5 {
                // the weak learner is no better than chance on the
                // reweighted rows; keep at least one stage and stop
                if stages.is_empty() {
                    stages.push((tree, 1.0));
                }
                break;
            }
            let bounded = error.max(MIN_ERROR);
            let alpha = ((1.0 - bounded) / bounded).ln();
            stages.push((tree, alpha));
            if error < MIN_ERROR {
                break;
            }
            let mut total = 0.0;
            for (w, &wrong) in weights.iter_mut().zip(&mistakes) {
                if wrong {
                    *w *= alpha.exp();
                }
                total += *w;
            }
            for w in &mut weights {
                *w /= total;
            }
        }
        Ok(BoostedEnsemble {
            stages,
            importance,
            n_columns,
        })
    }

    /// Stage-weighted fraction of the vote going to `unwanted`.
    pub fn score(&self, row: &[f64]) -> f64 {
        let total: f64 = self.stages.iter().map(|(_, a)| a).sum();
        if total == 0.0 {
            return 0.5;
        }
        let unwanted: f64 = self
            .stages
            .iter()
            .filter(|(tree, _)| tree.predict(row) == InteractionLabel::Unwanted)
            .map(|(_, a)| a)
            .sum();
        unwanted / total
    }
}
