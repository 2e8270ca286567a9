//! Random forest: bagged Gini trees with per-split column sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::InteractionLabel;
use crate::learners::tree::{Item, Tree};
use crate::seeds::sub_seed;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
    /// Total weighted Gini decrease per column, summed over all trees.
    pub importance: Vec<f64>,
    pub n_columns: usize,
}

impl Forest {
    /// Each tree draws a bootstrap sample and its own rng seeded from
    /// (model seed, tree index), so results do not depend on fit order.
    /// A single-tree forest fits the full sample instead of a bootstrap,
    /// degenerating to a plain decision tree.
    pub fn fit(
        x: &[Vec<f64>],
        y: &[InteractionLabel],
        mtry: usize,
        n_trees: usize,
        seed: u64,
    ) -> Result<Forest> {
        let n = x.len();
        let n_columns = x.first().map_or(0, Vec::len);
        let mut trees = Vec::with_capacity(n_trees);
        let mut importance = vec![0.0; n_columns];
        for t in 0..n_trees {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, "tree", t as u64));
            let items: Vec<Item> = if n_trees == 1 {
                (0..n).map(|i| (i, 1.0)).collect()
            } else {
                (0..n).map(|_| (rng.gen_range(0..n), 1.0)).collect()
            };
            trees.push(Tree::fit(x, y, items, mtry, &mut rng, &mut importance));
        }
        Ok(Forest {
            trees,
            importance,
            n_columns,
        })
    }

    /// Fraction of trees voting `unwanted`.
    pub fn score(&self, row: &[f64]) -> f64 {
        let votes = self
            .trees
            .iter()
            .filter(|t| t.predict(row) == InteractionLabel::Unwanted)
            .count();
        votes as f64 / self.trees.len() as f64
    }
}
