//! Weighted binary decision tree with Gini-impurity splits, shared by the
//! random forest and the boosted ensemble.
//!
//! Trees are grown to purity: a node becomes a leaf only when it is
//! single-class by weight or no split yields a positive impurity decrease.
//! Ties between candidate splits go to the lowest column index, then the
//! smallest threshold, so growth is deterministic.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::InteractionLabel;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        weight_unwanted: f64,
        weight_wanted: f64,
    },
    Split {
        column: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

/// A training row reference: dataset row index plus its weight in this tree
/// (bootstrap duplicates appear multiple times).
pub type Item = (usize, f64);

fn gini(w_unwanted: f64, w_wanted: f64) -> f64 {
    let total = w_unwanted + w_wanted;
    if total == 0.0 {
        return 0.0;
    }
    let pu = w_unwanted / total;
    let pw = w_wanted / total;
    1.0 - pu * pu - pw * pw
}

fn class_weights(items: &[Item], y: &[InteractionLabel]) -> (f64, f64) {
    let mut wu = 0.0;
    let mut ww = 0.0;
    for &(row, w) in items {
        match y[row] {
            InteractionLabel::Unwanted => wu += w,
            InteractionLabel::Wanted => ww += w,
        }
    }
    (wu, ww)
}

struct BestSplit {
    column: usize,
    threshold: f64,
    decrease: f64,
}

/// Samples `mtry` distinct columns (ascending) with a partial Fisher-Yates
/// shuffle; when `mtry >= n_columns` every column is a candidate and the
/// rng is left untouched.
fn sample_columns(n_columns: usize, mtry: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if mtry >= n_columns {
        return (0..n_columns).collect();
    }
    let mut pool: Vec<usize> = (0..n_columns).collect();
    for i in 0..mtry {
        let j = rng.gen_range(i..n_columns);
        pool.swap(i, j);
    }
    let mut chosen = pool[..mtry].to_vec();
    chosen.sort_unstable();
    chosen
}

fn find_best_split(
    x: &[Vec<f64>],
    y: &[InteractionLabel],
    items: &[Item],
    columns: &[usize],
) -> Option<BestSplit> {
    let (total_u, total_w) = class_weights(items, y);
    let total = total_u + total_w;
    let parent_impurity = total * gini(total_u, total_w);
    let mut best: Option<BestSplit> = None;

    for &column in columns {
        let mut ordered: Vec<(f64, f64, f64)> = items
            .iter()
            .map(|&(row, w)| {
                let (wu, ww) = match y[row] {
                    InteractionLabel::Unwanted => (w, 0.0),
                    InteractionLabel::Wanted => (0.0, w),
                };
                (x[row][column], wu, ww)
            })
            .collect();
        ordered.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left_u = 0.0;
        let mut left_w = 0.0;
        for i in 0..ordered.len() - 1 {
            left_u += ordered[i].1;
            left_w += ordered[i].2;
            if ordered[i].0 == ordered[i + 1].0 {
                continue;
            }
            let right_u = total_u - left_u;
            let right_w = total_w - left_w;
            let children = (left_u + left_w) * gini(left_u, left_w)
                + (right_u + right_w) * gini(right_u, right_w);
            let decrease = parent_impurity - children;
            let threshold = ordered[i].0 + (ordered[i + 1].0 - ordered[i].0) / 2.0;
            let better = match &best {
                None => decrease > 1e-12,
                Some(b) => decrease > b.decrease,
            };
            if better {
                best = Some(BestSplit {
                    column,
                    threshold,
                    decrease,
                });
            }
        }
    }
    best
}

impl Tree {
    /// Grows a tree on the weighted items. `importance` accumulates the
    /// weighted Gini decrease per column across all splits.
    pub fn fit(
        x: &[Vec<f64>],
        y: &[InteractionLabel],
        items: Vec<Item>,
        mtry: usize,
        rng: &mut ChaCha8Rng,
        importance: &mut [f64],
    ) -> Tree {
        let n_columns = x.first().map_or(0, Vec::len);
        let mut nodes = Vec::new();
        Self::grow(x, y, items, mtry, n_columns, rng, importance, &mut nodes);
        Tree { nodes }
    }

    #[allow(clippy::too_many_arguments)]
    fn grow(
        x: &[Vec<f64>],
        y: &[InteractionLabel],
        items: Vec<Item>,
        mtry: usize,
        n_columns: usize,
        rng: &mut ChaCha8Rng,
        importance: &mut [f64],
        nodes: &mut Vec<Node>,
    ) -> usize {
        let (wu, ww) = class_weights(&items, y);
        let make_leaf = |nodes: &mut Vec<Node>| {
            nodes.push(Node::Leaf {
                weight_unwanted: wu,
                weight_wanted: ww,
            });
            nodes.len() - 1
        };

        if wu == 0.0 || ww == 0.0 || n_columns == 0 {
            return make_leaf(nodes);
        }
        let columns = sample_columns(n_columns, mtry, rng);
        let Some(split) = find_best_split(x, y, &items, &columns) else {
            return make_leaf(nodes);
        };
        importance[split.column] += split.decrease;

        let (left_items, right_items): (Vec<Item>, Vec<Item>) = items
            .into_iter()
            .partition(|&(row, _)| x[row][split.column] <= split.threshold);
        debug_assert!(!left_items.is_empty() && !right_items.is_empty());

        let index = nodes.len();
        nodes.push(Node::Split {
            column: split.column,
            threshold: split.threshold,
            left: 0,
            right: 0,
        });
        let left = Self::grow(x, y, left_items, mtry, n_columns, rng, importance, nodes);
        let right = Self::grow(x, y, right_items, mtry, n_columns, rng, importance, nodes);
        if let Node::Split {
            left: l, right: r, ..
        } = &mut nodes[index]
        {
            *l = left;
            *r = right;
        }
        index
    }

    /// Weighted class fractions at the leaf the row falls into.
    pub fn leaf_fraction_unwanted(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf {
                    weight_unwanted,
                    weight_wanted,
                } => {
                    let total = weight_unwanted + weight_wanted;
                    return if total == 0.0 {
                        0.5
                    } else {
                        weight_unwanted / total
                    };
                }
                Node::Split {
                    column,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*column] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Majority label at the leaf; exact ties go to `unwanted`.
    pub fn predict(&self, row: &[f64]) -> InteractionLabel {
        if self.leaf_fraction_unwanted(row) >= 0.5 {
            InteractionLabel::Unwanted
        } else {
            InteractionLabel::Wanted
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Columns used by at least one split.
    pub fn split_columns(&self) -> Vec<usize> {
        let mut cols: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { column, .. } => Some(*column),
                Node::Leaf { .. } => None,
            })
            .collect();
        cols.sort_unstable();
        cols.dedup();
        cols
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use InteractionLabel::{Unwanted, Wanted};

    fn fit_plain(x: &[Vec<f64>], y: &[InteractionLabel]) -> (Tree, Vec<f64>) {
        let n_columns = x[0].len();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut importance = vec![0.0; n_columns];
        let items: Vec<Item> = (0..x.len()).map(|i| (i, 1.0)).collect();
        let tree = Tree::fit(x, y, items, n_columns, &mut rng, &mut importance);
        (tree, importance)
    }

    #[test]
    fn separable_data_fits_to_purity() {
        let x = vec![vec![0.0], vec![1.0], vec![10.0], vec![11.0]];
        let y = [Unwanted, Unwanted, Wanted, Wanted];
        let (tree, importance) = fit_plain(&x, &y);
        for (row, label) in x.iter().zip(y) {
            assert_eq!(tree.predict(row), label);
        }
        assert!(importance[0] > 0.0);
    }

    #[test]
    fn conflicting_duplicates_become_mixed_leaf() {
        let x = vec![vec![1.0], vec![1.0]];
        let y = [Unwanted, Wanted];
        let (tree, _) = fit_plain(&x, &y);
        assert_eq!(tree.node_count(), 1);
        // tie at the leaf goes to unwanted
        assert_eq!(tree.predict(&[1.0]), Unwanted);
    }

    #[test]
    fn split_tie_break_prefers_lower_column() {
        // both columns separate the classes identically
        let x = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let y = [Unwanted, Wanted];
        let (tree, importance) = fit_plain(&x, &y);
        assert_eq!(tree.split_columns(), vec![0]);
        assert_eq!(importance[1], 0.0);
    }

    #[test]
    fn weighted_fit_follows_weights() {
        // one heavy conflicting duplicate dominates the leaf label
        let x = vec![vec![1.0], vec![1.0]];
        let y = [Unwanted, Wanted];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut importance = vec![0.0];
        let tree = Tree::fit(&x, &y, vec![(0, 0.2), (1, 0.8)], 1, &mut rng, &mut importance);
        assert_eq!(tree.predict(&[1.0]), Wanted);
    }
}
