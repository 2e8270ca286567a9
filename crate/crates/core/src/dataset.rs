//! Labeled edge dataset and deterministic resampling plans.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FeatureGraph, InteractionLabel};
use crate::io::format_significant;
use crate::similarity::{MetricId, MetricParams, SimilarityTable, METRICS};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub graph_digest: String,
    pub params: MetricParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetRow {
    pub feature_a: String,
    pub feature_b: String,
    pub scores: [f64; 8],
    pub label: InteractionLabel,
}

/// One row per unordered feature pair: the eight metric scores plus the
/// wanted/unwanted class label. Row order follows `all_pairs`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDataset {
    pub rows: Vec<DatasetRow>,
    pub columns: [MetricId; 8],
    pub provenance: Provenance,
}

impl EdgeDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> Vec<InteractionLabel> {
        self.rows.iter().map(|r| r.label).collect()
    }

    pub fn feature_rows(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.scores.to_vec()).collect()
    }

    pub fn class_count(&self, label: InteractionLabel) -> usize {
        self.rows.iter().filter(|r| r.label == label).count()
    }

    /// Same CSV format as the similarity table (the label column is part of
    /// the pinned header).
    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(crate::io::SIMILARITY_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.feature_a);
            out.push(',');
            out.push_str(&row.feature_b);
            for v in row.scores {
                out.push(',');
                out.push_str(&format_significant(v, 12));
            }
            out.push(',');
            out.push_str(row.label.as_str());
            out.push('\n');
        }
        out
    }
}

/// Joins the similarity table with the pair labels of `g`.
pub fn build_dataset(table: &SimilarityTable, g: &FeatureGraph) -> Result<EdgeDataset> {
    let expected = g.all_pairs();
    if table.len() != expected.len() {
        return Err(Error::SchemaMismatch(format!(
            "similarity table has {} rows but the graph has {} pairs",
            table.len(),
            expected.len()
        )));
    }
    let mut rows = Vec::with_capacity(expected.len());
    for (i, (a, b, label)) in expected.into_iter().enumerate() {
        let (ta, tb) = &table.pairs()[i];
        if (ta, tb) != (&a, &b) {
            return Err(Error::SchemaMismatch(format!(
                "similarity table is missing pair {a},{b} (found {ta},{tb} instead)"
            )));
        }
        rows.push(DatasetRow {
            feature_a: a,
            feature_b: b,
            scores: *table.row(i),
            label,
        });
    }
    Ok(EdgeDataset {
        rows,
        columns: METRICS,
        provenance: Provenance {
            graph_digest: g.digest(),
            params: table.params().clone(),
        },
    })
}

/// Disjoint train/test index lists preserving per-class proportions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u64,
    pub train_fraction: f64,
}

/// Fold assignment for stratified k-fold cross-validation: `fold_of[i]` is
/// the fold of dataset row `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub fold_of: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn fold_indices(&self, fold: usize) -> Vec<usize> {
        self.fold_of
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }
}

fn class_groups(labels: &[InteractionLabel]) -> Vec<(InteractionLabel, Vec<usize>)> {
    let mut groups = Vec::new();
    for label in [InteractionLabel::Unwanted, InteractionLabel::Wanted] {
        let members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(i, _)| i)
            .collect();
        if !members.is_empty() {
            groups.push((label, members));
        }
    }
    groups
}

/// Stratified holdout split. Per class, the test count is
/// round-half-up(class_size * (1 - train_fraction)), repaired so both sides
/// keep at least one sample of the class.
pub fn stratified_split(
    ds: &EdgeDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<SplitPlan> {
    if train_fraction.is_nan() || train_fraction <= 0.0 || train_fraction >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "train_fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let labels = ds.labels();
    let groups = class_groups(&labels);
    if groups.len() < 2 {
        return Err(Error::DegenerateData("single-class dataset".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (label, mut members) in groups {
        if members.len() < 2 {
            return Err(Error::DegenerateData(format!(
                "class `{label}` has {} row(s); need at least 2 to place one on each side",
                members.len()
            )));
        }
        let raw = (members.len() as f64 * (1.0 - train_fraction)).round() as usize;
        let n_test = raw.clamp(1, members.len() - 1);
        members.shuffle(&mut rng);
        test.extend_from_slice(&members[..n_test]);
        train.extend_from_slice(&members[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitPlan {
        train_indices: train,
        test_indices: test,
        seed,
        train_fraction,
    })
}

/// Stratified k-fold assignment. Each class's shuffled members are dealt to
/// consecutive folds through one rotating pointer, so fold sizes differ by
/// at most one globally and per class.
pub fn stratified_kfold(labels: &[InteractionLabel], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > labels.len() {
        return Err(Error::InvalidParameter(format!(
            "fold count must be in [2, {}], got {k}",
            labels.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0usize; labels.len()];
    let mut pointer = 0usize;
    for (_, mut members) in class_groups(labels) {
        members.shuffle(&mut rng);
        for row in members {
            fold_of[row] = pointer % k;
            pointer += 1;
        }
    }
    Ok(FoldPlan { k, fold_of, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::score_table;
    use proptest::prelude::*;

    fn toy_dataset(unwanted: usize, wanted: usize) -> EdgeDataset {
        let mut rows = Vec::new();
        for i in 0..unwanted + wanted {
            let label = if i < unwanted {
                InteractionLabel::Unwanted
            } else {
                InteractionLabel::Wanted
            };
            rows.push(DatasetRow {
                feature_a: format!("f{i}"),
                feature_b: format!("g{i}"),
                scores: [i as f64; 8],
                label,
            });
        }
        EdgeDataset {
            rows,
            columns: METRICS,
            provenance: Provenance {
                graph_digest: "test".to_string(),
                params: MetricParams::default(),
            },
        }
    }

    #[test]
    fn build_dataset_joins_labels() {
        let g = FeatureGraph::from_parts(
            &["a", "b", "c"],
            &[],
            &[("a", "b", InteractionLabel::Unwanted)],
        )
        .unwrap();
        let table = score_table(&g, &MetricParams::default()).unwrap();
        let ds = build_dataset(&table, &g).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.class_count(InteractionLabel::Unwanted), 1);
        assert_eq!(ds.class_count(InteractionLabel::Wanted), 2);
    }

    #[test]
    fn build_dataset_rejects_pair_mismatch() {
        let g = FeatureGraph::from_parts(
            &["a", "b", "c"],
            &[],
            &[("a", "b", InteractionLabel::Unwanted)],
        )
        .unwrap();
        let smaller = FeatureGraph::from_parts(&["a", "b"], &[], &[]).unwrap();
        let table = score_table(&smaller, &MetricParams::default()).unwrap();
        let err = build_dataset(&table, &g).unwrap_err();
        assert!(err.to_string().contains("pairs"), "{err}");
    }

    #[test]
    fn dataset_csv_shares_the_pinned_header() {
        let g = FeatureGraph::from_parts(
            &["a", "b", "c"],
            &[],
            &[("a", "b", InteractionLabel::Unwanted)],
        )
        .unwrap();
        let table = score_table(&g, &MetricParams::default()).unwrap();
        let ds = build_dataset(&table, &g).unwrap();
        let csv = ds.to_csv(&["seed: 7".to_string()]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "# seed: 7");
        assert_eq!(lines.next().unwrap(), crate::io::SIMILARITY_CSV_HEADER);
        assert_eq!(csv.lines().count(), 2 + ds.len());
        assert_eq!(
            csv.lines().filter(|l| l.ends_with(",unwanted")).count(),
            1
        );
    }

    #[test]
    fn edgeless_graph_dataset_is_all_wanted() {
        let g = FeatureGraph::from_parts(&["a", "b", "c"], &[], &[]).unwrap();
        let table = score_table(&g, &MetricParams::default()).unwrap();
        let ds = build_dataset(&table, &g).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.class_count(InteractionLabel::Wanted), 3);
    }

    #[test]
    fn split_email_sized_dataset() {
        let ds = toy_dataset(10, 11);
        let plan = stratified_split(&ds, 0.8, 7).unwrap();
        assert_eq!(plan.test_indices.len(), 4);
        assert_eq!(plan.train_indices.len(), 17);
        let labels = ds.labels();
        let test_unwanted = plan
            .test_indices
            .iter()
            .filter(|&&i| labels[i] == InteractionLabel::Unwanted)
            .count();
        assert_eq!(test_unwanted, 2);
    }

    #[test]
    fn split_two_per_class_half() {
        let ds = toy_dataset(2, 2);
        let plan = stratified_split(&ds, 0.5, 3).unwrap();
        assert_eq!(plan.train_indices.len(), 2);
        assert_eq!(plan.test_indices.len(), 2);
    }

    #[test]
    fn split_rejects_tiny_class() {
        let ds = toy_dataset(1, 5);
        assert!(stratified_split(&ds, 0.8, 0).is_err());
    }

    #[test]
    fn split_rejects_single_class() {
        let ds = toy_dataset(0, 5);
        let err = stratified_split(&ds, 0.8, 0).unwrap_err();
        assert!(err.to_string().contains("single-class"), "{err}");
    }

    #[test]
    fn kfold_17_rows_10_folds() {
        let ds = toy_dataset(8, 9);
        let plan = stratified_kfold(&ds.labels(), 10, 11).unwrap();
        for fold in 0..10 {
            let size = plan.fold_indices(fold).len();
            assert!((1..=2).contains(&size), "fold {fold} has size {size}");
        }
    }

    #[test]
    fn kfold_leave_one_out() {
        let ds = toy_dataset(3, 3);
        let plan = stratified_kfold(&ds.labels(), 6, 0).unwrap();
        for fold in 0..6 {
            assert_eq!(plan.fold_indices(fold).len(), 1);
        }
    }

    #[test]
    fn kfold_rejects_out_of_range_k() {
        let ds = toy_dataset(3, 3);
        assert!(stratified_kfold(&ds.labels(), 1, 0).is_err());
        assert!(stratified_kfold(&ds.labels(), 7, 0).is_err());
    }

    proptest! {
        #[test]
        fn split_is_a_deterministic_partition(
            unwanted in 2usize..12,
            wanted in 2usize..12,
            seed in any::<u64>(),
            fraction in 0.2f64..0.9,
        ) {
            let ds = toy_dataset(unwanted, wanted);
            let plan = stratified_split(&ds, fraction, seed).unwrap();
            let again = stratified_split(&ds, fraction, seed).unwrap();
            prop_assert_eq!(&plan, &again);
            let mut all: Vec<usize> =
                plan.train_indices.iter().chain(&plan.test_indices).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..ds.len()).collect::<Vec<_>>());
            // both classes present on both sides
            let labels = ds.labels();
            for side in [&plan.train_indices, &plan.test_indices] {
                let u = side.iter().filter(|&&i| labels[i] == InteractionLabel::Unwanted).count();
                prop_assert!(u >= 1 && u < side.len());
            }
        }

        #[test]
        fn kfold_is_balanced_and_deterministic(
            unwanted in 2usize..12,
            wanted in 2usize..12,
            seed in any::<u64>(),
            k in 2usize..8,
        ) {
            let ds = toy_dataset(unwanted, wanted);
            prop_assume!(k <= ds.len());
            let labels = ds.labels();
            let plan = stratified_kfold(&labels, k, seed).unwrap();
            prop_assert_eq!(&plan, &stratified_kfold(&labels, k, seed).unwrap());
            let sizes: Vec<usize> = (0..k).map(|f| plan.fold_indices(f).len()).collect();
            let (min, max) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
            prop_assert!(max - min <= 1, "sizes {:?}", sizes);
            prop_assert_eq!(sizes.iter().sum::<usize>(), ds.len());
            for label in [InteractionLabel::Unwanted, InteractionLabel::Wanted] {
                let per_fold: Vec<usize> = (0..k)
                    .map(|f| plan.fold_indices(f).iter().filter(|&&i| labels[i] == label).count())
                    .collect();
                let (mn, mx) = (per_fold.iter().min().unwrap(), per_fold.iter().max().unwrap());
                prop_assert!(mx - mn <= 1, "class {} per fold {:?}", label, per_fold);
            }
        }
    }
}
