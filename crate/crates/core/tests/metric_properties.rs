//! Property tests for the similarity metrics: symmetry, agreement with an
//! independent brute-force oracle, oracle equivalence of the Katz closed
//! form, RWR distribution invariants, and scale invariance of the
//! standardizing learners.

use proptest::prelude::*;

use fi_linkpred_core::learners::{roc_auc, HyperParams, ModelSpec, TrainedModel};
use fi_linkpred_core::similarity::{
    adamic_adar, common_neighbors, cosine, jaccard, katz_matrix, katz_series_matrix,
    local_path_matrix, resource_allocation, rwr, score_table, MetricId, METRICS,
};
use fi_linkpred_core::{FeatureGraph, InteractionLabel, LabelFilter, MetricParams};

/// Raw edge-list brute force for the five local metrics, independent of the
/// graph type's neighbor machinery.
mod brute {
    use std::collections::BTreeSet;

    fn neighbor_set(edges: &[(usize, usize)], node: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &(a, b) in edges {
            if a == node {
                out.insert(b);
            }
            if b == node {
                out.insert(a);
            }
        }
        out
    }

    pub fn locals(edges: &[(usize, usize)], x: usize, y: usize) -> [f64; 5] {
        let gx = neighbor_set(edges, x);
        let gy = neighbor_set(edges, y);
        let inter: Vec<usize> = gx.intersection(&gy).copied().collect();
        let union = gx.union(&gy).count();
        let cn = inter.len() as f64;
        let jac = if union == 0 { 0.0 } else { cn / union as f64 };
        let cos = if gx.is_empty() || gy.is_empty() {
            0.0
        } else {
            cn / ((gx.len() * gy.len()) as f64).sqrt()
        };
        let mut aa = 0.0;
        let mut ra = 0.0;
        for &z in &inter {
            let k = neighbor_set(edges, z).len() as f64;
            aa += 1.0 / k.ln();
            ra += 1.0 / k;
        }
        [cn, jac, cos, aa, ra]
    }
}

fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> FeatureGraph {
    let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let labeled: Vec<(String, String)> = edges
        .iter()
        .map(|&(a, b)| (names[a].clone(), names[b].clone()))
        .collect();
    let edge_refs: Vec<(&str, &str, InteractionLabel)> = labeled
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str(), InteractionLabel::Unwanted))
        .collect();
    FeatureGraph::from_parts(&name_refs, &[], &edge_refs).unwrap()
}

prop_compose! {
    /// Random simple graph: 2..=8 nodes, each edge present with p ~ 0.4.
    fn random_graph()(n in 2usize..=8)(
        n in Just(n),
        flags in proptest::collection::vec(prop::bool::weighted(0.4), n * (n - 1) / 2),
    ) -> (usize, Vec<(usize, usize)>) {
        let mut edges = Vec::new();
        let mut at = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if flags[at] {
                    edges.push((i, j));
                }
                at += 1;
            }
        }
        (n, edges)
    }
}

proptest! {
    #[test]
    fn local_metrics_match_brute_force_exactly((n, edges) in random_graph()) {
        let g = graph_from_edges(n, &edges);
        for x in 0..n {
            for y in (x + 1)..n {
                let (a, b) = (format!("n{x}"), format!("n{y}"));
                let expected = brute::locals(&edges, x, y);
                let got = [
                    common_neighbors(&g, &a, &b).unwrap(),
                    jaccard(&g, &a, &b).unwrap(),
                    cosine(&g, &a, &b).unwrap(),
                    adamic_adar(&g, &a, &b).unwrap(),
                    resource_allocation(&g, &a, &b).unwrap(),
                ];
                prop_assert_eq!(got, expected, "pair ({}, {})", a, b);
            }
        }
    }

    #[test]
    fn all_metrics_are_symmetric((n, edges) in random_graph()) {
        let g = graph_from_edges(n, &edges);
        let params = MetricParams::default();
        let adj = g.adjacency(LabelFilter::All).unwrap();
        let katz = katz_matrix(&adj, &params).unwrap();
        let walk = rwr(&adj, &params).unwrap();
        let lp = local_path_matrix(&adj, &params);
        for x in 0..n {
            for y in (x + 1)..n {
                let (a, b) = (format!("n{x}"), format!("n{y}"));
                prop_assert_eq!(
                    common_neighbors(&g, &a, &b).unwrap(),
                    common_neighbors(&g, &b, &a).unwrap()
                );
                prop_assert_eq!(jaccard(&g, &a, &b).unwrap(), jaccard(&g, &b, &a).unwrap());
                prop_assert_eq!(cosine(&g, &a, &b).unwrap(), cosine(&g, &b, &a).unwrap());
                prop_assert_eq!(
                    adamic_adar(&g, &a, &b).unwrap(),
                    adamic_adar(&g, &b, &a).unwrap()
                );
                prop_assert_eq!(
                    resource_allocation(&g, &a, &b).unwrap(),
                    resource_allocation(&g, &b, &a).unwrap()
                );
                prop_assert!((katz[(x, y)] - katz[(y, x)]).abs() < 1e-12);
                prop_assert_eq!(walk.pair_scores[(x, y)], walk.pair_scores[(y, x)]);
                prop_assert_eq!(lp[(x, y)], lp[(y, x)]);
            }
        }
    }

    #[test]
    fn katz_matches_series_oracle((n, edges) in random_graph()) {
        let g = graph_from_edges(n, &edges);
        let params = MetricParams::default();
        let adj = g.adjacency(LabelFilter::All).unwrap();
        let closed = katz_matrix(&adj, &params).unwrap();
        let series = katz_series_matrix(&adj, &params);
        for i in 0..n {
            for j in 0..n {
                prop_assert!(
                    (closed[(i, j)] - series[(i, j)]).abs() < 1e-9,
                    "entry ({i},{j}): {} vs {}",
                    closed[(i, j)],
                    series[(i, j)]
                );
            }
        }
    }

    #[test]
    fn rwr_vectors_are_fixed_point_distributions((n, edges) in random_graph()) {
        let g = graph_from_edges(n, &edges);
        let params = MetricParams::default();
        let adj = g.adjacency(LabelFilter::All).unwrap();
        let solution = rwr(&adj, &params).unwrap();
        // independent transition matrix from the raw edge list
        let mut transition = vec![vec![0.0; n]; n];
        for (i, row) in transition.iter_mut().enumerate() {
            let degree = edges.iter().filter(|&&(a, b)| a == i || b == i).count();
            if degree == 0 {
                row.fill(1.0 / n as f64);
            } else {
                for &(a, b) in &edges {
                    if a == i {
                        row[b] = 1.0 / degree as f64;
                    }
                    if b == i {
                        row[a] = 1.0 / degree as f64;
                    }
                }
            }
        }
        let c = params.rwr_restart;
        for (seed, q) in solution.stationary.iter().enumerate() {
            let total: f64 = q.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-8, "sum {total}");
            prop_assert!(q.iter().all(|&v| v >= 0.0));
            let mut residual = 0.0;
            for v in 0..n {
                let mut inflow = 0.0;
                for u in 0..n {
                    inflow += transition[u][v] * q[u];
                }
                let fixed = (1.0 - c) * inflow + if v == seed { c } else { 0.0 };
                residual += (fixed - q[v]).abs();
            }
            prop_assert!(residual < 1e-10, "residual {residual}");
        }
    }

    #[test]
    fn local_path_with_zero_epsilon_equals_common_neighbors((n, edges) in random_graph()) {
        let g = graph_from_edges(n, &edges);
        let params = MetricParams::new(0.05, 0.15, 0.0, 1e-10, 50).unwrap();
        let adj = g.adjacency(LabelFilter::All).unwrap();
        let lp = local_path_matrix(&adj, &params);
        for x in 0..n {
            for y in (x + 1)..n {
                let cn = common_neighbors(&g, &format!("n{x}"), &format!("n{y}")).unwrap();
                prop_assert_eq!(lp[(x, y)], cn);
            }
        }
    }

    #[test]
    fn adding_an_edge_in_another_component_leaves_scores_alone(
        (n, edges) in random_graph(),
        extra in 0usize..28,
    ) {
        // component one: nodes 0..n with the random edges; component two:
        // a fixed 8-node blob we mutate. No isolated nodes in either
        // component touch the other, so every metric stays put.
        let offset = n;
        let blob: Vec<(usize, usize)> = vec![
            (offset, offset + 1), (offset + 1, offset + 2), (offset + 2, offset + 3),
            (offset + 3, offset + 4), (offset + 4, offset + 5), (offset + 5, offset + 6),
            (offset + 6, offset + 7), (offset, offset + 7),
        ];
        let blob_pairs: Vec<(usize, usize)> = (offset..offset + 8)
            .flat_map(|i| ((i + 1)..(offset + 8)).map(move |j| (i, j)))
            .collect();
        let candidate = blob_pairs[extra % blob_pairs.len()];
        if blob.contains(&candidate) {
            return Ok(());
        }
        let total_nodes = n + 8;
        let mut base_edges = edges.clone();
        base_edges.extend(&blob);
        let mut grown_edges = base_edges.clone();
        grown_edges.push(candidate);

        let before = score_table(&graph_from_edges(total_nodes, &base_edges), &MetricParams::default()).unwrap();
        let after = score_table(&graph_from_edges(total_nodes, &grown_edges), &MetricParams::default()).unwrap();
        for (row, (a, b)) in before.pairs().iter().enumerate() {
            let in_component_one = |name: &str| {
                let id: usize = name[1..].parse().unwrap();
                id < n
            };
            if !(in_component_one(a) && in_component_one(b)) {
                continue;
            }
            for metric in METRICS {
                let x = before.score(row, metric);
                let y = after.score(row, metric);
                let tolerance = if metric == MetricId::Rwr { 1e-8 } else { 1e-12 };
                prop_assert!(
                    (x - y).abs() <= tolerance,
                    "{metric} changed on untouched pair {a},{b}: {x} -> {y}"
                );
            }
        }
    }

    #[test]
    fn roc_auc_is_invariant_under_monotone_transforms(
        scores in proptest::collection::vec(0.0f64..1.0, 4..20),
        flags in proptest::collection::vec(any::<bool>(), 4..20),
    ) {
        let len = scores.len().min(flags.len());
        let scores = &scores[..len];
        let labels: Vec<InteractionLabel> = flags[..len]
            .iter()
            .map(|&f| if f { InteractionLabel::Unwanted } else { InteractionLabel::Wanted })
            .collect();
        let has_both = labels.contains(&InteractionLabel::Unwanted)
            && labels.contains(&InteractionLabel::Wanted);
        prop_assume!(has_both);
        let base = roc_auc(scores, &labels).unwrap();
        let affine: Vec<f64> = scores.iter().map(|s| 3.0 * s + 7.0).collect();
        let exp: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
        prop_assert!((roc_auc(&affine, &labels).unwrap() - base).abs() < 1e-12);
        prop_assert!((roc_auc(&exp, &labels).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn standardizing_learners_ignore_column_rescaling(
        scale in 0.001f64..1000.0,
        which in 0usize..2,
    ) {
        let x = vec![
            vec![1.0, 40.0],
            vec![2.0, 50.0],
            vec![3.0, 60.0],
            vec![11.0, 10.0],
            vec![12.0, 20.0],
            vec![13.0, 30.0],
        ];
        let y = [
            InteractionLabel::Unwanted,
            InteractionLabel::Unwanted,
            InteractionLabel::Unwanted,
            InteractionLabel::Wanted,
            InteractionLabel::Wanted,
            InteractionLabel::Wanted,
        ];
        let scaled: Vec<Vec<f64>> = x
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r[which] *= scale;
                r
            })
            .collect();
        let schema = &METRICS[..2];
        // queries clearly inside one cluster; boundary points would let
        // ulp-level noise from the rescaling flip the label
        let queries = [vec![1.5, 45.0], vec![12.5, 15.0], vec![2.5, 55.0]];
        for params in [HyperParams::Knn { k: 3 }, HyperParams::SvmLinear { cost: 0.5 }] {
            let spec = ModelSpec::new(params, 5).unwrap();
            let plain = TrainedModel::train(&spec, schema, &x, &y).unwrap();
            let rescaled = TrainedModel::train(&spec, schema, &scaled, &y).unwrap();
            for q in &queries {
                let mut sq = q.clone();
                sq[which] *= scale;
                prop_assert_eq!(
                    plain.predict_label(q).unwrap(),
                    rescaled.predict_label(&sq).unwrap()
                );
            }
        }
    }
}

#[test]
fn score_table_property_over_seeded_random_graphs() {
    // deterministic sweep: all scores finite and nonnegative
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let n = rng.gen_range(2..=8);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(0.4) {
                    edges.push((i, j));
                }
            }
        }
        let g = graph_from_edges(n, &edges);
        let table = score_table(&g, &MetricParams::default()).unwrap();
        assert_eq!(table.len(), n * (n - 1) / 2);
        for row in 0..table.len() {
            for metric in METRICS {
                let v = table.score(row, metric);
                assert!(v.is_finite() && v >= 0.0, "{metric} gave {v}");
            }
        }
    }
}
