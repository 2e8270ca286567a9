//! Shared fixtures for the benchmarks: the bundled Email graph and seeded
//! random interaction graphs of configurable size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fi_linkpred_core::{FeatureGraph, InteractionLabel};

pub fn email_graph() -> FeatureGraph {
    let features = include_str!("../../../data/email/features.txt");
    let interactions = include_str!("../../../data/email/interactions.txt");
    FeatureGraph::parse(features, interactions).expect("bundled data parses")
}

/// Random unwanted-interaction graph with `n` nodes and edge probability
/// `p`, deterministic for a given seed.
pub fn random_graph(n: usize, p: f64, seed: u64) -> FeatureGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..n).map(|i| format!("f{i:03}")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(p) {
                edges.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    let labeled: Vec<(&str, &str, InteractionLabel)> = edges
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str(), InteractionLabel::Unwanted))
        .collect();
    FeatureGraph::from_parts(&name_refs, &[], &labeled).expect("generated graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(email_graph().node_count(), 7);
        let g = random_graph(20, 0.3, 1);
        assert_eq!(g.node_count(), 20);
        assert_eq!(random_graph(20, 0.3, 1), g);
    }
}
