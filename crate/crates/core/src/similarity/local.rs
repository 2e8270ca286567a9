//! Local similarity metrics, computed from the immediate neighborhoods of
//! the two endpoints.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{FeatureGraph, LabelFilter};

fn endpoints(
    g: &FeatureGraph,
    x: &str,
    y: &str,
) -> Result<(BTreeSet<String>, BTreeSet<String>)> {
    if x == y {
        return Err(Error::InvalidParameter(format!(
            "similarity of `{x}` with itself is undefined"
        )));
    }
    let gx = g.neighbors(x, LabelFilter::All)?;
    let gy = g.neighbors(y, LabelFilter::All)?;
    Ok((gx, gy))
}

/// Number of shared neighbors.
pub fn common_neighbors(g: &FeatureGraph, x: &str, y: &str) -> Result<f64> {
    let (gx, gy) = endpoints(g, x, y)?;
    Ok(gx.intersection(&gy).count() as f64)
}

/// Shared neighbors over the neighborhood union; 0 when the union is empty.
pub fn jaccard(g: &FeatureGraph, x: &str, y: &str) -> Result<f64> {
    let (gx, gy) = endpoints(g, x, y)?;
    let union = gx.union(&gy).count();
    if union == 0 {
        return Ok(0.0);
    }
    Ok(gx.intersection(&gy).count() as f64 / union as f64)
}

/// Shared neighbors over the geometric mean of the degrees; 0 when either
/// endpoint has degree 0.
pub fn cosine(g: &FeatureGraph, x: &str, y: &str) -> Result<f64> {
    let (gx, gy) = endpoints(g, x, y)?;
    if gx.is_empty() || gy.is_empty() {
        return Ok(0.0);
    }
    let inter = gx.intersection(&gy).count() as f64;
    Ok(inter / ((gx.len() as f64) * (gy.len() as f64)).sqrt())
}

/// Sum of 1/ln(degree) over the shared neighbors. A shared neighbor of two
/// distinct nodes has degree >= 2, so the logarithm is always positive.
pub fn adamic_adar(g: &FeatureGraph, x: &str, y: &str) -> Result<f64> {
    let (gx, gy) = endpoints(g, x, y)?;
    let mut total = 0.0;
    for z in gx.intersection(&gy) {
        let k = g.degree(z, LabelFilter::All)?;
        debug_assert!(k >= 2, "common neighbor `{z}` must have degree >= 2");
        total += 1.0 / (k as f64).ln();
    }
    Ok(total)
}

/// Sum of 1/degree over the shared neighbors.
pub fn resource_allocation(g: &FeatureGraph, x: &str, y: &str) -> Result<f64> {
    let (gx, gy) = endpoints(g, x, y)?;
    let mut total = 0.0;
    for z in gx.intersection(&gy) {
        let k = g.degree(z, LabelFilter::All)?;
        total += 1.0 / k as f64;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::InteractionLabel;
    use approx::assert_relative_eq;

    fn graph(features: &[&str], edges: &[(&str, &str)]) -> FeatureGraph {
        let labeled: Vec<(&str, &str, InteractionLabel)> = edges
            .iter()
            .map(|&(a, b)| (a, b, InteractionLabel::Unwanted))
            .collect();
        FeatureGraph::from_parts(features, &[], &labeled).unwrap()
    }

    fn path() -> FeatureGraph {
        graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")])
    }

    fn triangle() -> FeatureGraph {
        graph(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")])
    }

    #[test]
    fn common_neighbors_path_and_triangle() {
        assert_eq!(common_neighbors(&path(), "a", "c").unwrap(), 1.0);
        assert_eq!(common_neighbors(&triangle(), "a", "b").unwrap(), 1.0);
        let isolated = graph(&["a", "b"], &[]);
        assert_eq!(common_neighbors(&isolated, "a", "b").unwrap(), 0.0);
    }

    #[test]
    fn jaccard_cases() {
        // Gamma(a) = Gamma(c) = {b}
        assert_eq!(jaccard(&path(), "a", "c").unwrap(), 1.0);
        assert_relative_eq!(jaccard(&triangle(), "a", "b").unwrap(), 1.0 / 3.0);
        let isolated = graph(&["a", "b"], &[]);
        assert_eq!(jaccard(&isolated, "a", "b").unwrap(), 0.0);
    }

    #[test]
    fn cosine_cases() {
        assert_relative_eq!(cosine(&path(), "a", "c").unwrap(), 1.0);
        assert_relative_eq!(cosine(&triangle(), "a", "b").unwrap(), 0.5);
        let g = graph(&["a", "b", "c"], &[("b", "c")]);
        assert_eq!(cosine(&g, "a", "b").unwrap(), 0.0);
    }

    #[test]
    fn adamic_adar_cases() {
        assert_relative_eq!(
            adamic_adar(&path(), "a", "c").unwrap(),
            1.0 / 2.0_f64.ln(),
            epsilon = 1e-12
        );
        let isolated = graph(&["a", "b"], &[]);
        assert_eq!(adamic_adar(&isolated, "a", "b").unwrap(), 0.0);
        // star center z of degree 4 as the sole shared neighbor
        let star = graph(
            &["a", "b", "p", "q", "z"],
            &[("z", "a"), ("z", "b"), ("z", "p"), ("z", "q")],
        );
        assert_relative_eq!(
            adamic_adar(&star, "a", "b").unwrap(),
            1.0 / 4.0_f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn resource_allocation_cases() {
        assert_relative_eq!(resource_allocation(&path(), "a", "c").unwrap(), 0.5);
        let isolated = graph(&["a", "b"], &[]);
        assert_eq!(resource_allocation(&isolated, "a", "b").unwrap(), 0.0);
        // shared neighbors u (degree 2) and v (degree 4): 1/2 + 1/4
        let g = graph(
            &["p", "q", "u", "v", "x", "y"],
            &[
                ("x", "u"),
                ("y", "u"),
                ("x", "v"),
                ("y", "v"),
                ("v", "p"),
                ("v", "q"),
            ],
        );
        assert_relative_eq!(resource_allocation(&g, "x", "y").unwrap(), 0.75);
    }

    #[test]
    fn rejects_self_pair_and_unknown() {
        assert!(common_neighbors(&path(), "a", "a").is_err());
        assert!(jaccard(&path(), "a", "zz").is_err());
    }
}
