//! Global and quasi-local similarity metrics: Katz, random walk with
//! restart, and the local-path index. All operate on a dense adjacency
//! matrix; the benchmark graphs have at most tens of nodes.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;
use crate::similarity::MetricParams;

/// Power-iteration estimate of the spectral radius of the adjacency matrix.
pub fn spectral_radius(adj: &AdjacencyMatrix) -> f64 {
    let a = adj.dense();
    let n = adj.n();
    if n == 0 || a.sum() == 0.0 {
        return 0.0;
    }
    let mut v = DMatrix::from_element(n, 1, 1.0 / (n as f64).sqrt());
    let mut lambda = 0.0;
    for _ in 0..1000 {
        let w = a * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = &w / norm;
        let estimate = (next.transpose() * a * &next)[(0, 0)];
        let done = (estimate - lambda).abs() < 1e-13;
        lambda = estimate;
        v = next;
        if done {
            break;
        }
    }
    lambda
}

/// Katz index: S = (I - beta*A)^(-1) - I, i.e. the attenuated count of all
/// walks of length >= 1 between each pair. Requires beta < 1/rho(A).
pub fn katz_matrix(adj: &AdjacencyMatrix, params: &MetricParams) -> Result<DMatrix<f64>> {
    let n = adj.n();
    let beta = params.katz_beta;
    let rho = spectral_radius(adj);
    if beta * rho >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "katz_beta {beta} is out of the convergence range: estimated spectral radius is \
             {rho:.6}, so beta must be below {:.6}",
            1.0 / rho
        )));
    }
    let system = DMatrix::identity(n, n) - adj.dense() * beta;
    let inverse = system
        .try_inverse()
        .expect("(I - beta*A) is nonsingular for beta below 1/rho(A)");
    Ok(inverse - DMatrix::identity(n, n))
}

/// Truncated-series oracle for the Katz index: sum of beta^l * A^l for
/// l = 1..=katz_series_len, accumulated by explicit matrix multiplication.
/// Kept free of library matrix products so it stays an independent check
/// on the closed form.
pub fn katz_series_matrix(adj: &AdjacencyMatrix, params: &MetricParams) -> DMatrix<f64> {
    let n = adj.n();
    let beta = params.katz_beta;
    let a = adj.dense();
    let mut power = a.clone(); // A^l
    let mut sum = DMatrix::zeros(n, n);
    let mut coeff = beta;
    for l in 1..=params.katz_series_len {
        for i in 0..n {
            for j in 0..n {
                sum[(i, j)] += coeff * power[(i, j)];
            }
        }
        if l == params.katz_series_len {
            break;
        }
        let mut next = DMatrix::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                let aik = power[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    next[(i, j)] += aik * a[(k, j)];
                }
            }
        }
        power = next;
        coeff *= beta;
    }
    sum
}

#[derive(Debug, Clone)]
pub struct RwrSolution {
    /// Symmetrized pair scores: S[x][y] = q_x[y] + q_y[x].
    pub pair_scores: DMatrix<f64>,
    /// Stationary vector per seed node, each summing to 1.
    pub stationary: Vec<Vec<f64>>,
    /// Nodes whose transition row was replaced by the uniform distribution.
    pub uniform_fallback: Vec<String>,
}

/// Random walk with restart. For each seed node x, solves
/// q = c*e_x + (1-c)*P^T q by power iteration, where P is the row-stochastic
/// transition matrix and c the restart probability. Rows of isolated nodes
/// are replaced by the uniform distribution and recorded in the run log.
pub fn rwr(adj: &AdjacencyMatrix, params: &MetricParams) -> Result<RwrSolution> {
    let n = adj.n();
    let c = params.rwr_restart;
    let mut transition = vec![vec![0.0; n]; n];
    let mut uniform_fallback = Vec::new();
    for (i, row) in transition.iter_mut().enumerate() {
        let degree: f64 = (0..n).map(|j| adj.get(i, j)).sum();
        if degree == 0.0 {
            uniform_fallback.push(adj.names()[i].clone());
            row.fill(1.0 / n as f64);
        } else {
            for (j, value) in row.iter_mut().enumerate() {
                *value = adj.get(i, j) / degree;
            }
        }
    }
    if !uniform_fallback.is_empty() {
        log::warn!(
            "rwr: isolated node(s) {}: transition rows replaced by the uniform distribution",
            uniform_fallback.join(", ")
        );
    }

    let mut stationary = Vec::with_capacity(n);
    for seed in 0..n {
        let mut q = vec![1.0 / n as f64; n];
        let mut converged = false;
        for _ in 0..params.rwr_max_iterations {
            let mut next = vec![0.0; n];
            for (u, row) in transition.iter().enumerate() {
                let qu = q[u];
                if qu == 0.0 {
                    continue;
                }
                for v in 0..n {
                    next[v] += row[v] * qu;
                }
            }
            let mut diff = 0.0;
            for v in 0..n {
                next[v] = (1.0 - c) * next[v] + if v == seed { c } else { 0.0 };
                diff += (next[v] - q[v]).abs();
            }
            q = next;
            if diff < params.rwr_tolerance {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence(params.rwr_max_iterations));
        }
        stationary.push(q);
    }

    let mut pair_scores = DMatrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            pair_scores[(x, y)] = stationary[x][y] + stationary[y][x];
        }
    }
    Ok(RwrSolution {
        pair_scores,
        stationary,
        uniform_fallback,
    })
}

/// Local-path index: S = A^2 + epsilon * A^3.
pub fn local_path_matrix(adj: &AdjacencyMatrix, params: &MetricParams) -> DMatrix<f64> {
    let a = adj.dense();
    let a2 = a * a;
    let a3 = &a2 * a;
    a2 + a3 * params.lp_epsilon
}
