//! Linear hinge-loss classifier trained by full-batch subgradient descent
//! on 0.5*||w||^2 + C * sum of hinge losses, with step 1/(C*t) at epoch t.

use serde::{Deserialize, Serialize};

use crate::graph::InteractionLabel;

#[derive(Debug, Clone, Copy)]
pub struct SvmConfig {
    pub cost: f64,
    pub epochs: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            cost: 1.0,
            epochs: 10_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn signed(label: InteractionLabel) -> f64 {
    match label {
        InteractionLabel::Unwanted => 1.0,
        InteractionLabel::Wanted => -1.0,
    }
}

impl LinearSvm {
    pub fn fit(x: &[Vec<f64>], y: &[InteractionLabel], config: &SvmConfig) -> LinearSvm {
        let cols = x.first().map_or(0, Vec::len);
        let c = config.cost;
        let mut weights = vec![0.0; cols];
        let mut bias = 0.0;
        for t in 1..=config.epochs {
            let mut grad_w = weights.clone();
            let mut grad_b = 0.0;
            for (row, &label) in x.iter().zip(y) {
                let ys = signed(label);
                let margin =
                    ys * (weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>() + bias);
                if margin < 1.0 {
                    for (g, v) in grad_w.iter_mut().zip(row) {
                        *g -= c * ys * v;
                    }
                    grad_b -= c * ys;
                }
            }
            let step = 1.0 / (c * t as f64);
            for (w, g) in weights.iter_mut().zip(&grad_w) {
                *w -= step * g;
            }
            bias -= step * grad_b;
        }
        LinearSvm { weights, bias }
    }

    pub fn margin(&self, row: &[f64]) -> f64 {
        self.weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    /// Logistic squashing of the margin; positive margins mean `unwanted`.
    pub fn score(&self, row: &[f64]) -> f64 {
        1.0 / (1.0 + (-self.margin(row)).exp())
    }
}
