//! One-hidden-layer network with logistic activations, trained by
//! full-batch gradient descent on the mean cross-entropy plus an L2 penalty
//! on every parameter (weights and biases alike).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::InteractionLabel;

#[derive(Debug, Clone, Copy)]
pub struct NnConfig {
    pub hidden_units: usize,
    pub weight_decay: f64,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for NnConfig {
    fn default() -> Self {
        NnConfig {
            hidden_units: 1,
            weight_decay: 0.0,
            learning_rate: 0.1,
            epochs: 5000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Network {
    /// First layer, `w1[h][j]` maps input column j to hidden unit h.
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn target(label: InteractionLabel) -> f64 {
    match label {
        InteractionLabel::Unwanted => 1.0,
        InteractionLabel::Wanted => 0.0,
    }
}

impl Network {
    /// Weights start uniform in (-0.5, 0.5) from the given seed.
    pub fn init(inputs: usize, hidden_units: usize, seed: u64) -> Network {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample = |rng: &mut ChaCha8Rng| rng.gen_range(-0.5..0.5);
        let w1 = (0..hidden_units)
            .map(|_| (0..inputs).map(|_| sample(&mut rng)).collect())
            .collect();
        let b1 = (0..hidden_units).map(|_| sample(&mut rng)).collect();
        let w2 = (0..hidden_units).map(|_| sample(&mut rng)).collect();
        let b2 = sample(&mut rng);
        Network { w1, b1, w2, b2 }
    }

    fn hidden(&self, row: &[f64]) -> Vec<f64> {
        self.w1
            .iter()
            .zip(&self.b1)
            .map(|(weights, b)| {
                let z: f64 = weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>() + b;
                sigmoid(z)
            })
            .collect()
    }

    pub fn forward(&self, row: &[f64]) -> f64 {
        let h = self.hidden(row);
        let z: f64 = self.w2.iter().zip(&h).map(|(w, v)| w * v).sum::<f64>() + self.b2;
        sigmoid(z)
    }

    /// Mean binary cross-entropy plus (decay/2) * sum of squared parameters.
    pub fn loss(&self, x: &[Vec<f64>], y: &[InteractionLabel], decay: f64) -> f64 {
        let n = x.len() as f64;
        let mut total = 0.0;
        for (row, &label) in x.iter().zip(y) {
            let o = self.forward(row).clamp(1e-12, 1.0 - 1e-12);
            let t = target(label);
            total += -(t * o.ln() + (1.0 - t) * (1.0 - o).ln());
        }
        let mut penalty = self.b2 * self.b2;
        for (weights, b) in self.w1.iter().zip(&self.b1) {
            penalty += b * b + weights.iter().map(|w| w * w).sum::<f64>();
        }
        penalty += self.w2.iter().map(|w| w * w).sum::<f64>();
        total / n + 0.5 * decay * penalty
    }

    /// Full-batch gradient of [`Self::loss`], same shape as the network.
    pub fn gradients(&self, x: &[Vec<f64>], y: &[InteractionLabel], decay: f64) -> Network {
        let inputs = self.w1.first().map_or(0, Vec::len);
        let hidden_units = self.w1.len();
        let n = x.len() as f64;
        let mut gw1 = vec![vec![0.0; inputs]; hidden_units];
        let mut gb1 = vec![0.0; hidden_units];
        let mut gw2 = vec![0.0; hidden_units];
        let mut gb2 = 0.0;

        for (row, &label) in x.iter().zip(y) {
            let h = self.hidden(row);
            let o = {
                let z: f64 =
                    self.w2.iter().zip(&h).map(|(w, v)| w * v).sum::<f64>() + self.b2;
                sigmoid(z)
            };
            // d(mean BCE)/d(output preactivation)
            let dz = (o - target(label)) / n;
            gb2 += dz;
            for (g, hv) in gw2.iter_mut().zip(&h) {
                *g += dz * hv;
            }
            for u in 0..hidden_units {
                let dh = dz * self.w2[u];
                let dz1 = dh * h[u] * (1.0 - h[u]);
                gb1[u] += dz1;
                for (g, v) in gw1[u].iter_mut().zip(row) {
                    *g += dz1 * v;
                }
            }
        }

        for (grow, wrow) in gw1.iter_mut().zip(&self.w1) {
            for (g, w) in grow.iter_mut().zip(wrow) {
                *g += decay * w;
            }
        }
        for (g, b) in gb1.iter_mut().zip(&self.b1) {
            *g += decay * b;
        }
        for (g, w) in gw2.iter_mut().zip(&self.w2) {
            *g += decay * w;
        }
        gb2 += decay * self.b2;

        Network {
            w1: gw1,
            b1: gb1,
            w2: gw2,
            b2: gb2,
        }
    }

    pub fn fit(
        x: &[Vec<f64>],
        y: &[InteractionLabel],
        config: &NnConfig,
        seed: u64,
    ) -> Network {
        let inputs = x.first().map_or(0, Vec::len);
        let mut net = Network::init(inputs, config.hidden_units, seed);
        for _ in 0..config.epochs {
            let g = net.gradients(x, y, config.weight_decay);
            let lr = config.learning_rate;
            for (wrow, grow) in net.w1.iter_mut().zip(&g.w1) {
                for (w, gw) in wrow.iter_mut().zip(grow) {
                    *w -= lr * gw;
                }
            }
            for (b, gb) in net.b1.iter_mut().zip(&g.b1) {
                *b -= lr * gb;
            }
            for (w, gw) in net.w2.iter_mut().zip(&g.w2) {
                *w -= lr * gw;
            }
            net.b2 -= lr * g.b2;
        }
        net
    }

    /// Flattened parameter view; pairs with [`Self::set_flat`] for the
    /// finite-difference gradient check.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for row in &self.w1 {
            out.extend_from_slice(row);
        }
        out.extend_from_slice(&self.b1);
        out.extend_from_slice(&self.w2);
        out.push(self.b2);
        out
    }

    pub fn set_flat(&mut self, values: &[f64]) {
        let mut at = 0;
        for row in &mut self.w1 {
            for w in row.iter_mut() {
                *w = values[at];
                at += 1;
            }
        }
        for b in &mut self.b1 {
            *b = values[at];
            at += 1;
        }
        for w in &mut self.w2 {
            *w = values[at];
            at += 1;
        }
        self.b2 = values[at];
    }

    /// Garson-style weight-magnitude attribution of each input column,
    /// normalized so the largest importance is 100.
    pub fn garson_importance(&self) -> Vec<f64> {
        let inputs = self.w1.first().map_or(0, Vec::len);
        let mut scores = vec![0.0; inputs];
        for (weights, w2) in self.w1.iter().zip(&self.w2) {
            let row_total: f64 = weights.iter().map(|w| w.abs()).sum();
            if row_total == 0.0 {
                continue;
            }
            for (s, w) in scores.iter_mut().zip(weights) {
                *s += (w.abs() / row_total) * w2.abs();
            }
        }
        let max = scores.iter().cloned().fold(0.0, f64::max);
        if max > 0.0 {
            for s in &mut scores {
                *s *= 100.0 / max;
            }
        }
        scores
    }
}
