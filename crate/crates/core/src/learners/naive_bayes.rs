//! Gaussian naive Bayes: one class-conditional normal per column with
//! empirical class priors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::InteractionLabel;

const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianNb {
    /// Log priors, index 0 = unwanted, 1 = wanted.
    pub log_prior: [f64; 2],
    pub mean: [Vec<f64>; 2],
    pub variance: [Vec<f64>; 2],
}

fn class_id(label: InteractionLabel) -> usize {
    match label {
        InteractionLabel::Unwanted => 0,
        InteractionLabel::Wanted => 1,
    }
}

impl GaussianNb {
    pub fn fit(x: &[Vec<f64>], y: &[InteractionLabel]) -> Result<GaussianNb> {
        let cols = x.first().map_or(0, Vec::len);
        let mut counts = [0usize; 2];
        let mut mean = [vec![0.0; cols], vec![0.0; cols]];
        for (row, &label) in x.iter().zip(y) {
            let c = class_id(label);
            counts[c] += 1;
            for (m, v) in mean[c].iter_mut().zip(row) {
                *m += v;
            }
        }
        if counts[0] == 0 || counts[1] == 0 {
            return Err(Error::DegenerateData(
                "naive_bayes needs both classes".to_string(),
            ));
        }
        for c in 0..2 {
            for m in &mut mean[c] {
                *m /= counts[c] as f64;
            }
        }
        let mut variance = [vec![0.0; cols], vec![0.0; cols]];
        for (row, &label) in x.iter().zip(y) {
            let c = class_id(label);
            for ((s, v), m) in variance[c].iter_mut().zip(row).zip(&mean[c]) {
                *s += (v - m) * (v - m);
            }
        }
        for c in 0..2 {
            for s in &mut variance[c] {
                *s = (*s / counts[c] as f64).max(VARIANCE_FLOOR);
            }
        }
        let total = (counts[0] + counts[1]) as f64;
        Ok(GaussianNb {
            log_prior: [
                (counts[0] as f64 / total).ln(),
                (counts[1] as f64 / total).ln(),
            ],
            mean,
            variance,
        })
    }

    fn log_likelihood(&self, class: usize, row: &[f64]) -> f64 {
        let mut total = self.log_prior[class];
        for ((v, m), var) in row.iter().zip(&self.mean[class]).zip(&self.variance[class]) {
            let d = v - m;
            total += -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + d * d / var);
        }
        total
    }

    /// Posterior probability of `unwanted`, normalized via log-sum-exp.
    pub fn score(&self, row: &[f64]) -> f64 {
        let lu = self.log_likelihood(0, row);
        let lw = self.log_likelihood(1, row);
        let max = lu.max(lw);
        let eu = (lu - max).exp();
        let ew = (lw - max).exp();
        eu / (eu + ew)
    }
}
