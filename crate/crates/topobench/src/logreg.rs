//! From-scratch L2-regularized logistic regression, trained by deterministic
//! full-batch gradient descent on standardized features.
//!
//! Inputs stay sparse: standardization is folded into the score algebra
//! instead of densifying the data. With z_j = (x_j - mu_j) / sd_j,
//!
//!   score(x) = sum_j w_j z_j + b
//!            = sum_{j in nnz(x)} w_j x_j / sd_j - sum_j w_j mu_j / sd_j + b
//!
//! so one scalar correction per weight update covers all the implicit zeros.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrainError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("feature/label length mismatch: {x} vs {y}")]
    LengthMismatch { x: usize, y: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegHyper {
    pub l2: f64,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for LogRegHyper {
    fn default() -> Self {
        LogRegHyper {
            l2: 1e-4,
            learning_rate: 0.5,
            epochs: 500,
        }
    }
}

/// Per-feature standardization statistics fitted on the training set.
/// Constant features get sd 1 so they standardize to exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[FeatureVector], dim: usize) -> Self {
        let n = x.len().max(1) as f64;
        let mut mean = vec![0.0; dim];
        for fv in x {
            for (j, v) in fv.iter() {
                mean[j as usize] += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; dim];
        let mut nnz = vec![0usize; dim];
        for fv in x {
            for (j, v) in fv.iter() {
                let j = j as usize;
                var[j] += (v - mean[j]) * (v - mean[j]);
                nnz[j] += 1;
            }
        }
        // implicit zeros contribute (0 - mean)^2 each
        let sd = var
            .iter()
            .zip(&nnz)
            .zip(&mean)
            .map(|((&v, &k), &m)| {
                let total = v + (x.len() - k) as f64 * m * m;
                let s = (total / n).sqrt();
                if s < 1e-12 {
                    1.0
                } else {
                    s
                }
            })
            .collect();
        Standardizer { mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub standardizer: Standardizer,
    pub hyper: LogRegHyper,
    /// Set when training saw a single class; the model then predicts that
    /// class unconditionally.
    pub constant_class: Option<u8>,
}

impl LinearModel {
    /// Raw decision score (log-odds) for one sparse vector.
    pub fn score(&self, x: &FeatureVector) -> f64 {
        let mut s = self.bias;
        for (j, v) in x.iter() {
            let j = j as usize;
            s += self.weights[j] * v / self.standardizer.sd[j];
        }
        for (j, &w) in self.weights.iter().enumerate() {
            s -= w * self.standardizer.mean[j] / self.standardizer.sd[j];
        }
        s
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> f64 {
        match self.constant_class {
            Some(0) => 0.0,
            Some(_) => 1.0,
            None => sigmoid(self.score(x)),
        }
    }

    pub fn predict(&self, x: &FeatureVector) -> u8 {
        match self.constant_class {
            Some(c) => c,
            None => u8::from(self.score(x) >= 0.0),
        }
    }
}

fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable binary cross-entropy of a raw score against a 0/1
/// label: max(s, 0) - s*y + ln(1 + exp(-|s|)).
fn bce(score: f64, y: f64) -> f64 {
    score.max(0.0) - score * y + (-score.abs()).exp().ln_1p()
}

/// Mean cross-entropy plus (l2/2)·||w||² on standardized features. The bias
/// is not regularized. Public so tests can difference it against the
/// analytic gradient.
pub fn regularized_loss(
    weights: &[f64],
    bias: f64,
    std: &Standardizer,
    x: &[FeatureVector],
    y: &[u8],
    l2: f64,
) -> f64 {
    let n = x.len() as f64;
    let correction: f64 = weights
        .iter()
        .enumerate()
        .map(|(j, w)| w * std.mean[j] / std.sd[j])
        .sum();
    let mut total = 0.0;
    for (fv, &label) in x.iter().zip(y) {
        let mut s = bias - correction;
        for (j, v) in fv.iter() {
            let j = j as usize;
            s += weights[j] * v / std.sd[j];
        }
        total += bce(s, f64::from(label));
    }
    total / n + 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Analytic gradient of `regularized_loss` in (weights, bias). Exposed for
/// the finite-difference oracle.
pub fn loss_gradient(
    weights: &[f64],
    bias: f64,
    std: &Standardizer,
    x: &[FeatureVector],
    y: &[u8],
    l2: f64,
) -> (Vec<f64>, f64) {
    let n = x.len() as f64;
    let dim = weights.len();
    let correction: f64 = weights
        .iter()
        .enumerate()
        .map(|(j, w)| w * std.mean[j] / std.sd[j])
        .sum();

    let mut grad_sparse = vec![0.0; dim]; // sum_i r_i * x_ij
    let mut residual_sum = 0.0; // sum_i r_i
    for (fv, &label) in x.iter().zip(y) {
        let mut s = bias - correction;
        for (j, v) in fv.iter() {
            s += weights[j as usize] * v / std.sd[j as usize];
        }
        let r = (sigmoid(s) - f64::from(label)) / n;
        residual_sum += r;
        for (j, v) in fv.iter() {
            grad_sparse[j as usize] += r * v;
        }
    }

    let grad_w: Vec<f64> = (0..dim)
        .map(|j| {
            grad_sparse[j] / std.sd[j] - std.mean[j] / std.sd[j] * residual_sum + l2 * weights[j]
        })
        .collect();
    (grad_w, residual_sum)
}

/// Full-batch gradient descent from zero initialization. Deterministic:
/// identical inputs give bit-identical weights.
pub fn train_logreg(
    x: &[FeatureVector],
    y: &[u8],
    dim: usize,
    hyper: &LogRegHyper,
) -> Result<LinearModel, TrainError> {
    if x.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    if x.len() != y.len() {
        return Err(TrainError::LengthMismatch { x: x.len(), y: y.len() });
    }

    let standardizer = Standardizer::fit(x, dim);
    let first = y[0];
    if y.iter().all(|&l| l == first) {
        return Ok(LinearModel {
            weights: vec![0.0; dim],
            bias: 0.0,
            standardizer,
            hyper: *hyper,
            constant_class: Some(first),
        });
    }

    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;
    for _ in 0..hyper.epochs {
        let (grad_w, grad_b) = loss_gradient(&weights, bias, &standardizer, x, y, hyper.l2);
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= hyper.learning_rate * g;
        }
        bias -= hyper.learning_rate * grad_b;
    }

    Ok(LinearModel {
        weights,
        bias,
        standardizer,
        hyper: *hyper,
        constant_class: None,
    })
}

/// Fraction of correct predictions.
pub fn accuracy(model: &LinearModel, x: &[FeatureVector], y: &[u8]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let correct = x
        .iter()
        .zip(y)
        .filter(|(fv, &label)| model.predict(fv) == label)
        .count();
    correct as f64 / x.len() as f64
}

/// Binary F1 with class 1 positive; zero when precision + recall is zero.
pub fn f1_score(model: &LinearModel, x: &[FeatureVector], y: &[u8]) -> f64 {
    let (mut tp, mut fp, mut fne) = (0.0, 0.0, 0.0);
    for (fv, &label) in x.iter().zip(y) {
        match (model.predict(fv), label) {
            (1, 1) => tp += 1.0,
            (1, 0) => fp += 1.0,
            (0, 1) => fne += 1.0,
            _ => {}
        }
    }
    if 2.0 * tp + fp + fne == 0.0 {
        0.0
    } else {
        2.0 * tp / (2.0 * tp + fp + fne)
    }
}
