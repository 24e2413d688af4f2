//! Linear one-vs-rest classification over response features.
//!
//! Training is deterministic: features are standardized (per-dimension mean
//! and standard deviation from the training set, flat dimensions pinned to
//! std 1), then each class gets a binary L2-regularized hinge model fit by
//! full-batch subgradient descent with step size 1/(lambda * t). Updates
//! run in a fixed order from a zero start, so the same inputs always yield
//! the same weights; the seed travels with the hyperparameters as part of
//! the training record.
//!
//! The model keeps everything needed at inference in f64: per-class weights
//! and biases plus the standardization constants. Class identity is
//! positional; the filter bank that produced the features owns the names.

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmHyperparams {
    /// L2 regularization weight, must be positive.
    pub lambda: f64,
    /// Full passes of subgradient descent per class.
    pub epochs: usize,
    /// Recorded with the model so retraining can be reproduced exactly.
    pub seed: u64,
}

impl Default for SvmHyperparams {
    fn default() -> Self {
        SvmHyperparams {
            lambda: 1e-2,
            epochs: 2000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
    mean: Vec<f64>,
    std: Vec<f64>,
    hyperparams: SvmHyperparams,
}

impl SvmModel {
    pub fn from_parts(
        weights: Vec<Vec<f64>>,
        biases: Vec<f64>,
        mean: Vec<f64>,
        std: Vec<f64>,
        hyperparams: SvmHyperparams,
    ) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput("class weights"));
        }
        if weights.len() != biases.len() {
            return Err(Error::Alignment {
                left_name: "weights",
                left: weights.len(),
                right_name: "biases",
                right: biases.len(),
            });
        }
        let dim = mean.len();
        if std.len() != dim || weights.iter().any(|w| w.len() != dim) {
            return Err(Error::Dimension(format!(
                "model dimensions disagree: mean {}, std {}, weights {:?}",
                mean.len(),
                std.len(),
                weights.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        if std.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::Dimension(
                "standardization requires positive finite std".into(),
            ));
        }
        Ok(SvmModel {
            weights,
            biases,
            mean,
            std,
            hyperparams,
        })
    }

    pub fn classes(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    pub fn hyperparams(&self) -> SvmHyperparams {
        self.hyperparams
    }

    /// Per-class decision values for one feature vector.
    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Alignment {
                left_name: "feature length",
                left: x.len(),
                right_name: "model dimension",
                right: self.dim(),
            });
        }
        let standardized: Vec<f64> = x
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect();
        Ok(self
            .weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| dot(w, &standardized) + b)
            .collect())
    }

    /// Predicted class and the scores behind it; score ties break toward
    /// the lower class index.
    pub fn classify(&self, x: &[f64]) -> Result<(usize, Vec<f64>)> {
        let scores = self.scores(x)?;
        Ok((argmax(&scores), scores))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn argmax(scores: &[f64]) -> usize {
    let mut best = 0usize;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Regularized hinge objective on already-standardized samples; the descent
/// below minimizes this, and tests pit it against brute-force search.
pub fn hinge_objective(xs: &[Vec<f64>], ys_pm: &[f64], w: &[f64], b: f64, lambda: f64) -> f64 {
    let hinge: f64 = xs
        .iter()
        .zip(ys_pm)
        .map(|(x, y)| (1.0 - y * (dot(w, x) + b)).max(0.0))
        .sum::<f64>()
        / xs.len() as f64;
    0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>() + hinge
}

/// Subgradient of [`hinge_objective`] at (w, b); on margins exactly at 1 it
/// takes the active branch.
pub fn hinge_gradient(
    xs: &[Vec<f64>],
    ys_pm: &[f64],
    w: &[f64],
    b: f64,
    lambda: f64,
) -> (Vec<f64>, f64) {
    let count = xs.len() as f64;
    let mut grad_w: Vec<f64> = w.iter().map(|wi| lambda * wi).collect();
    let mut grad_b = 0.0f64;
    for (x, &y) in xs.iter().zip(ys_pm) {
        if y * (dot(w, x) + b) < 1.0 {
            for (g, xi) in grad_w.iter_mut().zip(x) {
                *g -= y * xi / count;
            }
            grad_b -= y / count;
        }
    }
    (grad_w, grad_b)
}

fn fit_binary(xs: &[Vec<f64>], ys_pm: &[f64], hp: SvmHyperparams) -> (Vec<f64>, f64) {
    let mut w = vec![0.0f64; xs[0].len()];
    let mut b = 0.0f64;
    for t in 1..=hp.epochs {
        let eta = 1.0 / (hp.lambda * t as f64);
        let (grad_w, grad_b) = hinge_gradient(xs, ys_pm, &w, b, hp.lambda);
        for (wi, g) in w.iter_mut().zip(&grad_w) {
            *wi -= eta * g;
        }
        b -= eta * grad_b;
    }
    (w, b)
}

/// Fits a one-vs-rest linear model. Labels must be dense class indices with
/// every class below `class_count` actually present, and at least two
/// classes overall.
pub fn train_svm(
    xs: &[Vec<f64>],
    ys: &[usize],
    class_count: usize,
    hp: SvmHyperparams,
) -> Result<SvmModel> {
    if xs.is_empty() {
        return Err(Error::EmptyInput("training samples"));
    }
    if xs.len() != ys.len() {
        return Err(Error::Alignment {
            left_name: "samples",
            left: xs.len(),
            right_name: "labels",
            right: ys.len(),
        });
    }
    if !(hp.lambda.is_finite() && hp.lambda > 0.0) || hp.epochs == 0 {
        return Err(Error::Dimension(format!(
            "hyperparameters out of range: lambda {}, epochs {}",
            hp.lambda, hp.epochs
        )));
    }
    let dim = xs[0].len();
    if dim == 0 || xs.iter().any(|x| x.len() != dim) {
        return Err(Error::Dimension(
            "training samples must share one nonzero length".into(),
        ));
    }
    if ys.iter().any(|&y| y >= class_count) {
        return Err(Error::Dimension(format!("label outside 0..{class_count}")));
    }
    let mut present = vec![false; class_count];
    for &y in ys {
        present[y] = true;
    }
    if class_count < 2 || present.iter().any(|&p| !p) {
        return Err(Error::DegenerateLabels);
    }

    let count = xs.len() as f64;
    let mut mean = vec![0.0f64; dim];
    for x in xs {
        for (m, v) in mean.iter_mut().zip(x) {
            *m += v / count;
        }
    }
    let mut std = vec![0.0f64; dim];
    for x in xs {
        for ((s, m), v) in std.iter_mut().zip(&mean).zip(x) {
            *s += (v - m) * (v - m) / count;
        }
    }
    for s in std.iter_mut() {
        *s = s.sqrt();
        if *s < 1e-12 {
            *s = 1.0;
        }
    }
    let standardized: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| {
            x.iter()
                .zip(mean.iter().zip(&std))
                .map(|(v, (m, s))| (v - m) / s)
                .collect()
        })
        .collect();

    let mut weights = Vec::with_capacity(class_count);
    let mut biases = Vec::with_capacity(class_count);
    for class in 0..class_count {
        let ys_pm: Vec<f64> = ys
            .iter()
            .map(|&y| if y == class { 1.0 } else { -1.0 })
            .collect();
        let (w, b) = fit_binary(&standardized, &ys_pm, hp);
        weights.push(w);
        biases.push(b);
    }
    SvmModel::from_parts(weights, biases, mean, std, hp)
}

/// PSR-vote classifier: each action scores the best PSR any of its filters
/// achieved, prediction is the top scorer (ties toward the lower action
/// index). The companion to the trained model when labeled training data is
/// too thin to fit one.
pub fn classify_peak_psr<T: Scalar>(
    features: &FeatureVector<T>,
    filter_to_action: &[usize],
    action_count: usize,
) -> Result<(usize, Vec<f64>)> {
    if features.blocks() != filter_to_action.len() {
        return Err(Error::Alignment {
            left_name: "feature blocks",
            left: features.blocks(),
            right_name: "bank filters",
            right: filter_to_action.len(),
        });
    }
    if action_count == 0 || filter_to_action.iter().any(|&a| a >= action_count) {
        return Err(Error::Dimension(format!(
            "filter maps outside 0..{action_count}"
        )));
    }
    let mut scores = vec![f64::NEG_INFINITY; action_count];
    for (block, &action) in filter_to_action.iter().enumerate() {
        for v in features.psr_block(block) {
            let v = v.as_f64();
            if v > scores[action] {
                scores[action] = v;
            }
        }
    }
    Ok((argmax(&scores), scores))
}
