// Copyright 2026 The cloudsort Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! One-vs-rest linear SVMs trained by stochastic subgradient descent.
//!
//! Features are standardized per dimension with statistics taken from the
//! training data and stored in the model; callers always pass raw vectors.
//! Each binary problem minimizes `λ/2 ‖w‖² + mean hinge loss` over the
//! standardized features augmented with a constant 1 (the bias), using step
//! `1/(λt)`, projection onto the `1/√λ` ball, and averaging of the iterates
//! from the second half of training.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Significant digits kept for every stored model parameter. A model written
/// with this many digits reads back bit-identical.
pub const MODEL_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifierError {
    #[error("training data has a single class {0:?}")]
    SingleClass(String),
    #[error("feature has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("{features} feature vectors but {labels} labels")]
    LabelCountMismatch { features: usize, labels: usize },
    #[error("invalid training parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("inconsistent model: {0}")]
    InvalidModel(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    /// Distinct labels in order of first appearance.
    pub class_index: Vec<String>,
}

impl TrainingSet {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self, ClassifierError> {
        if features.len() != labels.len() {
            return Err(ClassifierError::LabelCountMismatch {
                features: features.len(),
                labels: labels.len(),
            });
        }
        if features.is_empty() {
            return Err(ClassifierError::EmptyTrainingSet);
        }
        let dim = features[0].len();
        if let Some(bad) = features.iter().find(|f| f.len() != dim) {
            return Err(ClassifierError::DimensionMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        let mut class_index: Vec<String> = Vec::new();
        for l in &labels {
            if !class_index.contains(l) {
                class_index.push(l.clone());
            }
        }
        Ok(TrainingSet {
            features,
            labels,
            class_index,
        })
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda: 1e-4,
            epochs: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    pub class_index: Vec<String>,
    pub mean: Vec<f64>,
    /// Per-dimension divisor; dimensions constant in training store 1.
    pub std: Vec<f64>,
    /// One weight vector per class, aligned with `class_index`.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    /// Hyperparameters the model was trained with; `None` when the model was
    /// read back from a file, which does not record them.
    pub config: Option<TrainConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: String,
    pub class: usize,
    pub scores: Vec<f64>,
}

impl ClassifierModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Checks that every vector agrees on dimension and class count.
    pub fn validate(&self) -> Result<(), ClassifierError> {
        let d = self.mean.len();
        let c = self.class_index.len();
        if c == 0 {
            return Err(ClassifierError::InvalidModel("no classes"));
        }
        if self.std.len() != d || self.weights.iter().any(|w| w.len() != d) {
            return Err(ClassifierError::InvalidModel("dimension disagreement"));
        }
        if self.weights.len() != c || self.biases.len() != c {
            return Err(ClassifierError::InvalidModel("class count disagreement"));
        }
        if self.std.iter().any(|s| !(*s > 0.0)) {
            return Err(ClassifierError::InvalidModel("non-positive std"));
        }
        Ok(())
    }

    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    /// Argmax of the per-class scores; ties go to the earlier class.
    pub fn predict(&self, feature: &[f64]) -> Result<Prediction, ClassifierError> {
        if feature.len() != self.dim() {
            return Err(ClassifierError::DimensionMismatch {
                expected: self.dim(),
                got: feature.len(),
            });
        }
        let z = self.standardize(feature);
        let scores: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| dot(w, &z) + b)
            .collect();
        let mut best = 0;
        for (c, s) in scores.iter().enumerate() {
            if *s > scores[best] {
                best = c;
            }
        }
        Ok(Prediction {
            label: self.class_index[best].clone(),
            class: best,
            scores,
        })
    }
}

/// Free-function form of [`ClassifierModel::predict`].
pub fn predict(model: &ClassifierModel, feature: &[f64]) -> Result<Prediction, ClassifierError> {
    model.predict(feature)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rounds to [`MODEL_DIGITS`] significant digits.
pub fn quantize(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", MODEL_DIGITS - 1, x).parse().unwrap_or(x)
}

pub fn train(data: &TrainingSet, config: &TrainConfig) -> Result<ClassifierModel, ClassifierError> {
    if !(config.lambda > 0.0) {
        return Err(ClassifierError::InvalidParameter("lambda must be positive"));
    }
    if config.epochs == 0 {
        return Err(ClassifierError::InvalidParameter("epochs must be positive"));
    }
    if data.is_empty() {
        return Err(ClassifierError::EmptyTrainingSet);
    }
    let dim = data.dim();
    if let Some(bad) = data.features.iter().find(|f| f.len() != dim) {
        return Err(ClassifierError::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    if data.class_index.len() < 2 {
        return Err(ClassifierError::SingleClass(
            data.class_index.first().cloned().unwrap_or_default(),
        ));
    }

    let n = data.len() as f64;
    let mut mean = vec![0.0; dim];
    for f in &data.features {
        for (m, v) in mean.iter_mut().zip(f) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m = quantize(*m / n);
    }
    let mut std = vec![0.0; dim];
    for f in &data.features {
        for ((s, v), m) in std.iter_mut().zip(f).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    for s in &mut std {
        let q = quantize(libm::sqrt(*s / n));
        *s = if q > 0.0 { q } else { 1.0 };
    }

    // Standardized samples with the bias feature appended.
    let samples: Vec<Vec<f64>> = data
        .features
        .iter()
        .map(|f| {
            let mut z: Vec<f64> = f
                .iter()
                .zip(mean.iter().zip(&std))
                .map(|(v, (m, s))| (v - m) / s)
                .collect();
            z.push(1.0);
            z
        })
        .collect();
    let targets: Vec<usize> = data
        .labels
        .iter()
        .map(|l| data.class_index.iter().position(|c| c == l).unwrap_or(0))
        .collect();

    let mut weights = Vec::with_capacity(data.class_index.len());
    let mut biases = Vec::with_capacity(data.class_index.len());
    for class in 0..data.class_index.len() {
        let labels: Vec<f64> = targets.iter().map(|&t| if t == class { 1.0 } else { -1.0 }).collect();
        let mut w = pegasos(&samples, &labels, config);
        let b = w.pop().unwrap_or(0.0);
        weights.push(w.into_iter().map(quantize).collect::<Vec<_>>());
        biases.push(quantize(b));
    }

    Ok(ClassifierModel {
        class_index: data.class_index.clone(),
        mean,
        std,
        weights,
        biases,
        config: Some(*config),
    })
}

/// Binary problem. Every class replays the same seeded visiting order.
fn pegasos(samples: &[Vec<f64>], labels: &[f64], config: &TrainConfig) -> Vec<f64> {
    let dim = samples[0].len();
    // The trailing constant feature carries the bias: exempt from the
    // regularization shrink, but kept inside the projection ball.
    let bias = dim - 1;
    let lambda = config.lambda;
    let radius = 1.0 / libm::sqrt(lambda);
    let total = config.epochs * samples.len();
    let average_from = total / 2;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut w = vec![0.0; dim];
    let mut avg = vec![0.0; dim];
    let mut averaged = 0usize;
    let mut t = 0usize;

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let x = &samples[i];
            let y = labels[i];
            let margin = y * dot(&w, x);
            let shrink = 1.0 - 1.0 / t as f64;
            for wj in &mut w[..bias] {
                *wj *= shrink;
            }
            if margin < 1.0 {
                let step = eta * y;
                for (wj, xj) in w.iter_mut().zip(x) {
                    *wj += step * xj;
                }
            }
            let norm = libm::sqrt(dot(&w, &w));
            if norm > radius {
                let s = radius / norm;
                for wj in &mut w {
                    *wj *= s;
                }
            }
            if t > average_from {
                for (a, wj) in avg.iter_mut().zip(&w) {
                    *a += wj;
                }
                averaged += 1;
            }
        }
    }
    let k = averaged.max(1) as f64;
    avg.into_iter().map(|a| a / k).collect()
}

/// Fraction of each class's samples that the model labels correctly, in
/// `class_index` order. Classes absent from `data` report `None`.
pub fn per_class_accuracy(
    model: &ClassifierModel,
    data: &TrainingSet,
) -> Result<Vec<(String, Option<f64>)>, ClassifierError> {
    let mut hits = vec![0usize; model.class_index.len()];
    let mut seen = vec![0usize; model.class_index.len()];
    for (f, l) in data.features.iter().zip(&data.labels) {
        let p = model.predict(f)?;
        if let Some(c) = model.class_index.iter().position(|c| c == l) {
            seen[c] += 1;
            if p.class == c {
                hits[c] += 1;
            }
        }
    }
    Ok(model
        .class_index
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let acc = (seen[c] > 0).then(|| hits[c] as f64 / seen[c] as f64);
            (name.clone(), acc)
        })
        .collect())
}
