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

use cloudsort_core::classifier::{train, ClassifierError, TrainConfig, TrainingSet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn standardized(features: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = features.len() as f64;
    let d = features[0].len();
    let mean: Vec<f64> = (0..d).map(|j| features.iter().map(|f| f[j]).sum::<f64>() / n).collect();
    let std: Vec<f64> = (0..d)
        .map(|j| {
            let s = (features.iter().map(|f| (f[j] - mean[j]).powi(2)).sum::<f64>() / n).sqrt();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    features
        .iter()
        .map(|f| f.iter().enumerate().map(|(j, v)| (v - mean[j]) / std[j]).collect())
        .collect()
}

/// Points labelled by a random hyperplane, thinned until every point is at
/// least `margin` from it in standardized coordinates.
fn separable(seed: u64, n: usize, d: usize, margin: f64) -> Option<TrainingSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let scale: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..10.0)).collect();
    let mut pts: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|j| rng.random_range(-1.0..1.0) * scale[j]).collect())
        .collect();
    let offset = rng.random_range(-0.3..0.3);
    for _ in 0..20 {
        let z = standardized(&pts);
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dist: Vec<f64> = z
            .iter()
            .map(|x| (x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + offset) / norm)
            .collect();
        if dist.iter().all(|v| v.abs() >= margin) {
            let labels: Vec<String> = dist
                .iter()
                .map(|v| if *v > 0.0 { "pos" } else { "neg" }.to_string())
                .collect();
            return TrainingSet::new(pts, labels).ok().filter(|t| t.class_index.len() == 2);
        }
        pts = pts
            .into_iter()
            .zip(dist)
            .filter(|(_, v)| v.abs() >= margin * 1.5)
            .map(|(p, _)| p)
            .collect();
        if pts.len() < 10 {
            return None;
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn separable_sets_are_fit_exactly(seed in any::<u64>(), n in 20usize..400, d in 1usize..8) {
        let Some(data) = separable(seed, n, d, 0.1) else { return Ok(()) };
        let model = train(&data, &TrainConfig::default()).unwrap();
        for (x, y) in data.features.iter().zip(&data.labels) {
            prop_assert_eq!(&model.predict(x).unwrap().label, y);
        }
    }

    #[test]
    fn training_is_deterministic(seed in any::<u64>(), train_seed in any::<u64>()) {
        let Some(data) = separable(seed, 60, 3, 0.05) else { return Ok(()) };
        let config = TrainConfig { seed: train_seed, epochs: 5, ..TrainConfig::default() };
        prop_assert_eq!(train(&data, &config).unwrap(), train(&data, &config).unwrap());
    }
}

#[test]
fn one_class_is_rejected() {
    let data = TrainingSet::new(vec![vec![1.0], vec![2.0]], vec!["a".into(), "a".into()]).unwrap();
    assert!(matches!(
        train(&data, &TrainConfig::default()),
        Err(ClassifierError::SingleClass(_))
    ));
}

#[test]
fn identical_features_still_train() {
    let data = TrainingSet::new(
        vec![vec![1.0, 1.0]; 4],
        vec!["a".into(), "b".into(), "a".into(), "b".into()],
    )
    .unwrap();
    let m = train(&data, &TrainConfig::default()).unwrap();
    assert_eq!(m.std, vec![1.0, 1.0]);
    assert!(m.predict(&[1.0, 1.0]).is_ok());
}

#[test]
fn wrong_dimension_is_rejected() {
    let data = TrainingSet::new(vec![vec![0.0], vec![1.0]], vec!["a".into(), "b".into()]).unwrap();
    let m = train(&data, &TrainConfig::default()).unwrap();
    assert!(matches!(
        m.predict(&[0.0, 1.0]),
        Err(ClassifierError::DimensionMismatch { expected: 1, got: 2 })
    ));
}
