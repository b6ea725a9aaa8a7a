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

//! Confusion matrices, one-vs-all recall / precision / F1, and the two
//! dataset split protocols (category level and alternating contiguous frames).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Number of contiguous pieces each video is cut into.
pub const PIECES_PER_VIDEO: usize = 3;
pub const VIDEOS_PER_INSTANCE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{actual} actual labels but {predicted} predictions")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("label {0:?} is not a known class")]
    UnknownLabel(String),
    #[error("category {category:?} has {available} frames, {needed} needed")]
    InsufficientFrames {
        category: String,
        available: usize,
        needed: usize,
    },
    #[error("instance {instance:?} has {found} videos, expected 3")]
    WrongVideoCount { instance: String, found: usize },
    #[error("cannot take {train} + {test} of {available} sub-sequences")]
    InvalidSplit {
        train: usize,
        test: usize,
        available: usize,
    },
}

/// Rows are actual classes, columns predicted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_counts(classes: Vec<String>, counts: Vec<Vec<u64>>) -> Self {
        ConfusionMatrix { classes, counts }
    }

    pub fn class_position(&self, label: &str) -> Result<usize, EvalError> {
        self.classes
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| EvalError::UnknownLabel(label.into()))
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    pub fn column_sum(&self, j: usize) -> u64 {
        self.counts.iter().map(|r| r[j]).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> Option<f64> {
        let total = self.total();
        let diag: u64 = (0..self.classes.len()).map(|i| self.counts[i][i]).sum();
        ratio(diag, total)
    }
}

pub fn confusion<S: AsRef<str>>(actual: &[S], predicted: &[S], classes: &[S]) -> Result<ConfusionMatrix, EvalError> {
    if actual.len() != predicted.len() {
        return Err(EvalError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    let mut cm = ConfusionMatrix {
        classes: classes.iter().map(|c| String::from(c.as_ref())).collect(),
        counts: vec![vec![0; classes.len()]; classes.len()],
    };
    for (a, p) in actual.iter().zip(predicted) {
        let i = cm.class_position(a.as_ref())?;
        let j = cm.class_position(p.as_ref())?;
        cm.counts[i][j] += 1;
    }
    Ok(cm)
}

/// One-vs-all metrics for a class. `None` marks a 0/0 ratio, which is
/// reported as "n/a" rather than 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub true_positives: u64,
    pub false_negatives: u64,
    pub false_positives: u64,
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub f1: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn class_metrics(cm: &ConfusionMatrix, class: &str) -> Result<ClassMetrics, EvalError> {
    let i = cm.class_position(class)?;
    let tp = cm.counts[i][i];
    let fneg = cm.row_sum(i) - tp;
    let fpos = cm.column_sum(i) - tp;
    let recall = ratio(tp, tp + fneg);
    let precision = ratio(tp, tp + fpos);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Ok(ClassMetrics {
        true_positives: tp,
        false_negatives: fneg,
        false_positives: fpos,
        recall,
        precision,
        f1,
    })
}

/// One frame of the dataset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DatasetRecord {
    pub path: String,
    pub category: String,
    pub instance: String,
    pub video: u32,
    pub frame: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatasetIndex {
    pub records: Vec<DatasetRecord>,
}

/// Record indices on each side of a split, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Per category, draws `train_count` then `test_count` records without
/// replacement.
pub fn split_category_level(
    index: &DatasetIndex,
    train_count: usize,
    test_count: usize,
    seed: u64,
) -> Result<Split, EvalError> {
    let mut by_category: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, r) in index.records.iter().enumerate() {
        by_category.entry(r.category.as_str()).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = Split::default();
    for (category, mut members) in by_category {
        let needed = train_count + test_count;
        if members.len() < needed {
            return Err(EvalError::InsufficientFrames {
                category: category.into(),
                available: members.len(),
                needed,
            });
        }
        // Frame order, so the draw depends only on the records.
        members.sort_by(|&a, &b| index.records[a].cmp(&index.records[b]));
        members.shuffle(&mut rng);
        split.train.extend_from_slice(&members[..train_count]);
        split.test.extend_from_slice(&members[train_count..needed]);
    }
    split.train.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}

/// Three contiguous pieces of a sequence of `len` frames; the last takes the
/// remainder.
pub fn contiguous_thirds(len: usize) -> [Range<usize>; PIECES_PER_VIDEO] {
    let third = len / PIECES_PER_VIDEO;
    [0..third, third..2 * third, 2 * third..len]
}

/// Cuts each of an instance's three videos into contiguous thirds (nine
/// sub-sequences) and assigns `train_seqs` of them to training and
/// `test_seqs` to testing, chosen per instance by a seeded shuffle.
pub fn split_alternating_contiguous(
    index: &DatasetIndex,
    train_seqs: usize,
    test_seqs: usize,
    seed: u64,
) -> Result<Split, EvalError> {
    let available = VIDEOS_PER_INSTANCE * PIECES_PER_VIDEO;
    if train_seqs + test_seqs > available {
        return Err(EvalError::InvalidSplit {
            train: train_seqs,
            test: test_seqs,
            available,
        });
    }
    let mut by_instance: BTreeMap<(&str, &str), BTreeMap<u32, Vec<usize>>> = BTreeMap::new();
    for (i, r) in index.records.iter().enumerate() {
        by_instance
            .entry((r.category.as_str(), r.instance.as_str()))
            .or_default()
            .entry(r.video)
            .or_default()
            .push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = Split::default();
    for ((_, instance), videos) in by_instance {
        if videos.len() != VIDEOS_PER_INSTANCE {
            return Err(EvalError::WrongVideoCount {
                instance: instance.into(),
                found: videos.len(),
            });
        }
        let mut pieces: Vec<Vec<usize>> = Vec::with_capacity(available);
        for (_, mut frames) in videos {
            frames.sort_by(|&a, &b| {
                index.records[a]
                    .frame
                    .cmp(&index.records[b].frame)
                    .then(index.records[a].path.cmp(&index.records[b].path))
            });
            for r in contiguous_thirds(frames.len()) {
                pieces.push(frames[r].to_vec());
            }
        }
        let mut order: Vec<usize> = (0..pieces.len()).collect();
        order.shuffle(&mut rng);
        for &p in &order[..train_seqs] {
            split.train.extend_from_slice(&pieces[p]);
        }
        for &p in &order[train_seqs..train_seqs + test_seqs] {
            split.test.extend_from_slice(&pieces[p]);
        }
    }
    split.train.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}
