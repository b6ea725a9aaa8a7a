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

//! Training-file format: one descriptor per line,
//! `<label> <kind> <v0> <v1> ... <vN-1>`, values with 9 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use cloudsort_core::classifier::{ClassifierError, TrainingSet};
use cloudsort_core::descriptor::{Descriptor, DescriptorKind};
use thiserror::Error;

use crate::numfmt::format_sig;

pub const DESCRIPTOR_DIGITS: usize = 9;

#[derive(Debug, Error)]
pub enum DescriptorFileError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("label {0:?} must be non-empty and contain no whitespace")]
    InvalidLabel(String),
    #[error(transparent)]
    Training(#[from] ClassifierError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDescriptor {
    pub label: String,
    pub descriptor: Descriptor,
}

pub fn valid_label(label: &str) -> bool {
    !label.is_empty() && !label.chars().any(char::is_whitespace)
}

pub fn format_line(label: &str, descriptor: &Descriptor) -> Result<String, DescriptorFileError> {
    if !valid_label(label) {
        return Err(DescriptorFileError::InvalidLabel(label.into()));
    }
    let mut line = format!("{label} {}", descriptor.kind);
    for v in &descriptor.values {
        let _ = write!(line, " {}", format_sig(*v, DESCRIPTOR_DIGITS));
    }
    Ok(line)
}

pub fn parse_descriptors(text: &str) -> Result<Vec<LabeledDescriptor>, DescriptorFileError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |reason: String| DescriptorFileError::Malformed { line: i + 1, reason };
        let mut tokens = line.split_whitespace();
        let label = tokens.next().unwrap_or_default();
        let kind: DescriptorKind = tokens
            .next()
            .ok_or_else(|| malformed("missing descriptor kind".into()))?
            .parse()
            .map_err(|e| malformed(format!("{e}")))?;
        let values: Vec<f64> = tokens
            .map(|t| t.parse::<f64>().map_err(|_| malformed(format!("bad value {t:?}"))))
            .collect::<Result<_, _>>()?;
        if values.len() != kind.len() {
            return Err(malformed(format!(
                "{kind} needs {} values, found {}",
                kind.len(),
                values.len()
            )));
        }
        out.push(LabeledDescriptor {
            label: label.to_string(),
            descriptor: Descriptor { kind, values },
        });
    }
    Ok(out)
}

pub fn load_descriptors(path: impl AsRef<Path>) -> Result<Vec<LabeledDescriptor>, DescriptorFileError> {
    parse_descriptors(&fs::read_to_string(path)?)
}

/// Appends lines to `path`, creating it if needed.
pub fn append_descriptors(path: impl AsRef<Path>, lines: &[String]) -> Result<(), DescriptorFileError> {
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    for l in lines {
        writeln!(f, "{l}")?;
    }
    Ok(())
}

pub fn to_training_set(items: &[LabeledDescriptor]) -> Result<TrainingSet, DescriptorFileError> {
    Ok(TrainingSet::new(
        items.iter().map(|d| d.descriptor.values.clone()).collect(),
        items.iter().map(|d| d.label.clone()).collect(),
    )?)
}
