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

//! Text serialization of [`ClassifierModel`]:
//!
//! ```text
//! cloudsort-svm v1
//! dim <d>
//! classes <c1> <c2> ...
//! mean <d values>
//! std <d values>
//! w <class> <d values> <bias>      (one line per class)
//! ```
//!
//! Numbers carry 12 significant digits. Trained models are already rounded
//! to that precision, so a written model reads back bit-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cloudsort_core::classifier::{ClassifierModel, MODEL_DIGITS};
use thiserror::Error;

use crate::descriptor_file::valid_label;
use crate::numfmt::format_sig;

pub const MODEL_MAGIC: &str = "cloudsort-svm v1";

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed model: {0}")]
    MalformedModel(String),
}

fn push_values(out: &mut String, values: &[f64]) {
    for v in values {
        let _ = write!(out, " {}", format_sig(*v, MODEL_DIGITS));
    }
}

pub fn write_model(model: &ClassifierModel) -> Result<String, ModelFileError> {
    model
        .validate()
        .map_err(|e| ModelFileError::MalformedModel(e.to_string()))?;
    if let Some(bad) = model.class_index.iter().find(|c| !valid_label(c)) {
        return Err(ModelFileError::MalformedModel(format!(
            "class name {bad:?} has whitespace"
        )));
    }
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_MAGIC}");
    let _ = writeln!(out, "dim {}", model.dim());
    let _ = writeln!(out, "classes {}", model.class_index.join(" "));
    out.push_str("mean");
    push_values(&mut out, &model.mean);
    out.push_str("\nstd");
    push_values(&mut out, &model.std);
    out.push('\n');
    for ((class, w), b) in model.class_index.iter().zip(&model.weights).zip(&model.biases) {
        let _ = write!(out, "w {class}");
        push_values(&mut out, w);
        push_values(&mut out, &[*b]);
        out.push('\n');
    }
    Ok(out)
}

pub fn save_model(model: &ClassifierModel, path: impl AsRef<Path>) -> Result<(), ModelFileError> {
    fs::write(path, write_model(model)?)?;
    Ok(())
}

pub fn parse_model(text: &str) -> Result<ClassifierModel, ModelFileError> {
    let bad = |m: &str| ModelFileError::MalformedModel(m.to_string());
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(MODEL_MAGIC) {
        return Err(bad("missing cloudsort-svm v1 header"));
    }
    let mut field = |key: &str| -> Result<Vec<String>, ModelFileError> {
        let line = lines.next().ok_or_else(|| bad(&format!("missing {key} line")))?;
        let mut t = line.split_whitespace();
        if t.next() != Some(key) {
            return Err(bad(&format!("expected {key} line")));
        }
        Ok(t.map(str::to_string).collect())
    };
    let numbers = |tokens: &[String]| -> Result<Vec<f64>, ModelFileError> {
        tokens
            .iter()
            .map(|t| t.parse::<f64>().map_err(|_| bad(&format!("bad number {t:?}"))))
            .collect()
    };

    let dim = match field("dim")?.as_slice() {
        [d] => d.parse::<usize>().map_err(|_| bad("bad dim"))?,
        _ => return Err(bad("dim takes one value")),
    };
    let classes = field("classes")?;
    let mean = numbers(&field("mean")?)?;
    let std = numbers(&field("std")?)?;
    let mut weights = Vec::with_capacity(classes.len());
    let mut biases = Vec::with_capacity(classes.len());
    for class in &classes {
        let row = field("w")?;
        if row.first() != Some(class) {
            return Err(bad(&format!("expected weights for class {class}")));
        }
        let mut values = numbers(&row[1..])?;
        if values.len() != dim + 1 {
            return Err(bad(&format!(
                "class {class} has {} values, expected {}",
                values.len(),
                dim + 1
            )));
        }
        biases.push(values.pop().unwrap_or_default());
        weights.push(values);
    }
    if lines.next().is_some() {
        return Err(bad("trailing content"));
    }
    if mean.len() != dim || std.len() != dim {
        return Err(bad("mean/std length differs from dim"));
    }
    let model = ClassifierModel {
        class_index: classes,
        mean,
        std,
        weights,
        biases,
        config: None,
    };
    model
        .validate()
        .map_err(|e| ModelFileError::MalformedModel(e.to_string()))?;
    Ok(model)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ClassifierModel, ModelFileError> {
    parse_model(&fs::read_to_string(path)?)
}
