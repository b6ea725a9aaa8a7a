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

//! CSV reports for evaluation runs.

use std::fmt::Write as _;

use cloudsort_core::evaluation::{class_metrics, ClassMetrics, ConfusionMatrix, EvalError};
use thiserror::Error;

use crate::numfmt::format_sig;

pub const METRIC_DIGITS: usize = 9;
pub const CONFUSION_CORNER: &str = "actual\\predicted";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("confusion csv line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// Header row and first column list the classes; rows are actual classes.
pub fn confusion_csv(cm: &ConfusionMatrix) -> String {
    let mut out = String::from(CONFUSION_CORNER);
    for c in &cm.classes {
        let _ = write!(out, ",{c}");
    }
    out.push('\n');
    for (c, row) in cm.classes.iter().zip(&cm.counts) {
        out.push_str(c);
        for n in row {
            let _ = write!(out, ",{n}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_confusion_csv(text: &str) -> Result<ConfusionMatrix, ReportError> {
    let bad = |line: usize, reason: &str| ReportError::Malformed {
        line,
        reason: reason.into(),
    };
    let mut lines = text.lines().filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| bad(1, "empty"))?;
    let classes: Vec<String> = header.split(',').skip(1).map(str::to_string).collect();
    let mut counts = Vec::with_capacity(classes.len());
    for (i, line) in lines.enumerate() {
        let mut cells = line.split(',');
        if cells.next() != classes.get(i).map(String::as_str) {
            return Err(bad(i + 2, "row label does not match header order"));
        }
        let row: Vec<u64> = cells
            .map(|c| c.parse().map_err(|_| bad(i + 2, "bad count")))
            .collect::<Result<_, _>>()?;
        if row.len() != classes.len() {
            return Err(bad(i + 2, "wrong number of cells"));
        }
        counts.push(row);
    }
    if counts.len() != classes.len() {
        return Err(bad(counts.len() + 2, "row count differs from class count"));
    }
    Ok(ConfusionMatrix::from_counts(classes, counts))
}

pub fn metric_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format_sig(x, METRIC_DIGITS))
}

pub fn all_metrics(cm: &ConfusionMatrix) -> Result<Vec<(String, ClassMetrics)>, EvalError> {
    cm.classes
        .iter()
        .map(|c| class_metrics(cm, c).map(|m| (c.clone(), m)))
        .collect()
}

/// `class,recall,precision,f1`, with undefined ratios as `n/a`.
pub fn metrics_csv(cm: &ConfusionMatrix) -> Result<String, EvalError> {
    let mut out = String::from("class,recall,precision,f1\n");
    for (c, m) in all_metrics(cm)? {
        let _ = writeln!(
            out,
            "{c},{},{},{}",
            metric_cell(m.recall),
            metric_cell(m.precision),
            metric_cell(m.f1)
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cloudsort_core::evaluation::confusion;

    #[test]
    fn hand_computed_three_class() {
        let actual = ["a", "a", "a", "b", "b", "c"];
        let predicted = ["a", "a", "b", "b", "c", "a"];
        let classes = ["a", "b", "c"];
        let cm = confusion(&actual, &predicted, &classes).unwrap();
        assert_eq!(
            confusion_csv(&cm),
            "actual\\predicted,a,b,c\na,2,1,0\nb,0,1,1\nc,1,0,0\n"
        );
        // a: tp 2, fn 1, fp 1 -> r = p = f1 = 2/3
        // b: tp 1, fn 1, fp 1 -> 1/2
        // c: tp 0, fn 1, fp 1 -> 0, 0, undefined f1
        assert_eq!(
            metrics_csv(&cm).unwrap(),
            "class,recall,precision,f1\na,0.666666667,0.666666667,0.666666667\nb,0.5,0.5,0.5\nc,0,0,n/a\n"
        );
        assert_eq!(parse_confusion_csv(&confusion_csv(&cm)).unwrap(), cm);
    }

    #[test]
    fn absent_class_is_na() {
        let classes = ["a", "b"];
        let cm = confusion(&["a"], &["a"], &classes).unwrap();
        assert!(metrics_csv(&cm).unwrap().ends_with("b,n/a,n/a,n/a\n"));
    }
}
