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

//! ASCII PCD reader and writer for XYZ + RGB clouds.
//!
//! Header lines, in order: `VERSION`, `FIELDS`, `SIZE`, `TYPE`, `COUNT`,
//! `WIDTH`, `HEIGHT`, `VIEWPOINT` (optional), `POINTS`, `DATA`. Lines starting
//! with `#` are comments. The `rgb` field may be stored as an unsigned
//! integer `0x00RRGGBB` (`TYPE U`) or as a float whose bit pattern is that
//! integer (`TYPE F`); this writer always emits the integer form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cloudsort_core::{ColorPoint, ColorPointCloud, Rgb, Vec3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PcdError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported encoding: DATA {0}")]
    UnsupportedEncoding(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("unsupported layout: {0}")]
    UnsupportedLayout(String),
    #[error("malformed data at line {line}: {reason}")]
    MalformedData { line: usize, reason: String },
}

/// A parsed file and the number of rows dropped for non-finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedPcd {
    pub cloud: ColorPointCloud,
    pub skipped_nonfinite: usize,
}

const HEADER_KEYS: [&str; 10] = [
    "VERSION",
    "FIELDS",
    "SIZE",
    "TYPE",
    "COUNT",
    "WIDTH",
    "HEIGHT",
    "VIEWPOINT",
    "POINTS",
    "DATA",
];

pub fn load_pcd(path: impl AsRef<Path>) -> Result<LoadedPcd, PcdError> {
    parse_pcd(&fs::read_to_string(path)?)
}

#[derive(Clone, Copy)]
enum ColorEncoding {
    Float,
    Unsigned,
}

pub fn parse_pcd(text: &str) -> Result<LoadedPcd, PcdError> {
    let mut header: [Option<Vec<&str>>; 10] = Default::default();
    let mut last_key = None::<usize>;
    let mut lines = text.lines().enumerate();

    for (_, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let key = tokens.next().unwrap_or_default();
        let slot = HEADER_KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| PcdError::MalformedHeader(format!("unexpected line {line:?}")))?;
        if header[slot].is_some() {
            return Err(PcdError::MalformedHeader(format!("duplicate {key}")));
        }
        if last_key.is_some_and(|prev| prev > slot) {
            return Err(PcdError::MalformedHeader(format!("{key} out of order")));
        }
        header[slot] = Some(tokens.collect());
        last_key = Some(slot);
        if key == "DATA" {
            break;
        }
    }

    let take = |i: usize| -> Result<&Vec<&str>, PcdError> {
        header[i]
            .as_ref()
            .ok_or_else(|| PcdError::MalformedHeader(format!("missing {}", HEADER_KEYS[i])))
    };
    let single_usize = |i: usize| -> Result<usize, PcdError> {
        match take(i)?.as_slice() {
            [v] => v
                .parse()
                .map_err(|_| PcdError::MalformedHeader(format!("bad {} value {v:?}", HEADER_KEYS[i]))),
            _ => Err(PcdError::MalformedHeader(format!("{} takes one value", HEADER_KEYS[i]))),
        }
    };

    take(0)?;
    let fields = take(1)?;
    let sizes = take(2)?;
    let types = take(3)?;
    let counts = take(4)?;
    let width = single_usize(5)?;
    let height = single_usize(6)?;
    let points = single_usize(8)?;
    let data = take(9)?;

    match data.as_slice() {
        ["ascii"] => {}
        other => return Err(PcdError::UnsupportedEncoding(other.join(" "))),
    }
    if height != 1 {
        return Err(PcdError::UnsupportedLayout(format!(
            "HEIGHT {height}, only unorganized clouds are supported"
        )));
    }
    if width * height != points {
        return Err(PcdError::MalformedHeader(format!(
            "WIDTH*HEIGHT = {} but POINTS = {points}",
            width * height
        )));
    }
    if sizes.len() != fields.len() || types.len() != fields.len() || counts.len() != fields.len() {
        return Err(PcdError::FieldMismatch(
            "SIZE/TYPE/COUNT lengths differ from FIELDS".into(),
        ));
    }
    if counts.iter().any(|c| *c != "1") {
        return Err(PcdError::FieldMismatch("only COUNT 1 fields are supported".into()));
    }
    let column = |name: &str| fields.iter().position(|f| *f == name);
    let (Some(cx), Some(cy), Some(cz)) = (column("x"), column("y"), column("z")) else {
        return Err(PcdError::FieldMismatch(format!(
            "FIELDS {} lacks x y z",
            fields.join(" ")
        )));
    };
    for c in [cx, cy, cz] {
        if types[c] != "F" {
            return Err(PcdError::FieldMismatch(format!("{} must be TYPE F", fields[c])));
        }
    }
    let color = match column("rgb").or_else(|| column("rgba")) {
        None => None,
        Some(c) => match types[c] {
            "F" => Some((c, ColorEncoding::Float)),
            "U" | "I" => Some((c, ColorEncoding::Unsigned)),
            t => return Err(PcdError::FieldMismatch(format!("rgb has unsupported TYPE {t}"))),
        },
    };

    let viewpoint = match &header[7] {
        None => Vec3::ZERO,
        Some(v) => {
            let nums: Result<Vec<f64>, _> = v.iter().map(|t| t.parse::<f64>()).collect();
            match nums {
                Ok(n) if n.len() == 7 => Vec3::new(n[0], n[1], n[2]),
                _ => return Err(PcdError::MalformedHeader("VIEWPOINT needs 7 numbers".into())),
            }
        }
    };

    let mut cloud = ColorPointCloud::with_viewpoint(Vec::with_capacity(points), viewpoint);
    let mut skipped = 0;
    let mut rows = 0;
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let line_no = lineno + 1;
        if rows == points {
            return Err(PcdError::MalformedData {
                line: line_no,
                reason: format!("more than POINTS = {points} rows"),
            });
        }
        rows += 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != fields.len() {
            return Err(PcdError::MalformedData {
                line: line_no,
                reason: format!("{} values for {} fields", tokens.len(), fields.len()),
            });
        }
        let coord = |c: usize| {
            tokens[c]
                .parse::<f32>()
                .map(f64::from)
                .map_err(|_| PcdError::MalformedData {
                    line: line_no,
                    reason: format!("bad number {:?}", tokens[c]),
                })
        };
        let pos = Vec3::new(coord(cx)?, coord(cy)?, coord(cz)?);
        let rgb = match color {
            None => Rgb::default(),
            Some((c, encoding)) => {
                let bad = || PcdError::MalformedData {
                    line: line_no,
                    reason: format!("bad rgb {:?}", tokens[c]),
                };
                let packed = match encoding {
                    ColorEncoding::Float => tokens[c].parse::<f32>().map_err(|_| bad())?.to_bits(),
                    ColorEncoding::Unsigned => tokens[c].parse::<u32>().map_err(|_| bad())?,
                };
                Rgb::from_packed(packed)
            }
        };
        if !pos.is_finite() {
            skipped += 1;
            continue;
        }
        cloud.points.push(ColorPoint {
            position: pos,
            color: rgb,
        });
    }
    if rows != points {
        return Err(PcdError::MalformedData {
            line: text.lines().count(),
            reason: format!("expected {points} rows, found {rows}"),
        });
    }
    Ok(LoadedPcd {
        cloud,
        skipped_nonfinite: skipped,
    })
}

/// Serializes with `TYPE F F F U`; coordinates are written as 32-bit floats.
pub fn write_pcd(cloud: &ColorPointCloud) -> String {
    let n = cloud.len();
    let vp = cloud.sensor_viewpoint;
    let mut out = String::with_capacity(64 * (n + 4));
    out.push_str("VERSION .7\nFIELDS x y z rgb\nSIZE 4 4 4 4\nTYPE F F F U\nCOUNT 1 1 1 1\n");
    let _ = writeln!(out, "WIDTH {n}\nHEIGHT 1");
    let _ = writeln!(out, "VIEWPOINT {} {} {} 1 0 0 0", vp.x, vp.y, vp.z);
    let _ = writeln!(out, "POINTS {n}\nDATA ascii");
    for p in &cloud.points {
        let q = p.position;
        let _ = writeln!(out, "{} {} {} {}", q.x as f32, q.y as f32, q.z as f32, p.color.packed());
    }
    out
}

pub fn save_pcd(cloud: &ColorPointCloud, path: impl AsRef<Path>) -> Result<(), PcdError> {
    fs::write(path, write_pcd(cloud))?;
    Ok(())
}
