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

//! Small text configuration files: D-H tables, label-to-bin maps and
//! segmentation settings, plus the comma-separated vector syntax used by
//! command-line flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cloudsort_core::kinematics::{DhParameters, JointConfig};
use cloudsort_core::segmentation::SegmentationConfig;
use cloudsort_core::Vec3;
use thiserror::Error;

use crate::numfmt::format_sig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("{0}")]
    Invalid(String),
}

fn malformed(line: usize, reason: impl Into<String>) -> ConfigError {
    ConfigError::Malformed {
        line,
        reason: reason.into(),
    }
}

/// Meaningful lines with their 1-based numbers; `#` starts a comment.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// Parses `a,b,c,...` with exactly `N` finite components.
pub fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], ConfigError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(ConfigError::Invalid(format!(
            "expected {N} comma-separated numbers, got {s:?}"
        )));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| ConfigError::Invalid(format!("bad number {p:?} in {s:?}")))?;
    }
    Ok(out)
}

pub fn parse_vec3(s: &str) -> Result<Vec3, ConfigError> {
    parse_list::<3>(s).map(Vec3::from)
}

pub fn parse_joints(s: &str) -> Result<JointConfig, ConfigError> {
    parse_list::<6>(s).map(JointConfig::new)
}

/// Six `a d alpha` rows, meters and radians.
pub fn parse_dh_table(text: &str) -> Result<DhParameters, ConfigError> {
    let mut rows = Vec::with_capacity(6);
    for (n, line) in content_lines(text) {
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<_>>()
            .ok_or_else(|| malformed(n, "expected three finite numbers"))?;
        let row: [f64; 3] = vals.try_into().map_err(|_| malformed(n, "expected `a d alpha`"))?;
        rows.push(row);
    }
    let rows: [[f64; 3]; 6] = rows
        .try_into()
        .map_err(|r: Vec<_>| ConfigError::Invalid(format!("D-H table needs 6 rows, found {}", r.len())))?;
    Ok(DhParameters::from_rows(rows))
}

pub fn load_dh_table(path: impl AsRef<Path>) -> Result<DhParameters, ConfigError> {
    parse_dh_table(&fs::read_to_string(path)?)
}

pub fn write_dh_table(dh: &DhParameters) -> String {
    let mut out = String::from("# a d alpha\n");
    for i in 0..6 {
        let _ = writeln!(
            out,
            "{} {} {}",
            format_sig(dh.a[i], 17),
            format_sig(dh.d[i], 17),
            format_sig(dh.alpha[i], 17)
        );
    }
    out
}

/// `label -> bin_name` lines.
pub fn parse_bin_map(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (n, line) in content_lines(text) {
        let (label, bin) = line
            .split_once("->")
            .ok_or_else(|| malformed(n, "expected `label -> bin_name`"))?;
        let (label, bin) = (label.trim(), bin.trim());
        if label.is_empty() || bin.is_empty() {
            return Err(malformed(n, "empty label or bin name"));
        }
        if map.insert(label.to_string(), bin.to_string()).is_some() {
            return Err(malformed(n, format!("label {label:?} mapped twice")));
        }
    }
    Ok(map)
}

pub fn load_bin_map(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>, ConfigError> {
    parse_bin_map(&fs::read_to_string(path)?)
}

fn vec3_text(v: Vec3) -> String {
    format!(
        "{},{},{}",
        format_sig(v.x, 17),
        format_sig(v.y, 17),
        format_sig(v.z, 17)
    )
}

/// Flat `key=value` form; keys match the command-line flag names.
pub fn write_segmentation_config(c: &SegmentationConfig) -> String {
    format!(
        "crop-min={}\ncrop-max={}\nransac-threshold={}\nransac-iters={}\ncluster-dist={}\ncluster-min={}\ncluster-max={}\nseed={}\n",
        vec3_text(c.crop_min),
        vec3_text(c.crop_max),
        format_sig(c.ransac_threshold, 17),
        c.ransac_iterations,
        format_sig(c.cluster_distance, 17),
        c.cluster_min_size,
        c.cluster_max_size,
        c.rng_seed
    )
}

/// Unlisted keys keep their defaults.
pub fn parse_segmentation_config(text: &str) -> Result<SegmentationConfig, ConfigError> {
    let mut c = SegmentationConfig::default();
    for (n, line) in content_lines(text) {
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| malformed(n, "expected key=value"))?;
        let bad = |_| malformed(n, format!("bad value for {key}"));
        match key {
            "crop-min" => c.crop_min = parse_vec3(value).map_err(|e| malformed(n, e.to_string()))?,
            "crop-max" => c.crop_max = parse_vec3(value).map_err(|e| malformed(n, e.to_string()))?,
            "ransac-threshold" => {
                c.ransac_threshold = value
                    .parse()
                    .map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?
            }
            "ransac-iters" => {
                c.ransac_iterations = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?
            }
            "cluster-dist" => {
                c.cluster_distance = value
                    .parse()
                    .map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?
            }
            "cluster-min" => {
                c.cluster_min_size = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?
            }
            "cluster-max" => {
                c.cluster_max_size = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?
            }
            "seed" => c.rng_seed = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            _ => return Err(malformed(n, format!("unknown key {key:?}"))),
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dh_round_trip() {
        let dh = DhParameters::ur5();
        assert_eq!(parse_dh_table(&write_dh_table(&dh)).unwrap(), dh);
        assert!(parse_dh_table("0 0 0\n").is_err());
        assert!(parse_dh_table("0 0\n0 0 0\n0 0 0\n0 0 0\n0 0 0\n0 0 0\n").is_err());
    }

    #[test]
    fn bin_map_lines() {
        let m = parse_bin_map("# bins\nred_sphere -> bin_a\n green_box->bin_b # trailing\n").unwrap();
        assert_eq!(m["red_sphere"], "bin_a");
        assert_eq!(m["green_box"], "bin_b");
        assert!(parse_bin_map("a -> x\na -> y\n").is_err());
        assert!(parse_bin_map("a x\n").is_err());
    }

    #[test]
    fn segmentation_config_round_trip() {
        let c = SegmentationConfig {
            crop_min: Vec3::new(-0.5, -0.25, -0.1),
            ransac_threshold: 0.0075,
            rng_seed: 42,
            ..SegmentationConfig::default()
        };
        assert_eq!(parse_segmentation_config(&write_segmentation_config(&c)).unwrap(), c);
        assert!(parse_segmentation_config("bogus=1").is_err());
    }

    #[test]
    fn flag_lists() {
        assert_eq!(parse_vec3("1, 2,3").unwrap(), Vec3::new(1.0, 2.0, 3.0));
        assert!(parse_vec3("1,2").is_err());
        assert!(parse_joints("0,0,0,0,0,nan").is_err());
    }
}
