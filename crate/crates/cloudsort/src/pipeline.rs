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

//! The simulated sorting sequence: segment the scene, describe and classify
//! each object, then plan a grasp at its centroid.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use cloudsort_core::classifier::ClassifierModel;
use cloudsort_core::descriptor::{describe, Descriptor, DescriptorError, DescriptorKind, RegionGrowingParams};
use cloudsort_core::kinematics::{
    forward_kinematics, grasp_target, inverse_kinematics, select_solution, DhParameters, JointConfig, FK_TOLERANCE,
};
use cloudsort_core::pcloud::{centroid, estimate_normals, PcloudError, DEFAULT_NORMAL_K};
use cloudsort_core::segmentation::{segment_scene_detailed, SegmentationConfig, SegmentationError};
use cloudsort_core::{ColorPointCloud, Vec3};
use thiserror::Error;

use crate::numfmt::format_sig;

#[derive(Debug, Error)]
pub enum DescribeError {
    #[error(transparent)]
    Normals(#[from] PcloudError),
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
}

/// Normals with `k_normals` neighbors, then the requested descriptor.
pub fn describe_object(
    cloud: &ColorPointCloud,
    kind: DescriptorKind,
    k_normals: usize,
    region: &RegionGrowingParams,
) -> Result<Descriptor, DescribeError> {
    if cloud.is_empty() {
        return Err(PcloudError::EmptyCloud.into());
    }
    if kind == DescriptorKind::Hsv {
        return Ok(cloudsort_core::descriptor::hsv_histogram(cloud)?);
    }
    let normals = estimate_normals(cloud, k_normals)?;
    Ok(describe(kind, cloud, &normals, region)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortOptions {
    pub segmentation: SegmentationConfig,
    pub k_normals: usize,
    pub region: RegionGrowingParams,
    /// Direction the gripper comes from, pointing away from the object.
    pub approach: Vec3,
    /// Distance from the centroid to the tool flange along `approach`.
    pub standoff: f64,
}

impl Default for SortOptions {
    fn default() -> Self {
        SortOptions {
            segmentation: SegmentationConfig::default(),
            k_normals: DEFAULT_NORMAL_K,
            region: RegionGrowingParams::default(),
            approach: Vec3::Z,
            standoff: 0.10,
        }
    }
}

/// Grasp planning result for one object.
#[derive(Debug, Clone, PartialEq)]
pub enum Grasp {
    Planned {
        joints: JointConfig,
        solution_count: usize,
        wrist_singular: bool,
        /// Largest entry-wise gap between FK of `joints` and the target.
        fk_error: f64,
    },
    Unreachable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortEntry {
    pub cluster_id: usize,
    pub point_count: usize,
    pub centroid: Vec3,
    pub label: Option<String>,
    /// Per-class scores in model class order.
    pub scores: Vec<(String, f64)>,
    pub grasp: Option<Grasp>,
    pub bin: Option<String>,
    /// First failure for this object, if any.
    pub error: Option<String>,
}

impl SortEntry {
    /// Classified, reachable and assigned to a bin.
    pub fn is_complete(&self) -> bool {
        self.error.is_none() && self.bin.is_some() && matches!(self.grasp, Some(Grasp::Planned { .. }))
    }

    pub fn status(&self) -> &'static str {
        if self.is_complete() {
            "ok"
        } else if self.grasp == Some(Grasp::Unreachable) {
            "unreachable"
        } else {
            "failed"
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortReport {
    pub entries: Vec<SortEntry>,
    pub plane_removed: bool,
    pub rejected_points: usize,
}

#[derive(Debug, Error)]
pub enum SortError {
    #[error("segment: {0}")]
    Segment(#[from] SegmentationError),
    #[error("segment: no objects found")]
    NoObjects,
}

impl SortReport {
    pub fn completed(&self) -> usize {
        self.entries.iter().filter(|e| e.is_complete()).count()
    }

    /// Human-readable summary, one paragraph per object.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} object(s), {} sorted{}",
            self.entries.len(),
            self.completed(),
            if self.plane_removed {
                ""
            } else {
                " (no table plane removed)"
            }
        );
        for e in &self.entries {
            let c = e.centroid;
            let _ = writeln!(
                out,
                "object {}: {} points at ({}, {}, {})",
                e.cluster_id,
                e.point_count,
                format_sig(c.x, 4),
                format_sig(c.y, 4),
                format_sig(c.z, 4)
            );
            if let Some(l) = &e.label {
                let _ = writeln!(out, "  label {l} -> {}", e.bin.as_deref().unwrap_or("(no bin)"));
            }
            match &e.grasp {
                Some(Grasp::Planned {
                    joints, solution_count, ..
                }) => {
                    let q: Vec<String> = joints.angles().iter().map(|a| format_sig(*a, 4)).collect();
                    let _ = writeln!(out, "  grasp [{}] (1 of {solution_count})", q.join(", "));
                }
                Some(Grasp::Unreachable) => out.push_str("  grasp Unreachable\n"),
                None => {}
            }
            if let Some(err) = &e.error {
                let _ = writeln!(out, "  error {err}");
            }
        }
        out
    }

    /// `key=value` lines, one block per object separated by blank lines.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "objects={}", self.entries.len());
        let _ = writeln!(out, "completed={}", self.completed());
        let _ = writeln!(out, "plane_removed={}", self.plane_removed);
        let _ = writeln!(out, "rejected_points={}", self.rejected_points);
        for e in &self.entries {
            out.push('\n');
            let c = e.centroid;
            let _ = writeln!(out, "cluster={}", e.cluster_id);
            let _ = writeln!(out, "points={}", e.point_count);
            let _ = writeln!(
                out,
                "centroid={},{},{}",
                format_sig(c.x, 9),
                format_sig(c.y, 9),
                format_sig(c.z, 9)
            );
            let _ = writeln!(out, "label={}", e.label.as_deref().unwrap_or("none"));
            for (class, s) in &e.scores {
                let _ = writeln!(out, "score.{class}={}", format_sig(*s, 9));
            }
            let _ = writeln!(out, "status={}", e.status());
            match &e.grasp {
                Some(Grasp::Planned {
                    joints,
                    solution_count,
                    wrist_singular,
                    fk_error,
                }) => {
                    let q: Vec<String> = joints.angles().iter().map(|a| format_sig(*a, 12)).collect();
                    let _ = writeln!(out, "joints={}", q.join(","));
                    let _ = writeln!(out, "ik_solutions={solution_count}");
                    let _ = writeln!(out, "wrist_singular={wrist_singular}");
                    let _ = writeln!(out, "fk_error={}", format_sig(*fk_error, 3));
                }
                Some(Grasp::Unreachable) => out.push_str("joints=Unreachable\n"),
                None => out.push_str("joints=none\n"),
            }
            let _ = writeln!(out, "bin={}", e.bin.as_deref().unwrap_or("none"));
            if let Some(err) = &e.error {
                let _ = writeln!(out, "error={err}");
            }
        }
        out
    }
}

/// Plans the grasp for an object centered at `c`.
pub fn plan_grasp(c: Vec3, options: &SortOptions, dh: &DhParameters, current: &JointConfig) -> Grasp {
    let target = grasp_target(c, options.approach, options.standoff);
    let Ok(ik) = inverse_kinematics(&target, dh) else {
        return Grasp::Unreachable;
    };
    let Ok(joints) = select_solution(&ik.solutions, current) else {
        return Grasp::Unreachable;
    };
    let fk_error = forward_kinematics(&joints, dh).max_abs_diff(&target);
    debug_assert!(fk_error < FK_TOLERANCE);
    Grasp::Planned {
        joints,
        solution_count: ik.solutions.len(),
        wrist_singular: ik.wrist_singular,
        fk_error,
    }
}

fn process_object(
    cluster_id: usize,
    object: &ColorPointCloud,
    model: &ClassifierModel,
    dh: &DhParameters,
    bins: &BTreeMap<String, String>,
    current: &JointConfig,
    options: &SortOptions,
) -> SortEntry {
    let mut entry = SortEntry {
        cluster_id,
        point_count: object.len(),
        centroid: centroid(object).unwrap_or(Vec3::ZERO),
        label: None,
        scores: Vec::new(),
        grasp: None,
        bin: None,
        error: None,
    };
    let descriptor = match describe_object(object, DescriptorKind::ColorCvfh, options.k_normals, &options.region) {
        Ok(d) => d,
        Err(e) => {
            entry.error = Some(format!("describe: {e}"));
            return entry;
        }
    };
    let prediction = match model.predict(&descriptor.values) {
        Ok(p) => p,
        Err(e) => {
            entry.error = Some(format!("predict: {e}"));
            return entry;
        }
    };
    entry.scores = model
        .class_index
        .iter()
        .cloned()
        .zip(prediction.scores.iter().copied())
        .collect();
    entry.bin = bins.get(&prediction.label).cloned();
    if entry.bin.is_none() {
        entry.error = Some(format!("bins: no bin for label {}", prediction.label));
    }
    entry.label = Some(prediction.label);
    entry.grasp = Some(plan_grasp(entry.centroid, options, dh, current));
    entry
}

/// Runs the whole sequence. Per-object failures are recorded in the report;
/// only segmentation problems abort.
pub fn sort_scene(
    scene: &ColorPointCloud,
    model: &ClassifierModel,
    dh: &DhParameters,
    bins: &BTreeMap<String, String>,
    current: &JointConfig,
    options: &SortOptions,
) -> Result<SortReport, SortError> {
    let seg = segment_scene_detailed(scene, &options.segmentation)?;
    if seg.objects.is_empty() {
        return Err(SortError::NoObjects);
    }
    let entries = seg
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| process_object(i, o, model, dh, bins, current, options))
        .collect();
    Ok(SortReport {
        entries,
        plane_removed: seg.plane_removed,
        rejected_points: seg.rejected_points,
    })
}
