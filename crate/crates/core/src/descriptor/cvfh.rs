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

//! Clustered viewpoint feature histogram.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::region::{smooth_region_growing, summarize, RegionGrowingParams};
use super::{bin_index, normalize_counts, Descriptor, DescriptorError, DescriptorKind};
use super::{ANGLE_BINS, CVFH_LEN, SDC_BINS, VIEWPOINT_BINS};
use crate::geometry::Vec3;
use crate::pcloud::{ColorPointCloud, NormalSet};

/// Below this length a cross product counts as zero.
const PARALLEL_EPS: f64 = 1e-12;

/// Orthonormal frame anchored at a region centroid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub u: Vec3,
    pub v: Vec3,
    pub w: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularFeatures {
    pub cos_alpha: f64,
    pub cos_beta: f64,
    pub cos_phi: f64,
    /// In `(-π, π]`.
    pub theta: f64,
}

/// `u = n_c`, `v = unit((p_i - p_c)/|p_i - p_c| × u)`, `w = u × v`.
pub fn local_frame(p_i: Vec3, p_c: Vec3, n_c: Vec3) -> Result<LocalFrame, DescriptorError> {
    let dir = (p_i - p_c).normalized().ok_or(DescriptorError::CoincidentPoint)?;
    let u = n_c;
    let cross = dir.cross(u);
    if !(cross.norm() > PARALLEL_EPS) {
        return Err(DescriptorError::ParallelDirection);
    }
    let v = cross.normalized().ok_or(DescriptorError::ParallelDirection)?;
    Ok(LocalFrame { u, v, w: u.cross(v) })
}

#[inline]
fn clamp_unit(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// The four angular deviations of point `p_i` (normal `n_i`) against the
/// centroid `p_c` (normal `n_c`). Positions are taken relative to the sensor.
pub fn angular_features(p_i: Vec3, n_i: Vec3, p_c: Vec3, n_c: Vec3) -> Result<AngularFeatures, DescriptorError> {
    let frame = local_frame(p_i, p_c, n_c)?;
    let view = p_c.normalized().ok_or(DescriptorError::ZeroCentroid)?;
    let dir = (p_i - p_c).normalized().ok_or(DescriptorError::CoincidentPoint)?;
    let mut theta = libm::atan2(frame.w.dot(n_i), frame.u.dot(n_i));
    if theta <= -PI {
        theta = PI;
    }
    Ok(AngularFeatures {
        cos_alpha: clamp_unit(frame.v.dot(n_i)),
        cos_beta: clamp_unit(n_i.dot(view)),
        cos_phi: clamp_unit(frame.u.dot(dir)),
        theta,
    })
}

/// Squared distance of every point to `p_c`, divided by the largest one.
pub fn sdc_values(cloud: &ColorPointCloud, p_c: Vec3) -> Result<Vec<f64>, DescriptorError> {
    if cloud.is_empty() {
        return Err(DescriptorError::EmptyCloud);
    }
    let sq: Vec<f64> = cloud.points.iter().map(|p| p.position.distance_squared(p_c)).collect();
    let max = sq.iter().copied().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(DescriptorError::AllCoincident);
    }
    Ok(sq.into_iter().map(|d| d / max).collect())
}

/// What happened while building a CVFH.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CvfhDiagnostics {
    pub regions_found: usize,
    /// Size of the region whose centroid and normal anchor the histogram.
    pub anchor_region_size: usize,
    /// Points left out of the three angle blocks (coincident with the
    /// centroid, or offset parallel to its normal).
    pub skipped_points: usize,
}

/// CVFH with default region-growing parameters.
pub fn cvfh(cloud: &ColorPointCloud, normals: &NormalSet) -> Result<Descriptor, DescriptorError> {
    cvfh_with_params(cloud, normals, &RegionGrowingParams::default()).map(|(d, _)| d)
}

/// Histograms every point of the object against the centroid and mean normal
/// of its largest smooth region (the whole cloud when no region qualifies).
/// Block order: `[cos α | cos φ | θ | SDC | viewpoint]`.
pub fn cvfh_with_params(
    cloud: &ColorPointCloud,
    normals: &NormalSet,
    params: &RegionGrowingParams,
) -> Result<(Descriptor, CvfhDiagnostics), DescriptorError> {
    if cloud.len() < 2 {
        return Err(DescriptorError::TooFewPoints {
            needed: 2,
            got: cloud.len(),
        });
    }
    let regions = smooth_region_growing(cloud, normals, params)?;
    let positions = cloud.positions();
    let anchor = regions
        .iter()
        .fold(None::<&super::SmoothRegion>, |best, r| match best {
            Some(b) if b.indices.len() >= r.indices.len() => Some(b),
            _ => Some(r),
        })
        .cloned()
        .unwrap_or_else(|| summarize(&positions, &normals.normals, (0..cloud.len()).collect()));

    let vp = cloud.sensor_viewpoint;
    let p_c = anchor.region_centroid;
    let n_c = anchor.dominant_normal;
    let view = (p_c - vp).normalized().ok_or(DescriptorError::ZeroCentroid)?;
    let sdc = sdc_values(cloud, p_c)?;

    let mut alpha = [0u32; ANGLE_BINS];
    let mut phi = [0u32; ANGLE_BINS];
    let mut theta = [0u32; ANGLE_BINS];
    let mut shape = [0u32; SDC_BINS];
    let mut viewpoint = [0u32; VIEWPOINT_BINS];
    let mut skipped = 0;

    for ((p, n_i), s) in positions.iter().zip(&normals.normals).zip(&sdc) {
        shape[bin_index(*s, 0.0, 1.0, SDC_BINS)] += 1;
        viewpoint[bin_index(clamp_unit(n_i.dot(view)), -1.0, 1.0, VIEWPOINT_BINS)] += 1;
        match angular_features(*p - vp, *n_i, p_c - vp, n_c) {
            Ok(f) => {
                alpha[bin_index(f.cos_alpha, -1.0, 1.0, ANGLE_BINS)] += 1;
                phi[bin_index(f.cos_phi, -1.0, 1.0, ANGLE_BINS)] += 1;
                theta[bin_index(f.theta, -PI, PI, ANGLE_BINS)] += 1;
            }
            Err(DescriptorError::CoincidentPoint | DescriptorError::ParallelDirection) => skipped += 1,
            Err(e) => return Err(e),
        }
    }

    let mut values = Vec::with_capacity(CVFH_LEN);
    for block in [&alpha[..], &phi[..], &theta[..], &shape[..], &viewpoint[..]] {
        normalize_counts(block, &mut values);
    }
    Ok((
        Descriptor {
            kind: DescriptorKind::Cvfh,
            values,
        },
        CvfhDiagnostics {
            regions_found: regions.len(),
            anchor_region_size: anchor.indices.len(),
            skipped_points: skipped,
        },
    ))
}
