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

//! Smooth-region growing over k-NN adjacency.

use alloc::vec;
use alloc::vec::Vec;

use super::DescriptorError;
use crate::geometry::Vec3;
use crate::neighbors;
use crate::pcloud::{ColorPointCloud, NormalSet};

#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrowingParams {
    /// Largest angle (radians) between adjacent normals inside one region.
    pub angle_threshold: f64,
    /// Points above this curvature may join a region but never extend it.
    pub curvature_threshold: f64,
    pub min_region: usize,
    /// Adjacency size.
    pub neighbors: usize,
}

impl Default for RegionGrowingParams {
    fn default() -> Self {
        RegionGrowingParams {
            angle_threshold: 0.1047,
            curvature_threshold: 0.025,
            min_region: 50,
            neighbors: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothRegion {
    /// Ascending.
    pub indices: Vec<usize>,
    pub dominant_normal: Vec3,
    pub region_centroid: Vec3,
}

/// Seeded region growing: seeds are visited in ascending curvature, a
/// neighbor joins when its normal is within the angle threshold of the point
/// that reached it, and only low-curvature members keep growing the region.
pub fn smooth_region_growing(
    cloud: &ColorPointCloud,
    normals: &NormalSet,
    params: &RegionGrowingParams,
) -> Result<Vec<SmoothRegion>, DescriptorError> {
    let n = cloud.len();
    if normals.len() != n || normals.curvatures.len() != n {
        return Err(DescriptorError::NormalsMismatch {
            points: n,
            normals: normals.len(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let positions = cloud.positions();
    let adjacency = neighbors::knn(&positions, params.neighbors.max(1));
    let cos_limit = libm::cos(params.angle_threshold);

    // Coordinates break curvature ties so the result does not depend on
    // storage order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        normals.curvatures[a]
            .total_cmp(&normals.curvatures[b])
            .then_with(|| positions[a].total_cmp(&positions[b]))
            .then(a.cmp(&b))
    });

    let mut assigned = vec![false; n];
    let mut regions = Vec::new();
    let mut queue = Vec::new();
    for &seed in &order {
        if assigned[seed] || normals.curvatures[seed] > params.curvature_threshold {
            continue;
        }
        assigned[seed] = true;
        let mut members = vec![seed];
        queue.clear();
        queue.push(seed);
        let mut head = 0;
        while head < queue.len() {
            let cur = queue[head];
            head += 1;
            for &nb in &adjacency[cur] {
                if assigned[nb] || normals.normals[cur].dot(normals.normals[nb]) < cos_limit {
                    continue;
                }
                assigned[nb] = true;
                members.push(nb);
                if normals.curvatures[nb] <= params.curvature_threshold {
                    queue.push(nb);
                }
            }
        }
        if members.len() >= params.min_region {
            members.sort_unstable();
            regions.push(summarize(&positions, &normals.normals, members));
        }
    }
    Ok(regions)
}

/// Centroid and mean normal, accumulated in coordinate order.
pub(crate) fn summarize(positions: &[Vec3], normals: &[Vec3], indices: Vec<usize>) -> SmoothRegion {
    let mut canonical = indices.clone();
    canonical.sort_by(|&a, &b| {
        positions[a]
            .total_cmp(&positions[b])
            .then_with(|| normals[a].total_cmp(&normals[b]))
    });
    let mut c = Vec3::ZERO;
    let mut nsum = Vec3::ZERO;
    for &i in &canonical {
        c += positions[i];
        nsum += normals[i];
    }
    let dominant_normal = nsum.normalized().unwrap_or_else(|| normals[canonical[0]]);
    SmoothRegion {
        region_centroid: c / canonical.len() as f64,
        dominant_normal,
        indices,
    }
}
