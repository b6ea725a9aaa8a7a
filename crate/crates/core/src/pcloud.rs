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

//! Colored point clouds, centroids and k-NN surface normals.

use alloc::vec::Vec;

use thiserror::Error;

use crate::geometry::{covariance, symmetric_eigen, Vec3};
use crate::neighbors;

/// Default neighborhood size for normal estimation.
pub const DEFAULT_NORMAL_K: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PcloudError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("neighbor count must be at least 2, got {0}")]
    InvalidNeighborCount(usize),
}

/// 24-bit color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb { r, g, b }
    }

    /// `0x00RRGGBB`.
    pub fn packed(self) -> u32 {
        (u32::from(self.r) << 16) | (u32::from(self.g) << 8) | u32::from(self.b)
    }

    /// Takes the low 24 bits of `v` as `0xRRGGBB`.
    pub fn from_packed(v: u32) -> Self {
        Rgb::new((v >> 16) as u8, (v >> 8) as u8, v as u8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ColorPoint {
    pub position: Vec3,
    pub color: Rgb,
}

impl ColorPoint {
    pub fn new(x: f64, y: f64, z: f64, color: Rgb) -> Self {
        ColorPoint {
            position: Vec3::new(x, y, z),
            color,
        }
    }
}

/// Ordered list of colored points plus the sensor position they were seen from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ColorPointCloud {
    pub points: Vec<ColorPoint>,
    pub sensor_viewpoint: Vec3,
}

impl ColorPointCloud {
    pub fn new(points: Vec<ColorPoint>) -> Self {
        ColorPointCloud {
            points,
            sensor_viewpoint: Vec3::ZERO,
        }
    }

    pub fn with_viewpoint(points: Vec<ColorPoint>, sensor_viewpoint: Vec3) -> Self {
        ColorPointCloud {
            points,
            sensor_viewpoint,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.points.iter().map(|p| p.position).collect()
    }

    /// Sub-cloud of the given indices, in the given order, same viewpoint.
    pub fn select(&self, indices: &[usize]) -> ColorPointCloud {
        ColorPointCloud {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            sensor_viewpoint: self.sensor_viewpoint,
        }
    }
}

/// Per-point unit normals and surface variation, index-aligned with a cloud.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormalSet {
    pub normals: Vec<Vec3>,
    /// `λ₀ / (λ₀ + λ₁ + λ₂)` of the neighborhood covariance.
    pub curvatures: Vec<f64>,
    /// Indices whose neighborhood collapsed to a single location. These carry
    /// the sentinel normal `(0, 0, 1)` and curvature 0.
    pub degenerate: Vec<usize>,
}

impl NormalSet {
    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    /// Reorders the set so that entry `i` of the result is entry `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> NormalSet {
        let mut inverse = alloc::vec![0usize; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        let mut degenerate: Vec<usize> = self.degenerate.iter().map(|&d| inverse[d]).collect();
        degenerate.sort_unstable();
        NormalSet {
            normals: order.iter().map(|&i| self.normals[i]).collect(),
            curvatures: order.iter().map(|&i| self.curvatures[i]).collect(),
            degenerate,
        }
    }
}

/// Arithmetic mean of the coordinates.
pub fn centroid(cloud: &ColorPointCloud) -> Result<Vec3, PcloudError> {
    if cloud.is_empty() {
        return Err(PcloudError::EmptyCloud);
    }
    let mut sum = Vec3::ZERO;
    for p in &cloud.points {
        sum += p.position;
    }
    Ok(sum / cloud.len() as f64)
}

/// PCA normals over the `k` nearest neighbors of each point (self included),
/// oriented toward the cloud's sensor viewpoint.
pub fn estimate_normals(cloud: &ColorPointCloud, k: usize) -> Result<NormalSet, PcloudError> {
    if k < 2 {
        return Err(PcloudError::InvalidNeighborCount(k));
    }
    if cloud.len() < k {
        return Err(PcloudError::TooFewPoints {
            needed: k,
            got: cloud.len(),
        });
    }
    let positions = cloud.positions();
    let neighborhoods = neighbors::knn(&positions, k);
    Ok(normals_from_neighborhoods(
        &positions,
        &neighborhoods,
        cloud.sensor_viewpoint,
    ))
}

pub(crate) fn normals_from_neighborhoods(
    positions: &[Vec3],
    neighborhoods: &[Vec<usize>],
    viewpoint: Vec3,
) -> NormalSet {
    let mut out = NormalSet {
        normals: Vec::with_capacity(positions.len()),
        curvatures: Vec::with_capacity(positions.len()),
        degenerate: Vec::new(),
    };
    for (i, nb) in neighborhoods.iter().enumerate() {
        let p = positions[i];
        if nb.iter().all(|&j| positions[j] == p) {
            out.normals.push(Vec3::Z);
            out.curvatures.push(0.0);
            out.degenerate.push(i);
            continue;
        }
        let (_, cov) = covariance(nb.iter().map(|&j| positions[j]));
        let eig = symmetric_eigen(&cov);
        let l0 = eig.values[0].max(0.0);
        let total = l0 + eig.values[1].max(0.0) + eig.values[2].max(0.0);
        let mut n = eig.vectors[0];
        if n.dot(viewpoint - p) < 0.0 {
            n = -n;
        }
        out.normals.push(n);
        out.curvatures.push(if total > 0.0 { l0 / total } else { 0.0 });
    }
    out
}
