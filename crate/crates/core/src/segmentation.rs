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

//! Tabletop scene segmentation: crop box, dominant-plane removal with RANSAC,
//! and Euclidean clustering into per-object clouds.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{covariance, symmetric_eigen, Vec3};
use crate::pcloud::ColorPointCloud;

/// Plane removal is skipped when the best plane explains less than this
/// fraction of the cropped cloud.
pub const MIN_PLANE_FRACTION: f64 = 0.2;

const RESAMPLE_LIMIT: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SegmentationError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("every RANSAC sample was collinear")]
    NoValidSample,
    #[error("plane inlier index {index} out of range for cloud of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("no points left after cropping")]
    EmptyAfterCrop,
    #[error("invalid segmentation config: {0}")]
    InvalidConfig(&'static str),
}

/// Plane `a·x + b·y + c·z + d = 0` with unit `(a, b, c)` and the indices of
/// the points within the fitting threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneModel {
    pub coefficients: [f64; 4],
    pub inlier_indices: Vec<usize>,
}

impl PlaneModel {
    pub fn normal(&self) -> Vec3 {
        Vec3::new(self.coefficients[0], self.coefficients[1], self.coefficients[2])
    }

    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal().dot(p) + self.coefficients[3]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationConfig {
    pub crop_min: Vec3,
    pub crop_max: Vec3,
    pub ransac_threshold: f64,
    pub ransac_iterations: usize,
    pub cluster_distance: f64,
    pub cluster_min_size: usize,
    pub cluster_max_size: usize,
    pub rng_seed: u64,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig {
            crop_min: Vec3::new(-1e3, -1e3, -1e3),
            crop_max: Vec3::new(1e3, 1e3, 1e3),
            ransac_threshold: 0.01,
            ransac_iterations: 1000,
            cluster_distance: 0.02,
            cluster_min_size: 100,
            cluster_max_size: 25_000,
            rng_seed: 0,
        }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> Result<(), SegmentationError> {
        let (lo, hi) = (self.crop_min, self.crop_max);
        if !(lo.x < hi.x && lo.y < hi.y && lo.z < hi.z) {
            return Err(SegmentationError::InvalidConfig(
                "crop_min must be below crop_max on every axis",
            ));
        }
        if !(self.ransac_threshold > 0.0) {
            return Err(SegmentationError::InvalidConfig("ransac_threshold must be positive"));
        }
        if self.ransac_iterations == 0 {
            return Err(SegmentationError::InvalidConfig("ransac_iterations must be positive"));
        }
        if !(self.cluster_distance > 0.0) {
            return Err(SegmentationError::InvalidConfig("cluster_distance must be positive"));
        }
        if self.cluster_min_size == 0 || self.cluster_min_size > self.cluster_max_size {
            return Err(SegmentationError::InvalidConfig(
                "need 1 <= cluster_min_size <= cluster_max_size",
            ));
        }
        Ok(())
    }
}

/// Points with `min <= p <= max` componentwise, in their original order.
pub fn crop_region(cloud: &ColorPointCloud, min: Vec3, max: Vec3) -> ColorPointCloud {
    ColorPointCloud {
        points: cloud
            .points
            .iter()
            .filter(|p| {
                let q = p.position;
                min.x <= q.x && q.x <= max.x && min.y <= q.y && q.y <= max.y && min.z <= q.z && q.z <= max.z
            })
            .copied()
            .collect(),
        sensor_viewpoint: cloud.sensor_viewpoint,
    }
}

fn plane_inliers(positions: &[Vec3], normal: Vec3, d: f64, threshold: f64) -> Vec<usize> {
    positions
        .iter()
        .enumerate()
        .filter(|(_, p)| (normal.dot(**p) + d).abs() <= threshold)
        .map(|(i, _)| i)
        .collect()
}

fn plane_through(a: Vec3, b: Vec3, c: Vec3) -> Option<(Vec3, f64)> {
    let (ab, ac) = (b - a, c - a);
    let cross = ab.cross(ac);
    let scale = ab.norm() * ac.norm();
    if !(cross.norm() > 1e-12 * scale) {
        return None;
    }
    let n = cross.normalized()?;
    Some((n, -n.dot(a)))
}

/// Dominant plane by RANSAC over `iterations` random 3-point samples, then
/// refit by least squares to its inliers. Deterministic for a given seed.
pub fn ransac_plane(
    cloud: &ColorPointCloud,
    threshold: f64,
    iterations: usize,
    seed: u64,
) -> Result<PlaneModel, SegmentationError> {
    let n = cloud.len();
    if n < 3 {
        return Err(SegmentationError::TooFewPoints { needed: 3, got: n });
    }
    let positions = cloud.positions();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec3, f64, usize)> = None;

    for _ in 0..iterations {
        let mut plane = None;
        for _ in 0..RESAMPLE_LIMIT {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let mut k = rng.random_range(0..n - 2);
            for taken in [i.min(j), i.max(j)] {
                if k >= taken {
                    k += 1;
                }
            }
            plane = plane_through(positions[i], positions[j], positions[k]);
            if plane.is_some() {
                break;
            }
        }
        let Some((normal, d)) = plane else { continue };
        let count = positions
            .iter()
            .filter(|p| (normal.dot(**p) + d).abs() <= threshold)
            .count();
        if best.is_none_or(|(_, _, c)| count > c) {
            best = Some((normal, d, count));
        }
    }

    let (normal, d, _) = best.ok_or(SegmentationError::NoValidSample)?;
    let mut model = (normal, d, plane_inliers(&positions, normal, d, threshold));

    if model.2.len() >= 3 {
        let (mean, cov) = covariance(model.2.iter().map(|&i| positions[i]));
        let refit_normal = symmetric_eigen(&cov).vectors[0];
        let refit_d = -refit_normal.dot(mean);
        let refit = plane_inliers(&positions, refit_normal, refit_d, threshold);
        if refit.len() >= model.2.len() {
            model = (refit_normal, refit_d, refit);
        }
    }

    let (mut normal, mut d, inliers) = model;
    // Face the sensor so the sign is reproducible.
    if normal.dot(cloud.sensor_viewpoint) + d < 0.0 {
        normal = -normal;
        d = -d;
    }
    Ok(PlaneModel {
        coefficients: [normal.x, normal.y, normal.z, d],
        inlier_indices: inliers,
    })
}

/// The cloud without the plane's inliers, order preserved.
pub fn remove_plane(cloud: &ColorPointCloud, model: &PlaneModel) -> Result<ColorPointCloud, SegmentationError> {
    let mut drop = vec![false; cloud.len()];
    for &i in &model.inlier_indices {
        if i >= cloud.len() {
            return Err(SegmentationError::IndexOutOfRange {
                index: i,
                len: cloud.len(),
            });
        }
        drop[i] = true;
    }
    Ok(ColorPointCloud {
        points: cloud
            .points
            .iter()
            .zip(&drop)
            .filter(|(_, &d)| !d)
            .map(|(p, _)| *p)
            .collect(),
        sensor_viewpoint: cloud.sensor_viewpoint,
    })
}

/// Connected components of the graph joining points at distance `<= distance`,
/// keeping those with `min_size..=max_size` members. Clusters are ordered by
/// decreasing size, then by smallest member index; members are ascending.
pub fn euclidean_cluster(cloud: &ColorPointCloud, distance: f64, min_size: usize, max_size: usize) -> Vec<Vec<usize>> {
    let positions = cloud.positions();
    let n = positions.len();
    if n == 0 || !(distance > 0.0) {
        return Vec::new();
    }
    let limit = distance * distance;
    let cell = |p: Vec3| {
        let f = |v: f64| libm::floor(v / distance) as i64;
        (f(p.x), f(p.y), f(p.z))
    };
    let mut grid: BTreeMap<(i64, i64, i64), Vec<usize>> = BTreeMap::new();
    for (i, p) in positions.iter().enumerate() {
        grid.entry(cell(*p)).or_default().push(i);
    }

    let mut visited = vec![false; n];
    let mut clusters = Vec::new();
    let mut queue = Vec::new();
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        visited[seed] = true;
        queue.clear();
        queue.push(seed);
        let mut head = 0;
        while head < queue.len() {
            let q = positions[queue[head]];
            head += 1;
            let (cx, cy, cz) = cell(q);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        let Some(ids) = grid.get(&(cx + dx, cy + dy, cz + dz)) else {
                            continue;
                        };
                        for &j in ids {
                            if !visited[j] && q.distance_squared(positions[j]) <= limit {
                                visited[j] = true;
                                queue.push(j);
                            }
                        }
                    }
                }
            }
        }
        if (min_size..=max_size).contains(&queue.len()) {
            let mut members = queue.clone();
            members.sort_unstable();
            clusters.push(members);
        }
    }
    clusters.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    clusters
}

/// Every intermediate product of [`segment_scene`].
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSegmentation {
    pub cropped: ColorPointCloud,
    pub plane: PlaneModel,
    /// False when the plane was too small to count as a table.
    pub plane_removed: bool,
    /// The cropped cloud after plane removal; cluster indices refer to it.
    pub remaining: ColorPointCloud,
    pub clusters: Vec<Vec<usize>>,
    /// Points of `remaining` in components outside the size bounds.
    pub rejected_points: usize,
    pub objects: Vec<ColorPointCloud>,
}

/// Crop, remove the dominant plane, cluster. Returns one cloud per object.
pub fn segment_scene(
    cloud: &ColorPointCloud,
    config: &SegmentationConfig,
) -> Result<Vec<ColorPointCloud>, SegmentationError> {
    segment_scene_detailed(cloud, config).map(|s| s.objects)
}

pub fn segment_scene_detailed(
    cloud: &ColorPointCloud,
    config: &SegmentationConfig,
) -> Result<SceneSegmentation, SegmentationError> {
    config.validate()?;
    let cropped = crop_region(cloud, config.crop_min, config.crop_max);
    if cropped.is_empty() {
        return Err(SegmentationError::EmptyAfterCrop);
    }
    let plane = ransac_plane(
        &cropped,
        config.ransac_threshold,
        config.ransac_iterations,
        config.rng_seed,
    )?;
    let plane_removed = plane.inlier_indices.len() as f64 >= MIN_PLANE_FRACTION * cropped.len() as f64;
    let remaining = if plane_removed {
        remove_plane(&cropped, &plane)?
    } else {
        cropped.clone()
    };
    let clusters = euclidean_cluster(
        &remaining,
        config.cluster_distance,
        config.cluster_min_size,
        config.cluster_max_size,
    );
    let clustered: usize = clusters.iter().map(Vec::len).sum();
    let objects = clusters.iter().map(|c| remaining.select(c)).collect();
    Ok(SceneSegmentation {
        rejected_points: remaining.len() - clustered,
        cropped,
        plane,
        plane_removed,
        remaining,
        clusters,
        objects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcloud::{ColorPoint, Rgb};

    fn cloud(pts: &[(f64, f64, f64)]) -> ColorPointCloud {
        ColorPointCloud::new(
            pts.iter()
                .map(|&(x, y, z)| ColorPoint::new(x, y, z, Rgb::default()))
                .collect(),
        )
    }

    #[test]
    fn crop_identity_and_disjoint() {
        let c = cloud(&[(0.1, 0.2, 0.3), (0.9, 0.5, 0.0), (1.0, 1.0, 1.0)]);
        assert_eq!(crop_region(&c, Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0)), c);
        assert!(crop_region(&c, Vec3::new(2.0, 2.0, 2.0), Vec3::new(3.0, 3.0, 3.0)).is_empty());
    }

    #[test]
    fn ransac_three_points() {
        let c = cloud(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.5)]);
        let m = ransac_plane(&c, 1e-6, 10, 1).unwrap();
        assert_eq!(m.inlier_indices, vec![0, 1, 2]);
        assert!((m.normal().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ransac_too_few_and_collinear() {
        let c = cloud(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]);
        assert_eq!(
            ransac_plane(&c, 0.1, 10, 1),
            Err(SegmentationError::TooFewPoints { needed: 3, got: 2 })
        );
        let line = cloud(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (2.0, 0.0, 0.0), (3.0, 0.0, 0.0)]);
        assert_eq!(ransac_plane(&line, 0.1, 5, 1), Err(SegmentationError::NoValidSample));
    }

    #[test]
    fn ransac_plane_with_outliers() {
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                pts.push((i as f64 * 0.1, j as f64 * 0.1, 0.0));
            }
        }
        for i in 0..10 {
            pts.push((i as f64 * 0.07, 0.3, 5.0));
        }
        let c = cloud(&pts);
        let m = ransac_plane(&c, 0.01, 200, 9).unwrap();
        assert_eq!(m.inlier_indices, (0..100).collect::<Vec<_>>());
        assert!(m.normal().max_abs_diff(Vec3::Z) < 1e-9 || m.normal().max_abs_diff(-Vec3::Z) < 1e-9);
        assert!(m.coefficients[3].abs() < 1e-9);
        for &i in &m.inlier_indices {
            assert!(m.signed_distance(c.points[i].position).abs() <= 0.01);
        }
    }

    #[test]
    fn remove_plane_cases() {
        let c = cloud(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]);
        let all = PlaneModel {
            coefficients: [0.0, 0.0, 1.0, 0.0],
            inlier_indices: vec![0, 1, 2],
        };
        assert!(remove_plane(&c, &all).unwrap().is_empty());
        let none = PlaneModel {
            coefficients: [0.0, 0.0, 1.0, 0.0],
            inlier_indices: vec![],
        };
        assert_eq!(remove_plane(&c, &none).unwrap(), c);
        let bad = PlaneModel {
            coefficients: [0.0, 0.0, 1.0, 0.0],
            inlier_indices: vec![3],
        };
        assert_eq!(
            remove_plane(&c, &bad),
            Err(SegmentationError::IndexOutOfRange { index: 3, len: 3 })
        );
    }

    #[test]
    fn cluster_two_points() {
        let c = cloud(&[(0.0, 0.0, 0.0), (0.5, 0.0, 0.0)]);
        assert_eq!(euclidean_cluster(&c, 1.0, 1, 10), vec![vec![0, 1]]);
        assert_eq!(euclidean_cluster(&c, 0.3, 1, 10), vec![vec![0], vec![1]]);
    }

    #[test]
    fn cluster_order_and_size_filter() {
        let c = cloud(&[
            (10.0, 0.0, 0.0),
            (0.0, 0.0, 0.0),
            (0.1, 0.0, 0.0),
            (5.0, 0.0, 0.0),
            (0.2, 0.0, 0.0),
            (5.1, 0.0, 0.0),
        ]);
        assert_eq!(
            euclidean_cluster(&c, 0.15, 1, 10),
            vec![vec![1, 2, 4], vec![3, 5], vec![0]]
        );
        assert_eq!(euclidean_cluster(&c, 0.15, 2, 2), vec![vec![3, 5]]);
    }

    #[test]
    fn config_validation() {
        assert!(SegmentationConfig::default().validate().is_ok());
        let bad = SegmentationConfig {
            cluster_min_size: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SegmentationConfig {
            crop_min: Vec3::new(1.0, 0.0, 0.0),
            crop_max: Vec3::new(1.0, 1.0, 1.0),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn empty_crop_is_an_error() {
        let c = cloud(&[(0.0, 0.0, 0.0)]);
        let cfg = SegmentationConfig {
            crop_min: Vec3::new(5.0, 5.0, 5.0),
            crop_max: Vec3::new(6.0, 6.0, 6.0),
            ..Default::default()
        };
        assert_eq!(segment_scene(&c, &cfg), Err(SegmentationError::EmptyAfterCrop));
    }
}
