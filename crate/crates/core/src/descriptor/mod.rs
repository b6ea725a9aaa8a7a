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

//! Global object descriptors: the CVFH shape histogram, an HSV color
//! histogram, and their concatenation, Color-CVFH.
//!
//! Index map of a Color-CVFH vector:
//!
//! | range        | block                   |
//! |--------------|-------------------------|
//! | `[0, 90)`    | hue, 4° bins            |
//! | `[90, 141)`  | saturation              |
//! | `[141, 192)` | value                   |
//! | `[192, 237)` | cos α                   |
//! | `[237, 282)` | cos φ                   |
//! | `[282, 327)` | θ                       |
//! | `[327, 372)` | shape distribution      |
//! | `[372, 500)` | viewpoint direction     |
//!
//! Every block is normalized to unit sum on its own (or left all-zero when
//! nothing was binned into it).

use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use thiserror::Error;

mod color;
mod cvfh;
mod region;

pub use color::{hsv_histogram, rgb_to_hsv, Hsv};
pub use cvfh::{
    angular_features, cvfh, cvfh_with_params, local_frame, sdc_values, AngularFeatures, CvfhDiagnostics, LocalFrame,
};
pub use region::{smooth_region_growing, RegionGrowingParams, SmoothRegion};

use crate::pcloud::{ColorPointCloud, NormalSet};

pub const HUE_BINS: usize = 90;
pub const SATURATION_BINS: usize = 51;
pub const VALUE_BINS: usize = 51;
pub const ANGLE_BINS: usize = 45;
pub const SDC_BINS: usize = 45;
pub const VIEWPOINT_BINS: usize = 128;

pub const HSV_LEN: usize = HUE_BINS + SATURATION_BINS + VALUE_BINS;
pub const CVFH_LEN: usize = 3 * ANGLE_BINS + SDC_BINS + VIEWPOINT_BINS;
pub const COLOR_CVFH_LEN: usize = HSV_LEN + CVFH_LEN;

const HSV_BLOCKS: [usize; 3] = [HUE_BINS, SATURATION_BINS, VALUE_BINS];
const CVFH_BLOCKS: [usize; 5] = [ANGLE_BINS, ANGLE_BINS, ANGLE_BINS, SDC_BINS, VIEWPOINT_BINS];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescriptorError {
    #[error("point coincides with the centroid")]
    CoincidentPoint,
    #[error("point offset is parallel to the centroid normal")]
    ParallelDirection,
    #[error("centroid coincides with the sensor viewpoint")]
    ZeroCentroid,
    #[error("all points coincide with the centroid")]
    AllCoincident,
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("normal set has {normals} entries for {points} points")]
    NormalsMismatch { points: usize, normals: usize },
    #[error("unknown descriptor kind {0:?}")]
    UnknownKind(alloc::string::String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DescriptorKind {
    Cvfh,
    Hsv,
    ColorCvfh,
}

#[allow(clippy::len_without_is_empty)]
impl DescriptorKind {
    pub const fn len(self) -> usize {
        match self {
            DescriptorKind::Cvfh => CVFH_LEN,
            DescriptorKind::Hsv => HSV_LEN,
            DescriptorKind::ColorCvfh => COLOR_CVFH_LEN,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            DescriptorKind::Cvfh => "cvfh",
            DescriptorKind::Hsv => "hsv",
            DescriptorKind::ColorCvfh => "colorcvfh",
        }
    }

    /// Sub-block sizes in storage order.
    pub fn block_sizes(self) -> &'static [usize] {
        const COLOR_CVFH_BLOCKS: [usize; 8] = [
            HUE_BINS,
            SATURATION_BINS,
            VALUE_BINS,
            ANGLE_BINS,
            ANGLE_BINS,
            ANGLE_BINS,
            SDC_BINS,
            VIEWPOINT_BINS,
        ];
        match self {
            DescriptorKind::Cvfh => &CVFH_BLOCKS,
            DescriptorKind::Hsv => &HSV_BLOCKS,
            DescriptorKind::ColorCvfh => &COLOR_CVFH_BLOCKS,
        }
    }

    /// Index ranges of the sub-blocks.
    pub fn block_ranges(self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.block_sizes()
            .iter()
            .map(|&len| {
                let r = start..start + len;
                start += len;
                r
            })
            .collect()
    }
}

impl fmt::Display for DescriptorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DescriptorKind {
    type Err = DescriptorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cvfh" => Ok(DescriptorKind::Cvfh),
            "hsv" => Ok(DescriptorKind::Hsv),
            "colorcvfh" | "color-cvfh" | "color_cvfh" => Ok(DescriptorKind::ColorCvfh),
            _ => Err(DescriptorError::UnknownKind(s.into())),
        }
    }
}

/// Fixed-length feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor {
    pub kind: DescriptorKind,
    pub values: Vec<f64>,
}

impl Descriptor {
    pub fn block(&self, index: usize) -> &[f64] {
        &self.values[self.kind.block_ranges()[index].clone()]
    }

    /// Length matches the kind, entries are non-negative, and each block sums
    /// to one (within `tol`) or is all zero.
    pub fn is_well_formed(&self, tol: f64) -> bool {
        if self.values.len() != self.kind.len() || self.values.iter().any(|v| !(*v >= 0.0)) {
            return false;
        }
        self.kind.block_ranges().into_iter().all(|r| {
            let s: f64 = self.values[r].iter().sum();
            s == 0.0 || (s - 1.0).abs() <= tol
        })
    }
}

/// `[HSV | CVFH]`, 500 entries.
pub fn color_cvfh(cloud: &ColorPointCloud, normals: &NormalSet) -> Result<Descriptor, DescriptorError> {
    color_cvfh_with_params(cloud, normals, &RegionGrowingParams::default())
}

pub fn color_cvfh_with_params(
    cloud: &ColorPointCloud,
    normals: &NormalSet,
    params: &RegionGrowingParams,
) -> Result<Descriptor, DescriptorError> {
    let color = hsv_histogram(cloud)?;
    let (shape, _) = cvfh_with_params(cloud, normals, params)?;
    let mut values = color.values;
    values.extend_from_slice(&shape.values);
    Ok(Descriptor {
        kind: DescriptorKind::ColorCvfh,
        values,
    })
}

/// Computes the requested descriptor kind.
pub fn describe(
    kind: DescriptorKind,
    cloud: &ColorPointCloud,
    normals: &NormalSet,
    params: &RegionGrowingParams,
) -> Result<Descriptor, DescriptorError> {
    match kind {
        DescriptorKind::Hsv => hsv_histogram(cloud),
        DescriptorKind::Cvfh => cvfh_with_params(cloud, normals, params).map(|(d, _)| d),
        DescriptorKind::ColorCvfh => color_cvfh_with_params(cloud, normals, params),
    }
}

/// Uniform bin of `x` over `[lo, hi]`; values outside are clamped into the
/// first or last bin, so the upper edge lands in the last bin.
#[inline]
pub(crate) fn bin_index(x: f64, lo: f64, hi: f64, bins: usize) -> usize {
    let t = (x - lo) / (hi - lo) * bins as f64;
    if !(t > 0.0) {
        0
    } else {
        (libm::floor(t) as usize).min(bins - 1)
    }
}

/// Converts raw counts to unit-sum frequencies in place.
pub(crate) fn normalize_counts(counts: &[u32], out: &mut Vec<f64>) {
    let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
    out.extend(
        counts
            .iter()
            .map(|&c| if total == 0 { 0.0 } else { f64::from(c) / total as f64 }),
    );
}
