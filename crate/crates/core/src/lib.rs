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

//! Algorithms for a vision-guided tabletop sorting cell.
//!
//! Segments a colored point cloud into objects, describes each object with a
//! Color-CVFH histogram (HSV color + clustered viewpoint feature histogram),
//! classifies descriptors with one-vs-rest linear SVMs, scores predictions, and
//! solves UR5 inverse kinematics for the grasp. File formats and the command
//! line live in the `cloudsort` crate; this crate only needs `alloc`.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod classifier;
pub mod descriptor;
pub mod evaluation;
pub mod geometry;
pub mod kinematics;
pub mod neighbors;
pub mod pcloud;
pub mod segmentation;

pub use geometry::Vec3;
pub use pcloud::{ColorPoint, ColorPointCloud, NormalSet, Rgb};
