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

use alloc::vec::Vec;

use super::{bin_index, normalize_counts, Descriptor, DescriptorError, DescriptorKind};
use super::{HSV_LEN, HUE_BINS, SATURATION_BINS, VALUE_BINS};
use crate::pcloud::ColorPointCloud;

/// Hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hsv {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

/// Hexcone RGB → HSV. Hue is 0 for greys.
pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> Hsv {
    let (ri, gi, bi) = (i32::from(r), i32::from(g), i32::from(b));
    let max = ri.max(gi).max(bi);
    let min = ri.min(gi).min(bi);
    let delta = max - min;
    let v = f64::from(max) / 255.0;
    if delta == 0 {
        return Hsv { h: 0.0, s: 0.0, v };
    }
    let s = f64::from(delta) / f64::from(max);
    let d = f64::from(delta);
    let mut h = if max == ri {
        60.0 * (f64::from(gi - bi) / d)
    } else if max == gi {
        60.0 * (f64::from(bi - ri) / d + 2.0)
    } else {
        60.0 * (f64::from(ri - gi) / d + 4.0)
    };
    if h < 0.0 {
        h += 360.0;
    }
    if h >= 360.0 {
        h -= 360.0;
    }
    Hsv { h, s, v }
}

/// 90 hue + 51 saturation + 51 value bins, each block unit-sum.
pub fn hsv_histogram(cloud: &ColorPointCloud) -> Result<Descriptor, DescriptorError> {
    if cloud.is_empty() {
        return Err(DescriptorError::EmptyCloud);
    }
    let mut hue = [0u32; HUE_BINS];
    let mut sat = [0u32; SATURATION_BINS];
    let mut val = [0u32; VALUE_BINS];
    for p in &cloud.points {
        let c = rgb_to_hsv(p.color.r, p.color.g, p.color.b);
        hue[bin_index(c.h, 0.0, 360.0, HUE_BINS)] += 1;
        sat[bin_index(c.s, 0.0, 1.0, SATURATION_BINS)] += 1;
        val[bin_index(c.v, 0.0, 1.0, VALUE_BINS)] += 1;
    }
    let mut values = Vec::with_capacity(HSV_LEN);
    normalize_counts(&hue, &mut values);
    normalize_counts(&sat, &mut values);
    normalize_counts(&val, &mut values);
    Ok(Descriptor {
        kind: DescriptorKind::Hsv,
        values,
    })
}
