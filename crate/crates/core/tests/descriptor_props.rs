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

use cloudsort_core::descriptor::{
    color_cvfh, cvfh, hsv_histogram, Descriptor, DescriptorKind, COLOR_CVFH_LEN, CVFH_LEN, HSV_LEN,
};
use cloudsort_core::geometry::Mat3;
use cloudsort_core::pcloud::estimate_normals;
use cloudsort_core::{ColorPoint, ColorPointCloud, Rgb, Vec3};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A bumpy height field seen from above, with random colors.
fn surface(seed: u64, n: usize) -> ColorPointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    let pts = (0..n)
        .map(|_| {
            let x: f64 = rng.random_range(-0.1..0.1);
            let y: f64 = rng.random_range(-0.1..0.1);
            let z = 0.6 + a * x * x + b * x * y + 0.02 * (20.0 * y).sin();
            ColorPoint::new(x, y, z, Rgb::new(rng.random(), rng.random(), rng.random()))
        })
        .collect();
    ColorPointCloud::new(pts)
}

fn well_formed(d: &Descriptor) -> bool {
    d.values.len() == d.kind.len() && d.is_well_formed(1e-6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn layouts_and_unit_blocks(seed in any::<u64>(), n in 60usize..300) {
        let c = surface(seed, n);
        let normals = estimate_normals(&c, 10).unwrap();
        let h = hsv_histogram(&c).unwrap();
        let s = cvfh(&c, &normals).unwrap();
        let both = color_cvfh(&c, &normals).unwrap();
        prop_assert_eq!(h.values.len(), HSV_LEN);
        prop_assert_eq!(s.values.len(), CVFH_LEN);
        prop_assert_eq!(both.values.len(), COLOR_CVFH_LEN);
        for d in [&h, &s, &both] {
            prop_assert!(well_formed(d));
            for r in d.kind.block_ranges() {
                let sum: f64 = d.values[r].iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-6);
            }
        }
        prop_assert_eq!(&both.values[..HSV_LEN], &h.values[..]);
        prop_assert_eq!(&both.values[HSV_LEN..], &s.values[..]);
    }

    #[test]
    fn point_order_does_not_matter(seed in any::<u64>(), n in 60usize..300) {
        let c = surface(seed, n);
        let normals = estimate_normals(&c, 10).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));
        let shuffled = c.select(&order);
        let shuffled_normals = normals.permuted(&order);
        prop_assert_eq!(color_cvfh(&c, &normals).unwrap(), color_cvfh(&shuffled, &shuffled_normals).unwrap());
        // Recomputing normals on the shuffled cloud gives the same answer too.
        let recomputed = estimate_normals(&shuffled, 10).unwrap();
        prop_assert_eq!(cvfh(&c, &normals).unwrap(), cvfh(&shuffled, &recomputed).unwrap());
    }

    #[test]
    fn hsv_ignores_geometry_and_cvfh_ignores_color(
        seed in any::<u64>(),
        angle in -3.0..3.0f64,
        shift in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
    ) {
        let c = surface(seed, 150);
        let rot = Mat3::rotation(Vec3::new(0.3, -0.5, 0.8), angle);
        let t = Vec3::new(shift.0, shift.1, shift.2);
        let moved = ColorPointCloud::with_viewpoint(
            c.points.iter().map(|p| ColorPoint { position: rot.mul_vec(p.position) + t, color: p.color }).collect(),
            rot.mul_vec(c.sensor_viewpoint) + t,
        );
        prop_assert_eq!(hsv_histogram(&c).unwrap(), hsv_histogram(&moved).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let recolored = ColorPointCloud::with_viewpoint(
            c.points.iter().map(|p| ColorPoint { position: p.position, color: Rgb::new(rng.random(), rng.random(), rng.random()) }).collect(),
            c.sensor_viewpoint,
        );
        let normals = estimate_normals(&c, 10).unwrap();
        let a = color_cvfh(&c, &normals).unwrap();
        let b = color_cvfh(&recolored, &normals).unwrap();
        prop_assert_eq!(&a.values[HSV_LEN..], &b.values[HSV_LEN..]);
    }

    #[test]
    fn cvfh_is_scale_invariant(seed in any::<u64>(), scale in 0.25..4.0f64) {
        let c = surface(seed, 200);
        let scaled = ColorPointCloud::new(
            c.points.iter().map(|p| ColorPoint { position: p.position * scale, color: p.color }).collect(),
        );
        let a = cvfh(&c, &estimate_normals(&c, 10).unwrap()).unwrap();
        let b = cvfh(&scaled, &estimate_normals(&scaled, 10).unwrap()).unwrap();
        let worst = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-6, "max bin difference {}", worst);
    }
}

#[test]
fn kinds_report_their_lengths() {
    assert_eq!(DescriptorKind::Hsv.len(), 192);
    assert_eq!(DescriptorKind::Cvfh.len(), 308);
    assert_eq!(DescriptorKind::ColorCvfh.len(), 500);
    assert_eq!(
        DescriptorKind::ColorCvfh.block_sizes(),
        &[90, 51, 51, 45, 45, 45, 45, 128]
    );
}
