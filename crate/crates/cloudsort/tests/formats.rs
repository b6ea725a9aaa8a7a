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

use cloudsort::descriptor_file::{format_line, parse_descriptors};
use cloudsort::model_file::{parse_model, write_model, ModelFileError};
use cloudsort::pcd::{parse_pcd, write_pcd};
use cloudsort_core::classifier::{train, TrainConfig, TrainingSet};
use cloudsort_core::descriptor::{Descriptor, DescriptorKind};
use cloudsort_core::{ColorPoint, ColorPointCloud, Rgb, Vec3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f32_point() -> impl Strategy<Value = ColorPoint> {
    (any::<f32>(), any::<f32>(), any::<f32>(), any::<[u8; 3]>())
        .prop_filter("finite", |(x, y, z, _)| x.is_finite() && y.is_finite() && z.is_finite())
        .prop_map(|(x, y, z, c)| ColorPoint::new(x as f64, y as f64, z as f64, Rgb::new(c[0], c[1], c[2])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pcd_round_trip(points in prop::collection::vec(f32_point(), 1000), vp in (-5.0f32..5.0, -5.0f32..5.0, -5.0f32..5.0)) {
        let cloud = ColorPointCloud::with_viewpoint(points, Vec3::new(vp.0 as f64, vp.1 as f64, vp.2 as f64));
        let text = write_pcd(&cloud);
        let back = parse_pcd(&text).unwrap();
        prop_assert_eq!(back.skipped_nonfinite, 0);
        prop_assert_eq!(&back.cloud, &cloud);
        prop_assert_eq!(write_pcd(&back.cloud), text);
    }

    #[test]
    fn descriptor_lines_keep_nine_digits(values in prop::collection::vec(0.0..1.0f64, 192)) {
        let d = Descriptor { kind: DescriptorKind::Hsv, values };
        let line = format_line("obj", &d).unwrap();
        let back = parse_descriptors(&line).unwrap();
        for (a, b) in d.values.iter().zip(&back[0].descriptor.values) {
            prop_assert!((a - b).abs() <= 5e-9 * a.abs());
        }
        prop_assert_eq!(format_line("obj", &back[0].descriptor).unwrap(), line);
    }
}

#[test]
fn float_packed_rgb_is_unpacked() {
    let text = "VERSION .7\nFIELDS x y z rgb\nSIZE 4 4 4 4\nTYPE F F F F\nCOUNT 1 1 1 1\nWIDTH 2\nHEIGHT 1\n\
                VIEWPOINT 0 0 0 1 0 0 0\nPOINTS 2\nDATA ascii\n0.1 0.2 0.3 4.2108e+06\nnan nan nan 0\n";
    let loaded = parse_pcd(text).unwrap();
    assert_eq!(loaded.skipped_nonfinite, 1);
    assert_eq!(loaded.cloud.points[0].color, Rgb::new(128, 128, 224));
}

fn big_model() -> cloudsort_core::classifier::ClassifierModel {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for c in 0..10 {
        for _ in 0..3 {
            features.push(
                (0..500)
                    .map(|j| if j % 10 == c { 1.0 } else { 0.0 } + rng.random_range(0.0..0.1))
                    .collect(),
            );
            labels.push(format!("class{c}"));
        }
    }
    train(
        &TrainingSet::new(features, labels).unwrap(),
        &TrainConfig {
            epochs: 3,
            ..TrainConfig::default()
        },
    )
    .unwrap()
}

#[test]
fn model_file_shape_and_round_trip() {
    let m = big_model();
    let text = write_model(&m).unwrap();
    // Header, dim, classes, mean, std, then one weight line per class.
    assert_eq!(text.lines().count(), 5 + 10);
    let back = parse_model(&text).unwrap();
    assert_eq!(back.weights, m.weights);
    assert_eq!(back.biases, m.biases);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let x: Vec<f64> = (0..500).map(|_| rng.random_range(-1.0..2.0)).collect();
        assert_eq!(back.predict(&x).unwrap(), m.predict(&x).unwrap());
    }
    assert_eq!(write_model(&back).unwrap(), text);
}

#[test]
fn truncated_model_is_malformed() {
    let text = write_model(&big_model()).unwrap();
    for cut in [10, text.len() / 3, text.len() - 40] {
        assert!(
            matches!(parse_model(&text[..cut]), Err(ModelFileError::MalformedModel(_))),
            "cut {cut}"
        );
    }
}
