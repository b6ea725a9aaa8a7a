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

//! Synthetic tabletop data: primitive shapes in solid colors, sampled as an
//! overhead depth camera would see them (back faces culled), with Gaussian
//! position jitter and multiplicative color noise.

use cloudsort_core::geometry::Mat3;
use cloudsort_core::{ColorPoint, ColorPointCloud, Rgb, Vec3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    PlanePatch,
    Sphere,
    Cylinder,
    Box,
}

impl Shape {
    pub const ALL: [Shape; 4] = [Shape::PlanePatch, Shape::Sphere, Shape::Cylinder, Shape::Box];

    pub fn name(self) -> &'static str {
        match self {
            Shape::PlanePatch => "plane",
            Shape::Sphere => "sphere",
            Shape::Cylinder => "cylinder",
            Shape::Box => "box",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseColor {
    Red,
    Green,
    Blue,
}

impl BaseColor {
    pub const ALL: [BaseColor; 3] = [BaseColor::Red, BaseColor::Green, BaseColor::Blue];

    pub fn name(self) -> &'static str {
        match self {
            BaseColor::Red => "red",
            BaseColor::Green => "green",
            BaseColor::Blue => "blue",
        }
    }

    pub fn rgb(self) -> [f64; 3] {
        match self {
            BaseColor::Red => [200.0, 35.0, 30.0],
            BaseColor::Green => [40.0, 170.0, 50.0],
            BaseColor::Blue => [35.0, 55.0, 195.0],
        }
    }
}

/// Noise and density settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    /// Standard deviation of per-axis position noise, meters.
    pub jitter_sigma: f64,
    /// Each channel is scaled by a factor drawn from `1 ± channel_noise`.
    pub channel_noise: f64,
    /// Mean distance between neighboring samples, meters.
    pub spacing: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            jitter_sigma: 0.002,
            channel_noise: 0.10,
            spacing: 0.005,
        }
    }
}

/// An object standing on the table plane `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectSpec {
    pub shape: Shape,
    pub color: BaseColor,
    /// Footprint center on the table.
    pub base: Vec3,
    /// Radius for round shapes, half-extents for boxes and patches.
    pub size: Vec3,
    /// Rotation about world z.
    pub yaw: f64,
}

impl ObjectSpec {
    /// Label combining color and shape, e.g. `red_sphere`.
    pub fn label(&self) -> String {
        format!("{}_{}", self.color.name(), self.shape.name())
    }
}

/// A surface sample before noise: position and outward normal.
type Sample = (Vec3, Vec3);

fn sample_count(area: f64, spacing: f64) -> usize {
    (area / (spacing * spacing)).round().max(1.0) as usize
}

fn surface_samples(spec: &ObjectSpec, spacing: f64, rng: &mut ChaCha8Rng) -> Vec<Sample> {
    let rot = Mat3::rotation(Vec3::Z, spec.yaw);
    let s = spec.size;
    let mut local: Vec<Sample> = Vec::new();
    match spec.shape {
        Shape::PlanePatch => {
            // A thin slab lifted slightly off the table; only the top is seen.
            let n = sample_count(4.0 * s.x * s.y, spacing);
            for _ in 0..n {
                let p = Vec3::new(rng.random_range(-s.x..s.x), rng.random_range(-s.y..s.y), s.z);
                local.push((p, Vec3::Z));
            }
        }
        Shape::Sphere => {
            let r = s.x;
            let n = sample_count(4.0 * core::f64::consts::PI * r * r, spacing);
            let normal = Normal::new(0.0, 1.0).expect("unit normal distribution");
            while local.len() < n {
                let d = Vec3::new(normal.sample(rng), normal.sample(rng), normal.sample(rng));
                if let Some(u) = d.normalized() {
                    local.push((u * r + Vec3::new(0.0, 0.0, r), u));
                }
            }
        }
        Shape::Cylinder => {
            let (r, h) = (s.x, s.z);
            let lateral = sample_count(2.0 * core::f64::consts::PI * r * h, spacing);
            for _ in 0..lateral {
                let t = rng.random_range(0.0..core::f64::consts::TAU);
                let u = Vec3::new(t.cos(), t.sin(), 0.0);
                local.push((u * r + Vec3::new(0.0, 0.0, rng.random_range(0.0..h)), u));
            }
            let cap = sample_count(core::f64::consts::PI * r * r, spacing);
            for _ in 0..cap {
                let t = rng.random_range(0.0..core::f64::consts::TAU);
                let rho = r * rng.random::<f64>().sqrt();
                local.push((Vec3::new(rho * t.cos(), rho * t.sin(), h), Vec3::Z));
            }
        }
        Shape::Box => {
            let (hx, hy, hz) = (s.x, s.y, s.z);
            // Top and four sides; the bottom rests on the table.
            let faces = [
                (Vec3::Z, Vec3::new(0.0, 0.0, 2.0 * hz), Vec3::X * hx, Vec3::Y * hy),
                (Vec3::X, Vec3::new(hx, 0.0, hz), Vec3::Y * hy, Vec3::Z * hz),
                (-Vec3::X, Vec3::new(-hx, 0.0, hz), Vec3::Y * hy, Vec3::Z * hz),
                (Vec3::Y, Vec3::new(0.0, hy, hz), Vec3::X * hx, Vec3::Z * hz),
                (-Vec3::Y, Vec3::new(0.0, -hy, hz), Vec3::X * hx, Vec3::Z * hz),
            ];
            for (n, center, e1, e2) in faces {
                let count = sample_count(4.0 * e1.norm() * e2.norm(), spacing);
                for _ in 0..count {
                    let p = center + e1 * rng.random_range(-1.0..1.0) + e2 * rng.random_range(-1.0..1.0);
                    local.push((p, n));
                }
            }
        }
    }
    local
        .into_iter()
        .map(|(p, n)| (rot.mul_vec(p) + spec.base, rot.mul_vec(n)))
        .collect()
}

fn noisy_color(base: [f64; 3], noise: f64, rng: &mut ChaCha8Rng) -> Rgb {
    let mut c = [0u8; 3];
    for (o, b) in c.iter_mut().zip(base) {
        let f = if noise > 0.0 {
            rng.random_range(1.0 - noise..=1.0 + noise)
        } else {
            1.0
        };
        *o = (b * f).round().clamp(0.0, 255.0) as u8;
    }
    Rgb::new(c[0], c[1], c[2])
}

fn visible(p: Vec3, n: Vec3, viewpoint: Vec3) -> bool {
    n.dot(viewpoint - p) > 0.0
}

/// Points of one object as seen from `viewpoint`, noise applied.
pub fn render_object(
    spec: &ObjectSpec,
    viewpoint: Vec3,
    params: &SynthParams,
    rng: &mut ChaCha8Rng,
) -> Vec<ColorPoint> {
    let jitter = Normal::new(0.0, params.jitter_sigma.max(0.0)).expect("finite jitter sigma");
    let mut out = Vec::new();
    for (p, n) in surface_samples(spec, params.spacing, rng) {
        if !visible(p, n, viewpoint) {
            continue;
        }
        let q = p + Vec3::new(jitter.sample(rng), jitter.sample(rng), jitter.sample(rng));
        let color = noisy_color(spec.color.rgb(), params.channel_noise, rng);
        out.push(ColorPoint { position: q, color });
    }
    out
}

/// Object cloud as segmentation would leave it: table-height points dropped.
pub fn isolated_object(
    spec: &ObjectSpec,
    viewpoint: Vec3,
    params: &SynthParams,
    table_band: f64,
    seed: u64,
) -> ColorPointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = render_object(spec, viewpoint, params, &mut rng)
        .into_iter()
        .filter(|p| p.position.z > table_band)
        .collect();
    ColorPointCloud::with_viewpoint(points, viewpoint)
}

/// Rectangular gray table top at `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table {
    pub center: Vec3,
    pub half_x: f64,
    pub half_y: f64,
}

/// Table plus objects, sampled from `viewpoint`. Table samples under an
/// object's footprint are hidden.
pub fn render_scene(
    table: &Table,
    objects: &[ObjectSpec],
    viewpoint: Vec3,
    params: &SynthParams,
    seed: u64,
) -> ColorPointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, params.jitter_sigma.max(0.0)).expect("finite jitter sigma");
    let mut points = Vec::new();
    let n = sample_count(4.0 * table.half_x * table.half_y, params.spacing);
    for _ in 0..n {
        let p = table.center
            + Vec3::new(
                rng.random_range(-table.half_x..table.half_x),
                rng.random_range(-table.half_y..table.half_y),
                0.0,
            );
        let covered = objects.iter().any(|o| {
            let d = Mat3::rotation(Vec3::Z, -o.yaw).mul_vec(p - o.base);
            d.x.abs() <= o.size.x && d.y.abs() <= o.size.y
        });
        if covered {
            continue;
        }
        let q = p + Vec3::new(
            jitter.sample(&mut rng),
            jitter.sample(&mut rng),
            jitter.sample(&mut rng),
        );
        let color = noisy_color([150.0, 140.0, 130.0], params.channel_noise, &mut rng);
        points.push(ColorPoint { position: q, color });
    }
    for o in objects {
        points.extend(render_object(o, viewpoint, params, &mut rng));
    }
    ColorPointCloud::with_viewpoint(points, viewpoint)
}

/// Random size and placement for one dataset sample.
pub fn random_spec(shape: Shape, color: BaseColor, rng: &mut ChaCha8Rng) -> ObjectSpec {
    let size = match shape {
        Shape::PlanePatch => Vec3::new(rng.random_range(0.04..0.06), rng.random_range(0.04..0.06), 0.015),
        Shape::Sphere => {
            let r = rng.random_range(0.03..0.045);
            Vec3::new(r, r, r)
        }
        Shape::Cylinder => {
            let r = rng.random_range(0.03..0.04);
            Vec3::new(r, r, rng.random_range(0.08..0.12))
        }
        Shape::Box => Vec3::new(
            rng.random_range(0.03..0.05),
            rng.random_range(0.03..0.05),
            rng.random_range(0.03..0.05),
        ),
    };
    ObjectSpec {
        shape,
        color,
        base: Vec3::new(rng.random_range(0.38..0.52), rng.random_range(-0.08..0.08), 0.0),
        size,
        yaw: rng.random_range(-core::f64::consts::PI..core::f64::consts::PI),
    }
}

/// Camera of the fixture scene: behind the robot base, looking down at the
/// work area at roughly 50 degrees.
pub const CAMERA: Vec3 = Vec3::new(-0.05, 0.0, 0.55);

/// Camera `distance` from `target` at the given elevation and azimuth
/// (radians), measured from the -x direction.
pub fn orbit_camera(target: Vec3, distance: f64, elevation: f64, azimuth: f64) -> Vec3 {
    target
        + Vec3::new(
            -elevation.cos() * azimuth.cos(),
            -elevation.cos() * azimuth.sin(),
            elevation.sin(),
        ) * distance
}

/// Height below which object points are treated as table.
pub const TABLE_BAND: f64 = 0.01;

/// One generated sample.
#[derive(Debug, Clone)]
pub struct SyntheticSample {
    pub spec: ObjectSpec,
    pub cloud: ColorPointCloud,
}

/// `per_class` objects for each shape and color, in shape-major order. Each
/// is seen from a camera 0.6 to 0.8 m away, 30 to 60 degrees above the table
/// and within 30 degrees of the -x direction.
pub fn synthetic_dataset(per_class: usize, params: &SynthParams, seed: u64) -> Vec<SyntheticSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(per_class * 12);
    for shape in Shape::ALL {
        for color in BaseColor::ALL {
            for _ in 0..per_class {
                let spec = random_spec(shape, color, &mut rng);
                let camera = orbit_camera(
                    spec.base,
                    rng.random_range(0.6..0.8),
                    rng.random_range(30f64..60.0).to_radians(),
                    rng.random_range(-30f64..30.0).to_radians(),
                );
                let cloud = isolated_object(&spec, camera, params, TABLE_BAND, rng.random());
                out.push(SyntheticSample { spec, cloud });
            }
        }
    }
    out
}

/// Table with a red sphere and a green box, seen from [`CAMERA`].
pub fn fixture_scene(params: &SynthParams, seed: u64) -> (ColorPointCloud, Vec<ObjectSpec>) {
    let objects = vec![
        ObjectSpec {
            shape: Shape::Sphere,
            color: BaseColor::Red,
            base: Vec3::new(0.40, -0.10, 0.0),
            size: Vec3::new(0.04, 0.04, 0.04),
            yaw: 0.0,
        },
        ObjectSpec {
            shape: Shape::Box,
            color: BaseColor::Green,
            base: Vec3::new(0.50, 0.10, 0.0),
            size: Vec3::new(0.04, 0.035, 0.04),
            yaw: 0.4,
        },
    ];
    let table = Table {
        center: Vec3::new(0.45, 0.0, 0.0),
        half_x: 0.25,
        half_y: 0.30,
    };
    (render_scene(&table, &objects, CAMERA, params, seed), objects)
}
