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

//! UR5 forward kinematics (standard distal Denavit-Hartenberg) and the
//! closed-form geometric inverse with up to eight branches.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::ops::Mul;

use thiserror::Error;

use crate::geometry::{wrap_angle, Mat3, Vec3};

/// Slack on inverse-trig arguments before a branch is declared unreachable.
pub const TRIG_EPS: f64 = 1e-9;
/// Returned solutions reproduce the target to this max-abs matrix error.
pub const FK_TOLERANCE: f64 = 1e-6;
/// Solutions closer than this on every joint are the same solution.
pub const DISTINCT_TOLERANCE: f64 = 1e-6;
/// `|sin θ5|` below this is a wrist singularity.
pub const WRIST_SINGULAR_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("target is not reachable")]
    Unreachable,
    #[error("no candidate solutions to choose from")]
    NoSolutions,
    #[error("target is not a rigid transform")]
    InvalidPose,
    #[error("D-H table does not have the UR wrist layout: {0}")]
    UnsupportedGeometry(&'static str),
}

/// Link parameters for joints 1..6.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhParameters {
    pub a: [f64; 6],
    pub d: [f64; 6],
    pub alpha: [f64; 6],
}

impl DhParameters {
    /// Manufacturer table for the UR5.
    pub fn ur5() -> Self {
        DhParameters {
            a: [0.0, -0.425, -0.39225, 0.0, 0.0, 0.0],
            d: [0.089159, 0.0, 0.0, 0.10915, 0.09465, 0.0823],
            alpha: [FRAC_PI_2, 0.0, 0.0, FRAC_PI_2, -FRAC_PI_2, 0.0],
        }
    }

    pub fn from_rows(rows: [[f64; 3]; 6]) -> Self {
        DhParameters {
            a: rows.map(|r| r[0]),
            d: rows.map(|r| r[1]),
            alpha: rows.map(|r| r[2]),
        }
    }

    /// Upper bound on the distance from the base origin to the flange.
    pub fn total_reach(&self) -> f64 {
        self.a.iter().chain(&self.d).map(|v| v.abs()).sum()
    }

    fn link(&self, i: usize, theta: f64) -> Pose {
        link_transform(theta, self.a[i], self.d[i], self.alpha[i])
    }

    /// The analytic inverse needs the UR arrangement: a shoulder offset along
    /// z, two parallel-axis links, and a spherical-offset wrist.
    fn check_ur_layout(&self) -> Result<(), KinematicsError> {
        let near = |x: f64, y: f64| (x - y).abs() < 1e-9;
        let alpha_ok = near(self.alpha[0], FRAC_PI_2)
            && near(self.alpha[1], 0.0)
            && near(self.alpha[2], 0.0)
            && near(self.alpha[3], FRAC_PI_2)
            && near(self.alpha[4], -FRAC_PI_2)
            && near(self.alpha[5], 0.0);
        if !alpha_ok {
            return Err(KinematicsError::UnsupportedGeometry("twist angles"));
        }
        if !(near(self.a[0], 0.0) && near(self.a[3], 0.0) && near(self.a[4], 0.0) && near(self.a[5], 0.0)) {
            return Err(KinematicsError::UnsupportedGeometry("a1, a4, a5, a6 must be zero"));
        }
        if !(near(self.d[1], 0.0) && near(self.d[2], 0.0)) {
            return Err(KinematicsError::UnsupportedGeometry("d2, d3 must be zero"));
        }
        if self.a[1] == 0.0 || self.a[2] == 0.0 || self.d[5] == 0.0 {
            return Err(KinematicsError::UnsupportedGeometry("a2, a3, d6 must be non-zero"));
        }
        Ok(())
    }
}

impl Default for DhParameters {
    fn default() -> Self {
        DhParameters::ur5()
    }
}

/// Six joint angles, each in `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JointConfig {
    theta: [f64; 6],
}

impl JointConfig {
    pub fn new(theta: [f64; 6]) -> Self {
        JointConfig {
            theta: theta.map(wrap_angle),
        }
    }

    pub fn angles(&self) -> [f64; 6] {
        self.theta
    }

    /// Largest per-joint wrapped difference.
    pub fn max_joint_distance(&self, other: &JointConfig) -> f64 {
        self.theta
            .iter()
            .zip(&other.theta)
            .map(|(a, b)| wrap_angle(a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Sum of per-joint wrapped differences.
    pub fn joint_distance(&self, other: &JointConfig) -> f64 {
        self.theta
            .iter()
            .zip(&other.theta)
            .map(|(a, b)| wrap_angle(a - b).abs())
            .sum()
    }
}

/// Homogeneous 4×4 rigid transform, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose(pub [[f64; 4]; 4]);

impl Pose {
    pub const IDENTITY: Pose = Pose([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]);

    pub fn from_parts(rotation: Mat3, translation: Vec3) -> Pose {
        let r = rotation.0;
        let t = translation;
        Pose([
            [r[0][0], r[0][1], r[0][2], t.x],
            [r[1][0], r[1][1], r[1][2], t.y],
            [r[2][0], r[2][1], r[2][2], t.z],
            [0.0, 0.0, 0.0, 1.0],
        ])
    }

    pub fn rotation(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[0][1], m[0][2]],
            [m[1][0], m[1][1], m[1][2]],
            [m[2][0], m[2][1], m[2][2]],
        ])
    }

    pub fn translation(&self) -> Vec3 {
        Vec3::new(self.0[0][3], self.0[1][3], self.0[2][3])
    }

    /// Inverse of a rigid transform.
    pub fn inverse(&self) -> Pose {
        let rt = self.rotation().transpose();
        let t = -rt.mul_vec(self.translation());
        Pose::from_parts(rt, t)
    }

    pub fn max_abs_diff(&self, other: &Pose) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        m
    }

    /// Orthonormal rotation with det +1 (both within `tol`) and bottom row
    /// `(0, 0, 0, 1)`.
    pub fn is_rigid(&self, tol: f64) -> bool {
        if self.0.iter().flatten().any(|v| !v.is_finite()) {
            return false;
        }
        if self.0[3] != [0.0, 0.0, 0.0, 1.0] {
            return false;
        }
        let r = self.rotation();
        let rtr = r.transpose().mul_mat(&r);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                if (rtr.0[i][j] - want).abs() >= tol {
                    return false;
                }
            }
        }
        (r.determinant() - 1.0).abs() < tol
    }
}

impl Mul for Pose {
    type Output = Pose;

    fn mul(self, o: Pose) -> Pose {
        let mut r = [[0.0; 4]; 4];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..4).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Pose(r)
    }
}

/// `Rot_z(θ) · Trans_z(d) · Trans_x(a) · Rot_x(α)`.
pub fn link_transform(theta: f64, a: f64, d: f64, alpha: f64) -> Pose {
    let (st, ct) = libm::sincos(theta);
    let (sa, ca) = libm::sincos(alpha);
    Pose([
        [ct, -st * ca, st * sa, a * ct],
        [st, ct * ca, -ct * sa, a * st],
        [0.0, sa, ca, d],
        [0.0, 0.0, 0.0, 1.0],
    ])
}

pub fn forward_kinematics(q: &JointConfig, dh: &DhParameters) -> Pose {
    q.theta
        .iter()
        .enumerate()
        .fold(Pose::IDENTITY, |acc, (i, &t)| acc * dh.link(i, t))
}

/// All inverse kinematics branches for a target.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IkSolutions {
    pub solutions: Vec<JointConfig>,
    /// The wrist was singular (θ5 ≈ 0 or π) on at least one branch; those
    /// branches report the representative θ6 = 0.
    pub wrist_singular: bool,
}

/// Arc-cosine/sine argument with `TRIG_EPS` slack, or `None` when out of range.
fn unit_arg(x: f64) -> Option<f64> {
    if x.is_finite() && x.abs() <= 1.0 + TRIG_EPS {
        Some(x.clamp(-1.0, 1.0))
    } else {
        None
    }
}

/// Geometric inverse: shoulder left/right × wrist flip/no-flip × elbow
/// up/down. Every returned configuration reproduces `target` within
/// [`FK_TOLERANCE`]; duplicates are merged.
pub fn inverse_kinematics(target: &Pose, dh: &DhParameters) -> Result<IkSolutions, KinematicsError> {
    if !target.is_rigid(1e-9) {
        return Err(KinematicsError::InvalidPose);
    }
    dh.check_ur_layout()?;
    let (a2, a3) = (dh.a[1], dh.a[2]);
    let (d4, d6) = (dh.d[3], dh.d[5]);

    let rot = target.rotation();
    let x_axis = rot.column(0);
    let y_axis = rot.column(1);
    let z_axis = rot.column(2);
    let p06 = target.translation();
    let p05 = p06 - z_axis * d6;

    let radial = libm::hypot(p05.x, p05.y);
    let mut out = IkSolutions::default();
    if radial == 0.0 {
        // Wrist centre on the base axis: shoulder angle is free.
        return Err(KinematicsError::Unreachable);
    }
    let Some(shoulder_arg) = unit_arg(d4 / radial) else {
        return Err(KinematicsError::Unreachable);
    };
    let phi = libm::atan2(p05.y, p05.x);
    let offset = libm::asin(shoulder_arg);

    for theta1 in [phi + offset, phi + PI - offset] {
        let (s1, c1) = libm::sincos(theta1);
        let Some(wrist_arg) = unit_arg((p06.x * s1 - p06.y * c1 - d4) / d6) else {
            continue;
        };
        let acos5 = libm::acos(wrist_arg);
        for theta5 in [acos5, -acos5] {
            let s5 = libm::sin(theta5);
            let theta6 = if s5.abs() < WRIST_SINGULAR_EPS {
                out.wrist_singular = true;
                0.0
            } else {
                let sign = s5.signum();
                libm::atan2(
                    -sign * (y_axis.x * s1 - y_axis.y * c1),
                    sign * (x_axis.x * s1 - x_axis.y * c1),
                )
            };

            let t14 =
                dh.link(0, theta1).inverse() * *target * dh.link(5, theta6).inverse() * dh.link(4, theta5).inverse();
            let (px, py) = (t14.0[0][3], t14.0[1][3]);
            let Some(elbow_arg) = unit_arg((px * px + py * py - a2 * a2 - a3 * a3) / (2.0 * a2 * a3)) else {
                continue;
            };
            let acos3 = libm::acos(elbow_arg);
            for theta3 in [acos3, -acos3] {
                let s3 = libm::sin(theta3);
                let c3 = libm::cos(theta3);
                let theta2 = libm::atan2(py, px) - libm::atan2(a3 * s3, a2 + a3 * c3);
                let t34 = dh.link(2, theta3).inverse() * dh.link(1, theta2).inverse() * t14;
                let theta4 = libm::atan2(t34.0[1][0], t34.0[0][0]);

                let q = JointConfig::new([theta1, theta2, theta3, theta4, theta5, theta6]);
                if forward_kinematics(&q, dh).max_abs_diff(target) >= FK_TOLERANCE {
                    continue;
                }
                if out
                    .solutions
                    .iter()
                    .all(|s| s.max_joint_distance(&q) > DISTINCT_TOLERANCE)
                {
                    out.solutions.push(q);
                }
            }
        }
    }
    if out.solutions.is_empty() {
        return Err(KinematicsError::Unreachable);
    }
    Ok(out)
}

/// The solution nearest `current` by summed wrapped joint distance; ties go
/// to the earlier solution.
pub fn select_solution(solutions: &[JointConfig], current: &JointConfig) -> Result<JointConfig, KinematicsError> {
    let mut best: Option<(f64, JointConfig)> = None;
    for s in solutions {
        let d = s.joint_distance(current);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, *s));
        }
    }
    best.map(|(_, s)| s).ok_or(KinematicsError::NoSolutions)
}

/// Tool pose `standoff` along `approach` from the object centroid, with the
/// tool z-axis pointing back along `-approach`. The tool x-axis is world x
/// projected off the approach direction, or world y when the two are
/// parallel.
pub fn grasp_target(object_centroid: Vec3, approach: Vec3, standoff: f64) -> Pose {
    let a = approach.normalized().unwrap_or(Vec3::Z);
    let z = -a;
    let project = |v: Vec3| {
        (v - z * v.dot(z))
            .normalized()
            .filter(|_| (v - z * v.dot(z)).norm() > 1e-6)
    };
    let x = project(Vec3::X).or_else(|| project(Vec3::Y)).unwrap_or(Vec3::X);
    let y = z.cross(x);
    Pose::from_parts(Mat3::from_columns(x, y, z), object_centroid + a * standoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_planar_chain() {
        let dh = DhParameters {
            a: [0.0; 6],
            d: [0.0; 6],
            alpha: [0.0; 6],
        };
        let q = JointConfig::new([0.1, 0.2, -0.3, 0.4, 0.5, -0.6]);
        let pose = forward_kinematics(&q, &dh);
        let want = Pose::from_parts(Mat3::rotation(Vec3::Z, 0.3), Vec3::ZERO);
        assert!(pose.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn joint_one_half_turn() {
        let dh = DhParameters::ur5();
        let zero = forward_kinematics(&JointConfig::default(), &dh).translation();
        let turned = forward_kinematics(&JointConfig::new([PI, 0.0, 0.0, 0.0, 0.0, 0.0]), &dh).translation();
        assert!((turned.x + zero.x).abs() < 1e-12);
        assert!((turned.y + zero.y).abs() < 1e-12);
        assert!((turned.z - zero.z).abs() < 1e-12);
    }

    #[test]
    fn ik_round_trip() {
        let dh = DhParameters::ur5();
        let q = JointConfig::new([0.3, -1.1, 1.4, -0.7, 1.2, 0.4]);
        let target = forward_kinematics(&q, &dh);
        let sols = inverse_kinematics(&target, &dh).unwrap();
        assert_eq!(sols.solutions.len(), 8);
        assert!(sols.solutions.iter().any(|s| s.max_joint_distance(&q) < 1e-9));
        for s in &sols.solutions {
            assert!(forward_kinematics(s, &dh).max_abs_diff(&target) < FK_TOLERANCE);
        }
        assert!(select_solution(&sols.solutions, &q).unwrap().max_joint_distance(&q) < 1e-9);
    }

    #[test]
    fn unreachable_target() {
        let dh = DhParameters::ur5();
        let far = Pose::from_parts(Mat3::IDENTITY, Vec3::new(dh.total_reach() + 0.5, 0.0, 0.2));
        assert_eq!(inverse_kinematics(&far, &dh), Err(KinematicsError::Unreachable));
    }

    #[test]
    fn wrist_singular_is_flagged() {
        let dh = DhParameters::ur5();
        let q = JointConfig::new([0.3, -1.1, 1.4, -0.7, 0.0, 0.4]);
        let target = forward_kinematics(&q, &dh);
        let sols = inverse_kinematics(&target, &dh).unwrap();
        assert!(sols.wrist_singular);
        for s in &sols.solutions {
            assert!(forward_kinematics(s, &dh).max_abs_diff(&target) < FK_TOLERANCE);
        }
    }

    #[test]
    fn non_rigid_target() {
        let mut p = Pose::IDENTITY;
        p.0[0][0] = 2.0;
        assert_eq!(
            inverse_kinematics(&p, &DhParameters::ur5()),
            Err(KinematicsError::InvalidPose)
        );
    }

    #[test]
    fn selection() {
        let a = JointConfig::new([0.0; 6]);
        let b = JointConfig::new([1.0; 6]);
        assert_eq!(select_solution(&[b], &a).unwrap(), b);
        assert_eq!(select_solution(&[a, b], &b).unwrap(), b);
        assert_eq!(select_solution(&[], &a), Err(KinematicsError::NoSolutions));
        // Wrapping: 3.1 and -3.1 are close.
        let c = JointConfig::new([3.1, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let d = JointConfig::new([-3.1, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(select_solution(&[a, d], &c).unwrap(), d);
    }

    #[test]
    fn grasp_pose_axis_aligned() {
        let p = grasp_target(Vec3::new(0.4, 0.0, 0.1), Vec3::Z, 0.1);
        assert!(p.translation().max_abs_diff(Vec3::new(0.4, 0.0, 0.2)) < 1e-15);
        assert_eq!(p.rotation().column(2), -Vec3::Z);
        assert!(p.is_rigid(1e-12));
    }

    #[test]
    fn grasp_pose_fallback_axis() {
        let p = grasp_target(Vec3::ZERO, Vec3::X, 0.05);
        assert!(p.is_rigid(1e-12));
        assert!(p.rotation().column(0).max_abs_diff(Vec3::Y) < 1e-15);
    }
}
