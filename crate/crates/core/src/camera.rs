//! Pinhole camera with a rigid world-to-camera pose.

use crate::real::Real;
use crate::vec::{Mat3, Vec3};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug)]
pub struct Camera<T> {
    pub width: usize,
    pub height: usize,
    pub focal_x: T,
    pub focal_y: T,
    pub principal_x: T,
    pub principal_y: T,
    /// World-to-camera rotation (orthonormal, det +1).
    pub rotation: Mat3<T>,
    /// World-to-camera translation: `x_cam = R x_world + t`.
    pub translation: Vec3<T>,
}

impl<T: Real> Camera<T> {
    /// Camera center in world coordinates.
    pub fn center(&self) -> Vec3<T> {
        -(self.rotation.transpose().mul_vec(self.translation))
    }

    /// Unit world-space direction of the ray through the center of pixel
    /// (row, col). Pixel centers sit at half-integer coordinates.
    pub fn ray_direction(&self, row: usize, col: usize) -> Vec3<T> {
        let half = T::of(0.5);
        let px = T::from_usize(col).unwrap() + half;
        let py = T::from_usize(row).unwrap() + half;
        let dir_cam = Vec3::new(
            (px - self.principal_x) / self.focal_x,
            (py - self.principal_y) / self.focal_y,
            T::one(),
        );
        self.rotation.transpose().mul_vec(dir_cam).normalized()
    }

    /// Camera-space coordinates of a world point.
    #[inline]
    pub fn to_camera(&self, p: Vec3<T>) -> Vec3<T> {
        self.rotation.mul_vec(p) + self.translation
    }

    /// Camera-space depth (z) of a world point.
    #[inline]
    pub fn depth_of(&self, p: Vec3<T>) -> T {
        self.rotation.row(2).dot(p) + self.translation.z
    }

    /// World point at camera depth `z` along the pixel ray of (row, col).
    pub fn unproject(&self, row: usize, col: usize, z: T) -> Vec3<T> {
        let half = T::of(0.5);
        let px = T::from_usize(col).unwrap() + half;
        let py = T::from_usize(row).unwrap() + half;
        let cam = Vec3::new(
            (px - self.principal_x) / self.focal_x * z,
            (py - self.principal_y) / self.focal_y * z,
            z,
        );
        self.rotation.transpose().mul_vec(cam - self.translation)
    }

    /// Direction (in world space, unnormalized camera ray scaled by 1) along
    /// which `unproject(row, col, z)` moves per unit depth.
    pub fn unproject_dir(&self, row: usize, col: usize) -> Vec3<T> {
        let half = T::of(0.5);
        let px = T::from_usize(col).unwrap() + half;
        let py = T::from_usize(row).unwrap() + half;
        let cam = Vec3::new(
            (px - self.principal_x) / self.focal_x,
            (py - self.principal_y) / self.focal_y,
            T::one(),
        );
        self.rotation.transpose().mul_vec(cam)
    }

    /// Pixel (x, y) of a camera-space point; no bounds check.
    pub fn project_cam(&self, cam: Vec3<T>) -> (T, T) {
        (
            self.focal_x * cam.x / cam.z + self.principal_x,
            self.focal_y * cam.y / cam.z + self.principal_y,
        )
    }

    /// Rotation orthonormality / focal validity check used by loaders.
    pub fn is_valid(&self, tol: T) -> bool {
        if !(self.focal_x > T::zero() && self.focal_y > T::zero()) {
            return false;
        }
        let rt_r = self.rotation.transpose().mul_mat(&self.rotation);
        let id = Mat3::identity();
        for i in 0..3 {
            for j in 0..3 {
                if (rt_r.m[i][j] - id.m[i][j]).abs() > tol {
                    return false;
                }
            }
        }
        (self.rotation.det() - T::one()).abs() <= tol
    }

    pub fn cast<U: Real>(&self) -> Camera<U> {
        Camera {
            width: self.width,
            height: self.height,
            focal_x: U::of(self.focal_x.as_f64()),
            focal_y: U::of(self.focal_y.as_f64()),
            principal_x: U::of(self.principal_x.as_f64()),
            principal_y: U::of(self.principal_y.as_f64()),
            rotation: self.rotation.cast(),
            translation: self.translation.cast(),
        }
    }
}

/// JSON wire form of a camera: rotation row-major, translation world-to-camera.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CameraRecord {
    pub width: usize,
    pub height: usize,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    #[serde(rename = "R")]
    pub r: [f64; 9],
    pub t: [f64; 3],
}

impl CameraRecord {
    pub fn from_camera<T: Real>(cam: &Camera<T>) -> Self {
        let m = &cam.rotation.m;
        Self {
            width: cam.width,
            height: cam.height,
            fx: cam.focal_x.as_f64(),
            fy: cam.focal_y.as_f64(),
            cx: cam.principal_x.as_f64(),
            cy: cam.principal_y.as_f64(),
            r: [
                m[0][0].as_f64(),
                m[0][1].as_f64(),
                m[0][2].as_f64(),
                m[1][0].as_f64(),
                m[1][1].as_f64(),
                m[1][2].as_f64(),
                m[2][0].as_f64(),
                m[2][1].as_f64(),
                m[2][2].as_f64(),
            ],
            t: [
                cam.translation.x.as_f64(),
                cam.translation.y.as_f64(),
                cam.translation.z.as_f64(),
            ],
        }
    }

    pub fn to_camera<T: Real>(&self) -> Camera<T> {
        Camera {
            width: self.width,
            height: self.height,
            focal_x: T::of(self.fx),
            focal_y: T::of(self.fy),
            principal_x: T::of(self.cx),
            principal_y: T::of(self.cy),
            rotation: Mat3 {
                m: [
                    [T::of(self.r[0]), T::of(self.r[1]), T::of(self.r[2])],
                    [T::of(self.r[3]), T::of(self.r[4]), T::of(self.r[5])],
                    [T::of(self.r[6]), T::of(self.r[7]), T::of(self.r[8])],
                ],
            },
            translation: Vec3::new(T::of(self.t[0]), T::of(self.t[1]), T::of(self.t[2])),
        }
    }
}

/// A camera looking from `eye` toward `target`, +z forward, +y image-down.
pub fn look_at<T: Real>(
    eye: Vec3<T>,
    target: Vec3<T>,
    up_hint: Vec3<T>,
    width: usize,
    height: usize,
    focal: T,
) -> Camera<T> {
    let forward = (target - eye).normalized();
    let mut right = forward.cross(up_hint);
    if right.norm() < T::of(1e-6) {
        // Degenerate up hint; pick any perpendicular axis.
        let alt = if forward.x.abs() < T::of(0.9) {
            Vec3::new(T::one(), T::zero(), T::zero())
        } else {
            Vec3::new(T::zero(), T::one(), T::zero())
        };
        right = forward.cross(alt);
    }
    let right = right.normalized();
    let down = forward.cross(right);
    // Camera axes as rows of the world-to-camera rotation.
    let rotation = Mat3::from_rows(right, down, forward);
    let translation = -(rotation.mul_vec(eye));
    Camera {
        width,
        height,
        focal_x: focal,
        focal_y: focal,
        principal_x: T::of(width as f64 / 2.0),
        principal_y: T::of(height as f64 / 2.0),
        rotation,
        translation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn look_at_faces_target() {
        let cam = look_at(
            Vec3::new(0.0f64, 0.0, -2.5),
            Vec3::zero(),
            Vec3::new(0.0, 1.0, 0.0),
            64,
            64,
            70.0,
        );
        assert!(cam.is_valid(1e-9));
        // Target projects to the principal point at positive depth.
        let cam_pt = cam.to_camera(Vec3::zero());
        assert!((cam_pt.x).abs() < 1e-12 && (cam_pt.y).abs() < 1e-12);
        assert!((cam_pt.z - 2.5).abs() < 1e-12);
        assert!((cam.center() - Vec3::new(0.0, 0.0, -2.5)).norm() < 1e-12);
    }

    #[test]
    fn unproject_inverts_ray() {
        let cam = look_at(
            Vec3::new(1.0f64, -2.0, 1.5),
            Vec3::new(0.1, 0.0, -0.2),
            Vec3::new(0.0, 0.0, 1.0),
            32,
            24,
            40.0,
        );
        let p = cam.unproject(7, 13, 2.0);
        assert!((cam.depth_of(p) - 2.0).abs() < 1e-12);
        let dir = cam.ray_direction(7, 13);
        let along = (p - cam.center()).normalized();
        assert!((dir - along).norm() < 1e-12);
    }

    #[test]
    fn record_roundtrip() {
        let cam = look_at(
            Vec3::new(1.0f64, 2.0, 3.0),
            Vec3::zero(),
            Vec3::new(0.0, 0.0, 1.0),
            64,
            48,
            55.0,
        );
        let rec = CameraRecord::from_camera(&cam);
        let back: Camera<f64> = rec.to_camera();
        assert!((back.center() - cam.center()).norm() < 1e-12);
        assert_eq!(back.width, 64);
        assert_eq!(back.height, 48);
    }
}
