//! The 2D Gaussian surfel primitive.

use crate::real::Real;
use crate::vec::{Mat3, Quat, Vec3};

/// One elliptical disk primitive.
///
/// The tangent frame is stored as a quaternion; `tangent_u`/`tangent_v` are the
/// first two columns of its rotation matrix and the disk normal is the third,
/// so the frame stays orthonormal no matter what the optimizer does to the raw
/// components. Scales live in log-space and opacity in logit-space for the
/// same reason.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPrimitive<T> {
    /// Disk center in world units.
    pub centroid: Vec3<T>,
    /// Tangent-frame rotation (normalized on use, not on store).
    pub rotation: Quat<T>,
    /// log(s_u), log(s_v).
    pub log_scale_u: T,
    pub log_scale_v: T,
    /// Opacity in logit space; opacity = logistic(opacity_logit).
    pub opacity_logit: T,
    /// Static color, used only when the appearance network is disabled.
    pub appearance_seed: Vec3<T>,
}

impl<T: Real> GaussianPrimitive<T> {
    /// Rotation matrix of the (normalized) stored quaternion.
    #[inline]
    pub fn frame(&self) -> Mat3<T> {
        self.rotation.to_rotation()
    }

    #[inline]
    pub fn tangent_u(&self) -> Vec3<T> {
        self.frame().col(0)
    }

    #[inline]
    pub fn tangent_v(&self) -> Vec3<T> {
        self.frame().col(1)
    }

    /// Disk normal `tangent_u x tangent_v` (the shortest axis).
    #[inline]
    pub fn normal(&self) -> Vec3<T> {
        self.frame().col(2)
    }

    #[inline]
    pub fn scale_u(&self) -> T {
        self.log_scale_u.exp()
    }

    #[inline]
    pub fn scale_v(&self) -> T {
        self.log_scale_v.exp()
    }

    #[inline]
    pub fn opacity(&self) -> T {
        logistic(self.opacity_logit)
    }

    /// Re-normalize the stored quaternion. Idempotent.
    pub fn reorthonormalize(&mut self) {
        self.rotation = self.rotation.normalized();
    }

    pub fn cast<U: Real>(&self) -> GaussianPrimitive<U> {
        GaussianPrimitive {
            centroid: self.centroid.cast(),
            rotation: self.rotation.cast(),
            log_scale_u: U::of(self.log_scale_u.as_f64()),
            log_scale_v: U::of(self.log_scale_v.as_f64()),
            opacity_logit: U::of(self.opacity_logit.as_f64()),
            appearance_seed: self.appearance_seed.cast(),
        }
    }
}

#[inline(always)]
pub fn logistic<T: Real>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

#[inline(always)]
pub fn logit<T: Real>(p: T) -> T {
    (p / (T::one() - p)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GaussianPrimitive<f64> {
        GaussianPrimitive {
            centroid: Vec3::new(0.1, -0.2, 0.3),
            rotation: Quat::new(0.9, 0.1, -0.3, 0.2),
            log_scale_u: -1.0,
            log_scale_v: -2.0,
            opacity_logit: 0.4,
            appearance_seed: Vec3::new(0.5, 0.5, 0.5),
        }
    }

    #[test]
    fn frame_is_orthonormal() {
        let g = sample();
        let tu = g.tangent_u();
        let tv = g.tangent_v();
        assert!(tu.dot(tv).abs() < 1e-6);
        assert!((tu.norm() - 1.0).abs() < 1e-6);
        assert!((tv.norm() - 1.0).abs() < 1e-6);
        assert!((g.normal() - tu.cross(tv)).norm() < 1e-12);
        assert!((g.normal().norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reorthonormalize_is_idempotent() {
        let mut g = sample();
        g.reorthonormalize();
        let once = g.rotation;
        g.reorthonormalize();
        let twice = g.rotation;
        assert!((once.w - twice.w).abs() < 1e-12);
        assert!((once.x - twice.x).abs() < 1e-12);
        assert!((once.y - twice.y).abs() < 1e-12);
        assert!((once.z - twice.z).abs() < 1e-12);
    }

    #[test]
    fn opacity_in_open_unit_interval() {
        // Beyond |logit| ~ 36 the f64 logistic rounds to exactly 0/1; the
        // optimizer never takes logits anywhere near that far out.
        for logit_v in [-15.0, -2.0, 0.0, 2.0, 15.0] {
            let mut g = sample();
            g.opacity_logit = logit_v;
            let o = g.opacity();
            assert!(o > 0.0 && o < 1.0);
        }
        assert!((logit(logistic(0.37f64)) - 0.37).abs() < 1e-12);
    }

    #[test]
    fn scales_positive() {
        let g = sample();
        assert!(g.scale_u() > 0.0);
        assert!(g.scale_v() > 0.0);
    }
}
