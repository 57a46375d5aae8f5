//! Minimal 3D linear algebra over a generic scalar.

use crate::real::Real;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

/// Column 3-vector.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    #[inline(always)]
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    #[inline(always)]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    #[inline(always)]
    pub fn splat(v: T) -> Self {
        Self::new(v, v, v)
    }

    #[inline(always)]
    pub fn from_f64(x: f64, y: f64, z: f64) -> Self {
        Self::new(T::of(x), T::of(y), T::of(z))
    }

    #[inline(always)]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline(always)]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline(always)]
    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    #[inline(always)]
    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    /// Unit vector; panics in debug builds when the norm is zero.
    #[inline]
    pub fn normalized(self) -> Self {
        let n = self.norm();
        debug_assert!(n > T::zero(), "normalizing zero vector");
        self / n
    }

    /// Unit vector, or zero when the norm is below `eps`.
    #[inline]
    pub fn normalized_or_zero(self, eps: T) -> Self {
        let n = self.norm();
        if n < eps {
            Self::zero()
        } else {
            self / n
        }
    }

    #[inline(always)]
    pub fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    #[inline]
    pub fn abs(self) -> Self {
        Self::new(self.x.abs(), self.y.abs(), self.z.abs())
    }

    #[inline]
    pub fn max_component(self) -> T {
        self.x.max(self.y).max(self.z)
    }

    #[inline]
    pub fn clamp(self, lo: T, hi: T) -> Self {
        Self::new(
            self.x.max(lo).min(hi),
            self.y.max(lo).min(hi),
            self.z.max(lo).min(hi),
        )
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Convert component-wise between scalar lanes.
    pub fn cast<U: Real>(self) -> Vec3<U> {
        Vec3::new(U::of(self.x.as_f64()), U::of(self.y.as_f64()), U::of(self.z.as_f64()))
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    #[inline(always)]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    #[inline(always)]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    #[inline(always)]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    #[inline(always)]
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Real> Div<T> for Vec3<T> {
    type Output = Self;
    #[inline(always)]
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    #[inline(always)]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    #[inline(always)]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    #[inline(always)]
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl<T> IndexMut<usize> for Vec3<T> {
    #[inline(always)]
    fn index_mut(&mut self, i: usize) -> &mut T {
        match i {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

/// Row-major 3x3 matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat3<T> {
    pub m: [[T; 3]; 3],
}

impl<T: Real> Mat3<T> {
    pub fn identity() -> Self {
        let mut m = [[T::zero(); 3]; 3];
        m[0][0] = T::one();
        m[1][1] = T::one();
        m[2][2] = T::one();
        Self { m }
    }

    pub fn from_rows(r0: Vec3<T>, r1: Vec3<T>, r2: Vec3<T>) -> Self {
        Self {
            m: [r0.to_array(), r1.to_array(), r2.to_array()],
        }
    }

    pub fn from_cols(c0: Vec3<T>, c1: Vec3<T>, c2: Vec3<T>) -> Self {
        Self {
            m: [
                [c0.x, c1.x, c2.x],
                [c0.y, c1.y, c2.y],
                [c0.z, c1.z, c2.z],
            ],
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> Vec3<T> {
        Vec3::from_array(self.m[i])
    }

    #[inline]
    pub fn col(&self, j: usize) -> Vec3<T> {
        Vec3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn transpose(&self) -> Self {
        Self::from_cols(self.row(0), self.row(1), self.row(2))
    }

    #[inline]
    pub fn mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }

    pub fn mul_mat(&self, o: &Self) -> Self {
        Self::from_cols(
            self.mul_vec(o.col(0)),
            self.mul_vec(o.col(1)),
            self.mul_vec(o.col(2)),
        )
    }

    pub fn det(&self) -> T {
        self.col(0).dot(self.col(1).cross(self.col(2)))
    }

    /// Inverse by adjugate; returns `None` when `|det| < eps`.
    pub fn inverse(&self, eps: T) -> Option<Self> {
        let c0 = self.col(0);
        let c1 = self.col(1);
        let c2 = self.col(2);
        let r0 = c1.cross(c2);
        let r1 = c2.cross(c0);
        let r2 = c0.cross(c1);
        let det = c0.dot(r0);
        if det.abs() < eps {
            return None;
        }
        let inv_det = T::one() / det;
        Some(Self::from_rows(r0 * inv_det, r1 * inv_det, r2 * inv_det))
    }

    pub fn cast<U: Real>(&self) -> Mat3<U> {
        Mat3::from_rows(self.row(0).cast(), self.row(1).cast(), self.row(2).cast())
    }
}

/// Quaternion `w + xi + yj + zk`; rotations use the normalized form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quat<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quat<T> {
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn norm(self) -> T {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Self::new(self.w / n, self.x / n, self.y / n, self.z / n)
    }

    /// Rotation matrix of the normalized quaternion.
    pub fn to_rotation(self) -> Mat3<T> {
        let q = self.normalized();
        let (w, x, y, z) = (q.w, q.x, q.y, q.z);
        let two = T::of(2.0);
        let one = T::one();
        Mat3 {
            m: [
                [
                    one - two * (y * y + z * z),
                    two * (x * y - w * z),
                    two * (x * z + w * y),
                ],
                [
                    two * (x * y + w * z),
                    one - two * (x * x + z * z),
                    two * (y * z - w * x),
                ],
                [
                    two * (x * z - w * y),
                    two * (y * z + w * x),
                    one - two * (x * x + y * y),
                ],
            ],
        }
    }

    /// Pull a gradient w.r.t. the rotation matrix back to the raw (unnormalized)
    /// quaternion components, chaining through both `to_rotation` and the
    /// normalization inside it.
    pub fn rotation_backward(self, d_rot: &Mat3<T>) -> Quat<T> {
        let n = self.norm();
        let q = self.normalized();
        let (w, x, y, z) = (q.w, q.x, q.y, q.z);
        let two = T::of(2.0);

        // dR/d(unit quaternion component), entry by entry.
        let m = &d_rot.m;
        let mut acc = Quat::new(T::zero(), T::zero(), T::zero(), T::zero());
        let g = |r: usize, c: usize| m[r][c];

        // d m00 = -4y dy - 4z dz
        acc.y -= T::of(4.0) * y * g(0, 0);
        acc.z -= T::of(4.0) * z * g(0, 0);
        // d m01 = 2(y dx + x dy - z dw - w dz)
        acc.x += two * y * g(0, 1);
        acc.y += two * x * g(0, 1);
        acc.w -= two * z * g(0, 1);
        acc.z -= two * w * g(0, 1);
        // d m02 = 2(z dx + x dz + y dw + w dy)
        acc.x += two * z * g(0, 2);
        acc.z += two * x * g(0, 2);
        acc.w += two * y * g(0, 2);
        acc.y += two * w * g(0, 2);
        // d m10 = 2(y dx + x dy + z dw + w dz)
        acc.x += two * y * g(1, 0);
        acc.y += two * x * g(1, 0);
        acc.w += two * z * g(1, 0);
        acc.z += two * w * g(1, 0);
        // d m11 = -4x dx - 4z dz
        acc.x -= T::of(4.0) * x * g(1, 1);
        acc.z -= T::of(4.0) * z * g(1, 1);
        // d m12 = 2(z dy + y dz - x dw - w dx)
        acc.y += two * z * g(1, 2);
        acc.z += two * y * g(1, 2);
        acc.w -= two * x * g(1, 2);
        acc.x -= two * w * g(1, 2);
        // d m20 = 2(z dx + x dz - y dw - w dy)
        acc.x += two * z * g(2, 0);
        acc.z += two * x * g(2, 0);
        acc.w -= two * y * g(2, 0);
        acc.y -= two * w * g(2, 0);
        // d m21 = 2(z dy + y dz + x dw + w dx)
        acc.y += two * z * g(2, 1);
        acc.z += two * y * g(2, 1);
        acc.w += two * x * g(2, 1);
        acc.x += two * w * g(2, 1);
        // d m22 = -4x dx - 4y dy
        acc.x -= T::of(4.0) * x * g(2, 2);
        acc.y -= T::of(4.0) * y * g(2, 2);

        // Chain through normalization: q = p / |p|, so
        // dL/dp = (dL/dq - q (q . dL/dq)) / |p|.
        let dot = acc.w * w + acc.x * x + acc.y * y + acc.z * z;
        Quat::new(
            (acc.w - w * dot) / n,
            (acc.x - x * dot) / n,
            (acc.y - y * dot) / n,
            (acc.z - z * dot) / n,
        )
    }

    pub fn cast<U: Real>(self) -> Quat<U> {
        Quat::new(
            U::of(self.w.as_f64()),
            U::of(self.x.as_f64()),
            U::of(self.y.as_f64()),
            U::of(self.z.as_f64()),
        )
    }
}
