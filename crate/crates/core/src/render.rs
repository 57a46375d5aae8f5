//! Rasterizer output maps plus the per-pixel blending state kept for the
//! backward pass.

use crate::real::Real;
use crate::vec::Vec3;

/// One alpha-blended contribution of a Gaussian to a pixel.
#[derive(Clone, Copy, Debug)]
pub struct SplatFragment<T> {
    pub gaussian_index: usize,
    /// Local disk coordinates of the ray hit.
    pub uv: (T, T),
    /// Gaussian kernel value exp(-(u^2+v^2)/2).
    pub kernel: T,
    /// Camera-space z of the ray-disk intersection.
    pub depth: T,
    /// Blending weight w_i = o_i G_i prod_{j<i} (1 - o_j G_j).
    pub weight: T,
}

/// Dense per-pixel maps from one render call.
#[derive(Clone, Debug)]
pub struct RenderOutput<T> {
    pub width: usize,
    pub height: usize,
    /// H*W*3, row-major, unclamped linear color.
    pub color: Vec<T>,
    /// H*W, sum w_i z_i / max(sum w_i, 1e-8).
    pub expected_depth: Vec<T>,
    /// H*W, z at the transmittance-0.5 crossing.
    pub median_depth: Vec<T>,
    /// H*W, sum of blending weights.
    pub alpha: Vec<T>,
    /// H*W*3, alpha-blended camera-facing disk normals.
    pub normal_map: Vec<T>,
    /// Per pixel, fragments in blending order.
    pub fragments: Vec<Vec<SplatFragment<T>>>,
}

impl<T: Real> RenderOutput<T> {
    pub fn new(width: usize, height: usize) -> Self {
        let n = width * height;
        Self {
            width,
            height,
            color: vec![T::zero(); n * 3],
            expected_depth: vec![T::zero(); n],
            median_depth: vec![T::zero(); n],
            alpha: vec![T::zero(); n],
            normal_map: vec![T::zero(); n * 3],
            fragments: vec![Vec::new(); n],
        }
    }

    #[inline]
    pub fn pixel_index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    pub fn color_at(&self, row: usize, col: usize) -> Vec3<T> {
        let i = self.pixel_index(row, col) * 3;
        Vec3::new(self.color[i], self.color[i + 1], self.color[i + 2])
    }

    pub fn normal_at(&self, row: usize, col: usize) -> Vec3<T> {
        let i = self.pixel_index(row, col) * 3;
        Vec3::new(
            self.normal_map[i],
            self.normal_map[i + 1],
            self.normal_map[i + 2],
        )
    }
}
