//! Forward rasterization: per-pixel alpha blending of depth-sorted disks.
//!
//! Gaussians are sorted once per frame by centroid depth (ties by index), so
//! every pixel blends in the same global order. The tiled path only narrows
//! which Gaussians a pixel tests — per-fragment arithmetic and order are
//! identical to the all-pairs reference, and outputs are bit-equal.

use crate::intersect::{intersect_prepared, kernel, prepare, PreparedGaussian, KERNEL_CUTOFF};
use surfrec_core::{Camera, GaussianPrimitive, Real, RenderOutput, SplatFragment, Vec3};

/// Blending stops once transmittance falls below this.
pub const TRANSMITTANCE_FLOOR: f64 = 1e-4;
/// Median depth is the z where transmittance first drops below 0.5.
pub const MEDIAN_LEVEL: f64 = 0.5;
const TILE: usize = 16;

fn sorted_prepared<T: Real>(
    camera: &Camera<T>,
    gaussians: &[GaussianPrimitive<T>],
) -> Vec<PreparedGaussian<T>> {
    let mut prepared: Vec<PreparedGaussian<T>> = gaussians
        .iter()
        .enumerate()
        .map(|(i, g)| prepare(camera, g, i))
        .collect();
    prepared.sort_by(|a, b| {
        a.center_depth
            .partial_cmp(&b.center_depth)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.index.cmp(&b.index))
    });
    prepared
}

/// Conservative pixel-space bounding box of a prepared Gaussian, or `None`
/// when it cannot touch the image.
fn pixel_bounds<T: Real>(
    camera: &Camera<T>,
    g: &PreparedGaussian<T>,
) -> Option<(usize, usize, usize, usize)> {
    let radius = T::of(KERNEL_CUTOFF) * g.scale_u.max(g.scale_v);
    let z = g.center_depth;
    let near = T::of(crate::intersect::NEAR_DEPTH);
    // The whole far half of the disk can still be in front of the camera.
    if z + radius <= near {
        return None;
    }
    let z_close = z - radius;
    if z_close <= near {
        // Crosses the near plane; give up on culling.
        return Some((0, 0, camera.height - 1, camera.width - 1));
    }
    let cam = camera.to_camera(g.centroid);
    let f = camera.focal_x.max(camera.focal_y);
    // 1.6x covers the off-axis perspective stretch of a sphere's projection
    // up to ~38 degrees from the optical axis.
    let pr = (f * radius / z_close).abs() * T::of(1.6) + T::of(2.0);
    let (px, py) = camera.project_cam(cam);
    let lo_c = (px - pr).floor().as_f64().max(0.0) as usize;
    let hi_c = (px + pr).ceil().as_f64();
    let lo_r = (py - pr).floor().as_f64().max(0.0) as usize;
    let hi_r = (py + pr).ceil().as_f64();
    if hi_c < 0.0 || hi_r < 0.0 || lo_c >= camera.width || lo_r >= camera.height {
        return None;
    }
    let hi_c = (hi_c as usize).min(camera.width - 1);
    let hi_r = (hi_r as usize).min(camera.height - 1);
    Some((lo_r, lo_c, hi_r, hi_c))
}

fn blend_pixel<T: Real>(
    camera: &Camera<T>,
    origin: Vec3<T>,
    row: usize,
    col: usize,
    candidates: &[&PreparedGaussian<T>],
    colors: &[Vec3<T>],
    out: &mut RenderOutput<T>,
) {
    let dir = camera.ray_direction(row, col);
    let cam_row2 = camera.rotation.row(2);
    let cam_tz = camera.translation.z;
    let pix = out.pixel_index(row, col);

    let mut transmittance = T::one();
    let mut color = Vec3::<T>::zero();
    let mut alpha = T::zero();
    let mut depth_sum = T::zero();
    let mut normal = Vec3::<T>::zero();
    let mut median = None;
    let mut fragments: Vec<SplatFragment<T>> = Vec::new();

    let floor = T::of(TRANSMITTANCE_FLOOR);
    let median_level = T::of(MEDIAN_LEVEL);

    for g in candidates {
        if transmittance < floor {
            break;
        }
        let Some(hit) = intersect_prepared(origin, dir, cam_row2, cam_tz, g) else {
            continue;
        };
        let kern = kernel(hit.u, hit.v);
        let a = g.opacity * kern;
        let w = a * transmittance;
        color += colors[g.index] * w;
        alpha += w;
        depth_sum += w * hit.depth;
        // Disk normal flipped to face the camera along this ray.
        let n = if g.normal.dot(dir) > T::zero() {
            -g.normal
        } else {
            g.normal
        };
        normal += n * w;
        fragments.push(SplatFragment {
            gaussian_index: g.index,
            uv: (hit.u, hit.v),
            kernel: kern,
            depth: hit.depth,
            weight: w,
        });
        transmittance *= T::one() - a;
        if median.is_none() && transmittance < median_level {
            median = Some(hit.depth);
        }
    }

    out.color[pix * 3] = color.x;
    out.color[pix * 3 + 1] = color.y;
    out.color[pix * 3 + 2] = color.z;
    out.alpha[pix] = alpha;
    out.expected_depth[pix] = depth_sum / alpha.max(T::of(1e-8));
    out.median_depth[pix] = median.unwrap_or_else(|| {
        fragments
            .iter()
            .map(|f| f.depth)
            .fold(T::zero(), |a, d| a.max(d))
    });
    out.normal_map[pix * 3] = normal.x;
    out.normal_map[pix * 3 + 1] = normal.y;
    out.normal_map[pix * 3 + 2] = normal.z;
    out.fragments[pix] = fragments;
}

/// Render color, alpha, depth, and normal maps. `colors` pairs with
/// `gaussians` by index.
pub fn render<T: Real>(
    camera: &Camera<T>,
    gaussians: &[GaussianPrimitive<T>],
    colors: &[Vec3<T>],
) -> RenderOutput<T> {
    assert_eq!(gaussians.len(), colors.len(), "one color per Gaussian");
    let mut out = RenderOutput::new(camera.width, camera.height);
    let prepared = sorted_prepared(camera, gaussians);
    let origin = camera.center();

    // Bucket Gaussians by tile, preserving the global depth order.
    let tiles_x = camera.width.div_ceil(TILE);
    let tiles_y = camera.height.div_ceil(TILE);
    let mut buckets: Vec<Vec<&PreparedGaussian<T>>> = vec![Vec::new(); tiles_x * tiles_y];
    for g in &prepared {
        let Some((lo_r, lo_c, hi_r, hi_c)) = pixel_bounds(camera, g) else {
            continue;
        };
        for ty in lo_r / TILE..=hi_r / TILE {
            for tx in lo_c / TILE..=hi_c / TILE {
                buckets[ty * tiles_x + tx].push(g);
            }
        }
    }

    for row in 0..camera.height {
        for col in 0..camera.width {
            let bucket = &buckets[(row / TILE) * tiles_x + col / TILE];
            blend_pixel(camera, origin, row, col, bucket, colors, &mut out);
        }
    }
    out
}

/// All-pairs reference renderer: every pixel tests every Gaussian in global
/// depth order, with the same blending semantics as `render`.
pub fn render_reference<T: Real>(
    camera: &Camera<T>,
    gaussians: &[GaussianPrimitive<T>],
    colors: &[Vec3<T>],
) -> RenderOutput<T> {
    assert_eq!(gaussians.len(), colors.len());
    let mut out = RenderOutput::new(camera.width, camera.height);
    let prepared = sorted_prepared(camera, gaussians);
    let origin = camera.center();
    let all: Vec<&PreparedGaussian<T>> = prepared.iter().collect();
    for row in 0..camera.height {
        for col in 0..camera.width {
            blend_pixel(camera, origin, row, col, &all, colors, &mut out);
        }
    }
    out
}
