//! Ground-truth target renderer: ray-triangle intersection with an analytic
//! headlight shading. Deliberately independent of the splat rasterizer so
//! pipeline bugs cannot cancel out.

use surfrec_core::{Camera, ImageBuffer, Real, TriangleMesh, Vec3};

const RAY_EPS: f64 = 1e-9;

/// Moller-Trumbore; returns (t, u, v) barycentrics of the hit.
#[inline]
fn ray_triangle<T: Real>(
    origin: Vec3<T>,
    dir: Vec3<T>,
    v0: Vec3<T>,
    v1: Vec3<T>,
    v2: Vec3<T>,
) -> Option<(T, T, T)> {
    let e1 = v1 - v0;
    let e2 = v2 - v0;
    let h = dir.cross(e2);
    let det = e1.dot(h);
    if det.abs() < T::of(RAY_EPS) {
        return None;
    }
    let inv = T::one() / det;
    let s = origin - v0;
    let u = s.dot(h) * inv;
    if u < T::zero() || u > T::one() {
        return None;
    }
    let q = s.cross(e1);
    let v = dir.dot(q) * inv;
    if v < T::zero() || u + v > T::one() {
        return None;
    }
    let t = e2.dot(q) * inv;
    if t <= T::of(RAY_EPS) {
        return None;
    }
    Some((t, u, v))
}

/// Position-keyed albedo so the target images carry texture for the photo
/// losses to lock onto.
fn albedo<T: Real>(p: Vec3<T>) -> Vec3<T> {
    let three = T::of(3.0);
    let amp = T::of(0.35);
    let base = T::of(0.55);
    Vec3::new(
        base + amp * (three * p.x + T::of(1.0)).sin(),
        base + amp * (three * p.y + T::of(2.0)).sin(),
        base + amp * (three * p.z + T::of(3.0)).sin(),
    )
}

/// Lambertian-plus-specular headlight: view-dependent but always lit.
fn shade<T: Real>(p: Vec3<T>, n: Vec3<T>, view: Vec3<T>) -> Vec3<T> {
    let ndv = n.dot(view).abs();
    let diffuse = T::of(0.25) + T::of(0.6) * ndv;
    let spec = ndv.powi(16) * T::of(0.15);
    albedo(p) * diffuse + Vec3::splat(spec)
}

/// Render the mesh from `camera`; returns (color, mask). Background black.
pub fn render_ground_truth<T: Real>(
    camera: &Camera<T>,
    mesh: &TriangleMesh<T>,
) -> (ImageBuffer<T>, ImageBuffer<T>) {
    let mut color = ImageBuffer::new(camera.width, camera.height, 3);
    let mut mask = ImageBuffer::new(camera.width, camera.height, 1);
    let origin = camera.center();
    let smooth = mesh.vertex_normals.len() == mesh.vertices.len();

    for row in 0..camera.height {
        for col in 0..camera.width {
            let dir = camera.ray_direction(row, col);
            let mut best: Option<(T, usize, T, T)> = None;
            for (t_idx, &[a, b, c]) in mesh.triangles.iter().enumerate() {
                if let Some((t, u, v)) = ray_triangle(
                    origin,
                    dir,
                    mesh.vertices[a],
                    mesh.vertices[b],
                    mesh.vertices[c],
                ) {
                    if best.map_or(true, |(bt, ..)| t < bt) {
                        best = Some((t, t_idx, u, v));
                    }
                }
            }
            let Some((t, t_idx, u, v)) = best else {
                continue;
            };
            let [a, b, c] = mesh.triangles[t_idx];
            let p = origin + dir * t;
            let mut n = if smooth {
                let w = T::one() - u - v;
                (mesh.vertex_normals[a] * w + mesh.vertex_normals[b] * u + mesh.vertex_normals[c] * v)
                    .normalized_or_zero(T::of(1e-12))
            } else {
                (mesh.vertices[b] - mesh.vertices[a])
                    .cross(mesh.vertices[c] - mesh.vertices[a])
                    .normalized_or_zero(T::of(1e-12))
            };
            if n.dot(dir) > T::zero() {
                n = -n;
            }
            let shaded = shade(p, n, -dir);
            let pix = (row * camera.width + col) * 3;
            color.data[pix] = shaded.x.max(T::zero()).min(T::one());
            color.data[pix + 1] = shaded.y.max(T::zero()).min(T::one());
            color.data[pix + 2] = shaded.z.max(T::zero()).min(T::one());
            mask.data[row * camera.width + col] = T::one();
        }
    }
    (color, mask)
}
