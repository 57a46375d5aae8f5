//! Reverse-mode gradients of the rasterizer: from per-map (and optional
//! per-fragment) upstream gradients to Gaussian parameters and colors.

use crate::intersect::solve_m_transpose;
use crate::render::MEDIAN_LEVEL;
use surfrec_core::{Camera, GaussianPrimitive, Mat3, Quat, Real, RenderOutput, Vec3};

/// Upstream gradients w.r.t. every rendered map, plus optional direct
/// per-fragment gradients from losses that read the blending state
/// (depth distortion). Fragment vectors, when present, parallel
/// `RenderOutput::fragments`.
#[derive(Clone, Debug)]
pub struct RenderGrads<T> {
    pub d_color: Vec<T>,
    pub d_alpha: Vec<T>,
    pub d_expected_depth: Vec<T>,
    pub d_median_depth: Vec<T>,
    pub d_normal: Vec<T>,
    pub d_frag_weight: Option<Vec<Vec<T>>>,
    pub d_frag_depth: Option<Vec<Vec<T>>>,
}

impl<T: Real> RenderGrads<T> {
    pub fn zeros(width: usize, height: usize) -> Self {
        let n = width * height;
        Self {
            d_color: vec![T::zero(); n * 3],
            d_alpha: vec![T::zero(); n],
            d_expected_depth: vec![T::zero(); n],
            d_median_depth: vec![T::zero(); n],
            d_normal: vec![T::zero(); n * 3],
            d_frag_weight: None,
            d_frag_depth: None,
        }
    }

    /// `self += scale * other`, including any per-fragment gradients.
    pub fn add_scaled(&mut self, other: &RenderGrads<T>, scale: T) {
        let add = |dst: &mut [T], src: &[T]| {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = *d + scale * *s;
            }
        };
        add(&mut self.d_color, &other.d_color);
        add(&mut self.d_alpha, &other.d_alpha);
        add(&mut self.d_expected_depth, &other.d_expected_depth);
        add(&mut self.d_median_depth, &other.d_median_depth);
        add(&mut self.d_normal, &other.d_normal);
        for (mine, theirs) in [
            (&mut self.d_frag_weight, &other.d_frag_weight),
            (&mut self.d_frag_depth, &other.d_frag_depth),
        ] {
            if let Some(src) = theirs {
                let dst = mine.get_or_insert_with(|| {
                    src.iter().map(|f| vec![T::zero(); f.len()]).collect()
                });
                for (dv, sv) in dst.iter_mut().zip(src) {
                    for (d, s) in dv.iter_mut().zip(sv) {
                        *d = *d + scale * *s;
                    }
                }
            }
        }
    }

    fn frag_weight_at(&self, pix: usize, i: usize) -> T {
        match &self.d_frag_weight {
            Some(v) => v[pix][i],
            None => T::zero(),
        }
    }

    fn frag_depth_at(&self, pix: usize, i: usize) -> T {
        match &self.d_frag_depth {
            Some(v) => v[pix][i],
            None => T::zero(),
        }
    }
}

/// Parameter-space gradients for every Gaussian, plus the view-space
/// positional gradient statistic densification feeds on.
#[derive(Clone, Debug)]
pub struct SplatGrads<T> {
    pub d_centroid: Vec<Vec3<T>>,
    pub d_rotation: Vec<Quat<T>>,
    pub d_log_scale_u: Vec<T>,
    pub d_log_scale_v: Vec<T>,
    pub d_opacity_logit: Vec<T>,
    pub d_color: Vec<Vec3<T>>,
    /// Norm of the loss gradient w.r.t. the projected (NDC) center.
    pub view_grad: Vec<T>,
    /// Whether the Gaussian contributed at least one fragment.
    pub seen: Vec<bool>,
}

impl<T: Real> SplatGrads<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            d_centroid: vec![Vec3::zero(); n],
            d_rotation: vec![Quat::new(T::zero(), T::zero(), T::zero(), T::zero()); n],
            d_log_scale_u: vec![T::zero(); n],
            d_log_scale_v: vec![T::zero(); n],
            d_opacity_logit: vec![T::zero(); n],
            d_color: vec![Vec3::zero(); n],
            view_grad: vec![T::zero(); n],
            seen: vec![false; n],
        }
    }
}

/// Backpropagate `upstream` through the retained blending state of `output`.
///
/// Gradients flow through the blending weights (including the transmittance
/// product), through the local disk coordinates via the intersection
/// geometry, and through the depth and normal maps. The median-depth
/// gradient routes to the selected fragment's depth (subgradient).
pub fn render_backward<T: Real>(
    camera: &Camera<T>,
    gaussians: &[GaussianPrimitive<T>],
    colors: &[Vec3<T>],
    output: &RenderOutput<T>,
    upstream: &RenderGrads<T>,
) -> SplatGrads<T> {
    let n = gaussians.len();
    assert_eq!(colors.len(), n);
    let mut grads = SplatGrads::zeros(n);

    // Per-Gaussian cached quantities and frame-gradient accumulators.
    struct Cached<T> {
        tangent_u: Vec3<T>,
        tangent_v: Vec3<T>,
        normal: Vec3<T>,
        scale_u: T,
        scale_v: T,
        opacity: T,
        d_tangent_u: Vec3<T>,
        d_tangent_v: Vec3<T>,
        d_normal: Vec3<T>,
    }
    let mut cached: Vec<Cached<T>> = gaussians
        .iter()
        .map(|g| {
            let f = g.frame();
            Cached {
                tangent_u: f.col(0),
                tangent_v: f.col(1),
                normal: f.col(2),
                scale_u: g.scale_u(),
                scale_v: g.scale_v(),
                opacity: g.opacity(),
                d_tangent_u: Vec3::zero(),
                d_tangent_v: Vec3::zero(),
                d_normal: Vec3::zero(),
            }
        })
        .collect();

    let cam_row2 = camera.rotation.row(2);
    let median_level = T::of(MEDIAN_LEVEL);
    let eps_alpha = T::of(1e-8);

    let mut dw: Vec<T> = Vec::new();
    let mut dz: Vec<T> = Vec::new();

    for row in 0..camera.height {
        for col in 0..camera.width {
            let pix = row * camera.width + col;
            let frags = &output.fragments[pix];
            if frags.is_empty() {
                continue;
            }
            let dir = camera.ray_direction(row, col);
            let d_color_px = Vec3::new(
                upstream.d_color[pix * 3],
                upstream.d_color[pix * 3 + 1],
                upstream.d_color[pix * 3 + 2],
            );
            let d_alpha_px = upstream.d_alpha[pix];
            let d_de_px = upstream.d_expected_depth[pix];
            let d_med_px = upstream.d_median_depth[pix];
            let d_normal_px = Vec3::new(
                upstream.d_normal[pix * 3],
                upstream.d_normal[pix * 3 + 1],
                upstream.d_normal[pix * 3 + 2],
            );

            // Replay the blend to recover transmittances and the median pick.
            let k = frags.len();
            let sum_w = output.alpha[pix];
            let m_clamp = sum_w.max(eps_alpha);
            let clamp_active = sum_w > eps_alpha;
            let sum_wz = output.expected_depth[pix] * m_clamp;

            dw.clear();
            dw.resize(k, T::zero());
            dz.clear();
            dz.resize(k, T::zero());

            let mut median_idx = None;
            {
                let mut trans = T::one();
                for (i, f) in frags.iter().enumerate() {
                    let a = cached[f.gaussian_index].opacity * f.kernel;
                    trans *= T::one() - a;
                    if median_idx.is_none() && trans < median_level {
                        median_idx = Some(i);
                    }
                }
                if median_idx.is_none() {
                    // Fallback: the largest-depth fragment took the median.
                    let mut best = 0;
                    for i in 1..k {
                        if frags[i].depth > frags[best].depth {
                            best = i;
                        }
                    }
                    median_idx = Some(best);
                }
            }

            for (i, f) in frags.iter().enumerate() {
                let g = f.gaussian_index;
                grads.seen[g] = true;
                let flip = if cached[g].normal.dot(dir) > T::zero() {
                    -T::one()
                } else {
                    T::one()
                };
                let n_hat = cached[g].normal * flip;
                // d(loss)/d(w_i) from the maps.
                let mut dwi = d_color_px.dot(colors[g]) + d_alpha_px + d_normal_px.dot(n_hat);
                if d_de_px != T::zero() {
                    let mut t = f.depth / m_clamp;
                    if clamp_active {
                        t -= sum_wz / (m_clamp * m_clamp);
                    }
                    dwi += d_de_px * t;
                }
                dwi += upstream.frag_weight_at(pix, i);
                dw[i] = dwi;
                // d(loss)/d(z_i).
                let mut dzi = d_de_px * f.weight / m_clamp;
                if Some(i) == median_idx {
                    dzi += d_med_px;
                }
                dzi += upstream.frag_depth_at(pix, i);
                dz[i] = dzi;
                // Color and per-fragment normal gradients.
                grads.d_color[g] += d_color_px * f.weight;
                cached[g].d_normal += d_normal_px * (f.weight * flip);
            }

            // dw -> da through the transmittance product, scanning back.
            let mut rest = T::zero(); // sum_{k>i} dw_k w_k
            for i in (0..k).rev() {
                let f = &frags[i];
                let g = f.gaussian_index;
                let o = cached[g].opacity;
                let a = o * f.kernel;
                let trans_i = f.weight / a.max(T::of(1e-30)); // T_i = w_i / a_i
                let da = trans_i * dw[i] - rest / (T::one() - a);
                rest += dw[i] * f.weight;

                // a = o * G: opacity and kernel branches.
                let d_opacity = da * f.kernel;
                grads.d_opacity_logit[g] += d_opacity * o * (T::one() - o);
                let d_kernel = da * o;
                // G = exp(-(u^2+v^2)/2).
                let (u, v) = f.uv;
                let mut du = -u * f.kernel * d_kernel;
                let mut dv = -v * f.kernel * d_kernel;

                // Geometry: (p_u, p_v, t_ray) = M^{-1} (origin - centroid).
                let c = &cached[g];
                let p_u = u * c.scale_u;
                let p_v = v * c.scale_v;
                // Scales in log space: d log s = -dL/du * u (resp. v).
                grads.d_log_scale_u[g] -= du * u;
                grads.d_log_scale_v[g] -= dv * v;
                // z = cam_row2 . (origin + t d) + t_z.
                let dt_ray = dz[i] * cam_row2.dot(dir);
                du /= c.scale_u;
                dv /= c.scale_v;
                let y = solve_m_transpose(c.tangent_u, c.tangent_v, dir, Vec3::new(du, dv, dt_ray));
                grads.d_centroid[g] -= y;
                let cg = &mut cached[g];
                cg.d_tangent_u -= y * p_u;
                cg.d_tangent_v -= y * p_v;
            }
        }
    }

    // Frame gradients -> quaternion, and centroid gradients -> the
    // view-space positional statistic used by densification.
    let half_w = T::of(camera.width as f64 / 2.0);
    let half_h = T::of(camera.height as f64 / 2.0);
    for (g, c) in cached.iter().enumerate() {
        let d_rot = Mat3::from_cols(c.d_tangent_u, c.d_tangent_v, c.d_normal);
        grads.d_rotation[g] = gaussians[g].rotation.rotation_backward(&d_rot);
        if grads.seen[g] {
            let g_cam = camera.rotation.mul_vec(grads.d_centroid[g]);
            let z = camera.depth_of(gaussians[g].centroid).max(T::of(1e-4));
            let gx = g_cam.x * z * half_w / camera.focal_x;
            let gy = g_cam.y * z * half_h / camera.focal_y;
            grads.view_grad[g] = (gx * gx + gy * gy).sqrt();
        }
    }
    grads
}
