//! Rendering losses: color (L1 + SSIM mix), depth distortion, and
//! depth-normal consistency.

use crate::backward::RenderGrads;
use crate::ssim::{ssim_map, ssim_map_with_grad};
use surfrec_core::{Camera, Real, RenderOutput, Vec3};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionMismatch {
    pub expected: usize,
    pub got: usize,
    pub what: &'static str,
}

impl std::fmt::Display for DimensionMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} length mismatch: expected {}, got {}",
            self.what, self.expected, self.got
        )
    }
}

impl std::error::Error for DimensionMismatch {}

/// `(1-mix) * L1 + mix * (1 - SSIM)` over masked pixels; returns the loss and
/// its gradient w.r.t. `rendered`. The mask (when given) selects pixels with
/// value > 0.5; window statistics still read all pixels.
pub fn rgb_loss<T: Real>(
    rendered: &[T],
    target: &[T],
    mask: Option<&[T]>,
    width: usize,
    height: usize,
    mix: T,
) -> Result<(T, Vec<T>), DimensionMismatch> {
    let n = width * height;
    if rendered.len() != n * 3 {
        return Err(DimensionMismatch {
            expected: n * 3,
            got: rendered.len(),
            what: "rendered",
        });
    }
    if target.len() != n * 3 {
        return Err(DimensionMismatch {
            expected: n * 3,
            got: target.len(),
            what: "target",
        });
    }
    if let Some(m) = mask {
        if m.len() != n {
            return Err(DimensionMismatch {
                expected: n,
                got: m.len(),
                what: "mask",
            });
        }
    }

    let half = T::of(0.5);
    let included = |pix: usize| mask.map_or(true, |m| m[pix] > half);
    let count = (0..n).filter(|&p| included(p)).count();
    let mut grad = vec![T::zero(); n * 3];
    if count == 0 {
        return Ok((T::zero(), grad));
    }
    let inv_l1 = T::one() / T::from_usize(count * 3).unwrap();
    let mut l1 = T::zero();
    for pix in 0..n {
        if !included(pix) {
            continue;
        }
        for ch in 0..3 {
            let i = pix * 3 + ch;
            let d = rendered[i] - target[i];
            l1 += d.abs() * inv_l1;
            // Subgradient 0 at an exact tie (signum(0) would give 1).
            let sign = if d > T::zero() {
                T::one()
            } else if d < T::zero() {
                -T::one()
            } else {
                T::zero()
            };
            grad[i] = (T::one() - mix) * sign * inv_l1;
        }
    }

    let mut loss = (T::one() - mix) * l1;
    if mix > T::zero() {
        let inv_count = T::one() / T::from_usize(count).unwrap();
        let scale: Vec<T> = (0..n)
            .map(|p| if included(p) { -mix * inv_count } else { T::zero() })
            .collect();
        let res = ssim_map_with_grad(rendered, target, width, height, 3, &scale, &mut grad);
        let mean_ssim = (0..n)
            .filter(|&p| included(p))
            .map(|p| res.map[p])
            .fold(T::zero(), |a, s| a + s)
            * inv_count;
        loss += mix * (T::one() - mean_ssim);
    }
    Ok((loss, grad))
}

/// Plain mean SSIM between two images (diagnostics; no gradient).
pub fn mean_ssim<T: Real>(a: &[T], b: &[T], width: usize, height: usize) -> T {
    let res = ssim_map(a, b, width, height, 3);
    res.map.iter().fold(T::zero(), |acc, s| acc + *s) / T::from_usize(width * height).unwrap()
}

/// Pairwise depth distortion over retained fragments, averaged over pixels:
/// `mean_px sum_{i,j} w_i w_j |z_i - z_j|`. Accumulates fragment-level
/// gradients into `grads`.
pub fn depth_distortion_loss<T: Real>(output: &RenderOutput<T>, grads: &mut RenderGrads<T>) -> T {
    let n_pix = output.width * output.height;
    let inv_n = T::one() / T::from_usize(n_pix).unwrap();
    if grads.d_frag_weight.is_none() {
        grads.d_frag_weight = Some(output.fragments.iter().map(|f| vec![T::zero(); f.len()]).collect());
    }
    if grads.d_frag_depth.is_none() {
        grads.d_frag_depth = Some(output.fragments.iter().map(|f| vec![T::zero(); f.len()]).collect());
    }
    let dw_all = grads.d_frag_weight.as_mut().unwrap();
    let dz_all = grads.d_frag_depth.as_mut().unwrap();

    let mut loss = T::zero();
    let two = T::of(2.0);
    for pix in 0..n_pix {
        let frags = &output.fragments[pix];
        let k = frags.len();
        if k < 2 {
            continue;
        }
        // Sort by depth; prefix sums give the pair terms in O(k log k).
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            frags[a]
                .depth
                .partial_cmp(&frags[b].depth)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let total_w: T = frags.iter().map(|f| f.weight).fold(T::zero(), |a, w| a + w);
        let total_wz: T = frags
            .iter()
            .map(|f| f.weight * f.depth)
            .fold(T::zero(), |a, wz| a + wz);

        // Walk tie groups in depth order.
        let mut below_w = T::zero();
        let mut below_wz = T::zero();
        let mut gi = 0;
        while gi < k {
            let mut gj = gi;
            let z = frags[order[gi]].depth;
            let mut group_w = T::zero();
            let mut group_wz = T::zero();
            while gj < k && frags[order[gj]].depth == z {
                group_w += frags[order[gj]].weight;
                group_wz += frags[order[gj]].weight * z;
                gj += 1;
            }
            let above_w = total_w - below_w - group_w;
            let above_wz = total_wz - below_wz - group_wz;
            // sum_j w_j |z - z_j| over the other fragments.
            let abs_term = z * (below_w - above_w) - (below_wz - above_wz);
            let sign_term = below_w - above_w;
            for &i in &order[gi..gj] {
                let w = frags[i].weight;
                loss += w * abs_term * inv_n;
                dw_all[pix][i] += two * abs_term * inv_n;
                dz_all[pix][i] += two * w * sign_term * inv_n;
            }
            below_w += group_w;
            below_wz += group_wz;
            gi = gj;
        }
    }
    loss
}

/// Brute-force pair sum used as the oracle in tests.
pub fn depth_distortion_reference<T: Real>(output: &RenderOutput<T>) -> T {
    let n_pix = output.width * output.height;
    let mut loss = T::zero();
    for pix in 0..n_pix {
        let frags = &output.fragments[pix];
        for a in frags {
            for b in frags {
                loss += a.weight * b.weight * (a.depth - b.depth).abs();
            }
        }
    }
    loss / T::from_usize(n_pix).unwrap()
}

/// Depth-normal consistency: blended disk normals against the normal implied
/// by screen-space finite differences of unprojected expected depth, averaged
/// over interior pixels whose own and forward neighbors have alpha > 0.5.
pub fn depth_normal_consistency_loss<T: Real>(
    output: &RenderOutput<T>,
    camera: &Camera<T>,
    grads: &mut RenderGrads<T>,
) -> T {
    let w = output.width;
    let h = output.height;
    let half = T::of(0.5);
    let opaque = |r: usize, c: usize| output.alpha[r * w + c] > half;

    // Pass 1: count included pixels.
    struct Term<T> {
        row: usize,
        col: usize,
        n_d: Vec3<T>,
        cross: Vec3<T>,
        flip: T,
        d00: Vec3<T>,
        d10: Vec3<T>,
        d01: Vec3<T>,
    }
    let mut terms: Vec<Term<T>> = Vec::new();
    for row in 0..h.saturating_sub(1) {
        for col in 0..w.saturating_sub(1) {
            if !(opaque(row, col) && opaque(row, col + 1) && opaque(row + 1, col)) {
                continue;
            }
            let k00 = camera.unproject_dir(row, col);
            let k01 = camera.unproject_dir(row, col + 1);
            let k10 = camera.unproject_dir(row + 1, col);
            let z00 = output.expected_depth[row * w + col];
            let z01 = output.expected_depth[row * w + col + 1];
            let z10 = output.expected_depth[(row + 1) * w + col];
            let dx = k01 * z01 - k00 * z00;
            let dy = k10 * z10 - k00 * z00;
            let cross = dx.cross(dy);
            let norm = cross.norm();
            if norm < T::of(1e-12) {
                continue;
            }
            let mut n_d = cross / norm;
            let ray = camera.ray_direction(row, col);
            let flip = if n_d.dot(ray) > T::zero() { -T::one() } else { T::one() };
            n_d = n_d * flip;
            terms.push(Term {
                row,
                col,
                n_d,
                cross,
                flip,
                d00: k00,
                d01: k01,
                d10: k10,
            });
        }
    }
    if terms.is_empty() {
        return T::zero();
    }
    let inv_count = T::one() / T::from_usize(terms.len()).unwrap();

    let mut loss = T::zero();
    for t in &terms {
        let pix = t.row * w + t.col;
        let n_map = output.normal_at(t.row, t.col);
        // sum_i w_i (1 - n_i . N_d) = alpha - normal_map . N_d.
        loss += (output.alpha[pix] - n_map.dot(t.n_d)) * inv_count;

        grads.d_alpha[pix] += inv_count;
        let d_nmap = -t.n_d * inv_count;
        grads.d_normal[pix * 3] += d_nmap.x;
        grads.d_normal[pix * 3 + 1] += d_nmap.y;
        grads.d_normal[pix * 3 + 2] += d_nmap.z;

        // d(loss)/d(N_d), then back through flip, normalize, cross, depths.
        let d_nd = -n_map * (inv_count * t.flip);
        let norm = t.cross.norm();
        let n_unit = t.cross / norm;
        let d_cross = (d_nd - n_unit * n_unit.dot(d_nd)) / norm;
        // Recompute the difference vectors for the cross partials.
        let z00 = output.expected_depth[t.row * w + t.col];
        let z01 = output.expected_depth[t.row * w + t.col + 1];
        let z10 = output.expected_depth[(t.row + 1) * w + t.col];
        let dx = t.d01 * z01 - t.d00 * z00;
        let dy = t.d10 * z10 - t.d00 * z00;
        let d_dx = dy.cross(d_cross);
        let d_dy = d_cross.cross(dx);
        grads.d_expected_depth[t.row * w + t.col + 1] += t.d01.dot(d_dx);
        grads.d_expected_depth[(t.row + 1) * w + t.col] += t.d10.dot(d_dy);
        grads.d_expected_depth[t.row * w + t.col] -= t.d00.dot(d_dx) + t.d00.dot(d_dy);
    }
    loss
}
