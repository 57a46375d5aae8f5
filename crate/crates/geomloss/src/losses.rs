//! SDF supervision losses and the opacity entropy loss. Sums in the
//! formulation are implemented as batch means so the loss weights stay
//! batch-size independent. Every function returns the scalar plus the
//! gradient w.r.t. its direct inputs.

use surfrec_core::{NormalLossTargets, Real, Vec3};

#[inline]
fn soft_sign<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// `mean |f(p_k)|`: pulls the zero level set onto the surface points.
pub fn position_loss<T: Real>(values: &[T]) -> (T, Vec<T>) {
    let n = T::from_usize(values.len()).unwrap();
    let inv = T::one() / n;
    let mut loss = T::zero();
    let grads = values
        .iter()
        .map(|&v| {
            loss += v.abs() * inv;
            soft_sign(v) * inv
        })
        .collect();
    (loss, grads)
}

/// `mean (|grad f| - 1)^2` over the query points.
pub fn eikonal_loss<T: Real>(gradients: &[Vec3<T>]) -> (T, Vec<Vec3<T>>) {
    let inv = T::one() / T::from_usize(gradients.len()).unwrap();
    let mut loss = T::zero();
    let grads = gradients
        .iter()
        .map(|g| {
            let norm = g.norm();
            let r = norm - T::one();
            loss += r * r * inv;
            if norm > T::of(1e-12) {
                *g * (T::of(2.0) * r / norm * inv)
            } else {
                Vec3::zero()
            }
        })
        .collect();
    (loss, grads)
}

/// `mean exp(-alpha |f(q_k)|)`: keeps uniform samples away from the zero set.
pub fn offsurface_loss<T: Real>(values: &[T], alpha: T) -> (T, Vec<T>) {
    let inv = T::one() / T::from_usize(values.len()).unwrap();
    let mut loss = T::zero();
    let grads = values
        .iter()
        .map(|&v| {
            let e = (-alpha * v.abs()).exp();
            loss += e * inv;
            -alpha * soft_sign(v) * e * inv
        })
        .collect();
    (loss, grads)
}

/// `mean (1 - |n_k . grad_hat|)` over points with a usable gradient; the
/// disk normals are supervision only, so no gradient flows back to them.
pub fn orientation_loss<T: Real>(normals: &[Vec3<T>], gradients: &[Vec3<T>]) -> (T, Vec<Vec3<T>>) {
    assert_eq!(normals.len(), gradients.len());
    let mut grads = vec![Vec3::zero(); gradients.len()];
    let mut loss = T::zero();
    let mut count = 0usize;
    for (i, (n, g)) in normals.iter().zip(gradients).enumerate() {
        let norm = g.norm();
        if norm < T::of(1e-8) {
            continue;
        }
        count += 1;
        let g_hat = *g / norm;
        let n_hat = n.normalized_or_zero(T::of(1e-12));
        let dot = n_hat.dot(g_hat);
        loss += T::one() - dot.abs();
        // d/dg_hat = -sign(dot) n_hat, then through the normalization.
        let d_ghat = n_hat * (-soft_sign(dot));
        grads[i] = (d_ghat - g_hat * g_hat.dot(d_ghat)) / norm;
    }
    if count == 0 {
        return (T::zero(), grads);
    }
    let inv = T::one() / T::from_usize(count).unwrap();
    for g in grads.iter_mut() {
        *g = *g * inv;
    }
    (loss * inv, grads)
}

/// `mean (1 - Nhat_gs . Nhat_sdf)` over pixels with `alpha > 0.5`. Returns
/// map-level gradients for both normal maps, gated by `targets`.
pub fn normal_map_loss<T: Real>(
    n_gs: &[T],
    n_sdf: &[T],
    alpha: &[T],
    targets: NormalLossTargets,
) -> (T, Vec<T>, Vec<T>) {
    assert_eq!(n_gs.len(), n_sdf.len());
    assert_eq!(n_gs.len(), alpha.len() * 3);
    let n_pix = alpha.len();
    let half = T::of(0.5);
    let mut d_gs = vec![T::zero(); n_gs.len()];
    let mut d_sdf = vec![T::zero(); n_sdf.len()];

    struct Term<T> {
        pix: usize,
        a: Vec3<T>,
        b: Vec3<T>,
    }
    let mut terms = Vec::new();
    for pix in 0..n_pix {
        if alpha[pix] <= half {
            continue;
        }
        let a = Vec3::new(n_gs[pix * 3], n_gs[pix * 3 + 1], n_gs[pix * 3 + 2]);
        let b = Vec3::new(n_sdf[pix * 3], n_sdf[pix * 3 + 1], n_sdf[pix * 3 + 2]);
        if a.norm() < T::of(1e-12) || b.norm() < T::of(1e-12) {
            continue;
        }
        terms.push(Term { pix, a, b });
    }
    if terms.is_empty() {
        return (T::zero(), d_gs, d_sdf);
    }
    let inv = T::one() / T::from_usize(terms.len()).unwrap();
    let mut loss = T::zero();
    for t in &terms {
        let na = t.a.norm();
        let nb = t.b.norm();
        let ah = t.a / na;
        let bh = t.b / nb;
        loss += (T::one() - ah.dot(bh)) * inv;
        if matches!(targets, NormalLossTargets::Both | NormalLossTargets::SplatOnly) {
            let d_ah = bh * (-inv);
            let d_a = (d_ah - ah * ah.dot(d_ah)) / na;
            d_gs[t.pix * 3] += d_a.x;
            d_gs[t.pix * 3 + 1] += d_a.y;
            d_gs[t.pix * 3 + 2] += d_a.z;
        }
        if matches!(targets, NormalLossTargets::Both | NormalLossTargets::SdfOnly) {
            let d_bh = ah * (-inv);
            let d_b = (d_bh - bh * bh.dot(d_bh)) / nb;
            d_sdf[t.pix * 3] += d_b.x;
            d_sdf[t.pix * 3 + 1] += d_b.y;
            d_sdf[t.pix * 3 + 2] += d_b.z;
        }
    }
    (loss, d_gs, d_sdf)
}

/// `mean -o ln o`, continuously extended to 0 at both ends.
pub fn entropy_loss<T: Real>(opacities: &[T]) -> (T, Vec<T>) {
    let inv = T::one() / T::from_usize(opacities.len()).unwrap();
    let mut loss = T::zero();
    let grads = opacities
        .iter()
        .map(|&o| {
            if o <= T::zero() || o >= T::one() {
                T::zero()
            } else {
                loss += -o * o.ln() * inv;
                -(o.ln() + T::one()) * inv
            }
        })
        .collect();
    (loss, grads)
}
