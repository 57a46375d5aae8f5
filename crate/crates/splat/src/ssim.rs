//! SSIM over 11x11 Gaussian windows (sigma 1.5, standard constants), with an
//! analytic gradient w.r.t. the first image.
//!
//! Window weights renormalize over in-bounds pixels, so constant images have
//! constant statistics all the way to the border.

use surfrec_core::Real;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_C1: f64 = 0.01 * 0.01;
pub const SSIM_C2: f64 = 0.03 * 0.03;

fn window_weights<T: Real>() -> [T; SSIM_WINDOW] {
    let mut w = [T::zero(); SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    let mut raw = [0.0f64; SSIM_WINDOW];
    for (i, r) in raw.iter_mut().enumerate() {
        *r = (-((i as f64 - c) * (i as f64 - c)) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *r;
    }
    for i in 0..SSIM_WINDOW {
        w[i] = T::of(raw[i] / sum);
    }
    w
}

struct WindowStats<T> {
    mu_x: T,
    mu_y: T,
    var_x: T,
    var_y: T,
    cov: T,
}

/// Per-pixel mean SSIM over channels plus d(mean SSIM)/d(x) when requested.
///
/// `x`, `y` are H*W*C row-major. Returns the SSIM map (H*W) and writes the
/// gradient of `sum over map / (H*W)`-style means externally; here the map
/// and the raw per-pixel gradient contributions are produced, scaled by the
/// caller.
pub struct SsimResult<T> {
    /// Per-pixel SSIM averaged over channels.
    pub map: Vec<T>,
}

pub fn ssim_map<T: Real>(
    x: &[T],
    y: &[T],
    width: usize,
    height: usize,
    channels: usize,
) -> SsimResult<T> {
    compute(x, y, width, height, channels, None, T::zero()).0
}

/// SSIM map plus gradient accumulation: for every pixel `p` in `mask_scale`
/// units, accumulates `d(ssim(p))/d(x)` times `scale[p]` into `d_x`.
pub fn ssim_map_with_grad<T: Real>(
    x: &[T],
    y: &[T],
    width: usize,
    height: usize,
    channels: usize,
    per_pixel_scale: &[T],
    d_x: &mut [T],
) -> SsimResult<T> {
    let (res, _) = compute(
        x,
        y,
        width,
        height,
        channels,
        Some((per_pixel_scale, d_x)),
        T::zero(),
    );
    res
}

fn stats_at<T: Real>(
    x: &[T],
    y: &[T],
    width: usize,
    height: usize,
    channels: usize,
    row: usize,
    col: usize,
    ch: usize,
    w1d: &[T; SSIM_WINDOW],
) -> (WindowStats<T>, T) {
    let half = SSIM_WINDOW as isize / 2;
    let mut wsum = T::zero();
    let mut sx = T::zero();
    let mut sy = T::zero();
    let mut sxx = T::zero();
    let mut syy = T::zero();
    let mut sxy = T::zero();
    for dr in -half..=half {
        let r = row as isize + dr;
        if r < 0 || r >= height as isize {
            continue;
        }
        let wr = w1d[(dr + half) as usize];
        for dc in -half..=half {
            let c = col as isize + dc;
            if c < 0 || c >= width as isize {
                continue;
            }
            let w = wr * w1d[(dc + half) as usize];
            let idx = ((r as usize) * width + c as usize) * channels + ch;
            let xv = x[idx];
            let yv = y[idx];
            wsum += w;
            sx += w * xv;
            sy += w * yv;
            sxx += w * xv * xv;
            syy += w * yv * yv;
            sxy += w * xv * yv;
        }
    }
    let inv = T::one() / wsum;
    let mu_x = sx * inv;
    let mu_y = sy * inv;
    (
        WindowStats {
            mu_x,
            mu_y,
            var_x: sxx * inv - mu_x * mu_x,
            var_y: syy * inv - mu_y * mu_y,
            cov: sxy * inv - mu_x * mu_y,
        },
        wsum,
    )
}

#[allow(clippy::too_many_arguments)]
fn compute<T: Real>(
    x: &[T],
    y: &[T],
    width: usize,
    height: usize,
    channels: usize,
    mut grad: Option<(&[T], &mut [T])>,
    _marker: T,
) -> (SsimResult<T>, ()) {
    assert_eq!(x.len(), width * height * channels);
    assert_eq!(y.len(), x.len());
    let w1d = window_weights::<T>();
    let c1 = T::of(SSIM_C1);
    let c2 = T::of(SSIM_C2);
    let half = SSIM_WINDOW as isize / 2;
    let inv_ch = T::one() / T::from_usize(channels).unwrap();

    let mut map = vec![T::zero(); width * height];
    for row in 0..height {
        for col in 0..width {
            let mut acc = T::zero();
            for ch in 0..channels {
                let (st, wsum) = stats_at(x, y, width, height, channels, row, col, ch, &w1d);
                let a1 = T::of(2.0) * st.mu_x * st.mu_y + c1;
                let a2 = T::of(2.0) * st.cov + c2;
                let b1 = st.mu_x * st.mu_x + st.mu_y * st.mu_y + c1;
                let b2 = st.var_x + st.var_y + c2;
                let s = (a1 * a2) / (b1 * b2);
                acc += s;

                if let Some((scale, d_x)) = grad.as_mut() {
                    let sc = scale[row * width + col] * inv_ch;
                    if sc == T::zero() {
                        continue;
                    }
                    // Partials of SSIM w.r.t. the window statistics.
                    let inv_b1b2 = T::one() / (b1 * b2);
                    let ds_da1 = a2 * inv_b1b2;
                    let ds_da2 = a1 * inv_b1b2;
                    let ds_db1 = -s / b1;
                    let ds_db2 = -s / b2;
                    let ds_dmux = ds_da1 * T::of(2.0) * st.mu_y + ds_db1 * T::of(2.0) * st.mu_x;
                    let ds_dcov = ds_da2 * T::of(2.0);
                    let ds_dvarx = ds_db2;
                    // Distribute over window pixels.
                    let inv_wsum = T::one() / wsum;
                    for dr in -half..=half {
                        let r = row as isize + dr;
                        if r < 0 || r >= height as isize {
                            continue;
                        }
                        let wr = w1d[(dr + half) as usize];
                        for dc in -half..=half {
                            let c = col as isize + dc;
                            if c < 0 || c >= width as isize {
                                continue;
                            }
                            let w = wr * w1d[(dc + half) as usize] * inv_wsum;
                            let idx = ((r as usize) * width + c as usize) * channels + ch;
                            let xq = x[idx];
                            let yq = y[idx];
                            // d mu_x / d x_q = w; d var_x = 2w(x_q - mu_x);
                            // d cov = w (y_q - mu_y).
                            let g = ds_dmux * w
                                + ds_dvarx * T::of(2.0) * w * (xq - st.mu_x)
                                + ds_dcov * w * (yq - st.mu_y);
                            d_x[idx] += sc * g;
                        }
                    }
                }
            }
            map[row * width + col] = acc * inv_ch;
        }
    }
    (SsimResult { map }, ())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_images_score_one() {
        let img: Vec<f64> = (0..5 * 4 * 3).map(|i| (i as f64 * 0.13).sin().abs()).collect();
        let res = ssim_map(&img, &img, 5, 4, 3);
        for s in res.map {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_images_closed_form() {
        // mu_x = 0, mu_y = 0.5, zero variances:
        // SSIM = C1*C2 / ((0.25 + C1) * C2) = C1 / 0.2501.
        let x = vec![0.0f64; 16 * 16 * 3];
        let y = vec![0.5f64; 16 * 16 * 3];
        let want = SSIM_C1 / (0.25 + SSIM_C1);
        let res = ssim_map(&x, &y, 16, 16, 3);
        for s in res.map {
            assert!((s - want).abs() < 1e-12, "{s} vs {want}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let w = 8;
        let h = 7;
        let x: Vec<f64> = (0..w * h * 3).map(|i| (i as f64 * 0.37).sin() * 0.4 + 0.5).collect();
        let y: Vec<f64> = (0..w * h * 3).map(|i| (i as f64 * 0.19).cos() * 0.4 + 0.5).collect();
        // Loss = mean over pixels of ssim -> scale = 1/(w*h).
        let scale = vec![1.0 / (w * h) as f64; w * h];
        let mut grad = vec![0.0; x.len()];
        ssim_map_with_grad(&x, &y, w, h, 3, &scale, &mut grad);

        let loss = |x: &[f64]| -> f64 {
            let res = ssim_map(x, &y, w, h, 3);
            res.map.iter().sum::<f64>() / (w * h) as f64
        };
        let step = 1e-6;
        for k in (0..x.len()).step_by(23) {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += step;
            xm[k] -= step;
            let fd = (loss(&xp) - loss(&xm)) / (2.0 * step);
            assert!(
                (fd - grad[k]).abs() < 1e-7 + 1e-4 * fd.abs(),
                "pixel {k}: fd {fd} vs {}",
                grad[k]
            );
        }
    }
}
