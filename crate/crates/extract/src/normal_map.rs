//! Normal map rendered from an SDF by unprojecting the splat median depth.

use crate::field::ScalarField;
use surfrec_core::{Camera, Real};

/// For every pixel with `alpha > 0.5`, unproject the median depth, evaluate
/// the field gradient there, normalize, and flip it toward the camera.
/// Other pixels are zero. Returns an H*W*3 map.
pub fn sdf_normal_map<T: Real, F: ScalarField<T>>(
    field: &F,
    camera: &Camera<T>,
    median_depth: &[T],
    alpha: &[T],
) -> Vec<T> {
    let n = camera.width * camera.height;
    assert_eq!(median_depth.len(), n);
    assert_eq!(alpha.len(), n);
    let half = T::of(0.5);

    let mut rows = Vec::new();
    let mut points = Vec::new();
    for row in 0..camera.height {
        for col in 0..camera.width {
            let pix = row * camera.width + col;
            if alpha[pix] > half {
                rows.push((pix, row, col));
                points.push(camera.unproject(row, col, median_depth[pix]));
            }
        }
    }
    let grads = field.gradients(&points);

    let mut map = vec![T::zero(); n * 3];
    for ((pix, row, col), g) in rows.into_iter().zip(grads) {
        let mut nrm = g.normalized_or_zero(T::of(1e-20));
        let ray = camera.ray_direction(row, col);
        if nrm.dot(ray) > T::zero() {
            nrm = -nrm;
        }
        map[pix * 3] = nrm.x;
        map[pix * 3 + 1] = nrm.y;
        map[pix * 3 + 2] = nrm.z;
    }
    map
}
