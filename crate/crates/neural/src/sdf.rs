//! SDF and appearance network wrappers.
//!
//! The SDF gradient is a central-difference surrogate: each query point is
//! expanded into its center plus six axis-perturbed copies, all evaluated in
//! one batch. Losses built on the gradient differentiate that surrogate
//! exactly, so no second-order reverse mode is needed anywhere.

use crate::encoding::EncodingSpec;
use crate::network::{FieldNetwork, ForwardCache, NetworkSpec};
use surfrec_core::{Real, Vec3};

/// Value, finite-difference gradient, and geometry feature at one point.
#[derive(Debug, Clone)]
pub struct SdfSample<T> {
    pub value: T,
    pub gradient: Vec3<T>,
    pub feature: Vec<T>,
}

/// Signed-distance field network. Output 0 is the signed distance, outputs
/// 1..=feature_dim the geometry feature (feature width equals the hidden
/// width). Skip connection re-feeds the encoded input halfway down.
#[derive(Debug, Clone)]
pub struct SdfNetwork<T> {
    pub net: FieldNetwork<T>,
    pub grad_step: T,
}

impl<T: Real> SdfNetwork<T> {
    pub fn new(hidden: usize, hidden_layers: usize, pos_bands: usize, grad_step: T) -> Self {
        let spec = NetworkSpec {
            encoding: EncodingSpec::new(vec![(3, pos_bands)]),
            hidden,
            hidden_layers,
            out_dim: 1 + hidden,
            skip_at: if hidden_layers >= 3 {
                Some(hidden_layers / 2)
            } else {
                None
            },
        };
        Self {
            net: FieldNetwork::new(spec),
            grad_step,
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.net.out_dim() - 1
    }

    /// Values only (no gradients, no feature extraction): one row per point.
    pub fn values(&self, points: &[Vec3<T>]) -> Vec<T> {
        let mut flat = Vec::with_capacity(points.len() * 3);
        for p in points {
            flat.extend_from_slice(&p.to_array());
        }
        let cache = self.net.forward(&flat, points.len());
        let out_dim = self.net.out_dim();
        (0..points.len()).map(|i| cache.output[i * out_dim]).collect()
    }

    /// Full evaluation with finite-difference gradients; retains the forward
    /// cache so losses can push gradients back through every evaluation.
    pub fn eval_batch(&self, points: &[Vec3<T>]) -> SdfBatch<T> {
        let n = points.len();
        let h = self.grad_step;
        let mut flat = Vec::with_capacity(n * 7 * 3);
        for p in points {
            flat.extend_from_slice(&p.to_array());
            for axis in 0..3 {
                let mut plus = *p;
                let mut minus = *p;
                plus[axis] += h;
                minus[axis] -= h;
                flat.extend_from_slice(&plus.to_array());
                flat.extend_from_slice(&minus.to_array());
            }
        }
        let cache = self.net.forward(&flat, n * 7);
        let out_dim = self.net.out_dim();
        let feature_dim = self.feature_dim();
        let two_h = h + h;

        let mut values = Vec::with_capacity(n);
        let mut gradients = Vec::with_capacity(n);
        let mut features = Vec::with_capacity(n * feature_dim);
        for i in 0..n {
            let base = i * 7;
            let row = |r: usize| &cache.output[(base + r) * out_dim..(base + r + 1) * out_dim];
            values.push(row(0)[0]);
            features.extend_from_slice(&row(0)[1..]);
            gradients.push(Vec3::new(
                (row(1)[0] - row(2)[0]) / two_h,
                (row(3)[0] - row(4)[0]) / two_h,
                (row(5)[0] - row(6)[0]) / two_h,
            ));
        }
        SdfBatch {
            n,
            feature_dim,
            out_dim,
            values,
            gradients,
            features,
            cache,
        }
    }
}

/// Cached batched SDF evaluation: center values/features plus the
/// finite-difference gradient built from six perturbed evaluations.
pub struct SdfBatch<T> {
    pub n: usize,
    pub feature_dim: usize,
    out_dim: usize,
    pub values: Vec<T>,
    pub gradients: Vec<Vec3<T>>,
    /// n x feature_dim, row-major.
    pub features: Vec<T>,
    cache: ForwardCache<T>,
}

impl<T: Real> SdfBatch<T> {
    pub fn feature_row(&self, i: usize) -> &[T] {
        &self.features[i * self.feature_dim..(i + 1) * self.feature_dim]
    }

    /// Push upstream gradients (any of the three heads may be empty) back to
    /// the network parameters.
    pub fn backward(
        &self,
        net: &SdfNetwork<T>,
        d_values: &[T],
        d_features: &[T],
        d_gradients: &[Vec3<T>],
        param_grads: &mut [T],
    ) {
        assert!(d_values.is_empty() || d_values.len() == self.n);
        assert!(d_features.is_empty() || d_features.len() == self.n * self.feature_dim);
        assert!(d_gradients.is_empty() || d_gradients.len() == self.n);
        let mut upstream = vec![T::zero(); self.n * 7 * self.out_dim];
        let inv_two_h = T::one() / (net.grad_step + net.grad_step);
        for i in 0..self.n {
            let base = i * 7 * self.out_dim;
            if !d_values.is_empty() {
                upstream[base] = d_values[i];
            }
            if !d_features.is_empty() {
                upstream[base + 1..base + self.out_dim]
                    .copy_from_slice(&d_features[i * self.feature_dim..(i + 1) * self.feature_dim]);
            }
            if !d_gradients.is_empty() {
                let g = d_gradients[i];
                for (axis, ga) in [g.x, g.y, g.z].into_iter().enumerate() {
                    let d = ga * inv_two_h;
                    upstream[base + (1 + 2 * axis) * self.out_dim] += d;
                    upstream[base + (2 + 2 * axis) * self.out_dim] -= d;
                }
            }
        }
        net.net.backward(&self.cache, &upstream, param_grads, None);
    }
}

/// One sample per input point: value + feature heads and the
/// finite-difference gradient (step from the network, raw, unnormalized).
pub fn sdf_eval<T: Real>(net: &SdfNetwork<T>, points: &[Vec3<T>]) -> Vec<SdfSample<T>> {
    let batch = net.eval_batch(points);
    (0..batch.n)
        .map(|i| SdfSample {
            value: batch.values[i],
            gradient: batch.gradients[i],
            feature: batch.feature_row(i).to_vec(),
        })
        .collect()
}

/// View-dependent color network: inputs `[point, view_dir, normal, feature]`
/// with sinusoidal encoding on the first two blocks; no output activation.
#[derive(Debug, Clone)]
pub struct AppearanceNetwork<T> {
    pub net: FieldNetwork<T>,
    pub feature_dim: usize,
}

impl<T: Real> AppearanceNetwork<T> {
    pub fn new(
        hidden: usize,
        hidden_layers: usize,
        feature_dim: usize,
        pos_bands: usize,
        dir_bands: usize,
    ) -> Self {
        let spec = NetworkSpec {
            encoding: EncodingSpec::new(vec![
                (3, pos_bands),
                (3, dir_bands),
                (3, 0),
                (feature_dim, 0),
            ]),
            hidden,
            hidden_layers,
            out_dim: 3,
            skip_at: None,
        };
        Self {
            net: FieldNetwork::new(spec),
            feature_dim,
        }
    }

    fn pack(
        &self,
        points: &[Vec3<T>],
        view_dirs: &[Vec3<T>],
        normals: &[Vec3<T>],
        features: &[T],
    ) -> Vec<T> {
        let n = points.len();
        assert_eq!(view_dirs.len(), n);
        assert_eq!(normals.len(), n);
        assert_eq!(features.len(), n * self.feature_dim);
        let in_dim = 9 + self.feature_dim;
        let mut flat = Vec::with_capacity(n * in_dim);
        for i in 0..n {
            flat.extend_from_slice(&points[i].to_array());
            flat.extend_from_slice(&view_dirs[i].to_array());
            flat.extend_from_slice(&normals[i].to_array());
            flat.extend_from_slice(&features[i * self.feature_dim..(i + 1) * self.feature_dim]);
        }
        flat
    }

    pub fn eval_batch(
        &self,
        points: &[Vec3<T>],
        view_dirs: &[Vec3<T>],
        normals: &[Vec3<T>],
        features: &[T],
    ) -> AppearanceBatch<T> {
        let n = points.len();
        let flat = self.pack(points, view_dirs, normals, features);
        let cache = self.net.forward(&flat, n);
        let colors = (0..n)
            .map(|i| Vec3::new(cache.output[3 * i], cache.output[3 * i + 1], cache.output[3 * i + 2]))
            .collect();
        AppearanceBatch { n, cache, colors }
    }
}

pub struct AppearanceBatch<T> {
    pub n: usize,
    cache: ForwardCache<T>,
    pub colors: Vec<Vec3<T>>,
}

/// Input gradients of an appearance batch, split back into blocks.
pub struct AppearanceInputGrads<T> {
    pub d_points: Vec<Vec3<T>>,
    pub d_view_dirs: Vec<Vec3<T>>,
    pub d_normals: Vec<Vec3<T>>,
    /// n x feature_dim.
    pub d_features: Vec<T>,
}

impl<T: Real> AppearanceBatch<T> {
    pub fn backward(
        &self,
        net: &AppearanceNetwork<T>,
        d_colors: &[Vec3<T>],
        param_grads: &mut [T],
    ) -> AppearanceInputGrads<T> {
        assert_eq!(d_colors.len(), self.n);
        let mut upstream = Vec::with_capacity(self.n * 3);
        for c in d_colors {
            upstream.extend_from_slice(&c.to_array());
        }
        let in_dim = 9 + net.feature_dim;
        let mut flat_in = vec![T::zero(); self.n * in_dim];
        net.net
            .backward(&self.cache, &upstream, param_grads, Some(&mut flat_in));
        let mut out = AppearanceInputGrads {
            d_points: Vec::with_capacity(self.n),
            d_view_dirs: Vec::with_capacity(self.n),
            d_normals: Vec::with_capacity(self.n),
            d_features: Vec::with_capacity(self.n * net.feature_dim),
        };
        for i in 0..self.n {
            let row = &flat_in[i * in_dim..(i + 1) * in_dim];
            out.d_points.push(Vec3::new(row[0], row[1], row[2]));
            out.d_view_dirs.push(Vec3::new(row[3], row[4], row[5]));
            out.d_normals.push(Vec3::new(row[6], row[7], row[8]));
            out.d_features.extend_from_slice(&row[9..]);
        }
        out
    }
}

/// Spec-level convenience: one point through the appearance network.
pub fn appearance_eval<T: Real>(
    net: &AppearanceNetwork<T>,
    point: Vec3<T>,
    view_dir: Vec3<T>,
    normal: Vec3<T>,
    feature: &[T],
) -> Vec3<T> {
    debug_assert!((view_dir.norm() - T::one()).abs() < T::of(1e-4) || view_dir.norm() == T::zero());
    debug_assert!((normal.norm() - T::one()).abs() < T::of(1e-4) || normal.norm() == T::zero());
    net.eval_batch(&[point], &[view_dir], &[normal], feature).colors[0]
}
