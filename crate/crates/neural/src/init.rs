//! Weight initialization: a geometric construction that makes a fresh SDF
//! network approximate `|x| - radius`, and He-style random init for the
//! appearance network.

use crate::network::FieldNetwork;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use surfrec_core::{Real, Vec3};

/// Evenly spread unit directions (spherical Fibonacci lattice).
pub fn fibonacci_directions<T: Real>(n: usize) -> Vec<Vec3<T>> {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
            Vec3::from_f64(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Initialize `net` so its first output approximates `|x| - radius`.
///
/// Construction: the first layer projects the raw position onto a Fibonacci
/// fan of unit directions (encoding columns start at zero), middle layers
/// start near the identity, and the output row averages the rectified
/// projections, which integrates to the Euclidean norm. The averaging weight
/// is then calibrated against probe points so the approximation holds for the
/// finite fan. Same seed, same bits.
pub fn sphere_init<T: Real>(net: &mut FieldNetwork<T>, radius: T, seed: u64) {
    let spec = net.spec().clone();
    assert_eq!(
        spec.encoding.blocks.first().map(|b| b.0),
        Some(3),
        "sphere_init expects a 3D position block first"
    );
    let h = spec.hidden;
    let n_hidden = spec.hidden_layers;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5d0e_9aa1);
    let jitter = Normal::new(0.0, 1e-3).unwrap();
    let feat = Normal::new(0.0, 1e-2).unwrap();

    for p in net.params_mut().iter_mut() {
        *p = T::zero();
    }

    // Layer 0: unit directions applied to the raw xyz inputs (input-major
    // weight layout, so direction k fills column k of the first three rows).
    let dirs = fibonacci_directions::<T>(h);
    {
        let (w_off, _, _, out_dim) = net.layer_layout(0);
        let params = net.params_mut();
        for (k, d) in dirs.iter().enumerate() {
            params[w_off + k] = d.x;
            params[w_off + out_dim + k] = d.y;
            params[w_off + 2 * out_dim + k] = d.z;
        }
    }

    // Middle layers: identity plus a small jitter; skip columns stay zero.
    for l in 1..n_hidden {
        let (w_off, _, in_dim, out_dim) = net.layer_layout(l);
        let params = net.params_mut();
        for i in 0..h.min(in_dim) {
            for o in 0..out_dim {
                let base = if i == o { 1.0 } else { 0.0 };
                params[w_off + i * out_dim + o] = T::of(base + jitter.sample(&mut rng));
            }
        }
    }

    // Output layer: value row averages the fan; feature rows start small.
    {
        let (w_off, b_off, in_dim, out_dim) = net.layer_layout(n_hidden);
        let base = T::of(4.0 / h as f64);
        let params = net.params_mut();
        for i in 0..in_dim {
            params[w_off + i * out_dim] = base;
            for o in 1..out_dim {
                params[w_off + i * out_dim + o] = T::of(feat.sample(&mut rng));
            }
        }
        params[b_off] = T::zero();
    }

    // Calibrate the value-row scale against probe points: least squares on
    // f_hat(x) ~ |x| over two shells of evenly spread directions.
    let mut probes = Vec::new();
    let mut targets = Vec::new();
    for (i, d) in fibonacci_directions::<T>(64).iter().enumerate() {
        let r = if i % 2 == 0 { T::of(0.6) } else { T::of(1.4) };
        probes.extend_from_slice(&(*d * r).to_array());
        targets.push(r);
    }
    let cache = net.forward(&probes, targets.len());
    let out_dim = spec.out_dim;
    let mut num = T::zero();
    let mut den = T::zero();
    for (i, &r) in targets.iter().enumerate() {
        let f = cache.output[i * out_dim];
        num = num + f * r;
        den = den + f * f;
    }
    let kappa = num / den;
    {
        let (w_off, b_off, in_dim, out_dim) = net.layer_layout(n_hidden);
        let params = net.params_mut();
        for i in 0..in_dim {
            params[w_off + i * out_dim] = params[w_off + i * out_dim] * kappa;
        }
        params[b_off] = -radius;
    }
}

/// He-normal random init (fan-in scaled), biases zero.
pub fn random_init<T: Real>(net: &mut FieldNetwork<T>, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2f1c_33b7);
    for l in 0..net.n_linears() {
        let (w_off, b_off, in_dim, out_dim) = net.layer_layout(l);
        let std = (2.0 / in_dim as f64).sqrt();
        let dist = Normal::new(0.0, std).unwrap();
        let params = net.params_mut();
        for k in 0..in_dim * out_dim {
            params[w_off + k] = T::of(dist.sample(&mut rng));
        }
        for k in 0..out_dim {
            params[b_off + k] = T::zero();
        }
    }
}
