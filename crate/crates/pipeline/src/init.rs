//! Random Gaussian initialization (no structure-from-motion input).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use surfrec_core::{GaussianPrimitive, Quat, Real, Vec3};

pub const INIT_HALF_EXTENT: f64 = 0.8;

/// Centroids uniform in [-0.8, 0.8]^3, uniform random orientations, scales
/// sized so the 3-sigma disk radius is about `2 (volume / count)^(1/3)`, and
/// opacity exactly 0.5.
pub fn init_gaussians<T: Real>(count: usize, seed: u64) -> Vec<GaussianPrimitive<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let volume = (2.0 * INIT_HALF_EXTENT).powi(3);
    // Disk radius (3-sigma kernel cutoff) about twice the mean spacing.
    let sigma = 2.0 / 3.0 * (volume / count as f64).cbrt();
    let log_scale = T::of(sigma.ln());
    (0..count)
        .map(|_| {
            let centroid = Vec3::new(
                T::of(rng.gen_range(-INIT_HALF_EXTENT..INIT_HALF_EXTENT)),
                T::of(rng.gen_range(-INIT_HALF_EXTENT..INIT_HALF_EXTENT)),
                T::of(rng.gen_range(-INIT_HALF_EXTENT..INIT_HALF_EXTENT)),
            );
            // Uniform rotation: normalized 4D Gaussian draw.
            let rotation = Quat::new(
                T::of(normal.sample(&mut rng)),
                T::of(normal.sample(&mut rng)),
                T::of(normal.sample(&mut rng)),
                T::of(normal.sample(&mut rng)),
            )
            .normalized();
            GaussianPrimitive {
                centroid,
                rotation,
                log_scale_u: log_scale,
                log_scale_v: log_scale,
                opacity_logit: T::zero(),
                appearance_seed: Vec3::new(
                    T::of(rng.gen_range(0.0..1.0)),
                    T::of(rng.gen_range(0.0..1.0)),
                    T::of(rng.gen_range(0.0..1.0)),
                ),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_hold_for_all_primitives() {
        let gs = init_gaussians::<f64>(1000, 4);
        assert_eq!(gs.len(), 1000);
        for g in &gs {
            assert!(g.centroid.abs().max_component() <= 0.8);
            let tu = g.tangent_u();
            let tv = g.tangent_v();
            assert!(tu.dot(tv).abs() < 1e-6);
            assert!((tu.norm() - 1.0).abs() < 1e-6);
            assert!(g.scale_u() > 0.0 && g.scale_v() > 0.0);
            assert_eq!(g.opacity(), 0.5);
        }
    }

    #[test]
    fn seeds_differ() {
        let a = init_gaussians::<f64>(10, 1);
        let b = init_gaussians::<f64>(10, 2);
        assert_ne!(
            a.iter().map(|g| g.centroid).collect::<Vec<_>>(),
            b.iter().map(|g| g.centroid).collect::<Vec<_>>()
        );
        let c = init_gaussians::<f64>(10, 1);
        assert_eq!(a.first().unwrap().centroid, c.first().unwrap().centroid);
    }
}
