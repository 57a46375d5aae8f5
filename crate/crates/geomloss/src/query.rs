//! Per-iteration query-point sampling for the SDF losses.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use surfrec_core::{Real, TrainConfig, Vec3};

/// Domain the query points are clamped to.
pub const QUERY_CLAMP: f64 = 1.5;

/// One iteration's worth of SDF supervision points.
#[derive(Debug, Clone)]
pub struct QueryBatch<T> {
    /// Indices into the source point set backing `surface_points`.
    pub surface_indices: Vec<usize>,
    pub surface_points: Vec<Vec3<T>>,
    pub uniform_points: Vec<Vec3<T>>,
    /// Surface points under Gaussian position noise (Eikonal coverage).
    pub near_points: Vec<Vec3<T>>,
}

pub fn sample_query_batch<T: Real>(
    surface_source: &[Vec3<T>],
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> QueryBatch<T> {
    assert!(!surface_source.is_empty());
    let n = surface_source.len();
    let surface_indices: Vec<usize> = if n <= config.surface_batch {
        (0..n).collect()
    } else {
        (0..config.surface_batch).map(|_| rng.gen_range(0..n)).collect()
    };
    let surface_points: Vec<Vec3<T>> =
        surface_indices.iter().map(|&i| surface_source[i]).collect();

    let clamp = T::of(QUERY_CLAMP);
    let uniform_points = (0..config.uniform_batch)
        .map(|_| {
            Vec3::new(
                T::of(rng.gen_range(-1.0..1.0)),
                T::of(rng.gen_range(-1.0..1.0)),
                T::of(rng.gen_range(-1.0..1.0)),
            )
        })
        .collect();

    let noise = Normal::new(0.0, config.near_sigma).unwrap();
    let near_points = (0..config.near_batch)
        .map(|_| {
            let base = surface_source[rng.gen_range(0..n)];
            Vec3::new(
                (base.x + T::of(noise.sample(rng))).max(-clamp).min(clamp),
                (base.y + T::of(noise.sample(rng))).max(-clamp).min(clamp),
                (base.z + T::of(noise.sample(rng))).max(-clamp).min(clamp),
            )
        })
        .collect();

    QueryBatch {
        surface_indices,
        surface_points,
        uniform_points,
        near_points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn counts_and_bounds() {
        let cfg = TrainConfig {
            surface_batch: 8,
            uniform_batch: 16,
            near_batch: 12,
            ..TrainConfig::default()
        };
        let source: Vec<Vec3<f64>> = (0..30)
            .map(|i| Vec3::new(1.49, -1.49, 0.01 * i as f64))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = sample_query_batch(&source, &cfg, &mut rng);
        assert_eq!(q.surface_points.len(), 8);
        assert_eq!(q.uniform_points.len(), 16);
        assert_eq!(q.near_points.len(), 12);
        for p in q
            .surface_points
            .iter()
            .chain(&q.uniform_points)
            .chain(&q.near_points)
        {
            assert!(p.abs().max_component() <= QUERY_CLAMP);
        }
        // Small sources are used wholesale.
        let small: Vec<Vec3<f64>> = source[..5].to_vec();
        let q2 = sample_query_batch(&small, &cfg, &mut rng);
        assert_eq!(q2.surface_indices, vec![0, 1, 2, 3, 4]);
    }
}
