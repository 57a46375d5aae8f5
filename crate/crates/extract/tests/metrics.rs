use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfrec_core::Vec3;
use surfrec_extract::{
    chamfer_distance, chamfer_distance_reference, normal_consistency,
    normal_consistency_reference, SampledSurface,
};

fn random_surface(n: usize, seed: u64, scale: f64) -> SampledSurface<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            Vec3::new(
                rng.gen_range(-scale..scale),
                rng.gen_range(-scale..scale),
                rng.gen_range(-scale..scale),
            )
        })
        .collect();
    let normals = (0..n)
        .map(|_| {
            Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
            .normalized_or_zero(1e-12)
        })
        .collect();
    SampledSurface::from_pointset(points, normals)
}

#[test]
fn identical_sets_zero_distance_full_consistency() {
    let s = random_surface(200, 1, 1.0);
    assert_eq!(chamfer_distance(&s, &s), 0.0);
    assert!((normal_consistency(&s, &s) - 1.0).abs() < 1e-12);
}

#[test]
fn single_point_closed_form() {
    let a = SampledSurface::<f64>::from_pointset(
        vec![Vec3::new(0.0, 0.0, 0.0)],
        vec![Vec3::new(0.0, 0.0, 1.0)],
    );
    let b = SampledSurface::from_pointset(
        vec![Vec3::new(0.0, 0.0, 0.1)],
        vec![Vec3::new(0.0, 0.0, 1.0)],
    );
    let cd = chamfer_distance(&a, &b);
    assert!((cd - 0.1).abs() < 1e-15);
    assert!((cd * 1000.0 - 100.0).abs() < 1e-11);
}

#[test]
fn grid_matches_bruteforce_500() {
    let a = random_surface(500, 11, 1.0);
    let b = random_surface(500, 12, 1.0);
    let fast = chamfer_distance(&a, &b);
    let slow = chamfer_distance_reference(&a, &b);
    assert!((fast - slow).abs() < 1e-9, "{fast} vs {slow}");
    let fast_nc = normal_consistency(&a, &b);
    let slow_nc = normal_consistency_reference(&a, &b);
    assert!((fast_nc - slow_nc).abs() < 1e-9, "{fast_nc} vs {slow_nc}");
}

#[test]
fn flipped_normals_do_not_change_nc() {
    let a = random_surface(100, 21, 1.0);
    let mut b = a.clone();
    for (i, n) in b.normals.iter_mut().enumerate() {
        if i % 3 == 0 {
            *n = -*n;
        }
    }
    assert!((normal_consistency(&a, &b) - 1.0).abs() < 1e-12);
}

#[test]
fn noisy_sphere_keeps_high_nc() {
    // Points on a sphere with sigma = 0.01 positional noise on one side.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pa = Vec::new();
    let mut na = Vec::new();
    let mut pb = Vec::new();
    let mut nb = Vec::new();
    for _ in 0..2000 {
        let d = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0f64),
        )
        .normalized_or_zero(1e-9);
        if d == Vec3::zero() {
            continue;
        }
        pa.push(d * 0.7);
        na.push(d);
        let noise = Vec3::new(
            rng.gen_range(-0.01..0.01),
            rng.gen_range(-0.01..0.01),
            rng.gen_range(-0.01..0.01),
        );
        let q = d * 0.7 + noise;
        pb.push(q);
        nb.push(q.normalized());
    }
    let a = SampledSurface::from_pointset(pa, na);
    let b = SampledSurface::from_pointset(pb, nb);
    assert!(normal_consistency(&a, &b) > 0.95);
    assert!(chamfer_distance(&a, &b) < 0.012);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cd_symmetric_and_scales_linearly(seed_a in 0u64..5000, seed_b in 5001u64..10000, k in 0.1f64..10.0) {
        let a = random_surface(40, seed_a, 1.0);
        let b = random_surface(40, seed_b, 1.0);
        let ab = chamfer_distance(&a, &b);
        let ba = chamfer_distance(&b, &a);
        prop_assert!((ab - ba).abs() < 1e-12);

        let scale = |s: &SampledSurface<f64>| SampledSurface::from_pointset(
            s.points.iter().map(|p| *p * k).collect(),
            s.normals.clone(),
        );
        let scaled = chamfer_distance(&scale(&a), &scale(&b));
        prop_assert!((scaled - k * ab).abs() < 1e-9 * (1.0 + k * ab));
        // NC is invariant under the same scaling.
        let nc = normal_consistency(&a, &b);
        let nc_scaled = normal_consistency(&scale(&a), &scale(&b));
        prop_assert!((nc - nc_scaled).abs() < 1e-12);
    }

    #[test]
    fn nc_sign_invariance(seed in 0u64..10000, flip_mask in any::<u64>()) {
        let a = random_surface(30, seed, 1.0);
        let b = random_surface(30, seed.wrapping_add(77), 1.0);
        let base = normal_consistency(&a, &b);
        let mut b2 = b.clone();
        for (i, n) in b2.normals.iter_mut().enumerate() {
            if flip_mask & (1 << (i % 64)) != 0 {
                *n = -*n;
            }
        }
        let mut a2 = a.clone();
        for (i, n) in a2.normals.iter_mut().enumerate() {
            if i % 2 == 0 {
                *n = -*n;
            }
        }
        prop_assert!((normal_consistency(&a2, &b2) - base).abs() < 1e-12);
    }

    #[test]
    fn grid_nn_matches_bruteforce(seed in 0u64..3000) {
        let a = random_surface(60, seed, 2.0);
        let b = random_surface(45, seed.wrapping_add(13), 0.5);
        let fast = chamfer_distance(&a, &b);
        let slow = chamfer_distance_reference(&a, &b);
        prop_assert!((fast - slow).abs() < 1e-12);
    }
}
