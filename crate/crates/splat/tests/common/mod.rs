use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfrec_core::{look_at, Camera, GaussianPrimitive, Quat, Real, Vec3};

/// Small random scene: Gaussians scattered near the origin, camera on a ring.
pub fn random_scene<T: Real>(
    n: usize,
    image: usize,
    seed: u64,
) -> (Camera<T>, Vec<GaussianPrimitive<T>>, Vec<Vec3<T>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let eye = Vec3::from_f64(2.5 * angle.cos(), 2.5 * angle.sin(), rng.gen_range(-1.0..1.0));
    let camera = look_at(
        eye,
        Vec3::zero(),
        Vec3::from_f64(0.0, 0.0, 1.0),
        image,
        image,
        T::of(1.2 * image as f64),
    );
    let mut gaussians = Vec::with_capacity(n);
    let mut colors = Vec::with_capacity(n);
    for _ in 0..n {
        gaussians.push(GaussianPrimitive {
            centroid: Vec3::from_f64(
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
            ),
            rotation: Quat::new(
                T::of(rng.gen_range(-1.0..1.0)),
                T::of(rng.gen_range(-1.0..1.0)),
                T::of(rng.gen_range(-1.0..1.0)),
                T::of(rng.gen_range(-1.0..1.0)),
            ),
            log_scale_u: T::of(rng.gen_range(-2.0..-0.7)),
            log_scale_v: T::of(rng.gen_range(-2.0..-0.7)),
            opacity_logit: T::of(rng.gen_range(-1.0..2.0)),
            appearance_seed: Vec3::zero(),
        });
        colors.push(Vec3::from_f64(
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
        ));
    }
    (camera, gaussians, colors)
}
