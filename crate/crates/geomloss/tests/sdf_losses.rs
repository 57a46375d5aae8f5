use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfrec_core::{logistic, Vec3};
use surfrec_geomloss::{
    eikonal_loss, entropy_loss, offsurface_loss, orientation_loss, position_loss,
};
use surfrec_neural::{adam_step_default, sphere_init, AdamState, SdfNetwork};

fn random_points(n: usize, seed: u64, half: f64) -> Vec<Vec3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            Vec3::new(
                rng.gen_range(-half..half),
                rng.gen_range(-half..half),
                rng.gen_range(-half..half),
            )
        })
        .collect()
}

fn random_normals(n: usize, seed: u64) -> Vec<Vec3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
            .normalized_or_zero(1e-12)
        })
        .collect()
}

#[test]
fn eikonal_near_zero_after_sphere_init() {
    let mut sdf = SdfNetwork::<f64>::new(64, 8, 6, 1e-4);
    sphere_init(&mut sdf.net, 0.5, 3);
    let pts = random_points(256, 4, 1.0);
    let batch = sdf.eval_batch(&pts);
    let (loss, _) = eikonal_loss(&batch.gradients);
    assert!(loss < 0.05, "eikonal at init: {loss}");
}

/// Weighted combination of the four point-wise SDF losses, evaluated through
/// the network, with upstream routing identical to the training loop.
fn combined_sdf_loss(
    sdf: &SdfNetwork<f64>,
    surface: &[Vec3<f64>],
    normals: &[Vec3<f64>],
    uniform: &[Vec3<f64>],
    near: &[Vec3<f64>],
    grads_out: Option<&mut [f64]>,
) -> f64 {
    let surf_batch = sdf.eval_batch(surface);
    let mut field_pts = uniform.to_vec();
    field_pts.extend_from_slice(near);
    let field_batch = sdf.eval_batch(&field_pts);

    let (l_pos, d_pos_vals) = position_loss(&surf_batch.values);
    let (l_ori, d_ori_grads) = orientation_loss(normals, &surf_batch.gradients);
    let (l_eik, d_eik_grads) = eikonal_loss(&field_batch.gradients);
    let (l_off, d_off_vals) = offsurface_loss(&field_batch.values[..uniform.len()], 100.0);

    let (w_pos, w_eik, w_off, w_ori) = (0.1, 0.01, 0.01, 0.05);
    let total = w_pos * l_pos + w_eik * l_eik + w_off * l_off + w_ori * l_ori;

    if let Some(param_grads) = grads_out {
        // Surface batch: position on the value head, orientation on the
        // gradient head, combined in one backward pass.
        let d_vals: Vec<f64> = d_pos_vals.iter().map(|d| w_pos * d).collect();
        let d_grads: Vec<Vec3<f64>> = d_ori_grads.iter().map(|g| *g * w_ori).collect();
        surf_batch.backward(sdf, &d_vals, &[], &d_grads, param_grads);

        // Field batch: eikonal everywhere, off-surface on the uniform part.
        let mut d_vals = vec![0.0; field_pts.len()];
        for (i, d) in d_off_vals.iter().enumerate() {
            d_vals[i] = w_off * d;
        }
        let d_grads: Vec<Vec3<f64>> = d_eik_grads.iter().map(|g| *g * w_eik).collect();
        field_batch.backward(sdf, &d_vals, &[], &d_grads, param_grads);
    }
    total
}

#[test]
fn sdf_loss_gradients_match_fd_through_network() {
    let mut sdf = SdfNetwork::<f64>::new(16, 4, 4, 1e-4);
    sphere_init(&mut sdf.net, 0.5, 11);
    let surface: Vec<Vec3<f64>> = random_points(12, 21, 0.6)
        .into_iter()
        .map(|p| p.normalized_or_zero(1e-9) * 0.5)
        .collect();
    let normals = random_normals(12, 22);
    let uniform = random_points(8, 23, 1.0);
    let near = random_points(6, 24, 0.6);

    let mut grads = vec![0.0; sdf.net.param_count()];
    let base = combined_sdf_loss(&sdf, &surface, &normals, &uniform, &near, Some(&mut grads));
    assert!(base > 0.0);

    let h = 1e-6;
    let np = sdf.net.param_count();
    let mut audited = 0;
    for k in (0..np).step_by(np / 29) {
        let orig = sdf.net.params()[k];
        sdf.net.params_mut()[k] = orig + h;
        let lp = combined_sdf_loss(&sdf, &surface, &normals, &uniform, &near, None);
        sdf.net.params_mut()[k] = orig - h;
        let lm = combined_sdf_loss(&sdf, &surface, &normals, &uniform, &near, None);
        sdf.net.params_mut()[k] = orig;
        let fd = (lp - lm) / (2.0 * h);
        if grads[k].abs() > 1e-7 {
            let rel = (fd - grads[k]).abs() / grads[k].abs().max(fd.abs());
            assert!(rel < 1e-3, "param {k}: fd {fd} vs {} (rel {rel})", grads[k]);
            audited += 1;
        }
    }
    assert!(audited > 10, "only {audited} parameters audited");
}

#[test]
fn position_gradient_is_sign_over_batch_through_net() {
    let mut sdf = SdfNetwork::<f64>::new(16, 4, 4, 1e-4);
    sphere_init(&mut sdf.net, 0.5, 2);
    let points = random_points(10, 31, 0.9);
    let batch = sdf.eval_batch(&points);
    let (_, d_vals) = position_loss(&batch.values);
    for (v, d) in batch.values.iter().zip(&d_vals) {
        assert_eq!(*d, v.signum() / 10.0);
    }
    // And the full chain against finite differences on one parameter.
    let mut grads = vec![0.0; sdf.net.param_count()];
    batch.backward(&sdf, &d_vals, &[], &[], &mut grads);
    let k = sdf.net.param_count() / 2;
    let h = 1e-6;
    let orig = sdf.net.params()[k];
    let eval = |sdf: &SdfNetwork<f64>| {
        let b = sdf.eval_batch(&points);
        position_loss(&b.values).0
    };
    sdf.net.params_mut()[k] = orig + h;
    let lp = eval(&sdf);
    sdf.net.params_mut()[k] = orig - h;
    let lm = eval(&sdf);
    sdf.net.params_mut()[k] = orig;
    let fd = (lp - lm) / (2.0 * h);
    assert!((fd - grads[k]).abs() < 1e-6 + 1e-3 * fd.abs());
}

#[test]
fn entropy_drives_opacities_to_the_near_pole() {
    // 200 Adam steps on the entropy term alone: every opacity moves
    // monotonically away from 1/e and none crosses it upward from below.
    let starts = [0.05f64, 0.2, 0.3, 0.36, 0.4, 0.5, 0.7, 0.9, 0.99];
    let mut logits: Vec<f64> = starts.iter().map(|o| (o / (1.0 - o)).ln()).collect();
    let mut state = AdamState::new(logits.len());
    let inv_e = 1.0 / std::f64::consts::E;
    let mut prev: Vec<f64> = logits.iter().map(|l| logistic(*l)).collect();
    let below_at_start: Vec<bool> = prev.iter().map(|o| *o < inv_e).collect();

    for _ in 0..200 {
        let opacities: Vec<f64> = logits.iter().map(|l| logistic(*l)).collect();
        let (_, d_o) = entropy_loss(&opacities);
        let grads: Vec<f64> = d_o
            .iter()
            .zip(&opacities)
            .map(|(d, o)| d * o * (1.0 - o))
            .collect();
        adam_step_default(&mut logits, &grads, &mut state, 5e-3);
        let now: Vec<f64> = logits.iter().map(|l| logistic(*l)).collect();
        for i in 0..now.len() {
            if below_at_start[i] {
                assert!(now[i] <= prev[i] + 1e-12, "o[{i}] moved up: {} -> {}", prev[i], now[i]);
                assert!(now[i] < inv_e, "o[{i}] crossed 1/e upward");
            } else if starts[i] > inv_e {
                assert!(now[i] >= prev[i] - 1e-12, "o[{i}] moved down: {} -> {}", prev[i], now[i]);
            }
        }
        prev = now;
    }
    // Ends have separated toward the poles.
    assert!(prev[0] < 0.05);
    assert!(prev[8] > 0.99);
}
