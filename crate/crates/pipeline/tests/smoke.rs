use std::time::Instant;
use surfrec_core::{TrainConfig, Vec3};
use surfrec_extract::{evaluate, marching_cubes, sample_mesh, FnField};
use surfrec_pipeline::{generate_scene, train_iteration, Shape, TrainState};

#[test]
#[ignore]
fn smoke_train() {
    let mut cfg = TrainConfig {
        n_gaussians: 1500,
        n_views: 12,
        image_size: 56,
        total_iters: 2500,
        mc_resolution: 96,
        seed: 1,
        ..TrainConfig::default()
    };
    cfg.validate().unwrap();
    let scene = generate_scene::<f32>(Shape::Sphere, cfg.n_views, cfg.image_size, cfg.seed);
    let mut state = TrainState::<f32>::new(&cfg);

    let t0 = Instant::now();
    let mut t_warm = 0.0;
    for iter in 0..cfg.total_iters {
        state.iter = iter;
        let (parts, total) = train_iteration(&mut state, &scene, &cfg).unwrap();
        if iter == cfg.sdf_warmup_iters - 1 { t_warm = t0.elapsed().as_secs_f64(); }
        if iter % 250 == 0 || iter == cfg.total_iters - 1 {
            println!(
                "it {iter:4}  rgb {:.4} dep {:.4} dnc {:.4} pos {:.4} eik {:.4} off {:.4} ori {:.4} nor {:.4} ent {:.4} tot {:.4}  n={} mo={:.3}",
                parts.l_rgb, parts.l_dep, parts.l_dnc, parts.l_pos, parts.l_eik, parts.l_off,
                parts.l_ori, parts.l_nor, parts.l_ent, total, state.n_gaussians(), state.mean_opacity()
            );
        }
        let until = (cfg.total_iters as f64 * cfg.densify_until_frac) as usize;
        if iter >= cfg.sdf_warmup_iters && iter <= until && (iter + 1) % cfg.densify_interval == 0 {
            let mut mg: Vec<f32> = (0..state.n_gaussians()).filter(|&i| state.seen_count[i] > 0)
                .map(|i| state.grad_accum[i] / state.seen_count[i] as f32).collect();
            mg.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let q = |p: f64| mg[((mg.len() - 1) as f64 * p) as usize];
            println!("  viewgrad pcts @it{iter}: p50 {:.2e} p75 {:.2e} p90 {:.2e} p95 {:.2e} p99 {:.2e}", q(0.5), q(0.75), q(0.9), q(0.95), q(0.99));
            surfrec_pipeline::densify_and_prune(&mut state, &cfg).unwrap();
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    println!("total {dt:.1}s; warmup phase {:.1}s ({:.0} ms/it), sdf phase {:.0} ms/it",
        t_warm, t_warm * 1000.0 / cfg.sdf_warmup_iters as f64,
        (dt - t_warm) * 1000.0 / (cfg.total_iters - cfg.sdf_warmup_iters) as f64);

    let sdf = &state.sdf;
    let field = FnField::new(|pts: &[Vec3<f32>]| sdf.values(pts), sdf.grad_step);
    let mesh = marching_cubes(&field, cfg.mc_resolution, (Vec3::new(-1.0, -1.0, -1.0), Vec3::new(1.0, 1.0, 1.0)));
    println!("mesh: {} verts {} tris", mesh.vertices.len(), mesh.triangles.len());
    if !mesh.is_empty() {
        let a = sample_mesh(&mesh.largest_component(), 30000, 3);
        let gt = sample_mesh(&scene.gt_mesh, 30000, 4);
        let r = evaluate(&a, &gt, 0);
        println!("CDx1000 {:.2} NC {:.4}", r.cd_x1000, r.nc);
    }
}
