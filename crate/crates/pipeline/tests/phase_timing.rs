use std::time::Instant;
use surfrec_core::{TrainConfig, Vec3};
use surfrec_pipeline::{generate_scene, init_gaussians, Shape};
use surfrec_splat::{render, render_backward, RenderGrads, rgb_loss, depth_distortion_loss, depth_normal_consistency_loss};
use surfrec_neural::{SdfNetwork, sphere_init};

#[test]
#[ignore]
fn phases() {
    let _cfg = TrainConfig { sdf_hidden: 32, ..TrainConfig::default() };
    let n = 3000usize;
    let scene = generate_scene::<f32>(Shape::Sphere, 10, 48, 1);
    let gaussians = init_gaussians::<f32>(n, 1);
    let colors: Vec<Vec3<f32>> = (0..n).map(|i| Vec3::new(0.5, 0.3, (i % 7) as f32 * 0.1)).collect();
    let cam = &scene.cameras[0];

    let time = |label: &str, mut f: Box<dyn FnMut()>| {
        let t0 = Instant::now();
        let reps = 3;
        for _ in 0..reps { f(); }
        println!("{label:<28} {:7.1} ms", t0.elapsed().as_secs_f64() * 1000.0 / reps as f64);
    };

    let out = render(cam, &gaussians, &colors);
    let nfrag: usize = out.fragments.iter().map(|f| f.len()).sum();
    println!("fragments: {nfrag} over {} px", 48*48);

    time("render fwd", Box::new(|| { let _ = render(cam, &gaussians, &colors); }));
    let mut up = RenderGrads::zeros(48, 48);
    for v in up.d_color.iter_mut() { *v = 0.1; }
    for v in up.d_normal.iter_mut() { *v = 0.1; }
    for v in up.d_alpha.iter_mut() { *v = 0.1; }
    for v in up.d_expected_depth.iter_mut() { *v = 0.1; }
    time("render bwd", Box::new(|| { let _ = render_backward(cam, &gaussians, &colors, &out, &up); }));
    time("rgb+ssim loss", Box::new(|| { let _ = rgb_loss(&out.color, &scene.images[0].data, None, 48, 48, 0.2f32).unwrap(); }));
    time("distortion loss", Box::new(|| { let mut g = RenderGrads::zeros(48,48); let _ = depth_distortion_loss(&out, &mut g); }));
    time("dnc loss", Box::new(|| { let mut g = RenderGrads::zeros(48,48); let _ = depth_normal_consistency_loss(&out, cam, &mut g); }));

    let mut sdf = SdfNetwork::<f32>::new(32, 8, 6, 1e-4);
    sphere_init(&mut sdf.net, 0.5, 1);
    let centroids: Vec<Vec3<f32>> = gaussians.iter().map(|g| g.centroid).collect();
    time("geo batch fwd (n=3000)", Box::new(|| { let _ = sdf.eval_batch(&centroids); }));
    let gb = sdf.eval_batch(&centroids);
    let sdf2 = sdf.clone();
    let dv = vec![1.0f32; n];
    let dg: Vec<Vec3<f32>> = gb.gradients.clone();
    let df = vec![0.01f32; n * 32];
    {
        let mut pg = vec![0.0f32; sdf.net.param_count()];
        time("geo batch bwd full", Box::new(move || { gb.backward(&sdf2, &dv, &df, &dg, &mut pg); }));
    }
    let pts2: Vec<Vec3<f32>> = centroids[..2048.min(n)].to_vec();
    {
        let mut pg = vec![0.0f32; sdf.net.param_count()];
        let sdf3 = sdf.clone();
        time("field batch f+b (2048)", Box::new(move || {
            let fb = sdf3.eval_batch(&pts2);
            let dg2: Vec<Vec3<f32>> = fb.gradients.clone();
            fb.backward(&sdf3, &[], &[], &dg2, &mut pg);
        }));
    }
}
