//! Joint splat + SDF training: per-iteration loss assembly, gradient routing
//! into the three parameter groups, Adam updates, densification scheduling,
//! and checkpointing.

use crate::init::init_gaussians;
use crate::scene::SyntheticScene;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use surfrec_core::{
    save_checkpoint, Camera, CoreError, GaussianPrimitive, Real, RenderOutput,
    TrainConfig, Vec3,
};
use surfrec_geomloss::{
    assemble_total, effective_weights, eikonal_loss, entropy_loss, normal_map_loss,
    offsurface_loss, orientation_loss, position_loss, sample_query_batch, LossBreakdown, LossLog,
};
use surfrec_neural::{
    adam_step_default, random_init, sphere_init, AdamState, AppearanceNetwork, SdfBatch,
    SdfNetwork,
};
use surfrec_splat::{
    depth_distortion_loss, depth_normal_consistency_loss, render, render_backward, RenderGrads,
};

#[derive(Debug)]
pub enum TrainError {
    NonFinite {
        iter: usize,
        term: &'static str,
        value: f64,
    },
    AllPruned {
        iter: usize,
    },
    Loss(String),
    Io(CoreError),
}

impl std::fmt::Display for TrainError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NonFinite { iter, term, value } => {
                write!(f, "non-finite loss at iteration {iter}: {term} = {value}")
            }
            Self::AllPruned { iter } => write!(f, "all Gaussians pruned at iteration {iter}"),
            Self::Loss(msg) => write!(f, "loss error: {msg}"),
            Self::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl std::error::Error for TrainError {}

impl From<CoreError> for TrainError {
    fn from(e: CoreError) -> Self {
        Self::Io(e)
    }
}

/// Everything that evolves during a run.
pub struct TrainState<T> {
    pub iter: usize,
    pub gaussians: Vec<GaussianPrimitive<T>>,
    pub sdf: SdfNetwork<T>,
    pub app: AppearanceNetwork<T>,
    pub adam_centroid: AdamState<T>,
    pub adam_rotation: AdamState<T>,
    pub adam_scale: AdamState<T>,
    pub adam_opacity: AdamState<T>,
    pub adam_seed_color: AdamState<T>,
    pub adam_sdf: AdamState<T>,
    pub adam_app: AdamState<T>,
    /// Summed view-space positional gradient norms and view counts.
    pub grad_accum: Vec<T>,
    pub seen_count: Vec<u32>,
    pub rng: ChaCha8Rng,
}

impl<T: Real> TrainState<T> {
    pub fn new(config: &TrainConfig) -> Self {
        let gaussians = init_gaussians(config.n_gaussians, config.seed);
        let mut sdf = SdfNetwork::new(
            config.sdf_hidden,
            config.sdf_layers,
            config.pos_encode_bands,
            T::of(config.grad_step),
        );
        sphere_init(&mut sdf.net, T::of(config.sphere_init_radius), config.seed);
        let mut app = AppearanceNetwork::new(
            config.app_hidden,
            config.app_layers,
            sdf.feature_dim(),
            config.pos_encode_bands,
            config.dir_encode_bands,
        );
        random_init(&mut app.net, config.seed ^ 0x9e37_79b9);
        let n = gaussians.len();
        let sdf_n = sdf.net.param_count();
        let app_n = app.net.param_count();
        Self {
            iter: 0,
            gaussians,
            sdf,
            app,
            adam_centroid: AdamState::new(3 * n),
            adam_rotation: AdamState::new(4 * n),
            adam_scale: AdamState::new(2 * n),
            adam_opacity: AdamState::new(n),
            adam_seed_color: AdamState::new(3 * n),
            adam_sdf: AdamState::new(sdf_n),
            adam_app: AdamState::new(app_n),
            grad_accum: vec![T::zero(); n],
            seen_count: vec![0; n],
            rng: ChaCha8Rng::seed_from_u64(config.seed ^ 0x517c_c1b7),
        }
    }

    pub fn n_gaussians(&self) -> usize {
        self.gaussians.len()
    }

    pub fn mean_opacity(&self) -> T {
        let sum = self
            .gaussians
            .iter()
            .fold(T::zero(), |acc, g| acc + g.opacity());
        sum / T::from_usize(self.gaussians.len().max(1)).unwrap()
    }

    pub fn centroids(&self) -> Vec<Vec3<T>> {
        self.gaussians.iter().map(|g| g.centroid).collect()
    }

    pub(crate) fn push_adam_rows_from(&mut self, src: usize) {
        self.adam_centroid.append_copy_of_row(src, 3);
        self.adam_rotation.append_copy_of_row(src, 4);
        self.adam_scale.append_copy_of_row(src, 2);
        self.adam_opacity.append_copy_of_row(src, 1);
        self.adam_seed_color.append_copy_of_row(src, 3);
    }

    pub(crate) fn retain_adam_rows(&mut self, keep: &[bool]) {
        self.adam_centroid.retain_rows(keep, 3);
        self.adam_rotation.retain_rows(keep, 4);
        self.adam_scale.retain_rows(keep, 2);
        self.adam_opacity.retain_rows(keep, 1);
        self.adam_seed_color.retain_rows(keep, 3);
    }

    pub(crate) fn reset_densify_stats(&mut self) {
        let n = self.gaussians.len();
        self.grad_accum = vec![T::zero(); n];
        self.seen_count = vec![0; n];
    }

    pub fn save(&self, path: &Path) -> Result<(), CoreError> {
        save_checkpoint(
            &self.gaussians,
            self.sdf.net.params(),
            self.app.net.params(),
            self.iter as u32,
            path,
        )
    }
}

/// Per-Gaussian appearance inputs and colors for one camera.
struct ColorPass<T> {
    colors: Vec<Vec3<T>>,
    app_batch: Option<surfrec_neural::AppearanceBatch<T>>,
    /// Raw SDF gradients behind the appearance normals (for the chain rule).
    app_normals_from: Option<Vec<Vec3<T>>>,
    view_dirs: Option<Vec<Vec3<T>>>,
}

fn compute_colors<T: Real>(
    state: &TrainState<T>,
    camera: &Camera<T>,
    geo_batch: Option<&SdfBatch<T>>,
    config: &TrainConfig,
) -> ColorPass<T> {
    let n = state.gaussians.len();
    if !config.use_appearance_net {
        return ColorPass {
            colors: state.gaussians.iter().map(|g| g.appearance_seed).collect(),
            app_batch: None,
            app_normals_from: None,
            view_dirs: None,
        };
    }
    let center = camera.center();
    let centroids = state.centroids();
    let view_dirs: Vec<Vec3<T>> = centroids
        .iter()
        .map(|p| (*p - center).normalized_or_zero(T::of(1e-12)))
        .collect();
    let fdim = state.sdf.feature_dim();
    let (normals, feats, normals_from) = match geo_batch {
        Some(gb) => {
            let normals: Vec<Vec3<T>> = gb
                .gradients
                .iter()
                .map(|g| g.normalized_or_zero(T::of(1e-8)))
                .collect();
            (normals, gb.features.clone(), Some(gb.gradients.clone()))
        }
        // Warmup: zero normal and feature inputs, so no SDF path exists.
        None => (vec![Vec3::zero(); n], vec![T::zero(); n * fdim], None),
    };
    let app_batch = state.app.eval_batch(&centroids, &view_dirs, &normals, &feats);
    ColorPass {
        colors: app_batch.colors.clone(),
        app_batch: Some(app_batch),
        app_normals_from: normals_from,
        view_dirs: Some(view_dirs),
    }
}

/// Differentiable SDF normal map over opaque pixels; mirrors
/// `surfrec_extract::sdf_normal_map` but retains the evaluation batch.
struct NormalMapPass<T> {
    map: Vec<T>,
    batch: SdfBatch<T>,
    pixels: Vec<usize>,
    flips: Vec<T>,
}

fn sdf_normal_map_pass<T: Real>(
    sdf: &SdfNetwork<T>,
    camera: &Camera<T>,
    output: &RenderOutput<T>,
) -> Option<NormalMapPass<T>> {
    let half = T::of(0.5);
    let mut pixels = Vec::new();
    let mut points = Vec::new();
    for row in 0..camera.height {
        for col in 0..camera.width {
            let pix = row * camera.width + col;
            if output.alpha[pix] > half {
                pixels.push(pix);
                points.push(camera.unproject(row, col, output.median_depth[pix]));
            }
        }
    }
    if pixels.is_empty() {
        return None;
    }
    let batch = sdf.eval_batch(&points);
    let mut map = vec![T::zero(); camera.width * camera.height * 3];
    let mut flips = Vec::with_capacity(pixels.len());
    for (i, &pix) in pixels.iter().enumerate() {
        let row = pix / camera.width;
        let col = pix % camera.width;
        let mut n = batch.gradients[i].normalized_or_zero(T::of(1e-20));
        let flip = if n.dot(camera.ray_direction(row, col)) > T::zero() {
            -T::one()
        } else {
            T::one()
        };
        n = n * flip;
        flips.push(flip);
        map[pix * 3] = n.x;
        map[pix * 3 + 1] = n.y;
        map[pix * 3 + 2] = n.z;
    }
    Some(NormalMapPass {
        map,
        batch,
        pixels,
        flips,
    })
}

/// Chain a gradient on `normalize(g)` back to `g`.
#[inline]
fn normalize_backward<T: Real>(g: Vec3<T>, d_unit: Vec3<T>, eps: T) -> Vec3<T> {
    let norm = g.norm();
    if norm < eps {
        return Vec3::zero();
    }
    let unit = g / norm;
    (d_unit - unit * unit.dot(d_unit)) / norm
}

/// One training iteration: returns the loss record.
pub fn train_iteration<T: Real>(
    state: &mut TrainState<T>,
    scene: &SyntheticScene<T>,
    config: &TrainConfig,
) -> Result<(LossBreakdown<T>, T), TrainError> {
    let cam_idx = state.iter % scene.cameras.len();
    let camera = &scene.cameras[cam_idx];
    let target = &scene.images[cam_idx];
    let n = state.gaussians.len();
    let warmup = state.iter < config.sdf_warmup_iters;
    let gam = config.use_appearance_net;
    let weights = effective_weights::<T>(config, state.iter);
    let centroids = state.centroids();

    // Query points and the geometry batch. With the appearance network on,
    // one batch over every centroid serves color inputs and the position /
    // orientation losses; without it only the sampled subset is evaluated.
    let query = (!warmup).then(|| sample_query_batch(&centroids, config, &mut state.rng));
    let geo_batch: Option<SdfBatch<T>> = match (&query, gam) {
        (Some(_), true) => Some(state.sdf.eval_batch(&centroids)),
        (Some(q), false) => Some(state.sdf.eval_batch(&q.surface_points)),
        (None, _) => None,
    };

    let color_pass = compute_colors(state, camera, if gam { geo_batch.as_ref() } else { None }, config);
    let output = render(camera, &state.gaussians, &color_pass.colors);

    // Rendering losses.
    let (l_rgb, d_color) = surfrec_splat::rgb_loss(
        &output.color,
        &target.data,
        None,
        camera.width,
        camera.height,
        T::of(config.ssim_mix),
    )
    .map_err(|e| TrainError::Loss(e.to_string()))?;
    let mut master = RenderGrads::zeros(camera.width, camera.height);
    master.d_color = d_color;

    let mut dep_grads = RenderGrads::zeros(camera.width, camera.height);
    let l_dep = depth_distortion_loss(&output, &mut dep_grads);
    master.add_scaled(&dep_grads, weights.dep);

    let mut dnc_grads = RenderGrads::zeros(camera.width, camera.height);
    let l_dnc = depth_normal_consistency_loss(&output, camera, &mut dnc_grads);
    master.add_scaled(&dnc_grads, weights.dnc);

    // SDF losses.
    let mut parts = LossBreakdown::<T> {
        l_rgb,
        l_dep,
        l_dnc,
        ..Default::default()
    };

    // Upstream accumulators for the geometry batch.
    let mut geo_d_values: Vec<T> = Vec::new();
    let mut geo_d_grads: Vec<Vec3<T>> = Vec::new();
    let mut geo_d_feats: Vec<T> = Vec::new();
    let mut field_pass: Option<(SdfBatch<T>, Vec<T>, Vec<Vec3<T>>)> = None;
    let mut nor_pass: Option<(NormalMapPass<T>, Vec<Vec3<T>>)> = None;

    if let (Some(q), Some(gb)) = (&query, &geo_batch) {
        let fdim = state.sdf.feature_dim();
        geo_d_values = vec![T::zero(); gb.n];
        geo_d_grads = vec![Vec3::zero(); gb.n];
        geo_d_feats = vec![T::zero(); gb.n * fdim];

        // Batch rows backing the sampled surface points.
        let rows: Vec<usize> = if gam {
            q.surface_indices.clone()
        } else {
            (0..q.surface_points.len()).collect()
        };
        let surf_values: Vec<T> = rows.iter().map(|&r| gb.values[r]).collect();
        let surf_grads: Vec<Vec3<T>> = rows.iter().map(|&r| gb.gradients[r]).collect();
        let disk_normals: Vec<Vec3<T>> = q
            .surface_indices
            .iter()
            .map(|&gi| state.gaussians[gi].normal())
            .collect();

        let (l_pos, d_pos) = position_loss(&surf_values);
        let (l_ori, d_ori) = orientation_loss(&disk_normals, &surf_grads);
        parts.l_pos = l_pos;
        parts.l_ori = l_ori;
        for (k, &r) in rows.iter().enumerate() {
            geo_d_values[r] += weights.pos * d_pos[k];
            geo_d_grads[r] += d_ori[k] * weights.ori;
        }

        // Uniform + near points: Eikonal everywhere, off-surface on uniform.
        let mut field_points = q.uniform_points.clone();
        field_points.extend_from_slice(&q.near_points);
        let fb = state.sdf.eval_batch(&field_points);
        let (l_eik, d_eik) = eikonal_loss(&fb.gradients);
        let (l_off, d_off) = offsurface_loss(
            &fb.values[..q.uniform_points.len()],
            T::of(config.alpha_off),
        );
        parts.l_eik = l_eik;
        parts.l_off = l_off;
        let mut fb_d_values = vec![T::zero(); fb.n];
        for (i, d) in d_off.iter().enumerate() {
            fb_d_values[i] = weights.off * *d;
        }
        let fb_d_grads: Vec<Vec3<T>> = d_eik.iter().map(|g| *g * weights.eik).collect();
        field_pass = Some((fb, fb_d_values, fb_d_grads));

        // Normal-map agreement between the splat and SDF normal maps.
        if let Some(np) = sdf_normal_map_pass(&state.sdf, camera, &output) {
            let (l_nor, d_gs_map, d_sdf_map) = normal_map_loss(
                &output.normal_map,
                &np.map,
                &output.alpha,
                config.normal_loss_targets,
            );
            parts.l_nor = l_nor;
            for (i, v) in d_gs_map.iter().enumerate() {
                master.d_normal[i] += weights.nor * *v;
            }
            // Map gradient -> per-pixel unit normal -> raw SDF gradient.
            let mut d_batch_grads = vec![Vec3::zero(); np.batch.n];
            for (i, &pix) in np.pixels.iter().enumerate() {
                let d_unit = Vec3::new(
                    d_sdf_map[pix * 3],
                    d_sdf_map[pix * 3 + 1],
                    d_sdf_map[pix * 3 + 2],
                ) * (weights.nor * np.flips[i]);
                d_batch_grads[i] =
                    normalize_backward(np.batch.gradients[i], d_unit, T::of(1e-20));
            }
            nor_pass = Some((np, d_batch_grads));
        }
    }

    // Entropy on every opacity.
    let opacities: Vec<T> = state.gaussians.iter().map(|g| g.opacity()).collect();
    let (l_ent, d_ent) = entropy_loss(&opacities);
    parts.l_ent = l_ent;

    let total = assemble_total(&parts, config, state.iter);
    for (name, value) in [
        ("l_rgb", parts.l_rgb),
        ("l_dep", parts.l_dep),
        ("l_dnc", parts.l_dnc),
        ("l_pos", parts.l_pos),
        ("l_eik", parts.l_eik),
        ("l_off", parts.l_off),
        ("l_ori", parts.l_ori),
        ("l_nor", parts.l_nor),
        ("l_ent", parts.l_ent),
        ("total", total),
    ] {
        if !value.is_finite() {
            return Err(TrainError::NonFinite {
                iter: state.iter,
                term: name,
                value: value.as_f64(),
            });
        }
    }

    // Backward: rasterizer first (it produces the color gradients the
    // appearance network consumes).
    let mut splat_grads = render_backward(
        camera,
        &state.gaussians,
        &color_pass.colors,
        &output,
        &master,
    );

    // Densification statistics from the pure rendering path.
    for i in 0..n {
        if splat_grads.seen[i] {
            state.grad_accum[i] += splat_grads.view_grad[i];
            state.seen_count[i] += 1;
        }
    }

    // Entropy -> opacity logits.
    for i in 0..n {
        let o = opacities[i];
        splat_grads.d_opacity_logit[i] += weights.ent * d_ent[i] * o * (T::one() - o);
    }

    // Appearance backward: parameters plus input chains.
    let mut app_grads = vec![T::zero(); state.app.net.param_count()];
    let mut seed_color_grads: Vec<Vec3<T>> = Vec::new();
    if let Some(ab) = &color_pass.app_batch {
        let input_grads = ab.backward(&state.app, &splat_grads.d_color, &mut app_grads);
        let center = camera.center();
        let dirs = color_pass.view_dirs.as_ref().unwrap();
        for i in 0..n {
            // Color depends on the centroid directly and through the view
            // direction; both feed the centroid gradient.
            let rel = state.gaussians[i].centroid - center;
            let d_dir = normalize_backward(rel, input_grads.d_view_dirs[i], T::of(1e-12));
            splat_grads.d_centroid[i] += input_grads.d_points[i] + d_dir;
            let _ = dirs;
        }
        if let Some(raw_grads) = &color_pass.app_normals_from {
            // Normal and feature inputs pull the SDF parameters.
            let fdim = state.sdf.feature_dim();
            for i in 0..n {
                geo_d_grads[i] += normalize_backward(
                    raw_grads[i],
                    input_grads.d_normals[i],
                    T::of(1e-8),
                );
                for k in 0..fdim {
                    geo_d_feats[i * fdim + k] += input_grads.d_features[i * fdim + k];
                }
            }
        }
    } else {
        seed_color_grads = splat_grads.d_color.clone();
    }

    // SDF parameter gradients from all paths.
    let mut sdf_grads = vec![T::zero(); state.sdf.net.param_count()];
    if let Some(gb) = &geo_batch {
        gb.backward(&state.sdf, &geo_d_values, &geo_d_feats, &geo_d_grads, &mut sdf_grads);
    }
    if let Some((fb, d_vals, d_grads)) = &field_pass {
        fb.backward(&state.sdf, d_vals, &[], d_grads, &mut sdf_grads);
    }
    if let Some((np, d_grads)) = &nor_pass {
        np.batch.backward(&state.sdf, &[], &[], d_grads, &mut sdf_grads);
    }

    // Adam updates, one group at a time.
    let lr_centroid = T::of(config.lr_centroid_at(state.iter));
    let lr_other = T::of(config.lr_gaussian_other);
    {
        let mut flat = vec![T::zero(); 3 * n];
        let mut grad = vec![T::zero(); 3 * n];
        for i in 0..n {
            flat[3 * i..3 * i + 3].copy_from_slice(&state.gaussians[i].centroid.to_array());
            grad[3 * i..3 * i + 3].copy_from_slice(&splat_grads.d_centroid[i].to_array());
        }
        adam_step_default(&mut flat, &grad, &mut state.adam_centroid, lr_centroid);
        for i in 0..n {
            state.gaussians[i].centroid = Vec3::new(flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]);
        }
    }
    {
        let mut flat = vec![T::zero(); 4 * n];
        let mut grad = vec![T::zero(); 4 * n];
        for i in 0..n {
            let q = state.gaussians[i].rotation;
            let g = splat_grads.d_rotation[i];
            flat[4 * i..4 * i + 4].copy_from_slice(&[q.w, q.x, q.y, q.z]);
            grad[4 * i..4 * i + 4].copy_from_slice(&[g.w, g.x, g.y, g.z]);
        }
        adam_step_default(&mut flat, &grad, &mut state.adam_rotation, lr_other);
        for i in 0..n {
            state.gaussians[i].rotation =
                surfrec_core::Quat::new(flat[4 * i], flat[4 * i + 1], flat[4 * i + 2], flat[4 * i + 3]);
        }
    }
    {
        let mut flat = vec![T::zero(); 2 * n];
        let mut grad = vec![T::zero(); 2 * n];
        for i in 0..n {
            flat[2 * i] = state.gaussians[i].log_scale_u;
            flat[2 * i + 1] = state.gaussians[i].log_scale_v;
            grad[2 * i] = splat_grads.d_log_scale_u[i];
            grad[2 * i + 1] = splat_grads.d_log_scale_v[i];
        }
        adam_step_default(&mut flat, &grad, &mut state.adam_scale, lr_other);
        for i in 0..n {
            state.gaussians[i].log_scale_u = flat[2 * i];
            state.gaussians[i].log_scale_v = flat[2 * i + 1];
        }
    }
    {
        let mut flat: Vec<T> = state.gaussians.iter().map(|g| g.opacity_logit).collect();
        adam_step_default(
            &mut flat,
            &splat_grads.d_opacity_logit,
            &mut state.adam_opacity,
            lr_other,
        );
        for i in 0..n {
            state.gaussians[i].opacity_logit = flat[i];
        }
    }
    if !gam {
        let mut flat = vec![T::zero(); 3 * n];
        let mut grad = vec![T::zero(); 3 * n];
        for i in 0..n {
            flat[3 * i..3 * i + 3].copy_from_slice(&state.gaussians[i].appearance_seed.to_array());
            grad[3 * i..3 * i + 3].copy_from_slice(&seed_color_grads[i].to_array());
        }
        adam_step_default(
            &mut flat,
            &grad,
            &mut state.adam_seed_color,
            T::of(config.lr_static_color),
        );
        for i in 0..n {
            state.gaussians[i].appearance_seed =
                Vec3::new(flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]);
        }
    }
    if !warmup {
        adam_step_default(
            state.sdf.net.params_mut(),
            &sdf_grads,
            &mut state.adam_sdf,
            T::of(config.lr_network),
        );
    }
    if gam {
        adam_step_default(
            state.app.net.params_mut(),
            &app_grads,
            &mut state.adam_app,
            T::of(config.lr_network),
        );
    }

    Ok((parts, total))
}

/// Full training loop with densification, CSV logging, and checkpoints.
pub fn train<T: Real>(
    scene: &SyntheticScene<T>,
    config: &TrainConfig,
    out_dir: Option<&Path>,
) -> Result<TrainState<T>, TrainError> {
    let mut state = TrainState::new(config);
    let mut log = match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| TrainError::Io(CoreError::io(dir, e)))?;
            Some(
                LossLog::create(&dir.join("train_log.csv"))
                    .map_err(|e| TrainError::Io(CoreError::io(dir.join("train_log.csv"), e)))?,
            )
        }
        None => None,
    };

    let densify_until = (config.total_iters as f64 * config.densify_until_frac) as usize;
    for iter in 0..config.total_iters {
        state.iter = iter;
        let (parts, total) = train_iteration(&mut state, scene, config)?;
        if let Some(log) = log.as_mut() {
            log.append(iter, &parts, total, state.n_gaussians(), state.mean_opacity())
                .map_err(|e| TrainError::Io(CoreError::io("train_log.csv", e)))?;
        }

        let in_window = iter >= config.sdf_warmup_iters && iter <= densify_until;
        if in_window && config.densify_interval > 0 && (iter + 1) % config.densify_interval == 0 {
            crate::densify::densify_and_prune(&mut state, config)?;
        }

        if let Some(dir) = out_dir {
            if config.checkpoint_interval > 0 && (iter + 1) % config.checkpoint_interval == 0 {
                state.iter = iter + 1;
                state.save(&dir.join(format!("ckpt_{:06}.gsrf", iter + 1)))?;
            }
        }
    }
    state.iter = config.total_iters;
    if let Some(dir) = out_dir {
        state.save(&dir.join("ckpt_final.gsrf"))?;
    }
    if let Some(log) = log.as_mut() {
        log.flush()
            .map_err(|e| TrainError::Io(CoreError::io("train_log.csv", e)))?;
    }
    Ok(state)
}

/// Render one view with the trained appearance path (or static colors).
pub fn render_view<T: Real>(
    gaussians: &[GaussianPrimitive<T>],
    sdf: &SdfNetwork<T>,
    app: &AppearanceNetwork<T>,
    camera: &Camera<T>,
    use_appearance: bool,
) -> RenderOutput<T> {
    let colors = if use_appearance {
        let centroids: Vec<Vec3<T>> = gaussians.iter().map(|g| g.centroid).collect();
        let batch = sdf.eval_batch(&centroids);
        let center = camera.center();
        let dirs: Vec<Vec3<T>> = centroids
            .iter()
            .map(|p| (*p - center).normalized_or_zero(T::of(1e-12)))
            .collect();
        let normals: Vec<Vec3<T>> = batch
            .gradients
            .iter()
            .map(|g| g.normalized_or_zero(T::of(1e-8)))
            .collect();
        app.eval_batch(&centroids, &dirs, &normals, &batch.features).colors
    } else {
        gaussians.iter().map(|g| g.appearance_seed).collect()
    };
    render(camera, gaussians, &colors)
}

/// Fit the SDF losses alone to an oriented point set (no rendering).
pub fn fit_sdf_to_points<T: Real>(
    points: &[Vec3<T>],
    normals: &[Vec3<T>],
    config: &TrainConfig,
    iters: usize,
) -> Result<SdfNetwork<T>, TrainError> {
    assert_eq!(points.len(), normals.len());
    let mut sdf = SdfNetwork::new(
        config.sdf_hidden,
        config.sdf_layers,
        config.pos_encode_bands,
        T::of(config.grad_step),
    );
    sphere_init(&mut sdf.net, T::of(config.sphere_init_radius), config.seed);
    let mut adam = AdamState::new(sdf.net.param_count());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x715a_fb11);

    let (w_pos, w_eik, w_off, w_ori) = (
        T::of(config.lambda_pos),
        T::of(config.lambda_eik),
        T::of(config.lambda_off),
        T::of(config.lambda_ori),
    );
    for iter in 0..iters {
        let q = sample_query_batch(points, config, &mut rng);
        let surf_batch = sdf.eval_batch(&q.surface_points);
        let mut field_points = q.uniform_points.clone();
        field_points.extend_from_slice(&q.near_points);
        let field_batch = sdf.eval_batch(&field_points);

        let (l_pos, d_pos) = position_loss(&surf_batch.values);
        let point_normals: Vec<Vec3<T>> =
            q.surface_indices.iter().map(|&i| normals[i]).collect();
        let (_l_ori, d_ori) = orientation_loss(&point_normals, &surf_batch.gradients);
        let (l_eik, d_eik) = eikonal_loss(&field_batch.gradients);
        let (l_off, d_off) = offsurface_loss(
            &field_batch.values[..q.uniform_points.len()],
            T::of(config.alpha_off),
        );
        if !(l_pos + l_eik + l_off).is_finite() {
            return Err(TrainError::NonFinite {
                iter,
                term: "sdf_fit",
                value: (l_pos + l_eik + l_off).as_f64(),
            });
        }

        let mut grads = vec![T::zero(); sdf.net.param_count()];
        let d_vals: Vec<T> = d_pos.iter().map(|d| w_pos * *d).collect();
        let d_grads: Vec<Vec3<T>> = d_ori.iter().map(|g| *g * w_ori).collect();
        surf_batch.backward(&sdf, &d_vals, &[], &d_grads, &mut grads);

        let mut fb_d_vals = vec![T::zero(); field_batch.n];
        for (i, d) in d_off.iter().enumerate() {
            fb_d_vals[i] = w_off * *d;
        }
        let fb_d_grads: Vec<Vec3<T>> = d_eik.iter().map(|g| *g * w_eik).collect();
        field_batch.backward(&sdf, &fb_d_vals, &[], &fb_d_grads, &mut grads);

        adam_step_default(
            sdf.net.params_mut(),
            &grads,
            &mut adam,
            T::of(config.lr_network),
        );
    }
    Ok(sdf)
}

/// Opacity distribution snapshot for the ablation reports.
pub fn opacity_stats<T: Real>(gaussians: &[GaussianPrimitive<T>]) -> (f64, f64, f64, f64) {
    let n = gaussians.len().max(1) as f64;
    let mut below_05 = 0.0;
    let mut above_08 = 0.0;
    let mut above_09 = 0.0;
    let mut mean = 0.0;
    for g in gaussians {
        let o = g.opacity().as_f64();
        mean += o / n;
        if o < 0.5 {
            below_05 += 1.0 / n;
        }
        if o > 0.8 {
            above_08 += 1.0 / n;
        }
        if o > 0.9 {
            above_09 += 1.0 / n;
        }
    }
    (below_05, above_08, above_09, mean)
}
