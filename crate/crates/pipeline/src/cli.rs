//! Command-line interface: synth / train / render / extract / eval / ablate.
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

use crate::scene::{generate_scene, load_scene, save_scene};
use crate::shapes::Shape;
use crate::train::{fit_sdf_to_points, opacity_stats, render_view, train, TrainState};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use surfrec_core::{
    export_mesh_ply, import_mesh_ply, import_pointcloud_ply, load_checkpoint, save_checkpoint,
    save_pfm, save_png, ImageBuffer, PlyFormat, TrainConfig, TriangleMesh, Vec3,
};
use surfrec_extract::{evaluate, marching_cubes, sample_mesh, FnField, SampledSurface};
use surfrec_neural::{AppearanceNetwork, SdfNetwork};

/// Production scalar lane.
type S = f32;

#[derive(Parser)]
#[command(name = "surfrec", about = "Surfel splatting with a jointly trained SDF", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Random seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON config mirroring the training-configuration fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic multi-view scene.
    Synth {
        #[arg(long, default_value = "sphere")]
        shape: String,
        #[arg(long, default_value_t = 16)]
        views: usize,
        #[arg(long, default_value_t = 64)]
        res: usize,
    },
    /// Train on a scene directory.
    Train {
        #[arg(long)]
        scene: PathBuf,
    },
    /// Render one view from a checkpoint.
    Render {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, default_value_t = 0)]
        view: usize,
    },
    /// Extract a mesh from a checkpoint's SDF via marching cubes.
    Extract {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Keep only the largest connected component.
        #[arg(long)]
        largest_component: bool,
    },
    /// Compare two meshes (or a mesh and an oriented point cloud).
    Eval {
        #[arg(long)]
        mesh_a: PathBuf,
        #[arg(long)]
        mesh_b: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Run the full model and the two ablations, then tabulate.
    Ablate {
        #[arg(long)]
        scene: PathBuf,
    },
    /// Fit the SDF losses to an oriented point cloud (no rendering).
    Fitsdf {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.code()
        }
    }
}

fn load_config(global: &GlobalArgs) -> Result<TrainConfig, CliError> {
    let mut config = match &global.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| usage(format!("bad config {}: {e}", path.display())))?
        }
        None => TrainConfig::default(),
    };
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    config.validate().map_err(usage)?;
    Ok(config)
}

fn out_dir(global: &GlobalArgs) -> Result<PathBuf, CliError> {
    let dir = global
        .out
        .clone()
        .ok_or_else(|| usage("--out <dir> is required for this subcommand"))?;
    std::fs::create_dir_all(&dir).map_err(runtime)?;
    Ok(dir)
}

fn require_dir(path: &Path, what: &str) -> Result<(), CliError> {
    if !path.is_dir() {
        return Err(usage(format!("{what} directory {} does not exist", path.display())));
    }
    Ok(())
}

fn require_file(path: &Path, what: &str) -> Result<(), CliError> {
    if !path.is_file() {
        return Err(usage(format!("{what} {} does not exist", path.display())));
    }
    Ok(())
}

/// Rebuild the two networks from a checkpoint, validating parameter counts
/// against the configured architecture.
fn nets_from_checkpoint(
    ck: &surfrec_core::Checkpoint<S>,
    config: &TrainConfig,
) -> Result<(SdfNetwork<S>, AppearanceNetwork<S>), CliError> {
    let mut sdf = SdfNetwork::<S>::new(
        config.sdf_hidden,
        config.sdf_layers,
        config.pos_encode_bands,
        config.grad_step as S,
    );
    if ck.sdf_params.len() != sdf.net.param_count() {
        return Err(usage(format!(
            "checkpoint SDF parameter count {} does not match the configured architecture ({}); pass the training config via --config",
            ck.sdf_params.len(),
            sdf.net.param_count()
        )));
    }
    sdf.net.set_params(&ck.sdf_params);
    let mut app = AppearanceNetwork::<S>::new(
        config.app_hidden,
        config.app_layers,
        sdf.feature_dim(),
        config.pos_encode_bands,
        config.dir_encode_bands,
    );
    if !ck.app_params.is_empty() {
        if ck.app_params.len() != app.net.param_count() {
            return Err(usage(format!(
                "checkpoint appearance parameter count {} does not match the configured architecture ({})",
                ck.app_params.len(),
                app.net.param_count()
            )));
        }
        app.net.set_params(&ck.app_params);
    }
    Ok((sdf, app))
}

fn extract_mesh(sdf: &SdfNetwork<S>, resolution: usize) -> TriangleMesh<S> {
    let field = FnField::new(|pts: &[Vec3<S>]| sdf.values(pts), sdf.grad_step);
    marching_cubes(
        &field,
        resolution,
        (Vec3::new(-1.0, -1.0, -1.0), Vec3::new(1.0, 1.0, 1.0)),
    )
}

fn surface_from_ply(path: &Path, samples: usize, seed: u64) -> Result<SampledSurface<S>, CliError> {
    require_file(path, "input")?;
    let mesh = import_mesh_ply::<S>(path).map_err(runtime)?;
    if !mesh.triangles.is_empty() {
        if !mesh.indices_in_range() {
            return Err(runtime(format!("{}: face index out of range", path.display())));
        }
        return Ok(sample_mesh(&mesh, samples, seed));
    }
    let cloud = import_pointcloud_ply::<S>(path).map_err(runtime)?;
    let normals = cloud.normals.ok_or_else(|| {
        usage(format!(
            "{} is a point cloud without normals; normal consistency needs oriented points",
            path.display()
        ))
    })?;
    Ok(SampledSurface::from_pointset(cloud.points, normals))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth { shape, views, res } => {
            let shape = Shape::parse(&shape)
                .ok_or_else(|| usage(format!("unknown shape {shape:?} (sphere|torus|boxes)")))?;
            if views == 0 || res < 8 {
                return Err(usage("need at least 1 view and a resolution of 8+"));
            }
            let config = load_config(&cli.global)?;
            let dir = out_dir(&cli.global)?;
            let scene = generate_scene::<S>(shape, views, res, config.seed);
            save_scene(&scene, &dir).map_err(runtime)?;
            println!(
                "wrote {} with {views} views at {res}x{res} ({})",
                dir.display(),
                shape.name()
            );
            Ok(())
        }
        Command::Train { scene } => {
            require_dir(&scene, "scene")?;
            let config = load_config(&cli.global)?;
            let dir = out_dir(&cli.global)?;
            let scene = load_scene::<S>(&scene).map_err(runtime)?;
            let state = train(&scene, &config, Some(&dir)).map_err(runtime)?;
            let (below, _, above9, mean) = opacity_stats(&state.gaussians);
            println!(
                "trained {} iterations: {} Gaussians, mean opacity {mean:.3}, {:.1}% below 0.5, {:.1}% above 0.9",
                config.total_iters,
                state.n_gaussians(),
                below * 100.0,
                above9 * 100.0
            );
            println!("checkpoints and train_log.csv in {}", dir.display());
            Ok(())
        }
        Command::Render { checkpoint, scene, view } => {
            require_file(&checkpoint, "checkpoint")?;
            require_dir(&scene, "scene")?;
            let config = load_config(&cli.global)?;
            let dir = out_dir(&cli.global)?;
            let ck = load_checkpoint::<S>(&checkpoint).map_err(runtime)?;
            let (sdf, app) = nets_from_checkpoint(&ck, &config)?;
            let scene = load_scene::<S>(&scene).map_err(runtime)?;
            let camera = scene
                .cameras
                .get(view)
                .ok_or_else(|| usage(format!("view {view} out of range ({} cameras)", scene.cameras.len())))?;
            let out = render_view(&ck.gaussians, &sdf, &app, camera, config.use_appearance_net);

            let (w, h) = (camera.width, camera.height);
            let color = ImageBuffer { width: w, height: h, channels: 3, data: out.color.clone() };
            save_png(&color, &dir.join("color.png")).map_err(runtime)?;
            save_pfm(&color, &dir.join("color.pfm")).map_err(runtime)?;
            let depth = ImageBuffer { width: w, height: h, channels: 1, data: out.expected_depth.clone() };
            save_pfm(&depth, &dir.join("depth.pfm")).map_err(runtime)?;
            let median = ImageBuffer { width: w, height: h, channels: 1, data: out.median_depth.clone() };
            save_pfm(&median, &dir.join("median_depth.pfm")).map_err(runtime)?;
            let normal = ImageBuffer { width: w, height: h, channels: 3, data: out.normal_map.clone() };
            save_pfm(&normal, &dir.join("normal.pfm")).map_err(runtime)?;
            let alpha = ImageBuffer { width: w, height: h, channels: 1, data: out.alpha.clone() };
            save_pfm(&alpha, &dir.join("alpha.pfm")).map_err(runtime)?;
            println!("wrote color.png and PFM maps to {}", dir.display());
            Ok(())
        }
        Command::Extract { checkpoint, largest_component } => {
            require_file(&checkpoint, "checkpoint")?;
            let config = load_config(&cli.global)?;
            let dir = out_dir(&cli.global)?;
            let ck = load_checkpoint::<S>(&checkpoint).map_err(runtime)?;
            let (sdf, _) = nets_from_checkpoint(&ck, &config)?;
            let mut mesh = extract_mesh(&sdf, config.mc_resolution);
            if largest_component {
                mesh = mesh.largest_component();
            }
            let path = dir.join("mesh.ply");
            export_mesh_ply(&mesh, &path, PlyFormat::BinaryLittleEndian).map_err(runtime)?;
            println!(
                "wrote {} ({} vertices, {} triangles)",
                path.display(),
                mesh.vertices.len(),
                mesh.triangles.len()
            );
            Ok(())
        }
        Command::Eval { mesh_a, mesh_b, samples } => {
            let config = load_config(&cli.global)?;
            let a = surface_from_ply(&mesh_a, samples, config.seed)?;
            let b = surface_from_ply(&mesh_b, samples, config.seed)?;
            let report = evaluate(&a, &b, config.seed);
            println!("{}", serde_json::to_string_pretty(&report).map_err(runtime)?);
            Ok(())
        }
        Command::Ablate { scene } => {
            require_dir(&scene, "scene")?;
            let config = load_config(&cli.global)?;
            let dir = out_dir(&cli.global)?;
            let scene = load_scene::<S>(&scene).map_err(runtime)?;

            let variants: [(&str, Box<dyn Fn(&mut TrainConfig)>); 3] = [
                ("full", Box::new(|_| {})),
                ("no_or", Box::new(|c| c.lambda_ent = 0.0)),
                ("no_gam", Box::new(|c| c.use_appearance_net = false)),
            ];
            let gt = sample_mesh(&scene.gt_mesh, 100_000, config.seed);
            let mut rows = Vec::new();
            for (name, tweak) in variants {
                let mut cfg = config.clone();
                tweak(&mut cfg);
                let sub = dir.join(name);
                let state: TrainState<S> = train(&scene, &cfg, Some(&sub)).map_err(runtime)?;
                let mesh = extract_mesh(&state.sdf, cfg.mc_resolution).largest_component();
                export_mesh_ply(&mesh, &sub.join("mesh.ply"), PlyFormat::BinaryLittleEndian)
                    .map_err(runtime)?;
                let sampled = sample_mesh(&mesh, 100_000, cfg.seed);
                let report = evaluate(&sampled, &gt, cfg.seed);
                let (below05, above08, above09, _) = opacity_stats(&state.gaussians);
                rows.push((
                    name,
                    report.cd_x1000,
                    report.nc,
                    state.n_gaussians(),
                    below05,
                    above08,
                    above09,
                ));
            }
            let table_path = dir.join("ablate.csv");
            let mut csv = String::from("variant,cd_x1000,nc,n_gaussians,frac_o_below_0.5,frac_o_above_0.8,frac_o_above_0.9\n");
            println!("variant    cd_x1000   nc      n_gauss  o<0.5   o>0.8   o>0.9");
            for (name, cd, nc, n, b5, a8, a9) in &rows {
                println!("{name:<10} {cd:<10.3} {nc:<7.4} {n:<8} {:<7.3} {:<7.3} {:<7.3}", b5, a8, a9);
                csv.push_str(&format!("{name},{cd},{nc},{n},{b5},{a8},{a9}\n"));
            }
            std::fs::write(&table_path, csv).map_err(runtime)?;
            println!("wrote {}", table_path.display());
            Ok(())
        }
        Command::Fitsdf { points, iters } => {
            let config = load_config(&cli.global)?;
            let dir = out_dir(&cli.global)?;
            require_file(&points, "point cloud")?;
            let cloud = import_pointcloud_ply::<S>(&points).map_err(runtime)?;
            let normals = cloud
                .normals
                .ok_or_else(|| usage("point cloud has no normals; the orientation loss needs them"))?;
            let sdf =
                fit_sdf_to_points(&cloud.points, &normals, &config, iters).map_err(runtime)?;
            let mesh = extract_mesh(&sdf, config.mc_resolution);
            export_mesh_ply(&mesh, &dir.join("mesh.ply"), PlyFormat::BinaryLittleEndian)
                .map_err(runtime)?;
            save_checkpoint::<S>(&[], sdf.net.params(), &[], iters as u32, &dir.join("sdf.gsrf"))
                .map_err(runtime)?;
            println!("fit {} points for {iters} iterations; wrote mesh.ply", cloud.points.len());
            Ok(())
        }
    }
}
