//! Synthetic multi-view scenes: Fibonacci-ring cameras around an analytic
//! shape, targets from the ray-traced ground truth, plus the on-disk layout
//! (`cameras.json`, `images/view_%03d.png`, `masks/view_%03d.png`,
//! `gt_mesh.ply`).

use crate::raytrace::render_ground_truth;
use crate::shapes::{make_shape, Shape};
use std::path::Path;
use surfrec_core::{
    export_mesh_ply, import_mesh_ply, load_cameras, load_png, look_at, save_cameras, save_png,
    Camera, CoreError, ImageBuffer, PlyFormat, Real, TriangleMesh, Vec3,
};
use surfrec_neural::fibonacci_directions;

pub const CAMERA_RADIUS: f64 = 2.5;
pub const FOCAL_PER_PIXEL: f64 = 1.2;

#[derive(Clone)]
pub struct SyntheticScene<T> {
    pub gt_mesh: TriangleMesh<T>,
    pub cameras: Vec<Camera<T>>,
    pub images: Vec<ImageBuffer<T>>,
    pub masks: Option<Vec<ImageBuffer<T>>>,
}

/// Cameras on a Fibonacci sphere of radius 2.5, all facing the origin.
pub fn camera_ring<T: Real>(n_views: usize, resolution: usize) -> Vec<Camera<T>> {
    fibonacci_directions::<T>(n_views)
        .into_iter()
        .map(|d| {
            look_at(
                d * T::of(CAMERA_RADIUS),
                Vec3::zero(),
                Vec3::new(T::zero(), T::zero(), T::one()),
                resolution,
                resolution,
                T::of(FOCAL_PER_PIXEL * resolution as f64),
            )
        })
        .collect()
}

/// Deterministic synthetic scene. The seed is reserved for future stochastic
/// variants; generation is already fully determined by its inputs.
pub fn generate_scene<T: Real>(
    shape: Shape,
    n_views: usize,
    resolution: usize,
    _seed: u64,
) -> SyntheticScene<T> {
    let gt_mesh = make_shape::<T>(shape);
    let cameras = camera_ring(n_views, resolution);
    let mut images = Vec::with_capacity(n_views);
    let mut masks = Vec::with_capacity(n_views);
    for cam in &cameras {
        let (color, mask) = render_ground_truth(cam, &gt_mesh);
        images.push(color);
        masks.push(mask);
    }
    SyntheticScene {
        gt_mesh,
        cameras,
        images,
        masks: Some(masks),
    }
}

pub fn save_scene<T: Real>(scene: &SyntheticScene<T>, dir: &Path) -> Result<(), CoreError> {
    let mk = |p: &Path| std::fs::create_dir_all(p).map_err(|e| CoreError::io(p, e));
    mk(dir)?;
    mk(&dir.join("images"))?;
    save_cameras(&scene.cameras, &dir.join("cameras.json"))?;
    export_mesh_ply(
        &scene.gt_mesh,
        &dir.join("gt_mesh.ply"),
        PlyFormat::BinaryLittleEndian,
    )?;
    for (i, img) in scene.images.iter().enumerate() {
        save_png(img, &dir.join(format!("images/view_{i:03}.png")))?;
    }
    if let Some(masks) = &scene.masks {
        mk(&dir.join("masks"))?;
        for (i, m) in masks.iter().enumerate() {
            save_png(m, &dir.join(format!("masks/view_{i:03}.png")))?;
        }
    }
    Ok(())
}

pub fn load_scene<T: Real>(dir: &Path) -> Result<SyntheticScene<T>, CoreError> {
    let cameras: Vec<Camera<T>> = load_cameras(&dir.join("cameras.json"))?;
    let gt_mesh = import_mesh_ply(&dir.join("gt_mesh.ply"))?;
    let mut images = Vec::with_capacity(cameras.len());
    for i in 0..cameras.len() {
        images.push(load_png(&dir.join(format!("images/view_{i:03}.png")))?);
    }
    let mask_dir = dir.join("masks");
    let masks = if mask_dir.is_dir() {
        let mut ms = Vec::with_capacity(cameras.len());
        for i in 0..cameras.len() {
            let img = load_png::<T>(&mask_dir.join(format!("view_{i:03}.png")))?;
            // Collapse RGB to a single channel.
            let mut m = ImageBuffer::new(img.width, img.height, 1);
            for pix in 0..img.width * img.height {
                m.data[pix] = img.data[pix * 3];
            }
            ms.push(m);
        }
        Some(ms)
    } else {
        None
    };
    Ok(SyntheticScene {
        gt_mesh,
        cameras,
        images,
        masks,
    })
}
