//! Differentiable 2D Gaussian surfel rasterizer: forward rendering of
//! color/depth/normal/alpha maps, analytic gradients for every Gaussian
//! parameter and per-Gaussian color, and the rendering losses.

pub mod backward;
pub mod intersect;
pub mod losses;
pub mod render;
pub mod ssim;

pub use backward::{render_backward, RenderGrads, SplatGrads};
pub use intersect::{kernel, ray_disk_intersect, DiskHit, KERNEL_CUTOFF, NEAR_DEPTH};
pub use losses::{
    depth_distortion_loss, depth_distortion_reference, depth_normal_consistency_loss, mean_ssim,
    rgb_loss, DimensionMismatch,
};
pub use render::{render, render_reference, MEDIAN_LEVEL, TRANSMITTANCE_FLOOR};
pub use ssim::{ssim_map, ssim_map_with_grad, SSIM_C1, SSIM_C2, SSIM_SIGMA, SSIM_WINDOW};

// Fragments live in core so RenderOutput can carry them; re-exported here as
// part of this module's surface.
pub use surfrec_core::SplatFragment;
