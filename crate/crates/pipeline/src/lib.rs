//! Training orchestration: synthetic scenes, the joint splat + SDF loop,
//! densification, and the command-line interface.

pub mod cli;
pub mod densify;
pub mod init;
pub mod raytrace;
pub mod scene;
pub mod shapes;
pub mod train;

pub use densify::{densify_and_prune, DensifyStats};
pub use init::init_gaussians;
pub use raytrace::render_ground_truth;
pub use scene::{camera_ring, generate_scene, load_scene, save_scene, SyntheticScene};
pub use shapes::{icosphere, l_prism, make_shape, torus, Shape};
pub use train::{
    fit_sdf_to_points, opacity_stats, render_view, train, train_iteration, TrainError, TrainState,
};
