//! Shared domain types for surfel-splatting surface reconstruction: Gaussian
//! disk primitives, cameras, render outputs, meshes, training configuration,
//! and the checkpoint / PLY / PFM serialization formats.
//!
//! Everything numeric is generic over the [`Real`] scalar; `f32` aliases are
//! the production lane and `f64` is used by precision-sensitive tests.

pub mod camera;
pub mod checkpoint;
pub mod config;
pub mod error;
pub mod gaussian;
pub mod image_io;
pub mod mesh;
pub mod ply;
pub mod real;
pub mod render;
pub mod scene_io;
pub mod vec;

pub use camera::{look_at, Camera, CameraRecord};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use config::{NormalLossTargets, TrainConfig};
pub use error::CoreError;
pub use gaussian::{logistic, logit, GaussianPrimitive};
pub use image_io::{load_pfm, load_png, save_pfm, save_png, ImageBuffer};
pub use mesh::{unit_tetrahedron, TriangleMesh};
pub use ply::{
    export_mesh_ply, export_pointcloud_ply, import_mesh_ply, import_pointcloud_ply, PlyFormat,
    PointCloud,
};
pub use real::Real;
pub use render::{RenderOutput, SplatFragment};
pub use scene_io::{load_cameras, save_cameras};
pub use vec::{Mat3, Quat, Vec3};

/// Production-lane aliases.
pub type Vec3f = Vec3<f32>;
pub type Mat3f = Mat3<f32>;
pub type Quatf = Quat<f32>;
pub type GaussianF = GaussianPrimitive<f32>;
pub type CameraF = Camera<f32>;
pub type MeshF = TriangleMesh<f32>;

/// Audit-lane aliases.
pub type Vec3d = Vec3<f64>;
pub type Mat3d = Mat3<f64>;
pub type Quatd = Quat<f64>;
pub type GaussianD = GaussianPrimitive<f64>;
pub type CameraD = Camera<f64>;
pub type MeshD = TriangleMesh<f64>;
