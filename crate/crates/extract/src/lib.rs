//! Mesh extraction from a learned SDF (marching cubes), SDF normal-map
//! rendering, surface sampling, and the geometry metrics (Chamfer distance,
//! normal consistency).

pub mod field;
pub mod marching_cubes;
pub mod mc_tables;
pub mod metrics;
pub mod normal_map;
pub mod sampling;

pub use field::{FnField, PlaneField, ScalarField, SphereField};
pub use marching_cubes::marching_cubes;
pub use metrics::{
    chamfer_distance, chamfer_distance_reference, evaluate, nearest_neighbors, normal_consistency,
    normal_consistency_reference, MetricsReport, PointGrid,
};
pub use normal_map::sdf_normal_map;
pub use sampling::{sample_mesh, SampledSurface, SurfaceSource};
