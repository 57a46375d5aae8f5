//! Area-weighted surface sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfrec_core::{Real, TriangleMesh, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceSource {
    Mesh,
    PointSet,
}

/// Oriented point samples of a surface.
#[derive(Debug, Clone)]
pub struct SampledSurface<T> {
    pub points: Vec<Vec3<T>>,
    pub normals: Vec<Vec3<T>>,
    pub source: SurfaceSource,
}

impl<T: Real> SampledSurface<T> {
    pub fn from_pointset(points: Vec<Vec3<T>>, normals: Vec<Vec3<T>>) -> Self {
        assert_eq!(points.len(), normals.len());
        Self {
            points,
            normals,
            source: SurfaceSource::PointSet,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Draw `count` area-weighted samples with barycentric-interpolated normals.
/// Deterministic for a fixed seed.
pub fn sample_mesh<T: Real>(mesh: &TriangleMesh<T>, count: usize, seed: u64) -> SampledSurface<T> {
    assert!(!mesh.is_empty(), "cannot sample an empty mesh");
    let nt = mesh.triangles.len();
    let mut cumulative = Vec::with_capacity(nt);
    let mut total = T::zero();
    for t in 0..nt {
        total += mesh.triangle_area(t);
        cumulative.push(total);
    }
    assert!(total > T::zero(), "mesh has zero total area");

    let has_vnormals = mesh.vertex_normals.len() == mesh.vertices.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut normals = Vec::with_capacity(count);
    for _ in 0..count {
        let r = T::of(rng.gen_range(0.0..1.0)) * total;
        let t = cumulative.partition_point(|c| *c < r).min(nt - 1);
        let [ia, ib, ic] = mesh.triangles[t];
        let (va, vb, vc) = (mesh.vertices[ia], mesh.vertices[ib], mesh.vertices[ic]);
        // Uniform barycentric draw via the sqrt trick.
        let r1 = T::of(rng.gen_range(0.0..1.0)).sqrt();
        let r2 = T::of(rng.gen_range(0.0..1.0));
        let a = T::one() - r1;
        let b = r1 * (T::one() - r2);
        let c = r1 * r2;
        points.push(va * a + vb * b + vc * c);
        let n = if has_vnormals {
            mesh.vertex_normals[ia] * a + mesh.vertex_normals[ib] * b + mesh.vertex_normals[ic] * c
        } else {
            (vb - va).cross(vc - va)
        };
        normals.push(n.normalized_or_zero(T::of(1e-20)));
    }
    SampledSurface {
        points,
        normals,
        source: SurfaceSource::Mesh,
    }
}
