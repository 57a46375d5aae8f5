//! Marching cubes over a scalar field's zero level set.

use crate::field::ScalarField;
use crate::mc_tables::{CORNER_OFFSETS, EDGE_CORNERS, EDGE_TABLE, TRI_TABLE};
use std::collections::HashMap;
use surfrec_core::{Real, TriangleMesh, Vec3};

/// Triangulate the zero level set of `field` on an `n`^3 cell grid spanning
/// `bounds`. Shared vertices are welded along grid edges, degenerate
/// triangles dropped, and vertex normals taken from the field gradient.
///
/// A field with one sign everywhere yields an empty mesh.
pub fn marching_cubes<T: Real, F: ScalarField<T>>(
    field: &F,
    n: usize,
    bounds: (Vec3<T>, Vec3<T>),
) -> TriangleMesh<T> {
    assert!(n >= 8, "resolution below 8 is not meaningful here");
    let (lo, hi) = bounds;
    let np = n + 1;
    let step = Vec3::new(
        (hi.x - lo.x) / T::from_usize(n).unwrap(),
        (hi.y - lo.y) / T::from_usize(n).unwrap(),
        (hi.z - lo.z) / T::from_usize(n).unwrap(),
    );
    let grid_point = |i: usize, j: usize, k: usize| {
        Vec3::new(
            lo.x + step.x * T::from_usize(i).unwrap(),
            lo.y + step.y * T::from_usize(j).unwrap(),
            lo.z + step.z * T::from_usize(k).unwrap(),
        )
    };

    // Evaluate the field on the full lattice, z-major slabs.
    let mut values = vec![T::zero(); np * np * np];
    let mut batch = Vec::with_capacity(np * np);
    for k in 0..np {
        batch.clear();
        for j in 0..np {
            for i in 0..np {
                batch.push(grid_point(i, j, k));
            }
        }
        let vals = field.values(&batch);
        values[k * np * np..(k + 1) * np * np].copy_from_slice(&vals);
    }
    let at = |i: usize, j: usize, k: usize| values[(k * np + j) * np + i];

    let mut vertices: Vec<Vec3<T>> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    // Canonical grid-edge key: (flat index of the lower point, axis).
    let mut edge_vertex: HashMap<(usize, u8), usize> = HashMap::new();

    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let mut cube = 0usize;
                let mut corner_vals = [T::zero(); 8];
                for (c, off) in CORNER_OFFSETS.iter().enumerate() {
                    let v = at(i + off[0], j + off[1], k + off[2]);
                    corner_vals[c] = v;
                    if v < T::zero() {
                        cube |= 1 << c;
                    }
                }
                if EDGE_TABLE[cube] == 0 {
                    continue;
                }
                let mut edge_ids = [usize::MAX; 12];
                for (e, corners) in EDGE_CORNERS.iter().enumerate() {
                    if EDGE_TABLE[cube] & (1 << e) == 0 {
                        continue;
                    }
                    let a = CORNER_OFFSETS[corners[0]];
                    let b = CORNER_OFFSETS[corners[1]];
                    let pa = (i + a[0], j + a[1], k + a[2]);
                    let pb = (i + b[0], j + b[1], k + b[2]);
                    // Lower endpoint + axis identify the edge globally.
                    let lo_pt = pa.min(pb);
                    let key = ((lo_pt.2 * np + lo_pt.1) * np + lo_pt.0, axis_between(a, b));
                    let id = *edge_vertex.entry(key).or_insert_with(|| {
                        // Interpolate in the table's corner order; the
                        // canonical key only decides vertex identity.
                        let va = corner_vals[corners[0]];
                        let vb = corner_vals[corners[1]];
                        let t = va / (va - vb);
                        let pa_pos = grid_point(pa.0, pa.1, pa.2);
                        let pb_pos = grid_point(pb.0, pb.1, pb.2);
                        vertices.push(pa_pos + (pb_pos - pa_pos) * t);
                        vertices.len() - 1
                    });
                    edge_ids[e] = id;
                }
                let row = &TRI_TABLE[cube];
                let mut t = 0;
                while row[t] >= 0 {
                    let v0 = edge_ids[row[t] as usize];
                    let v1 = edge_ids[row[t + 1] as usize];
                    let v2 = edge_ids[row[t + 2] as usize];
                    if v0 != v1 && v1 != v2 && v0 != v2 {
                        // Table order winds toward the negative side; emit
                        // with outward (positive-side) orientation.
                        triangles.push([v0, v2, v1]);
                    }
                    t += 3;
                }
            }
        }
    }

    // Drop exact-zero-area triangles that survived the index check.
    triangles.retain(|&[a, b, c]| {
        let e1 = vertices[b] - vertices[a];
        let e2 = vertices[c] - vertices[a];
        e1.cross(e2).norm_squared() > T::zero()
    });

    let mut mesh = TriangleMesh {
        vertices,
        triangles,
        vertex_normals: Vec::new(),
    };
    if mesh.vertices.is_empty() {
        return mesh;
    }
    let grads = field.gradients(&mesh.vertices);
    mesh.vertex_normals = grads
        .into_iter()
        .map(|g| g.normalized_or_zero(T::of(1e-20)))
        .collect();
    // Zero gradients (level-set saddle artifacts) fall back to mesh normals.
    if mesh.vertex_normals.iter().any(|n| *n == Vec3::zero()) {
        let mut fallback = mesh.clone();
        fallback.recompute_vertex_normals();
        for (n, f) in mesh.vertex_normals.iter_mut().zip(&fallback.vertex_normals) {
            if *n == Vec3::zero() {
                *n = *f;
            }
        }
    }
    mesh
}

fn axis_between(a: [usize; 3], b: [usize; 3]) -> u8 {
    if a[0] != b[0] {
        0
    } else if a[1] != b[1] {
        1
    } else {
        2
    }
}
