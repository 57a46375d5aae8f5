//! Analytic ground-truth shapes, triangulated. Everything fits well inside
//! [-0.8, 0.8]^3 in scene-normalized coordinates.

use std::collections::HashMap;
use surfrec_core::{Real, TriangleMesh, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Sphere,
    Torus,
    Boxes,
}

impl Shape {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sphere" => Some(Self::Sphere),
            "torus" => Some(Self::Torus),
            "boxes" => Some(Self::Boxes),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Sphere => "sphere",
            Self::Torus => "torus",
            Self::Boxes => "boxes",
        }
    }
}

pub const SPHERE_RADIUS: f64 = 0.6;
pub const TORUS_MAJOR: f64 = 0.5;
pub const TORUS_MINOR: f64 = 0.22;

pub fn make_shape<T: Real>(shape: Shape) -> TriangleMesh<T> {
    match shape {
        Shape::Sphere => icosphere(T::of(SPHERE_RADIUS), 4),
        Shape::Torus => torus(T::of(TORUS_MAJOR), T::of(TORUS_MINOR), 64, 32),
        Shape::Boxes => l_prism(),
    }
}

/// Icosahedron subdivided `levels` times, projected to `radius`.
pub fn icosphere<T: Real>(radius: T, levels: usize) -> TriangleMesh<T> {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3<T>> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::from_f64(x, y, z).normalized())
    .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..levels {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for &[a, b, c] in &triangles {
            let mut mid = |u: usize, v: usize, vertices: &mut Vec<Vec3<T>>| -> usize {
                let key = (u.min(v), u.max(v));
                *midpoint.entry(key).or_insert_with(|| {
                    let m = ((vertices[u] + vertices[v]) * T::of(0.5)).normalized();
                    vertices.push(m);
                    vertices.len() - 1
                })
            };
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }

    let vertex_normals = vertices.clone();
    for v in vertices.iter_mut() {
        *v = *v * radius;
    }
    TriangleMesh {
        vertices,
        triangles,
        vertex_normals,
    }
}

/// Parametric torus around the z axis; genus one by construction.
pub fn torus<T: Real>(major: T, minor: T, n_theta: usize, n_phi: usize) -> TriangleMesh<T> {
    let mut vertices = Vec::with_capacity(n_theta * n_phi);
    let mut normals = Vec::with_capacity(n_theta * n_phi);
    for it in 0..n_theta {
        let theta = T::of(it as f64 / n_theta as f64 * std::f64::consts::TAU);
        let (ct, st) = (theta.cos(), theta.sin());
        for ip in 0..n_phi {
            let phi = T::of(ip as f64 / n_phi as f64 * std::f64::consts::TAU);
            let (cp, sp) = (phi.cos(), phi.sin());
            let ring = major + minor * cp;
            vertices.push(Vec3::new(ring * ct, ring * st, minor * sp));
            normals.push(Vec3::new(cp * ct, cp * st, sp));
        }
    }
    let mut triangles = Vec::with_capacity(2 * n_theta * n_phi);
    let idx = |it: usize, ip: usize| (it % n_theta) * n_phi + (ip % n_phi);
    for it in 0..n_theta {
        for ip in 0..n_phi {
            let a = idx(it, ip);
            let b = idx(it + 1, ip);
            let c = idx(it + 1, ip + 1);
            let d = idx(it, ip + 1);
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    TriangleMesh {
        vertices,
        triangles,
        vertex_normals: normals,
    }
}

/// Union of two axis-aligned boxes forming an L-shaped prism (triangulated
/// directly, so the union is manifold).
pub fn l_prism<T: Real>() -> TriangleMesh<T> {
    // L cross-section in xy (counterclockwise), extruded along z.
    let outline = [
        (-0.6, -0.6),
        (0.6, -0.6),
        (0.6, 0.0),
        (0.0, 0.0),
        (0.0, 0.6),
        (-0.6, 0.6),
    ];
    let half_z = 0.35;
    let n = outline.len();
    let mut vertices = Vec::with_capacity(2 * n);
    for &(x, y) in &outline {
        vertices.push(Vec3::from_f64(x, y, -half_z));
    }
    for &(x, y) in &outline {
        vertices.push(Vec3::from_f64(x, y, half_z));
    }
    // Fan triangulation from the reflex corner (index 3) covers the L.
    let cap: [[usize; 3]; 4] = [[3, 4, 5], [3, 5, 0], [3, 0, 1], [3, 1, 2]];
    let mut triangles = Vec::new();
    for &[a, b, c] in &cap {
        triangles.push([a, c, b]); // bottom, wound downward
        triangles.push([a + n, b + n, c + n]); // top
    }
    for i in 0..n {
        let j = (i + 1) % n;
        triangles.push([i, j, j + n]);
        triangles.push([i, j + n, i + n]);
    }
    let mut mesh = TriangleMesh {
        vertices,
        triangles,
        vertex_normals: Vec::new(),
    };
    mesh.recompute_vertex_normals();
    mesh
}
