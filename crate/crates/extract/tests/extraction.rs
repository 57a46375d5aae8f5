use surfrec_core::{look_at, Vec3};
use surfrec_extract::{
    marching_cubes, sample_mesh, sdf_normal_map, FnField, PlaneField, ScalarField, SphereField,
};

fn unit_bounds() -> (Vec3<f64>, Vec3<f64>) {
    (Vec3::new(-1.0, -1.0, -1.0), Vec3::new(1.0, 1.0, 1.0))
}

#[test]
fn sphere_mesh_is_watertight_and_accurate() {
    let field = SphereField {
        center: Vec3::new(0.0f64, 0.0, 0.0),
        radius: 0.5,
    };
    let mesh = marching_cubes(&field, 64, unit_bounds());
    assert!(mesh.is_closed(), "sphere mesh must be watertight");
    assert_eq!(mesh.euler_characteristic(), 2);
    let budget = 2.0 * (2.0 / 64.0);
    for v in &mesh.vertices {
        assert!((v.norm() - 0.5).abs() < budget);
    }
    // Outward orientation and unit vertex normals.
    for &[a, b, c] in &mesh.triangles {
        let n = (mesh.vertices[b] - mesh.vertices[a]).cross(mesh.vertices[c] - mesh.vertices[a]);
        let dir = (mesh.vertices[a] + mesh.vertices[b] + mesh.vertices[c]) * (1.0 / 3.0);
        assert!(n.dot(dir) > 0.0);
    }
    for n in &mesh.vertex_normals {
        assert!((n.norm() - 1.0).abs() < 1e-5);
    }
}

#[test]
fn linear_field_is_interpolated_exactly() {
    let field = PlaneField {
        normal: Vec3::new(1.0f64, 0.0, 0.0),
        offset: 0.0,
    };
    let mesh = marching_cubes(&field, 16, unit_bounds());
    assert!(!mesh.is_empty());
    for v in &mesh.vertices {
        assert!(v.x.abs() < 1e-6, "vertex off the plane: {}", v.x);
    }
}

#[test]
fn one_signed_field_gives_empty_mesh() {
    let field = FnField::new(|pts: &[Vec3<f64>]| vec![1.0; pts.len()], 1e-4);
    let mesh = marching_cubes(&field, 8, unit_bounds());
    assert!(mesh.is_empty());
}

#[test]
fn level_set_invariant_under_positive_scaling() {
    let base = SphereField {
        center: Vec3::new(0.1f64, -0.05, 0.2),
        radius: 0.45,
    };
    let doubled = FnField::new(
        move |pts: &[Vec3<f64>]| {
            base.values(pts).into_iter().map(|v| 2.0 * v).collect()
        },
        1e-4,
    );
    let base2 = SphereField {
        center: Vec3::new(0.1f64, -0.05, 0.2),
        radius: 0.45,
    };
    let a = marching_cubes(&base2, 24, unit_bounds());
    let b = marching_cubes(&doubled, 24, unit_bounds());
    assert_eq!(a.triangles, b.triangles);
    assert_eq!(a.vertices.len(), b.vertices.len());
    for (va, vb) in a.vertices.iter().zip(&b.vertices) {
        assert!((*va - *vb).norm() < 1e-12);
    }
}

#[test]
fn normal_map_matches_analytic_sphere() {
    // Exact sphere depth from ray-sphere intersection, then the field
    // gradient at the unprojected point must match the sphere normal.
    let cam = look_at(
        Vec3::new(0.0f64, -2.5, 0.0),
        Vec3::zero(),
        Vec3::new(0.0, 0.0, 1.0),
        32,
        32,
        38.0,
    );
    let r = 0.5;
    let n = 32 * 32;
    let mut depth = vec![0.0f64; n];
    let mut alpha = vec![0.0f64; n];
    let origin = cam.center();
    for row in 0..32 {
        for col in 0..32 {
            let d = cam.ray_direction(row, col);
            // |o + t d|^2 = r^2
            let b = 2.0 * origin.dot(d);
            let c = origin.norm_squared() - r * r;
            let disc = b * b - 4.0 * c;
            if disc <= 0.0 {
                continue;
            }
            let t = (-b - disc.sqrt()) / 2.0;
            let hit = origin + d * t;
            depth[row * 32 + col] = cam.depth_of(hit);
            alpha[row * 32 + col] = 1.0;
        }
    }
    let field = SphereField {
        center: Vec3::zero(),
        radius: r,
    };
    let map = sdf_normal_map(&field, &cam, &depth, &alpha);
    for row in 0..32 {
        for col in 0..32 {
            let pix = row * 32 + col;
            if alpha[pix] == 0.0 {
                assert_eq!(map[pix * 3], 0.0);
                continue;
            }
            let got = Vec3::new(map[pix * 3], map[pix * 3 + 1], map[pix * 3 + 2]);
            let hit = cam.unproject(row, col, depth[pix]);
            let want = hit.normalized();
            // Front-facing sphere normals already face the camera.
            assert!((got - want).norm() < 1e-2, "pixel {pix}: {got:?} vs {want:?}");
            assert!(got.dot(cam.ray_direction(row, col)) < 0.0);
        }
    }
}

#[test]
fn normal_map_zero_alpha_is_zero() {
    let cam = look_at(
        Vec3::new(0.0f64, -2.0, 0.0),
        Vec3::zero(),
        Vec3::new(0.0, 0.0, 1.0),
        8,
        8,
        10.0,
    );
    let field = SphereField {
        center: Vec3::zero(),
        radius: 0.5,
    };
    let map = sdf_normal_map(&field, &cam, &vec![1.0; 64], &vec![0.0; 64]);
    assert!(map.iter().all(|v| *v == 0.0));
}

#[test]
fn normal_map_plane_constant() {
    // f(x) = x_z - c with matching depth: constant normal +-z.
    let cam = look_at(
        Vec3::new(0.0f64, 0.0, 2.0),
        Vec3::zero(),
        Vec3::new(0.0, 1.0, 0.0),
        8,
        8,
        10.0,
    );
    let plane_z = 0.3;
    let field = PlaneField {
        normal: Vec3::new(0.0f64, 0.0, 1.0),
        offset: plane_z,
    };
    // Depth of the plane along each pixel ray.
    let mut depth = vec![0.0f64; 64];
    let origin = cam.center();
    for row in 0..8 {
        for col in 0..8 {
            let d = cam.ray_direction(row, col);
            let t = (plane_z - origin.z) / d.z;
            depth[row * 8 + col] = cam.depth_of(origin + d * t);
        }
    }
    let map = sdf_normal_map(&field, &cam, &depth, &vec![1.0; 64]);
    for pix in 0..64 {
        let n = Vec3::new(map[pix * 3], map[pix * 3 + 1], map[pix * 3 + 2]);
        // Camera looks down -z, so the camera-facing normal is +z.
        assert!((n - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-9);
    }
}

#[test]
fn sampling_stays_inside_single_triangle() {
    let mesh = surfrec_core::TriangleMesh::<f64> {
        vertices: vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ],
        triangles: vec![[0, 1, 2]],
        vertex_normals: Vec::new(),
    };
    let s = sample_mesh(&mesh, 1000, 1);
    assert_eq!(s.points.len(), 1000);
    for p in &s.points {
        // Barycentric coordinates of the right triangle.
        let a = p.x / 2.0;
        let b = p.y;
        assert!(a >= -1e-12 && b >= -1e-12 && a + b <= 1.0 + 1e-12);
        assert!(p.z.abs() < 1e-15);
    }
    // Face normal +-z for every sample.
    for n in &s.normals {
        assert!((n.z.abs() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sampling_is_area_weighted() {
    // Two triangles with area ratio 3:1.
    let mesh = surfrec_core::TriangleMesh::<f64> {
        vertices: vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(3.0, 0.0, 0.0),
            Vec3::new(0.0, 2.0, 0.0),
            Vec3::new(10.0, 0.0, 0.0),
            Vec3::new(11.0, 0.0, 0.0),
            Vec3::new(10.0, 2.0, 0.0),
        ],
        triangles: vec![[0, 1, 2], [3, 4, 5]],
        vertex_normals: Vec::new(),
    };
    let s = sample_mesh(&mesh, 10000, 7);
    let big = s.points.iter().filter(|p| p.x < 5.0).count();
    let small = 10000 - big;
    let ratio = big as f64 / small as f64;
    assert!((2.6..=3.4).contains(&ratio), "ratio {ratio}");
}

#[test]
fn sampling_unit_sphere_mean_norm() {
    let field = SphereField {
        center: Vec3::new(0.0f64, 0.0, 0.0),
        radius: 0.8,
    };
    let mesh = marching_cubes(&field, 48, unit_bounds());
    let s = sample_mesh(&mesh, 20000, 3);
    let mean: f64 = s.points.iter().map(|p| p.norm()).sum::<f64>() / s.points.len() as f64;
    assert!((mean - 0.8).abs() < 0.01, "mean norm {mean}");
}

#[test]
fn sampling_deterministic_under_seed() {
    let mesh = surfrec_core::unit_tetrahedron::<f64>();
    let a = sample_mesh(&mesh, 64, 9);
    let b = sample_mesh(&mesh, 64, 9);
    assert_eq!(a.points, b.points);
    let c = sample_mesh(&mesh, 64, 10);
    assert_ne!(a.points, c.points);
}
