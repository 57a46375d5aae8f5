use proptest::prelude::*;
use surfrec_core::{
    export_mesh_ply, import_mesh_ply, import_pointcloud_ply, load_checkpoint, load_pfm, load_png,
    save_checkpoint, save_pfm, save_png, unit_tetrahedron, CoreError, GaussianPrimitive,
    ImageBuffer, PlyFormat, Quat, TriangleMesh, Vec3,
};

fn sample_gaussians() -> Vec<GaussianPrimitive<f32>> {
    (0..3)
        .map(|i| {
            let s = i as f32;
            GaussianPrimitive {
                centroid: Vec3::new(0.5 + s, -0.25 * s, 1.5),
                rotation: Quat::new(1.0, 0.125 * s, -0.5, 0.0625),
                log_scale_u: -1.5 + 0.25 * s,
                log_scale_v: -2.0,
                opacity_logit: 0.75 - s,
                appearance_seed: Vec3::new(0.125, 0.25 * s, 0.875),
            }
        })
        .collect()
}

#[test]
fn checkpoint_roundtrip_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ckpt.gsrf");
    let gaussians = sample_gaussians();
    let sdf: Vec<f32> = (0..10).map(|i| i as f32 * 0.375 - 1.0).collect();
    let app: Vec<f32> = (0..10).map(|i| (i as f32).sin()).collect();

    save_checkpoint(&gaussians, &sdf, &app, 1234, &path).unwrap();
    let ck = load_checkpoint::<f32>(&path).unwrap();

    assert_eq!(ck.iter, 1234);
    assert_eq!(ck.gaussians.len(), 3);
    for (a, b) in gaussians.iter().zip(&ck.gaussians) {
        assert_eq!(a, b);
    }
    assert_eq!(ck.sdf_params, sdf);
    assert_eq!(ck.app_params, app);
}

#[test]
fn checkpoint_empty_gaussian_list() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.gsrf");
    save_checkpoint::<f32>(&[], &[1.0], &[], 0, &path).unwrap();
    let ck = load_checkpoint::<f32>(&path).unwrap();
    assert!(ck.gaussians.is_empty());
    assert_eq!(ck.sdf_params, vec![1.0]);
}

#[test]
fn checkpoint_truncated_reports_eof() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trunc.gsrf");
    save_checkpoint(&sample_gaussians(), &[1.0f32, 2.0], &[3.0], 7, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 1]).unwrap();
    let err = load_checkpoint::<f32>(&path).unwrap_err();
    assert!(
        matches!(err, CoreError::UnexpectedEof { .. }),
        "got {err:?}"
    );
    assert!(err.to_string().contains("unexpected end of file"));
}

#[test]
fn checkpoint_version_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ver.gsrf");
    save_checkpoint::<f32>(&[], &[], &[], 0, &path).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    bytes[4] = 99; // version field
    std::fs::write(&path, &bytes).unwrap();
    let err = load_checkpoint::<f32>(&path).unwrap_err();
    assert!(matches!(err, CoreError::VersionMismatch { found: 99, .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn checkpoint_roundtrip_is_identity(
        raw in prop::collection::vec(-1e6f32..1e6, 0..40),
        iter in 0u32..100000,
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("prop.gsrf");
        // Pack the raw floats into whole Gaussians; remainder goes to the nets.
        let n = raw.len() / 13;
        let gaussians: Vec<GaussianPrimitive<f32>> = (0..n).map(|i| {
            let c = &raw[13 * i..13 * (i + 1)];
            GaussianPrimitive {
                centroid: Vec3::new(c[0], c[1], c[2]),
                rotation: Quat::new(c[3], c[4], c[5], c[6]),
                log_scale_u: c[7],
                log_scale_v: c[8],
                opacity_logit: c[9],
                appearance_seed: Vec3::new(c[10], c[11], c[12]),
            }
        }).collect();
        let rest = &raw[13 * n..];
        save_checkpoint(&gaussians, rest, &[], iter, &path).unwrap();
        let ck = load_checkpoint::<f32>(&path).unwrap();
        prop_assert_eq!(ck.iter, iter);
        prop_assert_eq!(&ck.gaussians[..], &gaussians[..]);
        prop_assert_eq!(&ck.sdf_params[..], rest);
    }
}

#[test]
fn ply_tetrahedron_roundtrip_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = unit_tetrahedron::<f32>();
    for (name, format) in [
        ("tet_ascii.ply", PlyFormat::Ascii),
        ("tet_bin.ply", PlyFormat::BinaryLittleEndian),
    ] {
        let path = dir.path().join(name);
        export_mesh_ply(&mesh, &path, format).unwrap();
        let back = import_mesh_ply::<f32>(&path).unwrap();
        assert_eq!(back.vertices.len(), 4);
        assert_eq!(back.triangles.len(), 4);
        assert_eq!(back.vertex_normals.len(), 4);
        for (a, b) in mesh.vertices.iter().zip(&back.vertices) {
            assert!((*a - *b).norm() < 1e-6);
        }
        assert_eq!(mesh.triangles, back.triangles);
    }
}

#[test]
fn ply_without_normals_reports_absent() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plain.ply");
    let mesh = TriangleMesh::<f32> {
        vertices: vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ],
        triangles: vec![[0, 1, 2]],
        vertex_normals: Vec::new(),
    };
    export_mesh_ply(&mesh, &path, PlyFormat::Ascii).unwrap();
    let cloud = import_pointcloud_ply::<f32>(&path).unwrap();
    assert_eq!(cloud.points.len(), 3);
    assert!(cloud.normals.is_none());
    let back = import_mesh_ply::<f32>(&path).unwrap();
    assert!(back.vertex_normals.is_empty());
}

#[test]
fn ply_face_index_out_of_range_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad_face.ply");
    std::fs::write(
        &path,
        "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 0\n3 0 1 2\n",
    )
    .unwrap();
    let err = import_mesh_ply::<f32>(&path).unwrap_err();
    assert!(matches!(
        err,
        CoreError::FaceIndexOutOfRange {
            index: 2,
            vertex_count: 2
        }
    ));
}

#[test]
fn ply_malformed_header_names_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad_header.ply");
    std::fs::write(
        &path,
        "ply\nformat ascii 1.0\nelement vertex 1\nproperty floof x\nend_header\n0\n",
    )
    .unwrap();
    let err = import_mesh_ply::<f32>(&path).unwrap_err();
    match err {
        CoreError::PlyHeader { line, ref text, .. } => {
            assert_eq!(line, 4);
            assert!(text.contains("floof"));
        }
        other => panic!("expected header error, got {other:?}"),
    }
}

#[test]
fn pfm_roundtrip_preserves_floats() {
    let dir = tempfile::tempdir().unwrap();
    for channels in [1usize, 3] {
        let path = dir.path().join(format!("map_{channels}.pfm"));
        let mut img = ImageBuffer::<f32>::new(5, 4, channels);
        for (i, v) in img.data.iter_mut().enumerate() {
            *v = (i as f32).sin() * 10.0 - 3.0;
        }
        save_pfm(&img, &path).unwrap();
        let back = load_pfm::<f32>(&path).unwrap();
        assert_eq!(back.width, 5);
        assert_eq!(back.height, 4);
        assert_eq!(back.channels, channels);
        assert_eq!(back.data, img.data);
    }
}

#[test]
fn png_clamps_only_at_write() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("img.png");
    let mut img = ImageBuffer::<f32>::new(3, 2, 3);
    img.data[0] = 1.7; // out of range stays in memory, clamps in the file
    img.data[1] = -0.3;
    img.data[2] = 0.5;
    save_png(&img, &path).unwrap();
    assert!(img.data[0] > 1.0);
    let back = load_png::<f32>(&path).unwrap();
    assert!((back.data[0] - 1.0).abs() < 1e-6);
    assert!(back.data[1].abs() < 1e-6);
    assert!((back.data[2] - 0.5).abs() < 3.0 / 255.0);
}
