use disk_harmonics::cap::{smooth_cap_mesh, CapSpec};
use disk_harmonics::mesh::{face_like_mesh, unit_disk_mesh, TriMesh, Vec3};
use disk_harmonics::param::{
    area_preserving_param, beltrami_coefficient, distortion_stats, tutte_embed, DiskParam,
    ParamOptions,
};
use disk_harmonics::Error;
use proptest::prelude::*;

fn check_suite_mesh(name: &str, mesh: &TriMesh) {
    let (p, report) = area_preserving_param(mesh, &ParamOptions::default()).unwrap();
    let stats = distortion_stats(mesh, &p).unwrap();
    assert_eq!(stats.flipped_faces, 0, "{name}");
    assert!(
        stats.max_boundary_deviation < 1e-9,
        "{name}: {}",
        stats.max_boundary_deviation
    );
    assert!(
        stats.log_area_ratio_std <= report.tutte.log_area_ratio_std,
        "{name}: {} > tutte {}",
        stats.log_area_ratio_std,
        report.tutte.log_area_ratio_std
    );
    assert!(p.rho.iter().all(|&r| r <= 1.0 + 1e-9), "{name}");
}

#[test]
fn flat_disk_stays_near_identity() {
    let (m, _) = unit_disk_mesh(0.06).unwrap();
    let (p, report) = area_preserving_param(&m, &ParamOptions::default()).unwrap();
    assert!(
        report.result.area_ratio_cv < 0.01,
        "cv {}",
        report.result.area_ratio_cv
    );
    check_suite_mesh("flat", &m);
    let drift = m
        .vertices
        .iter()
        .zip(p.positions())
        .map(|(v, q)| (v.x - q[0]).hypot(v.y - q[1]))
        .fold(0.0, f64::max);
    assert!(drift < 0.05, "drift {drift}");
}

#[test]
fn cap_and_face_meshes_are_bijective_and_less_distorted() {
    let (cap, _) = smooth_cap_mesh(&CapSpec::new(20.0, 1.0).unwrap(), 0.06).unwrap();
    check_suite_mesh("cap20", &cap);
    check_suite_mesh("face", &face_like_mesh(0.06).unwrap());
}

#[test]
fn closed_mesh_is_rejected() {
    let v = vec![
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(-1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(0.0, -1.0, 0.0),
        Vec3::new(0.0, 0.0, 1.0),
        Vec3::new(0.0, 0.0, -1.0),
    ];
    let f = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    let m = TriMesh::new(v, f).unwrap();
    assert!(matches!(tutte_embed(&m), Err(Error::NotOpenSurface)));
    assert!(matches!(
        area_preserving_param(&m, &ParamOptions::default()),
        Err(Error::NotOpenSurface)
    ));
}

#[test]
fn param_csv_round_trip() {
    let (m, _) = unit_disk_mesh(0.2).unwrap();
    let p = tutte_embed(&m).unwrap();
    let path = std::env::temp_dir().join(format!("dh-param-{}.csv", std::process::id()));
    p.write_csv(&path).unwrap();
    let back = DiskParam::read_csv(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(back.boundary, p.boundary);
    for i in 0..p.len() {
        // Twelve significant digits on disk.
        assert!((back.rho[i] - p.rho[i]).abs() < 1e-11 && (back.phi[i] - p.phi[i]).abs() < 1e-11);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// A similarity of the source surface leaves the map conformal-equivalent:
    /// the Beltrami field of the identity map stays zero.
    #[test]
    fn similarity_has_zero_beltrami(scale in 0.1f64..10.0, angle in 0.0f64..std::f64::consts::TAU) {
        let (m, b) = unit_disk_mesh(0.2).unwrap();
        let pos: Vec<[f64; 2]> = m.vertices.iter().map(|v| [v.x, v.y]).collect();
        let p = DiskParam::from_positions(&pos, b);
        let (s, c) = angle.sin_cos();
        let mut moved = m.clone();
        for v in &mut moved.vertices {
            *v = Vec3::new(scale * (c * v.x - s * v.y), scale * (s * v.x + c * v.y), 0.0);
        }
        prop_assert!(beltrami_coefficient(&moved, &p).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn tutte_is_bijective_on_bumpy_disks(amp in 0.0f64..1.0, fx in 0.5f64..4.0) {
        let (mut m, _) = unit_disk_mesh(0.15).unwrap();
        for v in &mut m.vertices {
            v.z = amp * (fx * v.x).sin() * (fx * v.y).cos();
        }
        let p = tutte_embed(&m).unwrap();
        prop_assert_eq!(p.flipped_faces(&m.faces), 0);
        let stats = distortion_stats(&m, &p).unwrap();
        prop_assert!(stats.max_boundary_deviation < 1e-12);
    }
}
