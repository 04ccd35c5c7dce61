use disk_harmonics::cap::{
    disk_scale, lambert_forward, lambert_inverse, project_rough_patch, smooth_cap_mesh, CapSpec,
};
use disk_harmonics::mesh::{unit_disk_mesh, Vec3};
use disk_harmonics::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn hemisphere_scale_is_sqrt_two() {
    assert!((disk_scale(90.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    assert!(disk_scale(0.0).is_err());
}

/// The image of a disk of radius r_l has the cap's area, and every small
/// disk triangle keeps its area on the sphere.
#[test]
fn projection_preserves_area() {
    for theta in [5.0, 10.0, 20.0, 50.0, 80.0] {
        let cap = CapSpec::new(theta, 1.0).unwrap();
        let (mesh, _) = smooth_cap_mesh(&cap, 0.01).unwrap();
        let exact = 2.0 * PI * (1.0 - f64::to_radians(theta).cos());
        assert!(
            (mesh.total_area() / exact - 1.0).abs() < 1e-3,
            "theta {theta}"
        );
        let r_l = disk_scale(theta).unwrap();
        let (disk, _) = unit_disk_mesh(0.01).unwrap();
        let flat = disk.total_area() * r_l * r_l;
        assert!(
            (mesh.total_area() / flat - 1.0).abs() < 1e-3,
            "theta {theta}"
        );
    }
}

#[test]
fn zero_heights_land_on_the_sphere() {
    let cap = CapSpec::new(10.0, 2.0).unwrap();
    let (disk, _) = unit_disk_mesh(0.05).unwrap();
    let (curved, report) = project_rough_patch(&disk, &cap).unwrap();
    for v in &curved.vertices {
        assert!((v.norm() - 2.0).abs() < 1e-12);
    }
    let rim = curved
        .vertices
        .iter()
        .map(|v| (v.z / 2.0).acos())
        .fold(f64::INFINITY, f64::min);
    assert!((PI - rim - f64::to_radians(10.0)).abs() < 1e-9);
    assert!((report.s_c - cap.area() / PI).abs() < 1e-15);
}

#[test]
fn heights_move_vertices_radially() {
    let cap = CapSpec::new(20.0, 1.0).unwrap();
    let (mut disk, _) = unit_disk_mesh(0.1).unwrap();
    for (i, v) in disk.vertices.iter_mut().enumerate() {
        v.z = 0.01 * ((i % 7) as f64 - 3.0);
    }
    let (curved, report) = project_rough_patch(&disk, &cap).unwrap();
    for (v, src) in curved.vertices.iter().zip(&disk.vertices) {
        assert!((v.norm() - (1.0 + report.s_c.sqrt() * src.z)).abs() < 1e-12);
    }
    assert!(report.d_angle_deg > 0.0);
}

#[test]
fn oversized_heights_are_rejected() {
    let cap = CapSpec::new(10.0, 1.0).unwrap();
    let (mut disk, _) = unit_disk_mesh(0.2).unwrap();
    disk.vertices[3].z = -100.0;
    assert!(matches!(
        project_rough_patch(&disk, &cap),
        Err(Error::SelfIntersecting { vertex: 3, .. })
    ));
}

proptest! {
    #[test]
    fn lambert_round_trip(r in 0.0f64..1.999, t in 0.0f64..std::f64::consts::TAU) {
        let (x, y) = (r * t.cos(), r * t.sin());
        let p = lambert_inverse(x, y).unwrap();
        prop_assert!((p.norm() - 1.0).abs() < 1e-12);
        let [u, v] = lambert_forward(p).unwrap();
        prop_assert!((u - x).abs() < 1e-12 && (v - y).abs() < 1e-12);
    }

    #[test]
    fn sphere_round_trip(z in -1.0f64..0.99, t in 0.0f64..std::f64::consts::TAU) {
        let s = (1.0 - z * z).sqrt();
        let p = Vec3::new(s * t.cos(), s * t.sin(), z);
        let [x, y] = lambert_forward(p).unwrap();
        prop_assert!((lambert_inverse(x, y).unwrap() - p).norm() < 1e-12);
    }
}
