//! Wraps a rough patch onto spherical caps of different size and radius, then
//! estimates the curvature back from the first-degree ellipsoidal cap.
//!
//!     cargo run --release --example cap_projection

use disk_harmonics::analysis::{analyze, fdec_fit, FdecMethod};
use disk_harmonics::basis::BoundaryCondition;
use disk_harmonics::cap::{project_rough_patch, CapSpec};
use disk_harmonics::fractal::{generate_surface, sample_circular_patch, PowerLawSpec};
use disk_harmonics::mesh::TriMesh;

fn main() -> disk_harmonics::Result<()> {
    let grid = generate_surface(&PowerLawSpec {
        hurst: 0.8,
        q_r: 0.0,
        q_l: 4.0,
        q_s: 64.0,
        rms: 1.0,
        seed: 3,
        n: 128,
        rayleigh: false,
    })?;
    let patch = sample_circular_patch(&grid)?;
    // Heights scaled to a 1% rms of the disk radius.
    let rms = (patch.mesh.vertices.iter().map(|v| v.z * v.z).sum::<f64>()
        / patch.mesh.num_vertices() as f64)
        .sqrt();
    let mut flat: TriMesh = patch.mesh.clone();
    for v in &mut flat.vertices {
        v.z *= 0.01 / rms;
    }

    println!("theta  R    s_c     d_angle  kappa_true  kappa_fdec");
    for theta in [10.0, 30.0, 60.0] {
        for radius in [0.5, 1.0, 2.0] {
            let cap = CapSpec::new(theta, radius)?;
            let (curved, report) = project_rough_patch(&flat, &cap)?;
            let coeffs = analyze(&curved, &patch.param, 5, BoundaryCondition::Neumann)?;
            let fdec = fdec_fit(&coeffs, FdecMethod::ObbAtK(5))?;
            println!(
                "{theta:<6} {radius:<4} {:.4}  {:.3}    {:<10.4}  {:.4}",
                report.s_c,
                report.d_angle_deg,
                cap.curvature(),
                fdec.curvature()
            );
        }
    }
    Ok(())
}
