//! Expands a bumpy open surface in disk harmonics, prints its shape
//! descriptors and the first-degree ellipsoidal cap, and reconstructs it at
//! increasing degree.
//!
//!     cargo run --release --example shape_descriptors

use disk_harmonics::analysis::analyze;
use disk_harmonics::analysis::{descriptors, fdec_fit, reconstruct, uniform_disk_mesh, FdecMethod};
use disk_harmonics::basis::BoundaryCondition;
use disk_harmonics::mesh::hausdorff_rmse;
use disk_harmonics::param::{area_preserving_param, ParamOptions};

fn main() -> disk_harmonics::Result<()> {
    let (mut mesh, _) = uniform_disk_mesh(0.03)?;
    for v in &mut mesh.vertices {
        let r2 = v.x * v.x + v.y * v.y;
        v.z = 0.4 * (1.0 - r2) + 0.03 * (5.0 * v.x).sin() * (4.0 * v.y).cos();
        v.x *= 1.5;
    }
    let (param, _) = area_preserving_param(&mesh, &ParamOptions::default())?;
    let coeffs = analyze(&mesh, &param, 15, BoundaryCondition::Neumann)?;

    let d = descriptors(&coeffs);
    println!("k  resultant   normalized");
    for k in 0..=6 {
        let n = d.normalized[k].map_or("-".to_string(), |x| format!("{x:.4}"));
        println!("{k:<2} {:<11.5} {n}", d.resultant[k]);
    }

    for method in [FdecMethod::Eigenproblem, FdecMethod::ObbAtK(5)] {
        let f = fdec_fit(&coeffs, method)?;
        println!(
            "{method:?}: a={:.4} b={:.4} c={:.4} curvature={:.4}",
            f.a,
            f.b,
            f.c,
            f.curvature()
        );
    }

    let (grid, grid_param) = uniform_disk_mesh(0.025)?;
    for k in [1, 3, 5, 10, 15] {
        let rec = reconstruct(&coeffs, &grid, &grid_param, k)?;
        println!("k={k:<2} rmse {:.3e}", hausdorff_rmse(&mesh, &rec)?);
    }
    Ok(())
}
