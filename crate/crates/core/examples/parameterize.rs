//! Area-preserving disk parameterisation of a few test surfaces.
//!
//!     cargo run --release --example parameterize [edge]

use disk_harmonics::cap::{smooth_cap_mesh, CapSpec};
use disk_harmonics::mesh::{face_like_mesh, unit_disk_mesh};
use disk_harmonics::param::{area_preserving_param, ParamOptions};

fn main() -> disk_harmonics::Result<()> {
    let edge: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.05);
    let mut suite = vec![("flat disk".to_string(), unit_disk_mesh(edge)?.0)];
    for theta in [10.0, 30.0, 60.0] {
        let cap = CapSpec::new(theta, 1.0)?;
        suite.push((format!("cap {theta} deg"), smooth_cap_mesh(&cap, edge)?.0));
    }
    suite.push(("face-like".into(), face_like_mesh(edge)?));

    println!(
        "{:<12} {:>6} {:>14} {:>14} {:>10} {:>6}",
        "mesh", "verts", "tutte log-std", "final log-std", "angle deg", "flips"
    );
    for (name, mesh) in &suite {
        let (param, report) = area_preserving_param(mesh, &ParamOptions::default())?;
        println!(
            "{:<12} {:>6} {:>14.4} {:>14.4} {:>10.2} {:>6}",
            name,
            mesh.num_vertices(),
            report.tutte.log_area_ratio_std,
            report.result.log_area_ratio_std,
            report.result.mean_angle_distortion_deg,
            param.flipped_faces(&mesh.faces)
        );
        for w in &report.warnings {
            println!("  note: {w}");
        }
    }
    Ok(())
}
