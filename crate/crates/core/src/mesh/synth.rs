//! Synthetic open benchmark surfaces.

use super::{unit_disk_mesh, TriMesh, Vec3};
use crate::error::Result;

fn bump(x: f64, y: f64, cx: f64, cy: f64, sx: f64, sy: f64) -> f64 {
    (-((x - cx) / sx).powi(2) - ((y - cy) / sy).powi(2)).exp()
}

/// A face-like relief over an elliptical disk: a domed forehead and cheeks, a
/// nose ridge, two eye sockets and a mouth groove. About 1.6 units tall.
pub fn face_like_mesh(edge: f64) -> Result<TriMesh> {
    let (disk, _) = unit_disk_mesh(edge)?;
    let vertices = disk
        .vertices
        .iter()
        .map(|v| {
            let (x, y) = (v.x, v.y);
            let r2 = x * x + y * y;
            let z = 0.45 * (1.0 - r2)
                + 0.30 * bump(x, y, 0.0, -0.05, 0.12, 0.30)
                + 0.12 * bump(x, y, 0.0, -0.30, 0.18, 0.10)
                - 0.10 * bump(x, y, -0.32, 0.22, 0.14, 0.09)
                - 0.10 * bump(x, y, 0.32, 0.22, 0.14, 0.09)
                - 0.06 * bump(x, y, 0.0, -0.55, 0.25, 0.05)
                + 0.05 * bump(x, y, -0.45, -0.25, 0.20, 0.20)
                + 0.05 * bump(x, y, 0.45, -0.25, 0.20, 0.20);
            Vec3::new(0.62 * x, 0.8 * y, z)
        })
        .collect();
    TriMesh::new(vertices, disk.faces)
}
