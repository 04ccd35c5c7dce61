use super::HeightGrid;
use crate::error::{invalid, Result};
use crate::mesh::{TriMesh, Vec3};
use crate::param::DiskParam;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A piece of a height grid scaled to the unit disk frame, with disk
/// coordinates assigned directly from the in-plane positions.
///
/// Mesh coordinates are `((x - c) / r, (y - c) / r, h / r)` in physical units,
/// so the patch spans the unit disk and heights keep their aspect ratio.
#[derive(Debug, Clone)]
pub struct Patch {
    pub mesh: TriMesh,
    pub param: DiskParam,
    /// Centre in grid index units.
    pub center: [f64; 2],
    /// Radius in grid index units.
    pub radius: f64,
    /// Physical length of one unit of the patch frame.
    pub scale: f64,
}

/// The largest circle inside the grid.
pub fn sample_circular_patch(grid: &HeightGrid) -> Result<Patch> {
    let c = (grid.n as f64 - 1.0) / 2.0;
    sample_patch(grid, [c, c], c)
}

/// Grid nodes with `(ix - cx)^2 + (iy - cy)^2 <= radius^2`; the disk must lie inside the grid.
pub fn sample_patch(grid: &HeightGrid, center: [f64; 2], radius: f64) -> Result<Patch> {
    let last = grid.n as f64 - 1.0;
    let [cx, cy] = center;
    if !(radius > 0.0)
        || cx - radius < 0.0
        || cy - radius < 0.0
        || cx + radius > last
        || cy + radius > last
    {
        return Err(invalid(format!(
            "patch of radius {radius} at ({cx}, {cy}) leaves the grid"
        )));
    }
    let inside = |ix: usize, iy: usize| {
        let (dx, dy) = (ix as f64 - cx, iy as f64 - cy);
        dx * dx + dy * dy <= radius * radius
    };
    build(grid, center, radius, inside)
}

/// Every grid node, mapped affinely so the inscribed circle becomes the unit
/// disk; corner samples reach `rho = sqrt(2)`.
pub fn sample_square_patch(grid: &HeightGrid) -> Result<Patch> {
    let c = (grid.n as f64 - 1.0) / 2.0;
    build(grid, [c, c], c, |_, _| true)
}

fn build(
    grid: &HeightGrid,
    center: [f64; 2],
    radius: f64,
    inside: impl Fn(usize, usize) -> bool,
) -> Result<Patch> {
    let n = grid.n;
    let scale = radius * grid.spacing();
    let mut index = vec![usize::MAX; n * n];
    let mut vertices = Vec::new();
    let (mut rho, mut phi) = (Vec::new(), Vec::new());
    for iy in 0..n {
        for ix in 0..n {
            if inside(ix, iy) {
                index[iy * n + ix] = vertices.len();
                let x = (ix as f64 - center[0]) / radius;
                let y = (iy as f64 - center[1]) / radius;
                vertices.push(Vec3::new(x, y, grid.at(ix, iy) / scale));
                rho.push(x.hypot(y));
                phi.push(crate::param::wrap_angle(y.atan2(x)));
            }
        }
    }
    let mut faces = Vec::new();
    for iy in 0..n - 1 {
        for ix in 0..n - 1 {
            let corner = [
                iy * n + ix,
                iy * n + ix + 1,
                (iy + 1) * n + ix + 1,
                (iy + 1) * n + ix,
            ];
            let id = corner.map(|c| index[c]);
            let present: Vec<usize> = id.iter().cloned().filter(|&v| v != usize::MAX).collect();
            match present.len() {
                4 => {
                    faces.push([id[0], id[1], id[2]]);
                    faces.push([id[0], id[2], id[3]]);
                }
                // The corners keep their counter-clockwise cell order.
                3 => faces.push([present[0], present[1], present[2]]),
                _ => {}
            }
        }
    }
    if vertices.len() < 3 || faces.is_empty() {
        return Err(invalid("patch contains no triangles"));
    }
    let boundary = rho.iter().map(|&r| r >= 1.0 - 1e-12).collect();
    let mesh = TriMesh::new(vertices, faces)?;
    Ok(Patch {
        mesh,
        param: DiskParam { rho, phi, boundary },
        center,
        radius,
        scale,
    })
}

/// `count` random centres for patches of `radius` that stay inside the grid.
/// Centres share the fractional offset of the radius, so all patches sample
/// the same layout of disk coordinates.
pub fn random_patch_centers(
    grid: &HeightGrid,
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<[f64; 2]>> {
    let last = grid.n as f64 - 1.0;
    let lo = radius;
    let hi = last - radius;
    if hi < lo {
        return Err(invalid(format!(
            "radius {radius} does not fit in a grid of {} nodes",
            grid.n
        )));
    }
    let frac = radius.fract();
    let first = (lo - frac).ceil() as i64;
    let last_i = (hi - frac).floor() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let x = rng.random_range(first..=last_i) as f64 + frac;
            let y = rng.random_range(first..=last_i) as f64 + frac;
            [x, y]
        })
        .collect())
}
