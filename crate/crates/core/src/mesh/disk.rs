//! Quasi-uniform triangulations of the unit disk.

use super::{TriMesh, Vec3};
use crate::error::{invalid, Result};
use std::f64::consts::TAU;

const MAX_VERTICES: f64 = 5e6;

/// Concentric rings with hexagonal-lattice spacing (`edge * sqrt(3) / 2`
/// between rings, about `edge` along each ring), zipped into triangles.
/// Returns the mesh (z = 0) and the boundary flags; the outer ring lies on rho = 1.
pub fn unit_disk_mesh(edge: f64) -> Result<(TriMesh, Vec<bool>)> {
    if !(edge > 0.0 && edge < 1.0) {
        return Err(invalid(format!(
            "edge length must lie in (0, 1), got {edge}"
        )));
    }
    let projected = TAU / (3f64.sqrt() * edge * edge);
    if projected > MAX_VERTICES {
        return Err(invalid(format!(
            "edge length {edge} would need about {projected:.0} vertices"
        )));
    }
    let rings = ((2.0 / (3f64.sqrt() * edge)).round() as usize).max(1);
    let mut vertices = vec![Vec3::zeros()];
    let mut ring_start = vec![0usize];
    let mut ring_len = vec![1usize];
    let mut ring_offset = vec![0.0];
    for r in 1..=rings {
        let radius = r as f64 / rings as f64;
        let count = ((TAU * radius / edge).round() as usize).max(6);
        let offset = if r % 2 == 1 { 0.5 } else { 0.0 };
        ring_start.push(vertices.len());
        ring_len.push(count);
        ring_offset.push(offset);
        for j in 0..count {
            let t = TAU * (j as f64 + offset) / count as f64;
            let (s, c) = t.sin_cos();
            let radius = if r == rings { 1.0 } else { radius };
            vertices.push(Vec3::new(radius * c, radius * s, 0.0));
        }
    }

    let mut faces = Vec::new();
    let (s1, n1) = (ring_start[1], ring_len[1]);
    for o in 0..n1 {
        faces.push([0, s1 + o, s1 + (o + 1) % n1]);
    }
    for r in 2..=rings {
        let (sa, na, oa) = (ring_start[r - 1], ring_len[r - 1], ring_offset[r - 1]);
        let (sb, nb, ob) = (ring_start[r], ring_len[r], ring_offset[r]);
        let angle_a = |i: usize| (i as f64 + oa) / na as f64;
        let angle_b = |o: usize| (o as f64 + ob) / nb as f64;
        let (mut i, mut o) = (0usize, 0usize);
        while i < na || o < nb {
            let advance_outer = if i == na {
                true
            } else if o == nb {
                false
            } else {
                angle_b(o + 1) <= angle_a(i + 1)
            };
            if advance_outer {
                faces.push([sa + i % na, sb + o % nb, sb + (o + 1) % nb]);
                o += 1;
            } else {
                faces.push([sa + i % na, sb + o % nb, sa + (i + 1) % na]);
                i += 1;
            }
        }
    }
    let mut boundary = vec![false; vertices.len()];
    for b in &mut boundary[ring_start[rings]..] {
        *b = true;
    }
    Ok((TriMesh::new(vertices, faces)?, boundary))
}
