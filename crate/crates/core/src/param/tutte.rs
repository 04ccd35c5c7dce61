use super::DiskParam;
use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::sparse::TripletBuilder;
use std::collections::VecDeque;
use std::f64::consts::TAU;

/// Tutte embedding: the boundary loop goes to the unit circle with arc-length
/// spacing, interior vertices are the average of their neighbours.
pub fn tutte_embed(mesh: &TriMesh) -> Result<DiskParam> {
    let lp = mesh.check_disk_topology()?;
    let n = mesh.num_vertices();
    let mut boundary = vec![false; n];
    for &v in &lp {
        boundary[v] = true;
    }

    let lengths: Vec<f64> = (0..lp.len())
        .map(|i| (mesh.vertices[lp[(i + 1) % lp.len()]] - mesh.vertices[lp[i]]).norm())
        .collect();
    let total: f64 = lengths.iter().sum();
    let mut pos = vec![[0.0; 2]; n];
    let mut s = 0.0;
    for (i, &v) in lp.iter().enumerate() {
        let t = TAU * s / total;
        pos[v] = [t.cos(), t.sin()];
        s += lengths[i];
    }

    let mut nbrs = vec![Vec::new(); n];
    for [a, b] in mesh.edges() {
        nbrs[a].push(b);
        nbrs[b].push(a);
    }
    for list in &mut nbrs {
        list.sort_unstable();
    }
    check_reaches_boundary(&nbrs, &boundary)?;

    let interior: Vec<usize> = (0..n).filter(|&v| !boundary[v]).collect();
    if !interior.is_empty() {
        let mut slot = vec![usize::MAX; n];
        for (i, &v) in interior.iter().enumerate() {
            slot[v] = i;
        }
        let m = interior.len();
        let mut t = TripletBuilder::new(m);
        let mut rhs = [vec![0.0; m], vec![0.0; m]];
        for (i, &v) in interior.iter().enumerate() {
            t.add(i, i, nbrs[v].len() as f64);
            for &u in &nbrs[v] {
                if boundary[u] {
                    rhs[0][i] += pos[u][0];
                    rhs[1][i] += pos[u][1];
                } else {
                    t.add(i, slot[u], -1.0);
                }
            }
        }
        let a = t.build();
        for (axis, b) in rhs.iter().enumerate() {
            let mut x = vec![0.0; m];
            a.solve_spd(b, &mut x, 1e-14, 20 * m + 100)?;
            for (i, &v) in interior.iter().enumerate() {
                pos[v][axis] = x[i];
            }
        }
    }
    Ok(DiskParam::from_positions(&pos, boundary))
}

fn check_reaches_boundary(nbrs: &[Vec<usize>], boundary: &[bool]) -> Result<()> {
    let mut seen = boundary.to_vec();
    let mut queue: VecDeque<usize> = (0..boundary.len()).filter(|&v| boundary[v]).collect();
    while let Some(v) = queue.pop_front() {
        for &u in &nbrs[v] {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(v) => Err(Error::Singular(format!(
            "vertex {v} is not connected to the boundary; the Tutte system is singular"
        ))),
        None => Ok(()),
    }
}
