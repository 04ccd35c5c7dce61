//! Point-to-surface distances and the normalised Hausdorff RMSE.

use super::{TriMesh, Vec3};
use crate::error::{invalid, Result};

const LEAF_SIZE: usize = 4;

/// Squared distance from `p` to the triangle (a, b, c).
pub fn point_triangle_distance_sq(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    // Voronoi-region walk over vertices, edges and face.
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm_squared();
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm_squared();
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (p - (a + ab * v)).norm_squared();
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm_squared();
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (p - (a + ac * w)).norm_squared();
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + (c - b) * w)).norm_squared();
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (p - (a + ab * v + ac * w)).norm_squared()
}

#[derive(Debug, Clone)]
struct Node {
    lo: Vec3,
    hi: Vec3,
    // Leaf: faces[start..start + count]. Inner: children at `start` and `start + 1`.
    start: usize,
    count: usize,
}

/// Bounding volume hierarchy over the faces of a mesh for nearest-surface queries.
#[derive(Debug, Clone)]
pub struct TriangleBvh<'a> {
    mesh: &'a TriMesh,
    nodes: Vec<Node>,
    order: Vec<usize>,
}

impl<'a> TriangleBvh<'a> {
    pub fn new(mesh: &'a TriMesh) -> Self {
        let mut order: Vec<usize> = (0..mesh.faces.len()).collect();
        let centroids: Vec<Vec3> = (0..mesh.faces.len())
            .map(|f| {
                let [a, b, c] = mesh.corners(f);
                (a + b + c) / 3.0
            })
            .collect();
        let mut nodes = vec![Node {
            lo: Vec3::zeros(),
            hi: Vec3::zeros(),
            start: 0,
            count: 0,
        }];
        let mut stack = vec![(0usize, 0usize, order.len())];
        while let Some((id, start, end)) = stack.pop() {
            let (mut lo, mut hi) = (Vec3::repeat(f64::INFINITY), Vec3::repeat(f64::NEG_INFINITY));
            for &f in &order[start..end] {
                for p in mesh.corners(f) {
                    lo = lo.inf(&p);
                    hi = hi.sup(&p);
                }
            }
            if end - start <= LEAF_SIZE {
                nodes[id] = Node {
                    lo,
                    hi,
                    start,
                    count: end - start,
                };
                continue;
            }
            let (mut clo, mut chi) = (Vec3::repeat(f64::INFINITY), Vec3::repeat(f64::NEG_INFINITY));
            for &f in &order[start..end] {
                clo = clo.inf(&centroids[f]);
                chi = chi.sup(&centroids[f]);
            }
            let axis = (chi - clo).imax();
            let mid = (start + end) / 2;
            order[start..end].select_nth_unstable_by(mid - start, |&x, &y| {
                centroids[x][axis]
                    .total_cmp(&centroids[y][axis])
                    .then(x.cmp(&y))
            });
            let left = nodes.len();
            nodes.push(Node {
                lo: Vec3::zeros(),
                hi: Vec3::zeros(),
                start: 0,
                count: 0,
            });
            nodes.push(Node {
                lo: Vec3::zeros(),
                hi: Vec3::zeros(),
                start: 0,
                count: 0,
            });
            nodes[id] = Node {
                lo,
                hi,
                start: left,
                count: 0,
            };
            stack.push((left, start, mid));
            stack.push((left + 1, mid, end));
        }
        TriangleBvh { mesh, nodes, order }
    }

    /// Squared distance from `p` to the nearest face, and that face's index.
    pub fn nearest(&self, p: &Vec3) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        if self.order.is_empty() {
            return best;
        }
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if box_distance_sq(p, &node.lo, &node.hi) >= best.0 {
                continue;
            }
            if node.count > 0 {
                for &f in &self.order[node.start..node.start + node.count] {
                    let [a, b, c] = self.mesh.corners(f);
                    let d = point_triangle_distance_sq(p, &a, &b, &c);
                    if d < best.0 || (d == best.0 && f < best.1) {
                        best = (d, f);
                    }
                }
            } else {
                let (l, r) = (node.start, node.start + 1);
                let dl = box_distance_sq(p, &self.nodes[l].lo, &self.nodes[l].hi);
                let dr = box_distance_sq(p, &self.nodes[r].lo, &self.nodes[r].hi);
                // Visit the nearer child first.
                if dl <= dr {
                    stack.push(r);
                    stack.push(l);
                } else {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        best
    }
}

fn box_distance_sq(p: &Vec3, lo: &Vec3, hi: &Vec3) -> f64 {
    let mut d = 0.0;
    for i in 0..3 {
        let e = (lo[i] - p[i]).max(0.0).max(p[i] - hi[i]);
        d += e * e;
    }
    d
}

/// RMS distance from the vertices of `reconstructed` to the surface of
/// `reference`, divided by the reference's axis-aligned bounding-box diagonal.
pub fn hausdorff_rmse(reference: &TriMesh, reconstructed: &TriMesh) -> Result<f64> {
    if reference.faces.is_empty() || reconstructed.vertices.is_empty() {
        return Err(invalid("hausdorff_rmse needs non-empty meshes"));
    }
    let diag = reference.bbox_diagonal();
    if diag == 0.0 {
        return Err(invalid("reference mesh has zero extent"));
    }
    let bvh = TriangleBvh::new(reference);
    let sum: f64 = reconstructed
        .vertices
        .iter()
        .map(|p| bvh.nearest(p).0)
        .sum();
    Ok((sum / reconstructed.vertices.len() as f64).sqrt() / diag)
}

/// The larger of the two one-directional scores.
pub fn hausdorff_rmse_symmetric(a: &TriMesh, b: &TriMesh) -> Result<f64> {
    Ok(hausdorff_rmse(a, b)?.max(hausdorff_rmse(b, a)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_regions() {
        let a = Vec3::new(0.0, 0.0, 0.0);
        let b = Vec3::new(1.0, 0.0, 0.0);
        let c = Vec3::new(0.0, 1.0, 0.0);
        let d = |p: Vec3| point_triangle_distance_sq(&p, &a, &b, &c);
        assert!((d(Vec3::new(0.2, 0.2, 0.5)) - 0.25).abs() < 1e-15);
        assert!((d(Vec3::new(-1.0, -1.0, 0.0)) - 2.0).abs() < 1e-15);
        assert!((d(Vec3::new(0.5, -2.0, 0.0)) - 4.0).abs() < 1e-15);
        assert!((d(Vec3::new(1.0, 1.0, 0.0)) - 0.5).abs() < 1e-15);
        assert!((d(Vec3::new(2.0, 0.0, 0.0)) - 1.0).abs() < 1e-15);
    }
}
