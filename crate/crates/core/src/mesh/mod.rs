//! Triangle meshes and the geometric utilities shared by the other modules.

mod disk;
mod distance;
mod io;
mod obb;
mod synth;

pub use disk::unit_disk_mesh;
pub use distance::{
    hausdorff_rmse, hausdorff_rmse_symmetric, point_triangle_distance_sq, TriangleBvh,
};
pub use io::{load_mesh, read_obj, read_ply, save_mesh, write_obj, write_obj_to};
pub use obb::{obb_fit, ObbFit};
pub use synth::face_like_mesh;

use crate::error::{Error, Result};
use nalgebra::Vector3;
use std::collections::{BTreeMap, HashMap};

pub type Vec3 = Vector3<f64>;

/// Indexed triangle mesh. Faces are counter-clockwise vertex triples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
    /// Optional per-vertex scalar fields, keyed by name.
    pub attributes: BTreeMap<String, Vec<f64>>,
}

impl TriMesh {
    /// Builds a mesh after checking that every face index is in range.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        if let Some((i, _)) = faces
            .iter()
            .enumerate()
            .find(|(_, f)| f.iter().any(|&v| v >= n))
        {
            return Err(Error::InvalidMesh(format!(
                "face {i} references a missing vertex"
            )));
        }
        Ok(TriMesh {
            vertices,
            faces,
            attributes: BTreeMap::new(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn corners(&self, f: usize) -> [Vec3; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.corners(f);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn face_areas(&self) -> Vec<f64> {
        (0..self.faces.len()).map(|f| self.face_area(f)).collect()
    }

    pub fn total_area(&self) -> f64 {
        self.face_areas().iter().sum()
    }

    /// Axis-aligned bounds (min, max).
    pub fn bbox(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (lo, hi)
    }

    pub fn bbox_diagonal(&self) -> f64 {
        if self.vertices.is_empty() {
            return 0.0;
        }
        let (lo, hi) = self.bbox();
        (hi - lo).norm()
    }

    /// Unique undirected edges as (min, max) pairs, in first-seen order.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for f in &self.faces {
            for i in 0..3 {
                let (a, b) = (f[i], f[(i + 1) % 3]);
                let key = [a.min(b), a.max(b)];
                if seen.insert(key, ()).is_none() {
                    out.push(key);
                }
            }
        }
        out
    }

    pub fn mean_edge_length(&self) -> f64 {
        let edges = self.edges();
        if edges.is_empty() {
            return 0.0;
        }
        edges
            .iter()
            .map(|[a, b]| (self.vertices[*a] - self.vertices[*b]).norm())
            .sum::<f64>()
            / edges.len() as f64
    }

    /// Interior angle at each corner of each face, radians.
    pub fn corner_angles(&self) -> Vec<[f64; 3]> {
        (0..self.faces.len())
            .map(|f| {
                let p = self.corners(f);
                let mut out = [0.0; 3];
                for i in 0..3 {
                    let u = p[(i + 1) % 3] - p[i];
                    let v = p[(i + 2) % 3] - p[i];
                    out[i] = u.cross(&v).norm().atan2(u.dot(&v));
                }
                out
            })
            .collect()
    }

    /// Rejects faces whose area is below `1e-14 * diagonal^2`.
    pub fn check_degenerate_faces(&self) -> Result<()> {
        let d = self.bbox_diagonal();
        let tol = 1e-14 * d * d;
        for f in 0..self.faces.len() {
            let area = self.face_area(f);
            if !(area >= tol) || area == 0.0 {
                return Err(Error::DegenerateFace { face: f, area });
            }
        }
        Ok(())
    }

    /// Full check for analysis input: no degenerate faces, manifold, one
    /// boundary loop and disk topology (Euler characteristic 1).
    pub fn check_disk_topology(&self) -> Result<Vec<usize>> {
        if self.faces.is_empty() {
            return Err(Error::InvalidMesh("mesh has no faces".into()));
        }
        self.check_degenerate_faces()?;
        let boundary = boundary_loop(self)?;
        let used = {
            let mut used = vec![false; self.vertices.len()];
            for f in &self.faces {
                for &v in f {
                    used[v] = true;
                }
            }
            used.iter().filter(|&&u| u).count()
        };
        if used != self.vertices.len() {
            return Err(Error::InvalidMesh(format!(
                "{} vertices are not referenced by any face",
                self.vertices.len() - used
            )));
        }
        let chi = used as i64 - self.edges().len() as i64 + self.faces.len() as i64;
        if chi != 1 {
            return Err(Error::NotDiskTopology(format!(
                "Euler characteristic {chi}, expected 1"
            )));
        }
        Ok(boundary)
    }
}

/// The single boundary loop, ordered along the faces' orientation.
pub fn boundary_loop(mesh: &TriMesh) -> Result<Vec<usize>> {
    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in mesh.faces.iter().enumerate() {
        for i in 0..3 {
            let e = (f[i], f[(i + 1) % 3]);
            if e.0 == e.1 {
                return Err(Error::InvalidMesh(format!("face {fi} repeats a vertex")));
            }
            if directed.insert(e, fi).is_some() {
                return Err(Error::InvalidMesh(format!(
                    "edge ({}, {}) is used twice in the same direction (non-manifold or inconsistent orientation)",
                    e.0, e.1
                )));
            }
        }
    }
    let mut next: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, b) in directed.keys() {
        if !directed.contains_key(&(b, a)) && next.insert(a, b).is_some() {
            return Err(Error::InvalidMesh(format!(
                "boundary is pinched at vertex {a}"
            )));
        }
    }
    if next.is_empty() {
        return Err(Error::NotOpenSurface);
    }
    let start = *next.keys().next().expect("non-empty");
    let mut lp = vec![start];
    let mut cur = next[&start];
    while cur != start {
        lp.push(cur);
        cur = *next
            .get(&cur)
            .ok_or_else(|| Error::InvalidMesh(format!("boundary breaks at vertex {cur}")))?;
        if lp.len() > next.len() {
            return Err(Error::InvalidMesh("boundary walk does not close".into()));
        }
    }
    if lp.len() != next.len() {
        return Err(Error::NotDiskTopology(format!(
            "{} boundary edges but the first loop has {}",
            next.len(),
            lp.len()
        )));
    }
    Ok(lp)
}

/// Mean absolute difference of corresponding corner angles, in degrees.
pub fn angular_distortion(source: &TriMesh, target: &TriMesh) -> Result<f64> {
    if source.faces != target.faces {
        return Err(Error::InvalidArgument(
            "meshes do not share face connectivity".into(),
        ));
    }
    if source.faces.is_empty() {
        return Err(Error::InvalidArgument("meshes have no faces".into()));
    }
    let a = source.corner_angles();
    let b = target.corner_angles();
    let total: f64 = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (0..3).map(|i| (x[i] - y[i]).abs()).sum::<f64>())
        .sum();
    Ok(total.to_degrees() / (3 * a.len()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> TriMesh {
        TriMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    fn tetra() -> TriMesh {
        TriMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(0.0, 0.0, 1.0),
            ],
            vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]],
        )
        .unwrap()
    }

    #[test]
    fn single_triangle_loop() {
        let l = boundary_loop(&tri()).unwrap();
        assert_eq!(l, vec![0, 1, 2]);
    }

    #[test]
    fn closed_mesh_has_no_boundary() {
        assert!(matches!(
            boundary_loop(&tetra()),
            Err(Error::NotOpenSurface)
        ));
    }

    #[test]
    fn two_loops_are_rejected() {
        let mut m = tri();
        m.vertices.extend([
            Vec3::new(5.0, 0.0, 0.0),
            Vec3::new(6.0, 0.0, 0.0),
            Vec3::new(5.0, 1.0, 0.0),
        ]);
        m.faces.push([3, 4, 5]);
        assert!(matches!(boundary_loop(&m), Err(Error::NotDiskTopology(_))));
    }

    #[test]
    fn out_of_range_face_is_rejected() {
        assert!(TriMesh::new(vec![Vec3::zeros(); 2], vec![[0, 1, 2]]).is_err());
    }

    #[test]
    fn angles_of_right_triangle() {
        let a = tri().corner_angles()[0];
        assert!((a[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((a.iter().sum::<f64>() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn distortion_of_scaled_copy_is_zero() {
        let m = tri();
        let mut s = m.clone();
        for v in &mut s.vertices {
            *v *= 3.5;
        }
        assert!(angular_distortion(&m, &s).unwrap() < 1e-12);
        assert_eq!(angular_distortion(&m, &m).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_face_is_flagged() {
        let m = TriMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(2.0, 0.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!(matches!(
            m.check_degenerate_faces(),
            Err(Error::DegenerateFace { face: 0, .. })
        ));
    }
}
