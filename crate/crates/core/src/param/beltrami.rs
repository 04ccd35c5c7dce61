//! Beltrami coefficients of piecewise-linear maps and the linear Beltrami
//! solver used to repair folded parameterisations.

use super::fem::{hat_gradients, P2};
use super::DiskParam;
use crate::error::{Error, Result};
use crate::mesh::{TriMesh, Vec3};
use crate::sparse::TripletBuilder;
use num_complex::Complex64;

/// Default magnitude that large Beltrami coefficients are rescaled to.
pub const DEFAULT_TAU_CAP: f64 = 0.95;
const MAX_REPAIR_ROUNDS: usize = 20;

/// Per-face complex Beltrami coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct BeltramiField(pub Vec<Complex64>);

impl BeltramiField {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }
}

/// Isometric 2D coordinates of a face's corners in a frame of its own plane,
/// oriented so the face is counter-clockwise.
pub(crate) fn local_frame(p: [Vec3; 3]) -> [P2; 3] {
    let e1 = p[1] - p[0];
    let e2 = p[2] - p[0];
    let len = e1.norm();
    let u = e1 / len;
    let normal = e1.cross(&e2);
    let v = normal.cross(&u).normalize();
    [[0.0, 0.0], [len, 0.0], [e2.dot(&u), e2.dot(&v)]]
}

/// mu = f_zbar / f_z of the piecewise-linear map from `mesh` to `param`.
pub fn beltrami_coefficient(mesh: &TriMesh, param: &DiskParam) -> Result<BeltramiField> {
    if param.len() != mesh.num_vertices() {
        return Err(Error::InvalidArgument(
            "parameterisation size does not match the mesh".into(),
        ));
    }
    let target = param.positions();
    let mut out = Vec::with_capacity(mesh.faces.len());
    for (fi, f) in mesh.faces.iter().enumerate() {
        let src = local_frame(mesh.corners(fi));
        let (g, area) = hat_gradients(src);
        if !(area.abs() > 0.0) {
            return Err(Error::DegenerateFace { face: fi, area });
        }
        // Jacobian rows: grad u, grad v.
        let (mut ux, mut uy, mut vx, mut vy) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..3 {
            let t = target[f[i]];
            ux += t[0] * g[i][0];
            uy += t[0] * g[i][1];
            vx += t[1] * g[i][0];
            vy += t[1] * g[i][1];
        }
        let det = ux * vy - uy * vx;
        let scale = ux * ux + uy * uy + vx * vx + vy * vy;
        if det.abs() <= 1e-14 * scale || scale == 0.0 {
            return Err(Error::DegenerateMappedFace { face: fi });
        }
        let fz = Complex64::new(0.5 * (ux + vy), 0.5 * (vx - uy));
        let fzbar = Complex64::new(0.5 * (ux - vy), 0.5 * (vx + uy));
        out.push(fzbar / fz);
    }
    Ok(BeltramiField(out))
}

/// Rescales every |mu| >= tau_cap down to tau_cap and rebuilds the map with the
/// linear Beltrami solver, keeping the boundary fixed. Repeats until the result
/// has no folded faces.
pub fn enforce_bijectivity(mesh: &TriMesh, param: &DiskParam, tau_cap: f64) -> Result<DiskParam> {
    if !(0.0 < tau_cap && tau_cap < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tau_cap must lie in (0, 1), got {tau_cap}"
        )));
    }
    let mut current = param.clone();
    for _ in 0..MAX_REPAIR_ROUNDS {
        let mu = beltrami_coefficient(mesh, &current)?;
        let flipped = current.flipped_faces(&mesh.faces);
        if flipped == 0 && mu.max_abs() < tau_cap {
            return Ok(current);
        }
        let capped: Vec<Complex64> =
            mu.0.iter()
                .map(|&m| {
                    if m.norm() >= tau_cap {
                        m * (tau_cap / m.norm())
                    } else {
                        m
                    }
                })
                .collect();
        current = linear_beltrami_solve(mesh, &current, &capped)?;
        if current.flipped_faces(&mesh.faces) == 0 {
            let check = beltrami_coefficient(mesh, &current)?;
            if check.max_abs() < 1.0 {
                return Ok(current);
            }
        }
    }
    Err(Error::NoConvergence(format!(
        "{} flipped faces remain after {MAX_REPAIR_ROUNDS} repair rounds",
        current.flipped_faces(&mesh.faces)
    )))
}

/// Solves div(A grad u) = div(A grad v) = 0 with the boundary of `param` held fixed,
/// where A is the per-face coefficient matrix induced by `mu`.
fn linear_beltrami_solve(mesh: &TriMesh, param: &DiskParam, mu: &[Complex64]) -> Result<DiskParam> {
    let n = mesh.num_vertices();
    let target = param.positions();
    let boundary = &param.boundary;
    let mut slot = vec![usize::MAX; n];
    let interior: Vec<usize> = (0..n).filter(|&v| !boundary[v]).collect();
    for (i, &v) in interior.iter().enumerate() {
        slot[v] = i;
    }
    let m = interior.len();
    if m == 0 {
        return Ok(param.clone());
    }
    let mut t = TripletBuilder::new(m);
    let mut rhs = [vec![0.0; m], vec![0.0; m]];
    for (fi, f) in mesh.faces.iter().enumerate() {
        let src = local_frame(mesh.corners(fi));
        let (g, area) = hat_gradients(src);
        let (r, s) = (mu[fi].re, mu[fi].im);
        let d = 1.0 - r * r - s * s;
        let a11 = ((r - 1.0).powi(2) + s * s) / d;
        let a12 = -2.0 * s / d;
        let a22 = ((r + 1.0).powi(2) + s * s) / d;
        let w = area.abs();
        for i in 0..3 {
            let vi = f[i];
            if boundary[vi] {
                continue;
            }
            let agi = [a11 * g[i][0] + a12 * g[i][1], a12 * g[i][0] + a22 * g[i][1]];
            for j in 0..3 {
                let k = w * (agi[0] * g[j][0] + agi[1] * g[j][1]);
                let vj = f[j];
                if boundary[vj] {
                    rhs[0][slot[vi]] -= k * target[vj][0];
                    rhs[1][slot[vi]] -= k * target[vj][1];
                } else {
                    t.add(slot[vi], slot[vj], k);
                }
            }
        }
    }
    let a = t.build();
    let mut pos = target.clone();
    for (axis, b) in rhs.iter().enumerate() {
        let mut x: Vec<f64> = interior.iter().map(|&v| target[v][axis]).collect();
        a.solve_spd(b, &mut x, 1e-13, 20 * m + 100)?;
        for (i, &v) in interior.iter().enumerate() {
            pos[v][axis] = x[i];
        }
    }
    Ok(DiskParam::from_positions(&pos, boundary.clone()))
}
