//! Density-equalising flow on the disk.
//!
//! The density of a face is its share of the surface area over its share of
//! the disk area. Vertices move with velocity `-grad(rho) / rho`, where `rho`
//! is the current density after one implicit diffusion step on the flattened
//! mesh. The flow stops once the density is nearly uniform.

use super::beltrami::local_frame;
use super::fem::{face_gradient, hat_gradients, lumped_mass, shifted_stiffness, signed_area, P2};
use super::{normalised_ratios, DiskParam};
use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::sparse::TripletBuilder;

const STALL_ITERS: usize = 40;

/// Per-face positive density.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField(pub Vec<f64>);

impl DensityField {
    /// Surface area share over disk area share, per face.
    pub fn from_areas(mesh: &TriMesh, pos: &[[f64; 2]]) -> Self {
        let a3 = mesh.face_areas();
        let a2: Vec<f64> = mesh
            .faces
            .iter()
            .map(|f| signed_area(pos[f[0]], pos[f[1]], pos[f[2]]).abs())
            .collect();
        DensityField(normalised_ratios(&a3, &a2))
    }

    /// Coefficient of variation (std / mean).
    pub fn cv(&self) -> f64 {
        let n = self.0.len() as f64;
        let mean = self.0.iter().sum::<f64>() / n;
        let var = self.0.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
        var.sqrt() / mean
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemOptions {
    /// Stop when the density CV falls below this.
    pub tol: f64,
    pub max_iters: usize,
    /// Largest diffusion time step on the unit disk.
    pub dt: f64,
    /// Smallest diffusion time step as a multiple of the squared mean edge
    /// length of the initial disk mesh. Steps cycle geometrically from `dt`
    /// down to this so that both coarse and fine density variations are removed.
    pub dt_min_edge2: f64,
    /// Number of steps in one coarse-to-fine cycle.
    pub levels: usize,
    /// Largest vertex move per step, as a fraction of its shortest incident edge.
    pub max_step_fraction: f64,
    /// Damped Gauss-Newton rounds that match each face's disk area to its
    /// surface share after the flow; 0 disables.
    pub polish_iters: usize,
    /// Polishing stops once every per-face area ratio is within this of 1.
    pub polish_tol: f64,
    /// Weight of the angle-preserving term in the polish, relative to the
    /// area term; keeps the polish from trading angles for exact areas.
    pub polish_conformal: f64,
}

impl Default for DemOptions {
    fn default() -> Self {
        DemOptions {
            tol: 1e-2,
            max_iters: 500,
            dt: 0.05,
            dt_min_edge2: 0.1,
            levels: 8,
            max_step_fraction: 0.25,
            polish_iters: 30,
            polish_tol: 1e-3,
            polish_conformal: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemResult {
    /// The final iterate, or the best one seen when the flow did not converge.
    pub param: DiskParam,
    pub iterations: usize,
    pub converged: bool,
    pub density_cv: f64,
}

pub fn dem_flow(mesh: &TriMesh, initial: &DiskParam, opts: &DemOptions) -> Result<DemResult> {
    if initial.len() != mesh.num_vertices() {
        return Err(Error::InvalidArgument(
            "parameterisation size does not match the mesh".into(),
        ));
    }
    let faces = &mesh.faces;
    let n = mesh.num_vertices();
    let boundary = initial.boundary.clone();
    let mut pos: Vec<P2> = initial.positions();

    let mut incident = vec![Vec::new(); n];
    for (fi, f) in faces.iter().enumerate() {
        for &v in f {
            incident[v].push(fi);
        }
    }
    let edges = mesh.edges();
    let mean_edge = edges
        .iter()
        .map(|[a, b]| (pos[*a][0] - pos[*b][0]).hypot(pos[*a][1] - pos[*b][1]))
        .sum::<f64>()
        / edges.len().max(1) as f64;
    let dt_min = (opts.dt_min_edge2 * mean_edge * mean_edge).min(opts.dt);
    let levels = opts.levels.max(1);
    let ratio = if levels > 1 {
        (dt_min / opts.dt).powf(1.0 / (levels - 1) as f64)
    } else {
        1.0
    };

    let mut density = DensityField::from_areas(mesh, &pos);
    let mut cv = density.cv();
    let mut best = (cv, pos.clone());
    let mut iterations = 0;
    let mut since_best = 0;
    // The flow cannot see variations finer than the vertex spacing, so it
    // stalls at a mesh-dependent level; polishing takes over from there.
    while cv >= opts.tol && iterations < opts.max_iters && since_best < STALL_ITERS {
        if density.0.iter().any(|d| !d.is_finite()) {
            return Err(Error::NonFinite("density field".into()));
        }
        let a2: Vec<f64> = faces
            .iter()
            .map(|f| signed_area(pos[f[0]], pos[f[1]], pos[f[2]]).abs())
            .collect();

        // Face densities to vertices, area weighted.
        let mut rho_v = vec![0.0; n];
        for v in 0..n {
            let (mut s, mut w) = (0.0, 0.0);
            for &f in &incident[v] {
                s += a2[f] * density.0[f];
                w += a2[f];
            }
            rho_v[v] = s / w;
        }

        // One implicit diffusion step: (M + dt K) rho' = M rho.
        let dt = opts.dt * ratio.powi((iterations % levels) as i32);
        let mass = lumped_mass(&pos, faces);
        let system = shifted_stiffness(&pos, faces, dt, &mass);
        let rhs: Vec<f64> = mass.iter().zip(&rho_v).map(|(m, r)| m * r).collect();
        let mut smooth = rho_v.clone();
        system.solve_spd(&rhs, &mut smooth, 1e-12, 10 * n + 100)?;

        // Vertex velocity -grad(rho)/rho from area-weighted face gradients.
        let grads: Vec<P2> = faces
            .iter()
            .map(|f| face_gradient(&pos, f, &smooth))
            .collect();
        let mut vel = vec![[0.0; 2]; n];
        for v in 0..n {
            let (mut g, mut w) = ([0.0; 2], 0.0);
            for &f in &incident[v] {
                g[0] += a2[f] * grads[f][0];
                g[1] += a2[f] * grads[f][1];
                w += a2[f];
            }
            let s = -1.0 / (w * smooth[v]);
            vel[v] = [g[0] * s, g[1] * s];
            if boundary[v] {
                // Slide along the circle only.
                let p = pos[v];
                let r = p[0].hypot(p[1]);
                let (nx, ny) = (p[0] / r, p[1] / r);
                let d = vel[v][0] * nx + vel[v][1] * ny;
                vel[v] = [vel[v][0] - d * nx, vel[v][1] - d * ny];
            }
        }

        // Limit the step so no vertex crosses a large part of its one-ring.
        let mut shortest = vec![f64::INFINITY; n];
        for [a, b] in &edges {
            let l = (pos[*a][0] - pos[*b][0]).hypot(pos[*a][1] - pos[*b][1]);
            shortest[*a] = shortest[*a].min(l);
            shortest[*b] = shortest[*b].min(l);
        }
        let mut scale: f64 = 1.0;
        for v in 0..n {
            let step = dt * vel[v][0].hypot(vel[v][1]);
            if step > 0.0 {
                scale = scale.min(opts.max_step_fraction * shortest[v] / step);
            }
        }
        let h = dt * scale;
        for v in 0..n {
            let mut p = [pos[v][0] + h * vel[v][0], pos[v][1] + h * vel[v][1]];
            let r = p[0].hypot(p[1]);
            if boundary[v] {
                p = [p[0] / r, p[1] / r];
            } else if r >= 1.0 {
                let s = (1.0 - 1e-9) / r;
                p = [p[0] * s, p[1] * s];
            }
            pos[v] = p;
        }

        iterations += 1;
        density = DensityField::from_areas(mesh, &pos);
        cv = density.cv();
        if !cv.is_finite() {
            return Err(Error::NonFinite("density field".into()));
        }
        if cv < best.0 * (1.0 - 1e-3) {
            since_best = 0;
        } else {
            since_best += 1;
        }
        if cv < best.0 {
            best = (cv, pos.clone());
        }
    }
    let (mut cv, mut pos) = if cv < opts.tol { (cv, pos) } else { best };
    if opts.polish_iters > 0 {
        pos = polish_areas(
            mesh,
            pos,
            &boundary,
            opts.polish_iters,
            opts.polish_tol,
            opts.polish_conformal,
        )?;
        cv = DensityField::from_areas(mesh, &pos).cv();
    }
    let converged = cv < opts.tol;
    if pos == initial.positions() {
        return Ok(DemResult {
            param: initial.clone(),
            iterations,
            converged,
            density_cv: cv,
        });
    }
    Ok(DemResult {
        param: DiskParam::from_positions(&pos, boundary),
        iterations,
        converged,
        density_cv: cv,
    })
}

/// Relative area residuals `a_f / t_f - 1`, where `t_f` is the face's share of
/// the surface area applied to the current disk area.
fn area_residuals(a3: &[f64], faces: &[[usize; 3]], pos: &[P2]) -> (Vec<f64>, Vec<f64>) {
    let a2: Vec<f64> = faces
        .iter()
        .map(|f| signed_area(pos[f[0]], pos[f[1]], pos[f[2]]))
        .collect();
    let s2: f64 = a2.iter().sum();
    let s3: f64 = a3.iter().sum();
    let target: Vec<f64> = a3.iter().map(|a| a / s3 * s2).collect();
    let r = a2.iter().zip(&target).map(|(a, t)| a / t - 1.0).collect();
    (r, target)
}

/// Per-face linear map from vertex positions to `grad v - R90 grad u`, which
/// vanishes when the face is mapped conformally. Gradients are taken in an
/// isometric frame of the surface triangle and scaled by `sqrt(a_f / mean)`.
struct ConformalRows {
    grads: Vec<[P2; 3]>,
    weight: Vec<f64>,
}

impl ConformalRows {
    fn new(mesh: &TriMesh, scale: f64, strength: f64) -> Self {
        let areas = mesh.face_areas();
        let mean = areas.iter().sum::<f64>() / areas.len() as f64;
        let grads = (0..mesh.faces.len())
            .map(|f| hat_gradients(local_frame(mesh.corners(f))).0)
            .collect();
        let weight = areas
            .iter()
            .map(|a| (strength * a / mean).sqrt() / scale)
            .collect();
        ConformalRows { grads, weight }
    }

    fn residual(&self, f: usize, face: &[usize; 3], pos: &[P2]) -> [f64; 2] {
        let g = &self.grads[f];
        let (mut cx, mut cy) = (0.0, 0.0);
        for c in 0..3 {
            let [u, v] = pos[face[c]];
            cx += v * g[c][0] + u * g[c][1];
            cy += v * g[c][1] - u * g[c][0];
        }
        [self.weight[f] * cx, self.weight[f] * cy]
    }
}

/// Relative area residuals followed by the conformal residuals, per face.
fn polish_residuals(
    a3: &[f64],
    faces: &[[usize; 3]],
    pos: &[P2],
    conf: &ConformalRows,
) -> (Vec<f64>, Vec<f64>) {
    let (mut r, target) = area_residuals(a3, faces, pos);
    for (f, face) in faces.iter().enumerate() {
        r.extend(conf.residual(f, face, pos));
    }
    (r, target)
}

/// Levenberg-Marquardt on the relative face-area residuals, regularised by a
/// least-squares conformal term of relative weight `strength`. Interior
/// vertices move freely, boundary vertices slide on the circle. Steps that fold
/// a face or fail to reduce the cost are rejected.
fn polish_areas(
    mesh: &TriMesh,
    mut pos: Vec<P2>,
    boundary: &[bool],
    iters: usize,
    tol: f64,
    strength: f64,
) -> Result<Vec<P2>> {
    let faces = &mesh.faces;
    let nf = faces.len();
    let a3 = mesh.face_areas();
    let n = pos.len();
    let mut dof = vec![0usize; n];
    let mut ndof = 0;
    for v in 0..n {
        dof[v] = ndof;
        ndof += if boundary[v] { 1 } else { 2 };
    }
    let a2_total: f64 = faces
        .iter()
        .map(|f| signed_area(pos[f[0]], pos[f[1]], pos[f[2]]))
        .sum();
    let conf = ConformalRows::new(mesh, (a2_total / a3.iter().sum::<f64>()).sqrt(), strength);
    let sq = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();
    let (mut res, mut target) = polish_residuals(&a3, faces, &pos, &conf);
    let mut cost = sq(&res);
    let mut lambda = 1e-3;
    for _ in 0..iters {
        if res[..nf].iter().all(|r| r.abs() <= tol) {
            break;
        }
        let mut jtj = TripletBuilder::new(ndof);
        let mut jtr = vec![0.0; ndof];
        let mut accumulate = |row: &[(usize, f64)], r: f64| {
            for &(a, ga) in row {
                jtr[a] += ga * r;
                for &(b, gb) in row {
                    jtj.add(a, b, ga * gb);
                }
            }
        };
        for (fi, f) in faces.iter().enumerate() {
            // d(residual)/d(u_i, v_i) per corner, for the area row and both conformal rows.
            let g = &conf.grads[fi];
            let w = conf.weight[fi];
            let mut rows = [[(0usize, 0.0f64); 6]; 3];
            let mut len = 0;
            for c in 0..3 {
                let (i, j, k) = (f[c], f[(c + 1) % 3], f[(c + 2) % 3]);
                let partials = [
                    [
                        0.5 * (pos[j][1] - pos[k][1]) / target[fi],
                        0.5 * (pos[k][0] - pos[j][0]) / target[fi],
                    ],
                    [w * g[c][1], w * g[c][0]],
                    [-w * g[c][0], w * g[c][1]],
                ];
                for (row, [gu, gv]) in rows.iter_mut().zip(partials) {
                    if boundary[i] {
                        row[len] = (dof[i], -gu * pos[i][1] + gv * pos[i][0]);
                    } else {
                        row[len] = (dof[i], gu);
                        row[len + 1] = (dof[i] + 1, gv);
                    }
                }
                len += if boundary[i] { 1 } else { 2 };
            }
            accumulate(&rows[0][..len], res[fi]);
            accumulate(&rows[1][..len], res[nf + 2 * fi]);
            accumulate(&rows[2][..len], res[nf + 2 * fi + 1]);
        }
        let base = jtj.build();
        let diag = base.diagonal();
        let mean_diag = diag.iter().sum::<f64>() / ndof as f64;
        let mut accepted = false;
        for _ in 0..8 {
            let mut shifted = TripletBuilder::new(ndof);
            for (a, d) in diag.iter().enumerate() {
                shifted.add(a, a, lambda * (d + 1e-6 * mean_diag));
            }
            let system = base.add(&shifted.build());
            let rhs: Vec<f64> = jtr.iter().map(|g| -g).collect();
            let mut step = vec![0.0; ndof];
            if system
                .solve_spd(&rhs, &mut step, 1e-8, 4 * ndof + 100)
                .is_err()
            {
                lambda *= 10.0;
                continue;
            }
            let mut trial = pos.clone();
            for v in 0..n {
                let d = dof[v];
                if boundary[v] {
                    let t = pos[v][1].atan2(pos[v][0]) + step[d];
                    trial[v] = [t.cos(), t.sin()];
                } else {
                    trial[v] = [pos[v][0] + step[d], pos[v][1] + step[d + 1]];
                }
            }
            let folded = faces
                .iter()
                .any(|f| signed_area(trial[f[0]], trial[f[1]], trial[f[2]]) <= 0.0);
            let inside = trial
                .iter()
                .zip(boundary)
                .all(|(p, &b)| b || p[0].hypot(p[1]) < 1.0);
            if !folded && inside {
                let (r, t) = polish_residuals(&a3, faces, &trial, &conf);
                let c = sq(&r);
                if c < cost {
                    let gain = (cost - c) / cost;
                    pos = trial;
                    res = r;
                    target = t;
                    cost = c;
                    lambda = (lambda / 3.0).max(1e-9);
                    accepted = gain > 1e-6;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    if pos.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("area polishing".into()));
    }
    Ok(pos)
}
