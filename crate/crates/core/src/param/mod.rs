//! Bijective, area-preserving parameterisation of disk-like meshes onto the unit disk.
//!
//! The pipeline is a Tutte embedding, a density-equalising flow that evens out
//! the area ratios, and a Beltrami-coefficient repair that removes any folds
//! the flow introduced.

mod beltrami;
mod dem;
pub(crate) mod fem;
mod tutte;

pub use beltrami::{beltrami_coefficient, enforce_bijectivity, BeltramiField, DEFAULT_TAU_CAP};
pub use dem::{dem_flow, DemOptions, DemResult, DensityField};
pub use tutte::tutte_embed;

use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::mesh::{TriMesh, Vec3};
use fem::signed_area;
use std::f64::consts::TAU;
use std::path::Path;

/// Per-vertex polar coordinates on the unit disk, aligned with mesh vertex order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiskParam {
    pub rho: Vec<f64>,
    /// Angles in [0, 2pi).
    pub phi: Vec<f64>,
    pub boundary: Vec<bool>,
}

impl DiskParam {
    /// From Cartesian positions; boundary vertices are snapped to rho = 1.
    pub fn from_positions(pos: &[[f64; 2]], boundary: Vec<bool>) -> Self {
        let mut rho = Vec::with_capacity(pos.len());
        let mut phi = Vec::with_capacity(pos.len());
        for (p, &b) in pos.iter().zip(&boundary) {
            let r = p[0].hypot(p[1]);
            rho.push(if b { 1.0 } else { r });
            phi.push(wrap_angle(p[1].atan2(p[0])));
        }
        DiskParam { rho, phi, boundary }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn positions(&self) -> Vec<[f64; 2]> {
        self.rho
            .iter()
            .zip(&self.phi)
            .map(|(r, p)| [r * p.cos(), r * p.sin()])
            .collect()
    }

    /// Signed area of every face in the plane.
    pub fn signed_areas(&self, faces: &[[usize; 3]]) -> Vec<f64> {
        let pos = self.positions();
        faces
            .iter()
            .map(|f| signed_area(pos[f[0]], pos[f[1]], pos[f[2]]))
            .collect()
    }

    /// Number of faces with non-positive signed area.
    pub fn flipped_faces(&self, faces: &[[usize; 3]]) -> usize {
        self.signed_areas(faces)
            .iter()
            .filter(|&&a| !(a > 0.0))
            .count()
    }

    /// The flattened mesh (z = 0) sharing `faces`.
    pub fn planar_mesh(&self, faces: &[[usize; 3]]) -> TriMesh {
        TriMesh {
            vertices: self
                .positions()
                .iter()
                .map(|p| Vec3::new(p[0], p[1], 0.0))
                .collect(),
            faces: faces.to_vec(),
            attributes: Default::default(),
        }
    }

    /// Checks the disk invariants against the mesh it belongs to.
    pub fn validate(&self, mesh: &TriMesh) -> Result<()> {
        if self.len() != mesh.num_vertices()
            || self.phi.len() != self.len()
            || self.boundary.len() != self.len()
        {
            return Err(Error::InvalidArgument(
                "parameterisation size does not match the mesh".into(),
            ));
        }
        for i in 0..self.len() {
            let r = self.rho[i];
            let ok = if self.boundary[i] {
                (r - 1.0).abs() <= 1e-9
            } else {
                (0.0..1.0).contains(&r)
            };
            if !ok || !self.phi[i].is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "vertex {i} violates the disk bounds (rho = {r})"
                )));
            }
        }
        let flipped = self.flipped_faces(&mesh.faces);
        if flipped > 0 {
            return Err(Error::InvalidArgument(format!("{flipped} flipped faces")));
        }
        Ok(())
    }

    /// CSV with header `vertex,rho,phi,is_boundary`, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("vertex,rho,phi,is_boundary\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{i},{},{},{}\n",
                sig(self.rho[i], 12),
                sig(self.phi[i], 12),
                u8::from(self.boundary[i])
            ));
        }
        out
    }

    pub fn from_csv(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, msg: &str| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg: msg.into(),
        };
        let mut out = DiskParam::default();
        for (i, line) in text.lines().enumerate() {
            if i == 0 {
                if line.trim() != "vertex,rho,phi,is_boundary" {
                    return Err(err(1, "expected header 'vertex,rho,phi,is_boundary'"));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != 4 {
                return Err(err(i + 1, "expected 4 columns"));
            }
            let idx: usize = cells[0]
                .parse()
                .map_err(|_| err(i + 1, "bad vertex index"))?;
            if idx != out.len() {
                return Err(err(i + 1, "vertex indices must be consecutive from 0"));
            }
            out.rho
                .push(cells[1].parse().map_err(|_| err(i + 1, "bad rho"))?);
            out.phi
                .push(cells[2].parse().map_err(|_| err(i + 1, "bad phi"))?);
            out.boundary.push(match cells[3] {
                "1" | "true" => true,
                "0" | "false" => false,
                _ => return Err(err(i + 1, "bad is_boundary flag")),
            });
        }
        Ok(out)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_csv(&std::fs::read_to_string(path)?, path)
    }
}

pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Per-face area ratios `(A_3d / sum A_3d) / (A_2d / sum A_2d)`.
pub fn area_ratios(mesh: &TriMesh, param: &DiskParam) -> Vec<f64> {
    let a3 = mesh.face_areas();
    let a2: Vec<f64> = param
        .signed_areas(&mesh.faces)
        .iter()
        .map(|a| a.abs())
        .collect();
    normalised_ratios(&a3, &a2)
}

pub(crate) fn normalised_ratios(a3: &[f64], a2: &[f64]) -> Vec<f64> {
    let s3: f64 = a3.iter().sum();
    let s2: f64 = a2.iter().sum();
    a3.iter()
        .zip(a2)
        .map(|(x, y)| (x / s3) / (y / s2))
        .collect()
}

/// Summary of how much a parameterisation distorts areas and angles.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DistortionStats {
    pub flipped_faces: usize,
    pub area_ratio_min: f64,
    pub area_ratio_max: f64,
    pub area_ratio_cv: f64,
    pub log_area_ratio_std: f64,
    pub mean_angle_distortion_deg: f64,
    pub max_boundary_deviation: f64,
}

pub fn distortion_stats(mesh: &TriMesh, param: &DiskParam) -> Result<DistortionStats> {
    let ratios = area_ratios(mesh, param);
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let logs: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let lmean = logs.iter().sum::<f64>() / n;
    let lvar = logs.iter().map(|l| (l - lmean).powi(2)).sum::<f64>() / n;
    let planar = param.planar_mesh(&mesh.faces);
    let max_boundary_deviation = (0..param.len())
        .filter(|&i| param.boundary[i])
        .map(|i| (param.rho[i] - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(DistortionStats {
        flipped_faces: param.flipped_faces(&mesh.faces),
        area_ratio_min: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        area_ratio_max: ratios.iter().cloned().fold(0.0, f64::max),
        area_ratio_cv: var.sqrt() / mean,
        log_area_ratio_std: lvar.sqrt(),
        mean_angle_distortion_deg: crate::mesh::angular_distortion(mesh, &planar)?,
        max_boundary_deviation,
    })
}

/// Options for [`area_preserving_param`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamOptions {
    pub dem: DemOptions,
    pub tau_cap: f64,
}

impl Default for ParamOptions {
    fn default() -> Self {
        ParamOptions {
            dem: DemOptions::default(),
            tau_cap: DEFAULT_TAU_CAP,
        }
    }
}

/// What happened during [`area_preserving_param`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ParamReport {
    pub tutte: DistortionStats,
    pub result: DistortionStats,
    pub dem_iterations: usize,
    pub dem_converged: bool,
    pub dem_density_cv: f64,
    pub repaired: bool,
    pub max_beltrami: f64,
    pub warnings: Vec<String>,
}

/// Tutte embedding, density-equalising flow, then bijectivity repair.
pub fn area_preserving_param(
    mesh: &TriMesh,
    opts: &ParamOptions,
) -> Result<(DiskParam, ParamReport)> {
    let tutte = tutte_embed(mesh)?;
    let tutte_stats = distortion_stats(mesh, &tutte)?;
    let dem = dem_flow(mesh, &tutte, &opts.dem)?;
    let mut warnings = Vec::new();
    if !dem.converged {
        warnings.push(format!(
            "density flow stopped after {} iterations with density CV {:.3e}",
            dem.iterations, dem.density_cv
        ));
    }
    // The repair acts on h: Tutte disk -> flowed disk.
    let source = tutte.planar_mesh(&mesh.faces);
    let repaired = enforce_bijectivity(&source, &dem.param, opts.tau_cap)?;
    let was_repaired = repaired != dem.param;
    let mu = beltrami_coefficient(&source, &repaired)?;
    let result = distortion_stats(mesh, &repaired)?;
    if result.flipped_faces > 0 {
        return Err(Error::NoConvergence(format!(
            "{} flipped faces remain after repair",
            result.flipped_faces
        )));
    }
    Ok((
        repaired,
        ParamReport {
            tutte: tutte_stats,
            result,
            dem_iterations: dem.iterations,
            dem_converged: dem.converged,
            dem_density_cv: dem.density_cv,
            repaired: was_repaired,
            max_beltrami: mu.max_abs(),
            warnings,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let p = DiskParam {
            rho: vec![0.0, 0.5, 1.0],
            phi: vec![0.0, 1.234567890123456, 6.0],
            boundary: vec![false, false, true],
        };
        let back = DiskParam::from_csv(&p.to_csv(), Path::new("p.csv")).unwrap();
        assert_eq!(back.boundary, p.boundary);
        for i in 0..3 {
            assert!((back.phi[i] - p.phi[i]).abs() < 1e-11);
        }
    }

    #[test]
    fn angles_wrap_into_range() {
        assert_eq!(wrap_angle(-1e-300), 0.0);
        assert!((wrap_angle(-0.5) - (TAU - 0.5)).abs() < 1e-15);
    }
}
