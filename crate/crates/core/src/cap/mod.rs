//! Spherical caps from flat disks: Lambert azimuthal equal-area projection,
//! disk rescaling for a target half-angle and radial height projection.
//!
//! The projection centre is the south pole (0, 0, -1); a disk of radius
//! [`disk_scale`]`(theta_c)` maps onto the cap of polar half-angle `theta_c`.

use crate::error::{invalid, Error, Result};
use crate::mesh::{angular_distortion, unit_disk_mesh, TriMesh, Vec3};
use crate::param::DiskParam;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Spherical cap of half-angle `theta_c` (degrees) on a sphere of radius `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapSpec {
    pub theta_c: f64,
    pub radius: f64,
}

impl CapSpec {
    pub fn new(theta_c: f64, radius: f64) -> Result<Self> {
        if !(theta_c > 0.0 && theta_c < 90.0) {
            return Err(invalid(format!(
                "cap half-angle must lie in (0, 90) degrees, got {theta_c}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!(
                "cap radius must be positive, got {radius}"
            )));
        }
        Ok(CapSpec { theta_c, radius })
    }

    /// Gaussian curvature 1/R^2.
    pub fn curvature(&self) -> f64 {
        1.0 / (self.radius * self.radius)
    }

    /// Area of the smooth cap, 2 pi R^2 (1 - cos theta_c).
    pub fn area(&self) -> f64 {
        2.0 * PI * self.radius * self.radius * (1.0 - self.theta_c.to_radians().cos())
    }

    /// Ratio of the cap area to a flat patch of the given nominal area.
    pub fn area_ratio(&self, nominal_area: f64) -> f64 {
        self.area() / nominal_area
    }
}

/// Unit sphere to plane: `sqrt(2 / (1 - Z)) (X, Y)`.
pub fn lambert_forward(p: Vec3) -> Result<[f64; 2]> {
    if ((p.norm_squared()) - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("point {p:?} is not on the unit sphere")));
    }
    if p.z >= 1.0 {
        return Err(invalid("the north pole has no Lambert image"));
    }
    let s = (2.0 / (1.0 - p.z)).sqrt();
    Ok([s * p.x, s * p.y])
}

/// Plane (radius <= 2) to unit sphere.
pub fn lambert_inverse(x: f64, y: f64) -> Result<Vec3> {
    let r2 = x * x + y * y;
    if r2 > 4.0 {
        return Err(invalid(format!(
            "({x}, {y}) lies outside the radius-2 disk"
        )));
    }
    let s = (1.0 - r2 / 4.0).sqrt();
    Ok(Vec3::new(s * x, s * y, -1.0 + r2 / 2.0))
}

/// Disk radius whose inverse Lambert image has polar half-angle `theta_c` (degrees).
pub fn disk_scale(theta_c: f64) -> Result<f64> {
    if !(theta_c > 0.0 && theta_c < 180.0) {
        return Err(invalid(format!(
            "half-angle must lie in (0, 180) degrees, got {theta_c}"
        )));
    }
    if theta_c == 90.0 {
        return Ok(std::f64::consts::SQRT_2);
    }
    Ok((2.0 * (1.0 - theta_c.to_radians().cos())).sqrt())
}

/// Result summary of [`project_rough_patch`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub theta_c: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub s_c: f64,
    pub d_angle_deg: f64,
}

/// Wraps a unit-disk patch (x, y in the unit disk, height in z) onto a cap.
///
/// Each vertex is mapped by the inverse Lambert projection of `r_l (x, y)`,
/// scaled to radius R, and pushed along its radial direction by the factor
/// `1 + sqrt(s_c) h`.
pub fn project_rough_patch(patch: &TriMesh, cap: &CapSpec) -> Result<(TriMesh, ProjectionReport)> {
    let r_l = disk_scale(cap.theta_c)?;
    let s_c = cap.area_ratio(PI);
    let root = s_c.sqrt();
    let mut vertices = Vec::with_capacity(patch.num_vertices());
    for (i, v) in patch.vertices.iter().enumerate() {
        let rho = v.x.hypot(v.y);
        if rho > 1.0 + 1e-9 {
            return Err(invalid(format!(
                "patch vertex {i} lies outside the unit disk (rho = {rho})"
            )));
        }
        let factor = 1.0 + root * v.z;
        if !(factor > 0.0) {
            return Err(Error::SelfIntersecting { vertex: i, factor });
        }
        let dir = lambert_inverse(r_l * v.x, r_l * v.y)?;
        vertices.push(dir * (cap.radius * factor));
    }
    let curved = TriMesh {
        vertices,
        faces: patch.faces.clone(),
        attributes: patch.attributes.clone(),
    };
    let d_angle_deg = angular_distortion(patch, &curved)?;
    Ok((
        curved,
        ProjectionReport {
            theta_c: cap.theta_c,
            radius: cap.radius,
            s_c,
            d_angle_deg,
        },
    ))
}

/// Smooth cap mesh built from a uniform disk mesh, together with the disk
/// coordinates it came from (an exact equal-area parameterisation).
pub fn smooth_cap_mesh(cap: &CapSpec, edge: f64) -> Result<(TriMesh, DiskParam)> {
    let (disk, boundary) = unit_disk_mesh(edge)?;
    let pos: Vec<[f64; 2]> = disk.vertices.iter().map(|v| [v.x, v.y]).collect();
    let param = DiskParam::from_positions(&pos, boundary);
    let (mesh, _) = project_rough_patch(&disk, cap)?;
    Ok((mesh, param))
}
