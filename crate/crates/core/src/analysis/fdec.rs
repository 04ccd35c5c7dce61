//! First-degree ellipsoidal cap (FDEC) size estimates.

use super::{evaluate, HarmonicCoeffs};
use crate::basis::EigenTable;
use crate::error::{invalid, Error, Result};
use crate::mesh::{obb_fit, unit_disk_mesh, Vec3};
use serde::{Deserialize, Serialize};

/// How the cap half-axes are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FdecMethod {
    /// From the eigenproblem of the k = 1 coefficient matrix.
    Eigenproblem,
    /// From a PCA bounding box of the surface reconstructed at degree k.
    ObbAtK(usize),
}

impl Default for FdecMethod {
    fn default() -> Self {
        FdecMethod::ObbAtK(5)
    }
}

/// Half-axes `a >= b` in the cap plane, depth `c`, and the in-plane directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdecFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub v_a: [f64; 3],
    pub v_b: [f64; 3],
    pub method: FdecMethod,
}

impl FdecFit {
    /// Mean in-plane half-axis.
    pub fn a_avg(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Spherical-cap curvature estimate `4 c^2 / (a_avg^2 + c^2)^2`.
    pub fn curvature(&self) -> f64 {
        let a = self.a_avg();
        4.0 * self.c * self.c / (a * a + self.c * self.c).powi(2)
    }

    /// Right-handed frame with columns `v_a`, `v_b`, `v_a x v_b`.
    pub fn frame(&self) -> nalgebra::Matrix3<f64> {
        let a = Vec3::from(self.v_a);
        let b = Vec3::from(self.v_b);
        nalgebra::Matrix3::from_columns(&[a, b, a.cross(&b)])
    }
}

/// Reconstruction edge length used by [`FdecMethod::ObbAtK`].
const OBB_GRID_EDGE: f64 = 0.025;

pub fn fdec_fit(coeffs: &HarmonicCoeffs, method: FdecMethod) -> Result<FdecFit> {
    if coeffs.k_max < 1 {
        return Err(Error::DegenerateFdec("no degree-1 coefficients".into()));
    }
    let k1 = [-1, 0, 1].map(|m| coeffs.get(1, m));
    if k1.iter().flatten().all(|z| z.norm() == 0.0) {
        return Err(Error::DegenerateFdec(
            "all degree-1 coefficients vanish".into(),
        ));
    }
    match method {
        FdecMethod::Eigenproblem => eigen_fit(coeffs),
        FdecMethod::ObbAtK(k) => {
            if k == 0 || k > coeffs.k_max {
                return Err(invalid(format!(
                    "OBB degree {k} must lie in 1..={}",
                    coeffs.k_max
                )));
            }
            let (grid, _) = unit_disk_mesh(OBB_GRID_EDGE)?;
            let (rho, phi): (Vec<f64>, Vec<f64>) = grid
                .vertices
                .iter()
                .map(|v| (v.x.hypot(v.y), v.y.atan2(v.x)))
                .unzip();
            let surface = evaluate(coeffs, &rho, &phi, k)?;
            let obb = obb_fit(&surface.points)?;
            let h = obb.half_lengths;
            Ok(FdecFit {
                a: h[0],
                b: h[1],
                c: 2.0 * h[2],
                v_a: obb.rotation.column(0).into_owned().into(),
                v_b: obb.rotation.column(1).into_owned().into(),
                method,
            })
        }
    }
}

fn eigen_fit(coeffs: &HarmonicCoeffs) -> Result<FdecFit> {
    let table = EigenTable::new(1, coeffs.bc)?;
    let s = table.norm(1, 1) * table.eigenvalue(1, 1);
    let q1 = coeffs.get(1, 1);
    // Rows of A: -s Re q_1^1 and -s Im q_1^1.
    let r0 = Vec3::new(q1[0].re, q1[1].re, q1[2].re) * -s;
    let r1 = Vec3::new(q1[0].im, q1[1].im, q1[2].im) * -s;
    let (p, q, r) = (r0.dot(&r0), r0.dot(&r1), r1.dot(&r1));
    // Eigenpairs of the symmetric 2x2 matrix [[p, q], [q, r]].
    let mean = 0.5 * (p + r);
    let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
    let (l1, l2) = (mean + rad, (mean - rad).max(0.0));
    if !(l1 > 0.0) {
        return Err(Error::DegenerateFdec(
            "the order-1 coefficients vanish".into(),
        ));
    }
    let (c1, s1) = if rad == 0.0 {
        (1.0, 0.0)
    } else {
        let t = 0.5 * (2.0 * q).atan2(p - r);
        (t.cos(), t.sin())
    };
    let va = (r0 * c1 + r1 * s1).normalize();
    let mut vb = r0 * -s1 + r1 * c1;
    vb -= va * va.dot(&vb);
    if vb.norm() <= 1e-12 * (r0.norm() + r1.norm()) {
        // b = 0: any unit vector perpendicular to v_a.
        let t = if va.x.abs() < 0.9 {
            Vec3::x()
        } else {
            Vec3::y()
        };
        vb = t - va * va.dot(&t);
    }
    let vb = vb.normalize();
    let q0 = coeffs.get(1, 0);
    let q0_norm = q0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let l01 = table.eigenvalue(0, 1);
    // N_0^1 is negative under Neumann; the depth is reported as a length.
    let c = (2.0 * table.norm(0, 1) * l01 * l01 * q0_norm).abs();
    Ok(FdecFit {
        a: l1.sqrt(),
        b: l2.sqrt(),
        c,
        v_a: va.into(),
        v_b: vb.into(),
        method: FdecMethod::Eigenproblem,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze, uniform_disk_mesh};
    use crate::basis::BoundaryCondition;

    fn elliptic_cap(a: f64, b: f64, depth: f64) -> HarmonicCoeffs {
        let (mut m, p) = uniform_disk_mesh(0.04).unwrap();
        for v in &mut m.vertices {
            let r2 = v.x * v.x + v.y * v.y;
            *v = Vec3::new(a * v.x, b * v.y, depth * (1.0 - r2));
        }
        analyze(&m, &p, 5, BoundaryCondition::Neumann).unwrap()
    }

    #[test]
    fn eigenproblem_sees_the_axis_ratio() {
        let f = fdec_fit(&elliptic_cap(2.0, 1.0, 0.2), FdecMethod::Eigenproblem).unwrap();
        let ratio = (f.a / f.b).powi(2);
        assert!((ratio / 4.0 - 1.0).abs() < 0.1, "{ratio}");
        assert!(f.v_a[0].abs() > 0.99 && f.v_b[1].abs() > 0.99);
        assert!(f.c > 0.0);
    }

    #[test]
    fn obb_sizes_follow_the_surface() {
        let f = fdec_fit(&elliptic_cap(1.5, 1.0, 0.2), FdecMethod::ObbAtK(5)).unwrap();
        // Truncation at k = 5 pulls the rim in by a few percent.
        assert!(
            (f.a / 1.5 - 1.0).abs() < 0.05 && (f.b - 1.0).abs() < 0.05,
            "{f:?}"
        );
        assert!((f.c / 0.2 - 1.0).abs() < 0.05, "{f:?}");
        let m = f.frame();
        assert!((m.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_degree_one_is_degenerate() {
        let c = HarmonicCoeffs::zeros(3, BoundaryCondition::Neumann);
        assert!(matches!(
            fdec_fit(&c, FdecMethod::Eigenproblem),
            Err(Error::DegenerateFdec(_))
        ));
        let c = elliptic_cap(1.0, 1.0, 0.1);
        assert!(fdec_fit(&c, FdecMethod::ObbAtK(6)).is_err());
    }

    #[test]
    fn spherical_curvature_formula() {
        let f = FdecFit {
            a: 20f64.to_radians().sin(),
            b: 20f64.to_radians().sin(),
            c: 1.0 - 20f64.to_radians().cos(),
            v_a: [1.0, 0.0, 0.0],
            v_b: [0.0, 1.0, 0.0],
            method: FdecMethod::ObbAtK(5),
        };
        assert!((f.curvature() - 1.0).abs() < 1e-12);
    }
}
