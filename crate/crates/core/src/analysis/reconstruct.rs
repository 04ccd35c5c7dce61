use super::HarmonicCoeffs;
use crate::basis::{EigenTable, RadialTable};
use crate::error::{invalid, Result};
use crate::mesh::{unit_disk_mesh, TriMesh, Vec3};
use crate::param::DiskParam;
use num_complex::Complex64;

/// Evaluated truncated series at a set of disk points.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub points: Vec<Vec3>,
    /// Largest imaginary part of the complex sum relative to the largest real
    /// coordinate; tiny whenever the coefficients describe a real surface.
    pub imag_residue: f64,
}

/// Evaluates `sum_{k <= k_upto} q_m^k D_m^k(rho, phi)` per axis.
pub fn evaluate(
    coeffs: &HarmonicCoeffs,
    rho: &[f64],
    phi: &[f64],
    k_upto: usize,
) -> Result<Evaluation> {
    if k_upto > coeffs.k_max {
        return Err(invalid(format!(
            "k_upto = {k_upto} exceeds k_max = {}",
            coeffs.k_max
        )));
    }
    if rho.len() != phi.len() {
        return Err(invalid("rho and phi have different lengths"));
    }
    let table = EigenTable::new(k_upto, coeffs.bc)?;
    let rho_max = rho.iter().cloned().fold(1.0, f64::max);
    let radial = RadialTable::new(&table, rho_max);
    let mut rad = vec![0.0; radial.len()];
    let mut points = Vec::with_capacity(rho.len());
    let (mut max_im, mut max_re): (f64, f64) = (0.0, 0.0);
    for (&r, &p) in rho.iter().zip(phi) {
        radial.eval_all(r, &mut rad);
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        for m in 0..=k_upto {
            let e = Complex64::from_polar(1.0, m as f64 * p);
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for k in m..=k_upto {
                let d = e * rad[radial.offset(m) + k - m];
                let qp = coeffs.get(k, m as i64);
                for i in 0..3 {
                    acc[i] += qp[i] * d;
                }
                if m > 0 {
                    let dn = d.conj() * sign;
                    let qn = coeffs.get(k, -(m as i64));
                    for i in 0..3 {
                        acc[i] += qn[i] * dn;
                    }
                }
            }
        }
        for z in &acc {
            max_im = max_im.max(z.im.abs());
            max_re = max_re.max(z.re.abs());
        }
        points.push(Vec3::new(acc[0].re, acc[1].re, acc[2].re));
    }
    let imag_residue = if max_re > 0.0 {
        max_im / max_re
    } else {
        max_im
    };
    Ok(Evaluation {
        points,
        imag_residue,
    })
}

/// The surface truncated at degree `k_upto`, evaluated at the vertices of a
/// disk mesh (`grid` supplies connectivity, `param` the disk coordinates).
pub fn reconstruct(
    coeffs: &HarmonicCoeffs,
    grid: &TriMesh,
    param: &DiskParam,
    k_upto: usize,
) -> Result<TriMesh> {
    if param.len() != grid.num_vertices() {
        return Err(invalid("grid and disk coordinates have different sizes"));
    }
    let e = evaluate(coeffs, &param.rho, &param.phi, k_upto)?;
    Ok(TriMesh {
        vertices: e.points,
        faces: grid.faces.clone(),
        attributes: Default::default(),
    })
}

/// Quasi-uniform triangulation of the unit disk together with its own polar coordinates.
pub fn uniform_disk_mesh(edge: f64) -> Result<(TriMesh, DiskParam)> {
    let (mesh, boundary) = unit_disk_mesh(edge)?;
    let pos: Vec<[f64; 2]> = mesh.vertices.iter().map(|v| [v.x, v.y]).collect();
    Ok((mesh, DiskParam::from_positions(&pos, boundary)))
}
