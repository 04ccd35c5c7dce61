use super::{fdec_fit, FdecMethod, HarmonicCoeffs};
use crate::error::Result;
use crate::fmt::sig;
use nalgebra::Matrix3;
use std::fmt::Write as _;
use std::path::Path;

/// Rotation-invariant shape descriptors per degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptors {
    /// `D^_{k,i} = sqrt(sum_m |q_{m,i}^k|^2)` on the world axes.
    pub per_axis: Vec<[f64; 3]>,
    /// `D^_k`, the Euclidean norm of `per_axis[k]`.
    pub resultant: Vec<f64>,
    /// Columns are the FDEC principal directions used for normalisation.
    pub frame: Matrix3<f64>,
    /// Per-axis amplitudes in `frame`.
    pub frame_axes: Vec<[f64; 3]>,
    /// Axes of `frame` whose degree-1 amplitude is non-zero.
    pub available_axes: [bool; 3],
    /// `D_k^2 = sum_i D^'_{k,i}^2 / D^'_{1,i}^2`, for k > 1.
    pub normalized: Vec<Option<f64>>,
    /// As `normalized`, keeping only the m = 0 coefficients of degree k.
    pub normalized_m0: Vec<Option<f64>>,
    pub warnings: Vec<String>,
}

fn amplitudes(
    coeffs: &HarmonicCoeffs,
    k: usize,
    m_range: std::ops::RangeInclusive<i64>,
) -> [f64; 3] {
    let mut s = [0.0; 3];
    for m in m_range {
        let q = coeffs.get(k, m);
        for i in 0..3 {
            s[i] += q[i].norm_sqr();
        }
    }
    s.map(f64::sqrt)
}

pub fn descriptors(coeffs: &HarmonicCoeffs) -> Descriptors {
    let kk = coeffs.k_max;
    let full = |c: &HarmonicCoeffs, k: usize| amplitudes(c, k, -(k as i64)..=k as i64);
    let per_axis: Vec<[f64; 3]> = (0..=kk).map(|k| full(coeffs, k)).collect();
    let resultant = per_axis
        .iter()
        .map(|d| d.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();

    let mut warnings = Vec::new();
    let frame = match fdec_fit(coeffs, FdecMethod::Eigenproblem) {
        Ok(f) => f.frame(),
        Err(e) => {
            warnings.push(format!("{e}; normalising along the world axes"));
            Matrix3::identity()
        }
    };
    let local = coeffs.rotated(&frame.transpose());
    let frame_axes: Vec<[f64; 3]> = (0..=kk).map(|k| full(&local, k)).collect();

    let mut available_axes = [false; 3];
    let mut normalized = vec![None; kk + 1];
    let mut normalized_m0 = vec![None; kk + 1];
    if kk >= 1 {
        let d1 = frame_axes[1];
        let top = d1.iter().cloned().fold(0.0, f64::max);
        available_axes = d1.map(|d| d > 1e-12 * top && d > 0.0);
        for (i, ok) in available_axes.iter().enumerate() {
            if !ok {
                warnings.push(format!(
                    "degree-1 amplitude vanishes on frame axis {i}; normalised descriptors omit it"
                ));
            }
        }
        if available_axes.iter().any(|&a| a) {
            for k in 2..=kk {
                let m0 = amplitudes(&local, k, 0..=0);
                let (mut s, mut s0) = (0.0, 0.0);
                for i in 0..3 {
                    if available_axes[i] {
                        s += (frame_axes[k][i] / d1[i]).powi(2);
                        s0 += (m0[i] / d1[i]).powi(2);
                    }
                }
                normalized[k] = Some(s.sqrt());
                normalized_m0[k] = Some(s0.sqrt());
            }
        }
    }
    Descriptors {
        per_axis,
        resultant,
        frame,
        frame_axes,
        available_axes,
        normalized,
        normalized_m0,
        warnings,
    }
}

impl Descriptors {
    /// CSV with header `k,Dx,Dy,Dz,D,Dnorm`; `Dnorm` is empty where undefined.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,Dx,Dy,Dz,D,Dnorm\n");
        for (k, d) in self.per_axis.iter().enumerate() {
            let norm = self.normalized[k].map(|x| sig(x, 15)).unwrap_or_default();
            let _ = writeln!(
                s,
                "{k},{},{},{},{},{norm}",
                sig(d[0], 15),
                sig(d[1], 15),
                sig(d[2], 15),
                sig(self.resultant[k], 15)
            );
        }
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}
