use crate::basis::BoundaryCondition;
use crate::error::{invalid, Result};
use crate::fmt::round_sig;
use crate::mesh::Vec3;
use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Disk-harmonic coefficients of a surface: one complex 3-vector per (k, m),
/// stored at index `k^2 + k + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoeffs {
    pub k_max: usize,
    pub bc: BoundaryCondition,
    pub q: Vec<[Complex64; 3]>,
    /// Residual norm of the fit per axis.
    pub residual: [f64; 3],
    /// Condition estimate of the normal matrix of the fit.
    pub condition: f64,
    pub warnings: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CoeffRecord {
    k: usize,
    m: i64,
    re: [f64; 3],
    im: [f64; 3],
}

#[derive(Serialize, Deserialize)]
struct CoeffFile {
    k_max: usize,
    bc: BoundaryCondition,
    axes: Vec<String>,
    coeffs: Vec<CoeffRecord>,
    #[serde(default)]
    residual: Option<[f64; 3]>,
    #[serde(default)]
    condition: Option<f64>,
    #[serde(default)]
    warnings: Vec<String>,
}

impl HarmonicCoeffs {
    /// All-zero coefficients up to degree `k_max`.
    pub fn zeros(k_max: usize, bc: BoundaryCondition) -> Self {
        HarmonicCoeffs {
            k_max,
            bc,
            q: vec![[Complex64::new(0.0, 0.0); 3]; (k_max + 1) * (k_max + 1)],
            residual: [0.0; 3],
            condition: 1.0,
            warnings: Vec::new(),
        }
    }

    /// Storage index of (k, m).
    pub fn index(k: usize, m: i64) -> usize {
        debug_assert!(m.unsigned_abs() as usize <= k);
        ((k * k + k) as i64 + m) as usize
    }

    pub fn get(&self, k: usize, m: i64) -> [Complex64; 3] {
        self.q[Self::index(k, m)]
    }

    pub fn set(&mut self, k: usize, m: i64, value: [Complex64; 3]) {
        let i = Self::index(k, m);
        self.q[i] = value;
    }

    /// Sets q_m^k and its partner q_{-m}^k so the described signal is real.
    pub fn set_real_pair(&mut self, k: usize, m: usize, value: [Complex64; 3]) {
        self.set(k, m as i64, value);
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        self.set(k, -(m as i64), value.map(|z| z.conj() * sign));
    }

    /// Coefficients of degree at most `k`.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k > self.k_max {
            return Err(invalid(format!(
                "truncation degree {k} exceeds k_max {}",
                self.k_max
            )));
        }
        let mut out = self.clone();
        out.k_max = k;
        out.q.truncate((k + 1) * (k + 1));
        Ok(out)
    }

    /// Coefficients of the rotated surface `x -> R x`.
    pub fn rotated(&self, r: &Matrix3<f64>) -> Self {
        let mut out = self.clone();
        for q in &mut out.q {
            let re = r * Vec3::new(q[0].re, q[1].re, q[2].re);
            let im = r * Vec3::new(q[0].im, q[1].im, q[2].im);
            *q = [0, 1, 2].map(|i| Complex64::new(re[i], im[i]));
        }
        out
    }

    /// Largest violation of `q_{-m} = (-1)^m conj(q_m)` over all entries and axes.
    pub fn reality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..=self.k_max {
            for m in 1..=k {
                let a = self.get(k, m as i64);
                let b = self.get(k, -(m as i64));
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                for i in 0..3 {
                    worst = worst.max((b[i] - a[i].conj() * sign).norm());
                }
            }
            for i in 0..3 {
                worst = worst.max(self.get(k, 0)[i].im.abs());
            }
        }
        worst
    }

    /// JSON document `{k_max, bc, axes, coeffs: [{k, m, re, im}], ...}` with 15 significant digits.
    pub fn to_json(&self) -> String {
        let r = |x: f64| round_sig(x, 15);
        let mut coeffs = Vec::with_capacity(self.q.len());
        for k in 0..=self.k_max {
            for m in -(k as i64)..=k as i64 {
                let q = self.get(k, m);
                coeffs.push(CoeffRecord {
                    k,
                    m,
                    re: q.map(|z| r(z.re)),
                    im: q.map(|z| r(z.im)),
                });
            }
        }
        let file = CoeffFile {
            k_max: self.k_max,
            bc: self.bc,
            axes: ["x", "y", "z"].map(String::from).to_vec(),
            coeffs,
            residual: Some(self.residual.map(r)),
            condition: Some(r(self.condition)),
            warnings: self.warnings.clone(),
        };
        serde_json::to_string_pretty(&file).expect("coefficients serialise")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CoeffFile = serde_json::from_str(text)?;
        if file.axes != ["x", "y", "z"] {
            return Err(invalid("coefficient axes must be [\"x\", \"y\", \"z\"]"));
        }
        let mut out = HarmonicCoeffs::zeros(file.k_max, file.bc);
        for c in file.coeffs {
            if c.k > file.k_max || c.m.unsigned_abs() as usize > c.k {
                return Err(invalid(format!(
                    "coefficient (k = {}, m = {}) out of range",
                    c.k, c.m
                )));
            }
            out.set(
                c.k,
                c.m,
                [0, 1, 2].map(|i| Complex64::new(c.re[i], c.im[i])),
            );
        }
        out.residual = file.residual.unwrap_or([0.0; 3]);
        out.condition = file.condition.unwrap_or(1.0);
        out.warnings = file.warnings;
        Ok(out)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
