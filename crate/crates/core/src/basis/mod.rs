//! Fourier-Bessel (disk harmonic) basis on the unit disk.
//!
//! `D_m^k(rho, phi) = N_m^k J_m(l(m)_k rho) e^{i m phi}` where `l(m)_k` is the
//! `(k - m + 1)`-th admissible root for order `m`.

mod bessel;
mod radial;
mod roots;

pub use bessel::{bessel_j, bessel_j_and_prime, bessel_j_prime};
pub use radial::RadialTable;
pub use roots::find_eigenvalues;

use crate::error::{invalid, Error, Result};
use crate::fmt::sig;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Boundary condition at rho = 1 selecting the eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// J'_m(l) = 0.
    #[default]
    Neumann,
    /// J_m(l) = 0.
    Dirichlet,
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Neumann => "neumann",
            BoundaryCondition::Dirichlet => "dirichlet",
        })
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "neumann" => Ok(BoundaryCondition::Neumann),
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            _ => Err(invalid(format!("unknown boundary condition '{s}'"))),
        }
    }
}

/// Eigenvalues and normalisation factors for every `0 <= m <= k <= k_max`.
#[derive(Debug, Clone)]
pub struct EigenTable {
    k_max: usize,
    bc: BoundaryCondition,
    // [m][k - m]
    l: Vec<Vec<f64>>,
    n: Vec<Vec<f64>>,
}

impl EigenTable {
    pub fn new(k_max: usize, bc: BoundaryCondition) -> Result<Self> {
        let mut l = Vec::with_capacity(k_max + 1);
        let mut n = Vec::with_capacity(k_max + 1);
        for m in 0..=k_max {
            let count = k_max - m + 1;
            let row = if m == 0 && bc == BoundaryCondition::Neumann {
                let mut row = vec![0.0];
                if count > 1 {
                    row.extend(find_eigenvalues(0, count - 1, bc)?);
                }
                row
            } else {
                find_eigenvalues(m as u32, count, bc)?
            };
            let norms = row
                .iter()
                .map(|&lk| normalization(m as u32, lk, bc))
                .collect::<Result<Vec<_>>>()?;
            l.push(row);
            n.push(norms);
        }
        Ok(EigenTable { k_max, bc, l, n })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    /// l(m)_k; zero when m > k.
    pub fn eigenvalue(&self, m: usize, k: usize) -> f64 {
        if m > k || k > self.k_max {
            0.0
        } else {
            self.l[m][k - m]
        }
    }

    /// N_m^k; zero when m > k.
    pub fn norm(&self, m: usize, k: usize) -> f64 {
        if m > k || k > self.k_max {
            0.0
        } else {
            self.n[m][k - m]
        }
    }

    /// Largest stored eigenvalue.
    pub fn max_eigenvalue(&self) -> f64 {
        self.l.iter().flatten().cloned().fold(0.0, f64::max)
    }

    /// CSV with header `m,k,l,N`, 15 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,k,l,N\n");
        for m in 0..=self.k_max {
            for k in m..=self.k_max {
                out.push_str(&format!(
                    "{m},{k},{},{}\n",
                    sig(self.eigenvalue(m, k), 15),
                    sig(self.norm(m, k), 15)
                ));
            }
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Normalisation making `N J_m(l rho) e^{i m phi}` unit-norm on the disk.
pub fn normalization(m: u32, l: f64, bc: BoundaryCondition) -> Result<f64> {
    if l == 0.0 {
        return if m == 0 && bc == BoundaryCondition::Neumann {
            Ok(1.0 / PI.sqrt())
        } else {
            Err(invalid(format!(
                "eigenvalue 0 gives a degenerate basis for m = {m}"
            )))
        };
    }
    if !(l > 0.0) {
        return Err(invalid(format!("eigenvalue must be positive, got {l}")));
    }
    Ok(match bc {
        BoundaryCondition::Neumann => {
            let mf = m as f64;
            1.0 / (bessel_j(m, l) * (PI * (1.0 - mf * mf / (l * l))).sqrt())
        }
        BoundaryCondition::Dirichlet => 1.0 / (bessel_j_prime(m, l) * PI.sqrt()),
    })
}

/// D_m^k(rho, phi), with negative orders via `D_{-m} = (-1)^m conj(D_m)`.
pub fn eval_basis(table: &EigenTable, k: usize, m: i32, rho: f64, phi: f64) -> Result<Complex64> {
    let am = m.unsigned_abs() as usize;
    if k > table.k_max || am > k {
        return Err(invalid(format!(
            "basis index (k = {k}, m = {m}) out of range"
        )));
    }
    let r = table.norm(am, k) * bessel_j(am as u32, table.eigenvalue(am, k) * rho);
    let d = Complex64::from_polar(r, am as f64 * phi);
    Ok(if m >= 0 {
        d
    } else if am % 2 == 0 {
        d.conj()
    } else {
        -d.conj()
    })
}

/// Radial and angular wavelengths at degree `k` for a cap of half-axes (a, b, c).
pub fn wavelengths(k: usize, fdec: (f64, f64, f64)) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(invalid("wavelength undefined at k = 0"));
    }
    let (a, b, c) = fdec;
    if a < 0.0 || b < 0.0 || c < 0.0 {
        return Err(invalid("cap sizes must be non-negative"));
    }
    let kf = k as f64;
    let radial = 2.0 * (a * a + b * b + c * c).sqrt() / (kf - 0.25);
    let angular = 2.0 * PI / kf * ((a * a + b * b) / 2.0).sqrt();
    Ok((radial, angular))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_mode() {
        let t = EigenTable::new(3, BoundaryCondition::Neumann).unwrap();
        assert_eq!(t.eigenvalue(0, 0), 0.0);
        assert!((t.norm(0, 0) - 0.564_189_583_547_756_3).abs() < 1e-15);
        let v = eval_basis(&t, 0, 0, 0.37, 2.0).unwrap();
        assert!((v.re - 1.0 / PI.sqrt()).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn absent_entries_are_zero() {
        let t = EigenTable::new(4, BoundaryCondition::Neumann).unwrap();
        assert_eq!(t.eigenvalue(3, 2), 0.0);
        assert_eq!(t.norm(4, 1), 0.0);
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let t = EigenTable::new(2, BoundaryCondition::Neumann).unwrap();
        assert!(eval_basis(&t, 3, 0, 0.5, 0.0).is_err());
        assert!(eval_basis(&t, 1, 2, 0.5, 0.0).is_err());
    }

    #[test]
    fn degenerate_normalisation() {
        assert!(normalization(1, 0.0, BoundaryCondition::Neumann).is_err());
        assert!(normalization(0, 0.0, BoundaryCondition::Dirichlet).is_err());
    }

    #[test]
    fn wavelength_formulae() {
        let (r, a) = wavelengths(1, (1.0, 0.0, 0.0)).unwrap();
        assert!((r - 8.0 / 3.0).abs() < 1e-15);
        assert!((a - 2.0 * PI * 0.5f64.sqrt()).abs() < 1e-15);
        let (_, a2) = wavelengths(2, (1.0, 0.0, 0.0)).unwrap();
        assert!((a2 - a / 2.0).abs() < 1e-15);
        assert!(wavelengths(0, (1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn boundary_condition_parsing() {
        assert_eq!(
            "Neumann".parse::<BoundaryCondition>().unwrap(),
            BoundaryCondition::Neumann
        );
        assert_eq!(
            "dirichlet".parse::<BoundaryCondition>().unwrap(),
            BoundaryCondition::Dirichlet
        );
        assert!("robin".parse::<BoundaryCondition>().is_err());
    }

    #[test]
    fn csv_export_shape() {
        let t = EigenTable::new(2, BoundaryCondition::Neumann).unwrap();
        let csv = t.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "m,k,l,N");
        assert_eq!(lines.len(), 1 + 6);
        assert!(lines[2].starts_with("0,1,3.83170597020751,"));
    }
}
