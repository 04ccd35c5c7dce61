use crate::analysis::{descriptors, HarmonicCoeffs};
use crate::basis::EigenTable;
use crate::error::{invalid, Error, Result};
use crate::fmt::sig;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Points below this fraction of the largest in-range PSD value are left out of fits.
pub const DEFAULT_FLOOR: f64 = 1e-8;

/// Which m = 0 power to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumAxis {
    X,
    Y,
    Z,
    /// Curvature-normalised resultant over the three axes, for curved surfaces.
    Normalized,
}

/// Power-law fit `psd = exp(intercept) * lambda^slope`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstFit {
    pub slope: f64,
    pub intercept: f64,
    #[serde(rename = "H")]
    pub hurst: f64,
    pub k_min: usize,
    pub k_max: usize,
    pub n_excluded: usize,
}

/// m = 0 power per degree against `lambda = l(0)_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub axis: SpectrumAxis,
    pub k: Vec<usize>,
    pub lambda: Vec<f64>,
    pub psd: Vec<f64>,
    /// Whether each point took part in the last fit.
    pub included: Vec<bool>,
    pub fit: Option<HurstFit>,
}

pub fn psd_m0(coeffs: &HarmonicCoeffs, table: &EigenTable, axis: SpectrumAxis) -> Result<Spectrum> {
    if table.bc() != coeffs.bc || table.k_max() < coeffs.k_max {
        return Err(invalid("eigenvalue table does not match the coefficients"));
    }
    let (k, psd): (Vec<usize>, Vec<f64>) = match axis {
        SpectrumAxis::Normalized => {
            let d = descriptors(coeffs);
            if !d.available_axes.iter().any(|&a| a) {
                return Err(Error::DegenerateFdec(
                    "no axis has a degree-1 amplitude to normalise by".into(),
                ));
            }
            (2..=coeffs.k_max)
                .map(|k| (k, d.normalized_m0[k].unwrap_or(0.0).powi(2)))
                .unzip()
        }
        _ => {
            let i = match axis {
                SpectrumAxis::X => 0,
                SpectrumAxis::Y => 1,
                _ => 2,
            };
            (0..=coeffs.k_max)
                .map(|k| (k, coeffs.get(k, 0)[i].norm_sqr()))
                .unzip()
        }
    };
    let lambda = k.iter().map(|&k| table.eigenvalue(0, k)).collect();
    let included = vec![false; k.len()];
    Ok(Spectrum {
        axis,
        k,
        lambda,
        psd,
        included,
        fit: None,
    })
}

pub fn fit_hurst(spectrum: &Spectrum, k_min: usize, k_max: usize) -> Result<Spectrum> {
    fit_hurst_with_floor(spectrum, k_min, k_max, DEFAULT_FLOOR)
}

/// Least squares on `(ln lambda, ln psd)` over `k_min..=k_max`, leaving out
/// points below `floor` times the largest value in range; `H = -slope/2 - 3/4`.
pub fn fit_hurst_with_floor(
    spectrum: &Spectrum,
    k_min: usize,
    k_max: usize,
    floor: f64,
) -> Result<Spectrum> {
    if k_min < 2 || k_max < k_min {
        return Err(invalid(format!(
            "fit range {k_min}..={k_max} must start at k >= 2"
        )));
    }
    let in_range: Vec<usize> = (0..spectrum.k.len())
        .filter(|&i| (k_min..=k_max).contains(&spectrum.k[i]))
        .collect();
    let top = in_range
        .iter()
        .map(|&i| spectrum.psd[i])
        .fold(0.0, f64::max);
    let mut included = vec![false; spectrum.k.len()];
    let mut pts = Vec::new();
    for &i in &in_range {
        let (l, p) = (spectrum.lambda[i], spectrum.psd[i]);
        if p > floor * top && p > 0.0 && l > 0.0 {
            included[i] = true;
            pts.push((l.ln(), p.ln()));
        }
    }
    if pts.len() < 5 {
        return Err(invalid(format!(
            "only {} usable points in the fit range (need 5)",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let fit = HurstFit {
        slope,
        intercept,
        hurst: -slope / 2.0 - 0.75,
        k_min,
        k_max,
        n_excluded: in_range.len() - pts.len(),
    };
    Ok(Spectrum {
        included,
        fit: Some(fit),
        ..spectrum.clone()
    })
}

impl Spectrum {
    /// CSV with header `k,lambda,psd,included_in_fit`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,lambda,psd,included_in_fit\n");
        for i in 0..self.k.len() {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                self.k[i],
                sig(self.lambda[i], 15),
                sig(self.psd[i], 15),
                self.included[i]
            );
        }
        s
    }

    /// Reads a CSV written by [`Spectrum::to_csv`] (the last column is optional).
    pub fn from_csv(text: &str, axis: SpectrumAxis) -> Result<Self> {
        let mut out = Spectrum {
            axis,
            k: vec![],
            lambda: vec![],
            psd: vec![],
            included: vec![],
            fit: None,
        };
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = || Error::Parse {
                path: "spectrum".into(),
                line: i + 1,
                msg: format!("bad row '{line}'"),
            };
            if f.len() < 3 {
                return Err(bad());
            }
            out.k.push(f[0].parse().map_err(|_| bad())?);
            out.lambda.push(f[1].parse().map_err(|_| bad())?);
            out.psd.push(f[2].parse().map_err(|_| bad())?);
            out.included.push(f.get(3).is_some_and(|v| *v == "true"));
        }
        Ok(out)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(slope: f64, a: f64) -> Spectrum {
        let k: Vec<usize> = (0..40).collect();
        let lambda: Vec<f64> = k
            .iter()
            .map(|&k| std::f64::consts::PI * (k as f64 + 0.25))
            .collect();
        let psd = lambda.iter().map(|l| a * l.powf(slope)).collect();
        Spectrum {
            axis: SpectrumAxis::Z,
            k,
            lambda,
            psd,
            included: vec![false; 40],
            fit: None,
        }
    }

    #[test]
    fn exact_power_law() {
        let s = fit_hurst(&exact(-3.1, 2.5), 2, 39).unwrap();
        let f = s.fit.unwrap();
        assert!((f.slope + 3.1).abs() < 1e-12);
        assert!((f.intercept - 2.5f64.ln()).abs() < 1e-12);
        assert!((f.hurst - 0.8).abs() < 1e-12);
        assert_eq!(f.hurst + f.slope / 2.0 + 0.75, 0.0);
    }

    #[test]
    fn floor_excludes_zeros_and_short_ranges_fail() {
        let mut s = exact(-2.0, 1.0);
        s.psd[10] = 0.0;
        s.psd[11] = 1e-30;
        let f = fit_hurst(&s, 2, 39).unwrap();
        assert_eq!(f.fit.as_ref().unwrap().n_excluded, 2);
        assert!(!f.included[10] && f.included[12]);
        assert!(fit_hurst(&s, 2, 5).is_err());
        assert!(fit_hurst(&s, 1, 30).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = fit_hurst(&exact(-3.0, 1.0), 2, 20).unwrap();
        let back = Spectrum::from_csv(&s.to_csv(), SpectrumAxis::Z).unwrap();
        assert_eq!(back.k, s.k);
        assert_eq!(back.included, s.included);
    }
}
