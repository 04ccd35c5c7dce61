use crate::error::{invalid, Result};
use crate::mesh::{TriMesh, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

/// Isotropic power-law spectrum and generation settings.
///
/// Wavevectors are in units of the fundamental mode of the grid (the grid
/// spans an extent of 2 pi), so `q_s = n / 2` reaches the Nyquist limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSpec {
    #[serde(rename = "H")]
    pub hurst: f64,
    pub q_r: f64,
    pub q_l: f64,
    pub q_s: f64,
    pub rms: f64,
    pub seed: u64,
    pub n: usize,
    /// Multiply each spectral amplitude by Rayleigh noise of unit mean square.
    #[serde(default)]
    pub rayleigh: bool,
}

impl PowerLawSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(invalid(format!("H must lie in (0, 1), got {}", self.hurst)));
        }
        if !(0.0 <= self.q_r && self.q_r <= self.q_l && self.q_l < self.q_s) {
            return Err(invalid("wavevectors must satisfy 0 <= q_r <= q_l < q_s"));
        }
        if !(self.rms > 0.0 && self.rms.is_finite()) {
            return Err(invalid("rms must be positive"));
        }
        if !self.n.is_power_of_two() || self.n < 64 {
            return Err(invalid(format!(
                "grid size must be a power of two >= 64, got {}",
                self.n
            )));
        }
        Ok(())
    }
}

/// `C(q)`: zero below `q_r`, flat up to `q_l`, `q^{-2(1+H)}` up to `q_s`, zero beyond.
pub fn iso_power_law(q: f64, spec: &PowerLawSpec) -> f64 {
    let e = -2.0 * (1.0 + spec.hurst);
    if q < spec.q_r || q >= spec.q_s {
        0.0
    } else if q <= spec.q_l {
        spec.q_l.powf(e)
    } else {
        q.powf(e)
    }
}

/// Square periodic height map, row-major (`heights[iy * n + ix]`).
#[derive(Debug, Clone, PartialEq)]
pub struct HeightGrid {
    pub n: usize,
    /// Side length of the grid.
    pub extent: f64,
    pub heights: Vec<f64>,
    pub periodic: bool,
    pub spec: Option<PowerLawSpec>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    n: usize,
    extent: f64,
    rms: f64,
    seed: Option<u64>,
    #[serde(rename = "H")]
    hurst: Option<f64>,
    q_r: Option<f64>,
    q_l: Option<f64>,
    q_s: Option<f64>,
    #[serde(default)]
    rayleigh: bool,
}

/// Fourier-filter synthesis: amplitudes `sqrt(C(|q|))` with uniform random
/// phases, Hermitian symmetric so the surface is real, zero mean, rescaled to
/// `spec.rms`.
pub fn generate_surface(spec: &PowerLawSpec) -> Result<HeightGrid> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let freq = |i: usize| {
        if i <= n / 2 {
            i as f64
        } else {
            i as f64 - n as f64
        }
    };
    let mut field = vec![Complex64::new(0.0, 0.0); n * n];
    for iy in 0..n {
        for ix in 0..n {
            let (py, px) = ((n - iy) % n, (n - ix) % n);
            if (iy, ix) > (py, px) {
                continue;
            }
            let q = freq(ix).hypot(freq(iy));
            let mut amp = iso_power_law(q, spec).sqrt();
            let phase = rng.random::<f64>() * TAU;
            if spec.rayleigh {
                let u: f64 = rng.random();
                amp *= (-(1.0 - u).ln()).sqrt();
            }
            if (iy, ix) == (0, 0) {
                continue;
            }
            if (iy, ix) == (py, px) {
                // Self-conjugate entries must be real.
                field[iy * n + ix] = Complex64::new(amp * phase.cos().signum(), 0.0);
            } else {
                let z = Complex64::from_polar(amp, phase);
                field[iy * n + ix] = z;
                field[py * n + px] = z.conj();
            }
        }
    }
    let fft = FftPlanner::new().plan_fft_inverse(n);
    fft.process(&mut field);
    transpose(&mut field, n);
    fft.process(&mut field);
    transpose(&mut field, n);
    let mut heights: Vec<f64> = field.iter().map(|z| z.re).collect();
    let mean = heights.iter().sum::<f64>() / heights.len() as f64;
    heights.iter_mut().for_each(|h| *h -= mean);
    let rms = (heights.iter().map(|h| h * h).sum::<f64>() / heights.len() as f64).sqrt();
    if rms > 0.0 {
        let s = spec.rms / rms;
        heights.iter_mut().for_each(|h| *h *= s);
    }
    Ok(HeightGrid {
        n,
        extent: TAU,
        heights,
        periodic: true,
        spec: Some(*spec),
    })
}

fn transpose(a: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            a.swap(i * n + j, j * n + i);
        }
    }
}

impl HeightGrid {
    pub fn spacing(&self) -> f64 {
        self.extent / self.n as f64
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.heights[iy * self.n + ix]
    }

    pub fn rms(&self) -> f64 {
        (self.heights.iter().map(|h| h * h).sum::<f64>() / self.heights.len() as f64).sqrt()
    }

    /// Grid nodes as a triangulated surface in physical units.
    pub fn to_mesh(&self) -> TriMesh {
        let n = self.n;
        let dx = self.spacing();
        let vertices = (0..n * n)
            .map(|i| Vec3::new((i % n) as f64 * dx, (i / n) as f64 * dx, self.heights[i]))
            .collect();
        let mut faces = Vec::with_capacity(2 * (n - 1) * (n - 1));
        for iy in 0..n - 1 {
            for ix in 0..n - 1 {
                let a = iy * n + ix;
                faces.push([a, a + 1, a + n + 1]);
                faces.push([a, a + n + 1, a + n]);
            }
        }
        TriMesh {
            vertices,
            faces,
            attributes: Default::default(),
        }
    }

    fn sidecar_path(bin: &Path) -> PathBuf {
        bin.with_extension("json")
    }

    /// Writes little-endian f32 heights to `bin` and the metadata next to it
    /// (same name, `.json` extension).
    pub fn save(&self, bin: impl AsRef<Path>) -> Result<()> {
        let bin = bin.as_ref();
        let mut w = std::io::BufWriter::new(std::fs::File::create(bin)?);
        for h in &self.heights {
            w.write_all(&(*h as f32).to_le_bytes())?;
        }
        w.flush()?;
        let s = self.spec;
        let side = Sidecar {
            n: self.n,
            extent: self.extent,
            rms: self.rms(),
            seed: s.map(|s| s.seed),
            hurst: s.map(|s| s.hurst),
            q_r: s.map(|s| s.q_r),
            q_l: s.map(|s| s.q_l),
            q_s: s.map(|s| s.q_s),
            rayleigh: s.is_some_and(|s| s.rayleigh),
        };
        std::fs::write(
            Self::sidecar_path(bin),
            serde_json::to_string_pretty(&side)? + "\n",
        )?;
        Ok(())
    }

    pub fn load(bin: impl AsRef<Path>) -> Result<Self> {
        let bin = bin.as_ref();
        let side: Sidecar =
            serde_json::from_str(&std::fs::read_to_string(Self::sidecar_path(bin))?)?;
        let mut bytes = Vec::new();
        std::fs::File::open(bin)?.read_to_end(&mut bytes)?;
        if bytes.len() != 4 * side.n * side.n {
            return Err(invalid(format!(
                "{} holds {} bytes, expected {}",
                bin.display(),
                bytes.len(),
                4 * side.n * side.n
            )));
        }
        let heights = bytes
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
            .collect();
        let spec = match (side.hurst, side.q_r, side.q_l, side.q_s, side.seed) {
            (Some(hurst), Some(q_r), Some(q_l), Some(q_s), Some(seed)) => Some(PowerLawSpec {
                hurst,
                q_r,
                q_l,
                q_s,
                rms: side.rms,
                seed,
                n: side.n,
                rayleigh: side.rayleigh,
            }),
            _ => None,
        };
        Ok(HeightGrid {
            n: side.n,
            extent: side.extent,
            heights,
            periodic: true,
            spec,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(seed: u64) -> PowerLawSpec {
        PowerLawSpec {
            hurst: 0.9,
            q_r: 0.0,
            q_l: 4.0,
            q_s: 32.0,
            rms: 2.0,
            seed,
            n: 64,
            rayleigh: false,
        }
    }

    #[test]
    fn power_law_branches() {
        let s = PowerLawSpec {
            q_r: 1.0,
            q_s: 256.0,
            ..spec(0)
        };
        assert_eq!(iso_power_law(0.5, &s), 0.0);
        assert_eq!(iso_power_law(2.0, &s), 4f64.powf(-3.8));
        assert_eq!(iso_power_law(4.0, &s), 4f64.powf(-3.8));
        assert_eq!(iso_power_law(8.0, &s), 8f64.powf(-3.8));
        assert_eq!(iso_power_law(256.0, &s), 0.0);
    }

    #[test]
    fn deterministic_zero_mean_and_rms() {
        let a = generate_surface(&spec(7)).unwrap();
        let b = generate_surface(&spec(7)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.heights, generate_surface(&spec(8)).unwrap().heights);
        assert!((a.rms() - 2.0).abs() < 1e-12);
        assert!(a.heights.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn validation() {
        assert!(generate_surface(&PowerLawSpec { n: 100, ..spec(0) }).is_err());
        assert!(generate_surface(&PowerLawSpec {
            hurst: 1.0,
            ..spec(0)
        })
        .is_err());
        assert!(generate_surface(&PowerLawSpec {
            q_l: 40.0,
            ..spec(0)
        })
        .is_err());
    }
}
