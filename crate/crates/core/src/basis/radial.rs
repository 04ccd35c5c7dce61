//! Piecewise Chebyshev interpolants of the normalised radial profiles
//! `N_m^k J_m(l(m)_k rho)`, for evaluating the whole basis at many points.

use super::{bessel_j, EigenTable};
use std::f64::consts::PI;

const DEGREE: usize = 16;
// Width of one piece measured in Bessel argument units.
const ARG_WIDTH: f64 = 3.0;

/// All radial profiles of an [`EigenTable`], tabulated on `[0, rho_max]`.
///
/// Profiles are ordered m-major with k ascending: `(0,0), (0,1), ..., (0,K),
/// (1,1), ..., (K,K)`. Use [`RadialTable::offset`] to find the block of order m.
#[derive(Debug, Clone)]
pub struct RadialTable {
    k_max: usize,
    rho_max: f64,
    pieces: usize,
    width: f64,
    count: usize,
    offsets: Vec<usize>,
    // [piece][profile][degree + 1]
    coeffs: Vec<f64>,
}

impl RadialTable {
    pub fn new(table: &EigenTable, rho_max: f64) -> Self {
        let k_max = table.k_max();
        let rho_max = rho_max.max(1.0);
        let pieces = ((table.max_eigenvalue() * rho_max / ARG_WIDTH).ceil() as usize).max(1);
        let width = rho_max / pieces as f64;
        let mut offsets = Vec::with_capacity(k_max + 2);
        let mut count = 0;
        for m in 0..=k_max {
            offsets.push(count);
            count += k_max + 1 - m;
        }
        offsets.push(count);

        let nodes: Vec<f64> = (0..=DEGREE)
            .map(|i| (PI * (i as f64 + 0.5) / (DEGREE + 1) as f64).cos())
            .collect();
        // cheb[j][i] = T_j(node_i)
        let cheb: Vec<Vec<f64>> = (0..=DEGREE)
            .map(|j| nodes.iter().map(|&t| (j as f64 * t.acos()).cos()).collect())
            .collect();

        let stride = DEGREE + 1;
        let mut coeffs = vec![0.0; pieces * count * stride];
        let mut values = vec![0.0; stride];
        for m in 0..=k_max {
            for k in m..=k_max {
                let l = table.eigenvalue(m, k);
                let n = table.norm(m, k);
                let f = offsets[m] + k - m;
                for p in 0..pieces {
                    let a = p as f64 * width;
                    for (v, &t) in values.iter_mut().zip(&nodes) {
                        let rho = a + 0.5 * (t + 1.0) * width;
                        *v = n * bessel_j(m as u32, l * rho);
                    }
                    let dst = &mut coeffs[(p * count + f) * stride..][..stride];
                    for (j, c) in dst.iter_mut().enumerate() {
                        let s: f64 = values.iter().zip(&cheb[j]).map(|(v, t)| v * t).sum();
                        *c = s * 2.0 / stride as f64;
                    }
                    dst[0] *= 0.5;
                }
            }
        }
        RadialTable {
            k_max,
            rho_max,
            pieces,
            width,
            count,
            offsets,
            coeffs,
        }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// Number of radial profiles, `(K+1)(K+2)/2`.
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Index of profile (m, m) in the output of [`RadialTable::eval_all`].
    pub fn offset(&self, m: usize) -> usize {
        self.offsets[m]
    }

    /// Evaluates every profile at `rho` into `out` (length [`RadialTable::len`]).
    pub fn eval_all(&self, rho: f64, out: &mut [f64]) {
        assert_eq!(out.len(), self.count);
        let rho = rho.clamp(0.0, self.rho_max);
        let p = ((rho / self.width) as usize).min(self.pieces - 1);
        let t = 2.0 * (rho - p as f64 * self.width) / self.width - 1.0;
        let mut tv = [0.0; DEGREE + 1];
        tv[0] = 1.0;
        tv[1] = t;
        for j in 2..=DEGREE {
            tv[j] = 2.0 * t * tv[j - 1] - tv[j - 2];
        }
        let stride = DEGREE + 1;
        let block = &self.coeffs[p * self.count * stride..][..self.count * stride];
        for (o, c) in out.iter_mut().zip(block.chunks_exact(stride)) {
            let mut s = 0.0;
            for j in 0..stride {
                s += c[j] * tv[j];
            }
            *o = s;
        }
    }
}
